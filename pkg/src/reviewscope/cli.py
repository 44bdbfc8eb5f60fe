"""Command-line entry point.

Subcommands::

    reviewscope calibrate        judge error rates + Wilson CIs
    reviewscope agreement        inter-annotator agreement per rubric axis
    reviewscope score            benchmark scoring -> leaderboard
    reviewscope overlap          corrected cross-reviewer overlap report
    reviewscope simulate-panels  panel composition metrics table

Every command is deterministic given ``--seed`` and a mock judge; a run
manifest (resolved configuration plus input digests) is written alongside
every output artifact, and all file writes are atomic
(write-temp-then-rename). Exit codes: 0 success, 2 input or schema error,
3 judge transport failure, 4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

from . import __version__
from .bench import aggregate_leaderboard, build_rubric, render_leaderboard, score_paper
from .corpus import (
    AnnotationDataset,
    CORRECT,
    CORRECTNESS_LABELS,
    EVIDENCE_LABELS,
    MARGINALLY_SIGNIFICANT,
    SIGNIFICANCE_LABELS,
    SIGNIFICANT,
    SUFFICIENT,
    ItemId,
    Review,
    bundle_context_text,
    iter_review_files,
    load_annotation_dataset,
    load_paper_bundle,
    load_review_file,
)
from .errors import InputError, JudgeFailure, ReviewScopeError
from .judge import (
    ENV_MODEL,
    ENV_TOKEN,
    ENV_URL,
    Judge,
    MockBackend,
    RemoteBackend,
    TemplateSet,
    VerdictCache,
    parse_meta_review_document,
)
from .panelsim import (
    ALL_COMPOSITIONS,
    PanelSpec,
    build_panel_data,
    complete_papers,
    panel_metrics,
    render_metrics_table,
)
from .rubric import is_fully_positive
from .similarity import (
    corrected_distribution,
    corrected_prevalence_ci,
    error_rates,
    load_calibration_file,
    load_verdict_dump,
    verdict_table,
)
from .stats import (
    BootstrapConfig,
    cohen_kappa,
    derive_seed,
    gwet_ac1,
    percent_agreement,
    wilson_ci,
)
from .errors import DegenerateMarginals, SingleCategoryVocabulary


# ---------------------------------------------------------------------------
# Output plumbing
# ---------------------------------------------------------------------------

def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(f".{path.name}.{os.getpid()}.tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def file_digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(
    out_dir: Path, command: str, config: dict, inputs: dict[str, str]
) -> None:
    manifest = {
        "command": command,
        "tool_version": __version__,
        "config": config,
        "inputs": {name: file_digest(p) for name, p in sorted(inputs.items())},
    }
    atomic_write(
        out_dir / "manifest.json",
        json.dumps(manifest, sort_keys=True, indent=2) + "\n",
    )


def _load_meta_label_file(path: str | Path) -> dict[ItemId, dict]:
    """Meta labels: line-delimited meta-review documents, one paper each."""
    labels: dict[ItemId, dict] = {}
    for lineno, line in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), start=1
    ):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from None
        for item_id, entry in parse_meta_review_document(obj).items():
            if item_id in labels:
                raise InputError(f"{path}:{lineno}: duplicate meta labels for {item_id}")
            labels[item_id] = entry
    return labels


def _build_judge(args) -> Judge:
    templates = TemplateSet(args.template_dir)
    cache = VerdictCache(args.cache_dir) if args.cache_dir else None
    if args.judge == "mock":
        similarity = {}
        if args.verdicts:
            similarity = verdict_table(load_verdict_dump(args.verdicts))
        meta = {}
        if getattr(args, "meta_labels", None):
            meta = {
                item_id: dict(entry)
                for item_id, entry in _load_meta_label_file(args.meta_labels).items()
            }
        backend = MockBackend(similarity=similarity, meta=meta, default_ordinal=0)
        # The mock is instantaneous; skip retry backoff sleeps entirely.
        return Judge(backend, templates=templates, cache=cache, sleep=lambda _: None)
    backend = RemoteBackend()
    return Judge(backend, templates=templates, cache=cache)


# ---------------------------------------------------------------------------
# calibrate
# ---------------------------------------------------------------------------

def cmd_calibrate(args) -> int:
    calibration = load_calibration_file(args.calibration)
    sens, spec = error_rates(calibration)
    sens_ci = wilson_ci(calibration.tp, calibration.tp + calibration.fn)
    spec_ci = wilson_ci(calibration.tn, calibration.fp + calibration.tn)
    correct = calibration.tp + calibration.tn
    acc_ci = wilson_ci(correct, calibration.total)
    for name, point, ci in (
        ("sensitivity", sens, sens_ci),
        ("specificity", spec, spec_ci),
        ("accuracy", correct / calibration.total, acc_ci),
    ):
        print(f"{name}\t{point:.3f}\t[{ci.lower:.3f}, {ci.upper:.3f}]")
    return 0


# ---------------------------------------------------------------------------
# agreement
# ---------------------------------------------------------------------------

def _axis_pairs(dataset: AnnotationDataset):
    """Per-axis label pairs over dual-annotated items, with the cascade
    shrinking the denominator axis by axis."""
    correctness, significance, evidence = [], [], []
    for paper in dataset.papers:
        for item, records in sorted(dataset.records_by_item(paper).items()):
            if len(records) < 2:
                continue
            a, b = sorted(records, key=lambda r: r.annotator_id)[:2]
            correctness.append((a.correctness, b.correctness))
            if a.correctness == CORRECT and b.correctness == CORRECT:
                significance.append((a.significance, b.significance))
                deep = (SIGNIFICANT, MARGINALLY_SIGNIFICANT)
                if a.significance in deep and b.significance in deep:
                    evidence.append((a.evidence, b.evidence))
    return correctness, significance, evidence


def cmd_agreement(args) -> int:
    dataset = load_annotation_dataset(args.annotations)
    correctness, significance, evidence = _axis_pairs(dataset)
    if not correctness:
        raise InputError("no dual-annotated items in the dataset")
    lines = ["axis\tn\tpercent_agreement\tcohen_kappa\tgwet_ac1"]
    for axis, pairs, vocabulary in (
        ("correctness", correctness, CORRECTNESS_LABELS),
        ("significance", significance, SIGNIFICANCE_LABELS),
        ("evidence", evidence, EVIDENCE_LABELS),
    ):
        if not pairs:
            lines.append(f"{axis}\t0\t\t\t")
            continue
        agree = percent_agreement(pairs)
        try:
            kappa = f"{cohen_kappa(pairs):.4f}"
        except DegenerateMarginals:
            kappa = ""
        try:
            ac1 = f"{gwet_ac1(pairs, vocabulary):.4f}"
        except SingleCategoryVocabulary:
            ac1 = ""
        lines.append(f"{axis}\t{len(pairs)}\t{agree:.4f}\t{kappa}\t{ac1}")
    report = "\n".join(lines) + "\n"
    print(report, end="")
    if args.out:
        out_dir = Path(args.out)
        atomic_write(out_dir / "agreement.tsv", report)
        write_manifest(
            out_dir, "agreement", {"annotations": str(args.annotations)},
            {"annotations": args.annotations},
        )
    return 0


# ---------------------------------------------------------------------------
# score
# ---------------------------------------------------------------------------

def _load_reviews_for_paper(
    args, dataset: AnnotationDataset, paper_id: str
) -> tuple[list[Review], list[Review]]:
    """Split a paper's review files into (human reviews, candidate reviews).

    Reviewers carrying human annotation records are the rubric source;
    every other review file is a candidate to score.
    """
    human_ids = set(dataset.human_reviewers(paper_id))
    humans, candidates = [], []
    for reviewer_id, path in iter_review_files(args.reviews, paper_id):
        kind = "human" if reviewer_id in human_ids else "ai"
        review = load_review_file(
            path, paper_id=paper_id, reviewer_id=reviewer_id, reviewer_kind=kind
        )
        if kind == "human":
            humans.append(review)
        else:
            if len(review.items) > args.max_items:
                raise InputError(
                    f"{path}: review has {len(review.items)} items, the cap "
                    f"is {args.max_items}"
                )
            candidates.append(review)
    return humans, candidates


def cmd_score(args) -> int:
    dataset = load_annotation_dataset(args.annotations)
    judge = _build_judge(args)
    out_dir = Path(args.out)

    contexts: dict[str, str] = {}
    if args.bundle:
        for paper_id in dataset.papers:
            bundle_dir = Path(args.bundle) / paper_id
            if bundle_dir.is_dir():
                contexts[paper_id] = bundle_context_text(
                    load_paper_bundle(bundle_dir, paper_id)
                )

    exclusions: list[str] = []
    results: dict[str, dict[str, object]] = {}
    per_paper_lines: list[str] = []

    for paper_id in dataset.papers:
        humans, candidates = _load_reviews_for_paper(args, dataset, paper_id)
        if not humans:
            raise InputError(f"paper {paper_id}: no human review files found")
        human_items = [item for review in humans for item in review.items]
        annotations = dataset.records_by_item(paper_id)
        rubric = build_rubric(
            paper_id, human_items, annotations,
            require_dual=not args.allow_single,
        )
        if rubric is None:
            exclusions.append(paper_id)
            continue
        context = contexts.get(paper_id, "")

        def verdict_fn(generated, entry):
            req = judge.similarity_request(generated, entry, context)
            return judge.classify_similarity(req).ordinal

        def meta_fn(generated):
            req = judge.meta_review_request(generated, context)
            verdict = judge.judge_meta_review(req)
            return verdict.annotation_record(generated.item_id, "meta-reviewer")

        for candidate in sorted(candidates, key=lambda r: r.reviewer_id):
            result = score_paper(rubric, list(candidate.items), verdict_fn, meta_fn)
            results.setdefault(candidate.reviewer_id, {})[paper_id] = result
            per_paper_lines.append(
                json.dumps(
                    {
                        "paper_id": paper_id,
                        "reviewer_id": candidate.reviewer_id,
                        "precision": round(result.precision, 6),
                        "recall": round(result.recall, 6),
                        "f1": round(result.f1, 6),
                        "generated_count": result.generated_count,
                    },
                    sort_keys=True,
                )
            )

    if not results:
        raise InputError("no candidate reviews found to score")
    leaderboard = aggregate_leaderboard(
        {
            reviewer: [by_paper[p] for p in sorted(by_paper)]
            for reviewer, by_paper in results.items()
        }
    )
    atomic_write(out_dir / "leaderboard.tsv", render_leaderboard(leaderboard))
    atomic_write(out_dir / "per_paper.jsonl", "\n".join(per_paper_lines) + "\n")

    inputs = {"annotations": args.annotations}
    if args.verdicts:
        inputs["verdicts"] = args.verdicts
    if args.meta_labels:
        inputs["meta_labels"] = args.meta_labels
    write_manifest(
        out_dir,
        "score",
        {
            "judge": args.judge,
            "max_items": args.max_items,
            "seed": args.seed,
            "allow_single": bool(args.allow_single),
            "cache_dir": args.cache_dir or "",
            "template_dir": args.template_dir or "",
            "excluded_papers": sorted(exclusions),
        },
        inputs,
    )
    for paper_id in exclusions:
        print(f"excluded paper {paper_id}: empty rubric")
    print(f"scored {len(results)} reviewer(s); wrote {out_dir / 'leaderboard.tsv'}")
    return 0


# ---------------------------------------------------------------------------
# overlap
# ---------------------------------------------------------------------------

def _pair_type(kinds: dict[tuple[str, str], str], record) -> str:
    a, b = record.item_id_a, record.item_id_b
    kind_a = kinds.get((a.paper_id, a.reviewer_id))
    kind_b = kinds.get((b.paper_id, b.reviewer_id))
    if kind_a is None or kind_b is None:
        return "all"
    if {kind_a, kind_b} == {"human", "ai"}:
        return "human-ai"
    prefix = "human-human" if kind_a == "human" else "ai-ai"
    split = "same-reviewer" if a.reviewer_id == b.reviewer_id else "diff-reviewer"
    return f"{prefix}/{split}"


def cmd_overlap(args) -> int:
    records = load_verdict_dump(args.verdicts)
    if not records:
        raise InputError(f"{args.verdicts}: no verdict records")
    calibration = load_calibration_file(args.calibration)
    sens, spec = error_rates(calibration)
    kinds: dict[tuple[str, str], str] = {}
    if args.annotations:
        kinds = load_annotation_dataset(args.annotations).reviewer_kinds

    grouped: dict[str, dict[str, list[int]]] = {}
    for record in records:
        pair_type = _pair_type(kinds, record)
        grouped.setdefault(pair_type, {}).setdefault(record.paper_id, []).append(
            record.ordinal
        )

    header = (
        "pair_type\tn_pairs\t"
        "raw_same_evidence\traw_diff_evidence\traw_diff_criticism\traw_diff_target\t"
        "corr_same_evidence\tcorr_diff_evidence\tcorr_diff_criticism\tcorr_diff_target\t"
        "similar_raw\tsimilar_corrected\tci_lower\tci_upper"
    )
    lines = [header]
    for pair_type in sorted(grouped):
        by_paper = grouped[pair_type]
        ordinals = [o for pile in by_paper.values() for o in pile]
        n = len(ordinals)
        raw_counts = [sum(o == level for o in ordinals) for level in (3, 2, 1, 0)]
        raw_pct = [100.0 * c / n for c in raw_counts]
        corrected = corrected_distribution(raw_counts, sens, spec)
        cfg = BootstrapConfig(
            iterations=args.iterations,
            seed=derive_seed(args.seed, f"overlap:{pair_type}"),
        )
        prevalence = corrected_prevalence_ci(by_paper, calibration, cfg)
        lines.append(
            "\t".join(
                [pair_type, str(n)]
                + [f"{v:.1f}" for v in raw_pct]
                + [f"{100.0 * v:.1f}" for v in corrected]
                + [
                    f"{100.0 * prevalence.raw:.1f}",
                    f"{100.0 * prevalence.corrected:.1f}",
                    f"{100.0 * prevalence.ci.lower:.1f}",
                    f"{100.0 * prevalence.ci.upper:.1f}",
                ]
            )
        )
    report = "\n".join(lines) + "\n"
    print(report, end="")
    if args.out:
        out_dir = Path(args.out)
        atomic_write(out_dir / "overlap.tsv", report)
        inputs = {"verdicts": args.verdicts, "calibration": args.calibration}
        if args.annotations:
            inputs["annotations"] = args.annotations
        write_manifest(
            out_dir,
            "overlap",
            {"seed": args.seed, "iterations": args.iterations},
            inputs,
        )
    return 0


# ---------------------------------------------------------------------------
# simulate-panels
# ---------------------------------------------------------------------------

def cmd_simulate_panels(args) -> int:
    dataset = load_annotation_dataset(args.annotations)
    ordinals = verdict_table(load_verdict_dump(args.verdicts))
    meta_labels = _load_meta_label_file(args.meta_labels)
    meta_fully_positive = {
        item_id: (
            entry["correctness"] == CORRECT
            and entry["significance"] == SIGNIFICANT
            and entry["evidence"] == SUFFICIENT
        )
        for item_id, entry in meta_labels.items()
    }
    papers = build_panel_data(dataset, ordinals, meta_fully_positive)
    usable, notices = complete_papers(papers)
    if notices and not args.allow_partial:
        raise InputError(
            "incomplete corpus (rerun with --allow-partial to skip):\n"
            + "\n".join(notices)
        )
    for notice in notices:
        print(notice, file=sys.stderr)
    if not usable:
        raise InputError("no complete papers (3 human + 3 AI reviews) found")

    filters = (True,) if args.filter_only else (False, True)
    rows = []
    for meta_filter in filters:
        for humans, ais in ALL_COMPOSITIONS:
            spec = PanelSpec(humans=humans, ais=ais, meta_filter=meta_filter)
            rows.append((spec, panel_metrics(usable, spec)))
    table = render_metrics_table(rows)
    print(table, end="")
    out_dir = Path(args.out)
    atomic_write(out_dir / "panel_metrics.tsv", table)
    write_manifest(
        out_dir,
        "simulate-panels",
        {
            "allow_partial": bool(args.allow_partial),
            "filter_only": bool(args.filter_only),
            "papers_used": len(usable),
            "papers_skipped": len(notices),
        },
        {
            "annotations": args.annotations,
            "verdicts": args.verdicts,
            "meta_labels": args.meta_labels,
        },
    )
    return 0


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reviewscope",
        description="Criticism-level analytics and benchmark scoring for "
        "scientific peer reviews.",
        epilog=(
            f"Remote judge configuration comes from the environment: "
            f"{ENV_URL} (endpoint), {ENV_TOKEN} (bearer token), "
            f"{ENV_MODEL} (model identifier)."
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    calibrate = sub.add_parser(
        "calibrate", help="print judge error rates with Wilson CIs"
    )
    calibrate.add_argument("--calibration", required=True, help="JSON file with tp/fn/fp/tn")

    agreement = sub.add_parser(
        "agreement", help="inter-annotator agreement per rubric axis"
    )
    agreement.add_argument("--annotations", required=True)
    agreement.add_argument("--out", default=None, help="output directory")

    score = sub.add_parser("score", help="benchmark-score candidate reviews")
    score.add_argument("--bundle", default=None, help="paper bundle root directory")
    score.add_argument("--reviews", required=True, help="reviews root directory")
    score.add_argument("--annotations", required=True)
    score.add_argument("--judge", choices=("mock", "remote"), default="mock")
    score.add_argument("--verdicts", default=None, help="similarity fixtures for the mock judge")
    score.add_argument("--meta-labels", default=None, help="meta-review fixtures for the mock judge")
    score.add_argument("--template-dir", default=None)
    score.add_argument("--cache-dir", default=None)
    score.add_argument("--seed", type=int, default=0)
    score.add_argument("--max-items", type=int, default=5)
    score.add_argument(
        "--allow-single",
        action="store_true",
        help="accept single-annotated human items in rubric construction",
    )
    score.add_argument("--out", required=True, help="output directory")

    overlap = sub.add_parser("overlap", help="corrected overlap prevalence report")
    overlap.add_argument("--verdicts", required=True)
    overlap.add_argument("--calibration", required=True)
    overlap.add_argument("--annotations", default=None, help="used to type pairs (H-H/H-A/A-A)")
    overlap.add_argument("--seed", type=int, default=0)
    overlap.add_argument("--iterations", type=int, default=10_000)
    overlap.add_argument("--out", default=None, help="output directory")

    panels = sub.add_parser("simulate-panels", help="panel composition metrics")
    panels.add_argument("--annotations", required=True)
    panels.add_argument("--verdicts", required=True)
    panels.add_argument("--meta-labels", required=True)
    panels.add_argument("--allow-partial", action="store_true")
    panels.add_argument("--filter-only", action="store_true")
    panels.add_argument("--out", required=True, help="output directory")

    return parser


_COMMANDS = {
    "calibrate": cmd_calibrate,
    "agreement": cmd_agreement,
    "score": cmd_score,
    "overlap": cmd_overlap,
    "simulate-panels": cmd_simulate_panels,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except JudgeFailure as exc:
        print(f"judge failure: {exc}", file=sys.stderr)
        return 3
    except ReviewScopeError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
