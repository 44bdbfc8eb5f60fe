"""Deterministic synthetic corpus for integration and acceptance tests.

Every review item carries a (target, criticism, evidence) code triple; the
similarity ordinal of a pair derives from code equality (3 = all equal,
2 = target+criticism, 1 = target only, 0 = none). Annotation and
meta-review labels are spelled per item. The brute-force oracles in the
test suite recompute everything from these codes independently of the
library.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from reviewscope.corpus import (
    CORRECT,
    MARGINALLY_SIGNIFICANT,
    NOT_CORRECT,
    NOT_SIGNIFICANT,
    REQUIRES_MORE,
    SIGNIFICANT,
    SUFFICIENT,
    EvidenceQuote,
    ItemId,
    Review,
    ReviewItem,
    dump_annotation_record,
    parse_annotation_line,
    serialize_review,
)
from reviewscope.judge import check_prediction_consistency
from reviewscope.similarity import VerdictRecord, dump_verdict_record

# Label shorthands: (correctness, significance, evidence)
LABELS = {
    "FP": (CORRECT, SIGNIFICANT, SUFFICIENT),
    "CSR": (CORRECT, SIGNIFICANT, REQUIRES_MORE),
    "CMS": (CORRECT, MARGINALLY_SIGNIFICANT, SUFFICIENT),
    "CMR": (CORRECT, MARGINALLY_SIGNIFICANT, REQUIRES_MORE),
    "CNS": (CORRECT, NOT_SIGNIFICANT, None),
    "NC": (NOT_CORRECT, None, None),
}

# Consistent joint-class prediction for each own-label shorthand.
PREDICTIONS = {
    "FP": "correct_significant_sufficient",
    "CSR": "correct_significant_requires_more",
    "CMS": "correct_marginal_sufficient",
    "CMR": "correct_marginal_requires_more",
    "CNS": "correct_not_significant",
    "NC": "incorrect",
}


@dataclass(frozen=True)
class SpecItem:
    target: int
    criticism: int
    evidence: int
    ann: tuple[str, str] | None  # annotation shorthand per annotator, or None
    meta: str                     # meta-review shorthand


def ordinal_of(a: SpecItem, b: SpecItem) -> int:
    if a.target != b.target:
        return 0
    if a.criticism != b.criticism:
        return 1
    return 3 if a.evidence == b.evidence else 2


# reviewer -> (kind, [SpecItem...]); "cand-*" reviewers have no annotations.
CORPUS: dict[str, dict[str, tuple[str, list[SpecItem]]]] = {
    "p01": {
        "hum-a": ("human", [
            SpecItem(1, 1, 1, ("FP", "FP"), "FP"),
            SpecItem(2, 1, 1, ("FP", "CSR"), "FP"),
        ]),
        "hum-b": ("human", [
            SpecItem(1, 1, 2, ("FP", "FP"), "CSR"),
            SpecItem(3, 1, 1, ("NC", "NC"), "NC"),
        ]),
        "hum-c": ("human", [
            SpecItem(4, 1, 1, ("FP", "FP"), "FP"),
        ]),
        "ai-p": ("ai", [
            SpecItem(1, 1, 3, ("FP", "FP"), "FP"),
            SpecItem(5, 1, 1, ("CSR", "CSR"), "CSR"),
        ]),
        "ai-q": ("ai", [
            SpecItem(1, 1, 4, ("FP", "CMS"), "FP"),
            SpecItem(6, 1, 1, ("FP", "FP"), "CNS"),
        ]),
        "ai-r": ("ai", [
            SpecItem(2, 2, 1, ("CMS", "CMS"), "CMS"),
            SpecItem(7, 1, 1, ("NC", "NC"), "NC"),
        ]),
        "cand-x": ("ai", [
            SpecItem(1, 1, 5, None, "FP"),
            SpecItem(9, 1, 1, None, "FP"),
            SpecItem(4, 2, 1, None, "NC"),
        ]),
        "cand-y": ("ai", [
            SpecItem(4, 1, 5, None, "FP"),
        ]),
    },
    "p02": {
        "hum-a": ("human", [
            SpecItem(1, 1, 1, ("FP", "FP"), "FP"),
            SpecItem(2, 1, 1, ("CNS", "CNS"), "CNS"),
        ]),
        "hum-b": ("human", [
            SpecItem(3, 1, 1, ("FP", "FP"), "FP"),
        ]),
        "hum-c": ("human", [
            SpecItem(4, 1, 1, ("CMS", "FP"), "CMS"),
            SpecItem(5, 1, 1, ("NC", "FP"), "NC"),
        ]),
        "ai-p": ("ai", [
            SpecItem(1, 1, 2, ("FP", "FP"), "FP"),
        ]),
        "ai-q": ("ai", [
            SpecItem(1, 1, 2, ("FP", "FP"), "FP"),
            SpecItem(3, 2, 1, ("CSR", "FP"), "CSR"),
        ]),
        "ai-r": ("ai", [
            SpecItem(6, 1, 1, ("FP", "FP"), "FP"),
        ]),
        "cand-x": ("ai", [
            SpecItem(1, 1, 7, None, "FP"),
            SpecItem(3, 1, 7, None, "CSR"),
        ]),
        "cand-y": ("ai", [
            SpecItem(9, 9, 9, None, "NC"),
        ]),
    },
    "p03": {
        "hum-a": ("human", [
            SpecItem(1, 1, 1, ("FP", "FP"), "FP"),
        ]),
        "hum-b": ("human", [
            SpecItem(2, 1, 1, ("CSR", "CSR"), "CSR"),
        ]),
        "hum-c": ("human", [
            SpecItem(3, 1, 1, ("NC", "NC"), "NC"),
        ]),
        "ai-p": ("ai", [
            SpecItem(1, 1, 1, ("FP", "FP"), "FP"),
            SpecItem(4, 1, 1, ("FP", "FP"), "FP"),
        ]),
        "ai-q": ("ai", [
            SpecItem(1, 1, 1, ("FP", "FP"), "FP"),
        ]),
        "ai-r": ("ai", [
            SpecItem(4, 1, 2, ("CMS", "CMS"), "CMS"),
        ]),
        "cand-x": ("ai", [
            SpecItem(8, 1, 1, None, "FP"),
        ]),
        "cand-y": ("ai", []),
    },
    "p04": {
        "hum-a": ("human", [
            SpecItem(1, 1, 1, ("FP", "FP"), "FP"),
            SpecItem(2, 1, 1, ("FP", "FP"), "FP"),
            SpecItem(3, 1, 1, ("CMR", "CMR"), "CMR"),
        ]),
        "hum-b": ("human", [
            SpecItem(4, 1, 1, ("FP", "FP"), "CSR"),
            SpecItem(5, 1, 1, ("FP", "FP"), "FP"),
        ]),
        "hum-c": ("human", [
            SpecItem(6, 1, 1, ("FP", "FP"), "FP"),
            SpecItem(1, 2, 1, ("CNS", "CNS"), "CNS"),
        ]),
        "ai-p": ("ai", [
            SpecItem(1, 1, 6, ("FP", "FP"), "FP"),
            SpecItem(4, 1, 6, ("FP", "CSR"), "FP"),
        ]),
        "ai-q": ("ai", [
            SpecItem(1, 1, 6, ("FP", "FP"), "FP"),
            SpecItem(7, 1, 1, ("CNS", "CNS"), "CNS"),
        ]),
        "ai-r": ("ai", [
            SpecItem(2, 1, 6, ("FP", "FP"), "FP"),
            SpecItem(8, 1, 1, ("NC", "NC"), "NC"),
        ]),
        "cand-x": ("ai", [
            SpecItem(1, 1, 9, None, "FP"),
            SpecItem(2, 1, 9, None, "FP"),
            SpecItem(5, 1, 9, None, "CMS"),
            SpecItem(6, 1, 9, None, "FP"),
        ]),
        "cand-y": ("ai", [
            SpecItem(4, 1, 9, None, "FP"),
            SpecItem(9, 1, 1, None, "CSR"),
        ]),
    },
    # Every human item fails the dual fully-positive bar: excluded paper.
    "p05": {
        "hum-a": ("human", [
            SpecItem(1, 1, 1, ("FP", "CSR"), "FP"),
            SpecItem(2, 1, 1, ("NC", "NC"), "NC"),
        ]),
        "hum-b": ("human", [
            SpecItem(3, 1, 1, ("CMS", "CMS"), "CMS"),
        ]),
        "hum-c": ("human", [
            SpecItem(4, 1, 1, ("CNS", "CNS"), "CNS"),
        ]),
        "ai-p": ("ai", [
            SpecItem(1, 1, 2, ("FP", "FP"), "FP"),
        ]),
        "ai-q": ("ai", [
            SpecItem(3, 1, 2, ("FP", "FP"), "FP"),
        ]),
        "ai-r": ("ai", [
            SpecItem(5, 1, 1, ("CSR", "CSR"), "CSR"),
        ]),
        "cand-x": ("ai", [
            SpecItem(1, 1, 3, None, "FP"),
        ]),
        "cand-y": ("ai", [
            SpecItem(3, 1, 3, None, "FP"),
        ]),
    },
}

ANNOTATOR_IDS = ("ann-1", "ann-2")
CRITERIA_POOL = ("Validity", "Data and methodology", "Clarity and context")


def spec_items(paper_id: str) -> dict[ItemId, SpecItem]:
    table = {}
    for reviewer, (_, items) in CORPUS[paper_id].items():
        for n, item in enumerate(items, start=1):
            table[ItemId(paper_id, reviewer, n)] = item
    return table


def build_review_item(item_id: ItemId, spec: SpecItem, kind: str) -> ReviewItem:
    title = f"Issue with target {spec.target} (angle {spec.criticism})"
    point = (
        f"The treatment of target {spec.target} is criticized along angle "
        f"{spec.criticism}; the supporting material follows trail "
        f"{spec.evidence}."
    )
    if kind == "human" and not item_id.reviewer_id.startswith("cand"):
        return ReviewItem(item_id=item_id, title=title, main_point=point)
    quotes = (
        EvidenceQuote(
            source="main_text",
            quote=f"Sentence about target {spec.target}, trail {spec.evidence}.",
            comment=f"This passage leaves angle {spec.criticism} unaddressed.",
        ),
    )
    return ReviewItem(
        item_id=item_id,
        title=title,
        main_point=point,
        criteria=(CRITERIA_POOL[spec.target % len(CRITERIA_POOL)],),
        evidence=quotes,
    )


def build_reviews(paper_id: str) -> dict[str, Review]:
    reviews = {}
    for reviewer, (kind, items) in CORPUS[paper_id].items():
        review_items = tuple(
            build_review_item(ItemId(paper_id, reviewer, n), spec, kind)
            for n, spec in enumerate(items, start=1)
        )
        reviews[reviewer] = Review(
            reviewer_id=reviewer,
            reviewer_kind=kind,
            paper_id=paper_id,
            items=review_items,
        )
    return reviews


def annotation_lines() -> list[str]:
    lines = []
    for paper_id, reviewers in CORPUS.items():
        for reviewer, (kind, items) in reviewers.items():
            for n, spec in enumerate(items, start=1):
                if spec.ann is None:
                    continue
                for annotator, shorthand in zip(ANNOTATOR_IDS, spec.ann):
                    correctness, significance, evidence = LABELS[shorthand]
                    obj = {
                        "paper_id": paper_id,
                        "reviewer_id": reviewer,
                        "reviewer_kind": kind,
                        "item_index": n,
                        "annotator_id": annotator,
                        "correctness": correctness,
                        "significance": significance,
                        "evidence": evidence,
                    }
                    record, _ = parse_annotation_line(obj)
                    lines.append(dump_annotation_record(record, kind))
    return lines


def verdict_lines() -> list[str]:
    """All cross-reviewer unordered pairs within each paper."""
    lines = []
    for paper_id in CORPUS:
        table = spec_items(paper_id)
        ids = sorted(table)
        for i, a in enumerate(ids):
            for b in ids[i + 1 :]:
                if a.reviewer_id == b.reviewer_id:
                    continue
                record = VerdictRecord(
                    paper_id=paper_id,
                    item_id_a=a,
                    item_id_b=b,
                    ordinal=ordinal_of(table[a], table[b]),
                    source="reference",
                )
                lines.append(dump_verdict_record(record))
    return lines


def meta_label_lines() -> list[str]:
    lines = []
    for paper_id, reviewers in CORPUS.items():
        doc_reviewers = []
        for reviewer, (_, items) in sorted(reviewers.items()):
            entries = []
            for n, spec in enumerate(items, start=1):
                correctness, significance, evidence = LABELS[spec.meta]
                prediction = PREDICTIONS[spec.meta]
                check_prediction_consistency(
                    correctness, significance, evidence, prediction
                )
                entries.append(
                    {
                        "item_number": n,
                        "reasoning": f"Judged trail {spec.evidence}.",
                        "correctness": correctness,
                        "significance": significance,
                        "evidence": evidence,
                        "prediction_of_expert_judgments": prediction,
                    }
                )
            doc_reviewers.append({"reviewer_id": reviewer, "items": entries})
        lines.append(
            json.dumps(
                {"paper_id": paper_id, "reviewers": doc_reviewers}, sort_keys=True
            )
        )
    return lines


def write_corpus(root: Path) -> dict[str, Path]:
    """Materialize the corpus on disk; returns the path map."""
    reviews_dir = root / "reviews"
    bundles_dir = root / "bundles"
    for paper_id in CORPUS:
        paper_reviews = build_reviews(paper_id)
        for reviewer, review in paper_reviews.items():
            path = reviews_dir / paper_id / f"{reviewer}.md"
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(serialize_review(review), encoding="utf-8")
        preprint_dir = bundles_dir / paper_id / "preprint"
        preprint_dir.mkdir(parents=True, exist_ok=True)
        (preprint_dir / "preprint.md").write_text(
            f"# Paper {paper_id}\n\nBody text mentioning targets 1-9.\n",
            encoding="utf-8",
        )
        (preprint_dir / "images_list.json").write_text(
            json.dumps(
                [{"filename": "figure1.png", "caption": f"Figure 1 of {paper_id}"}]
            ),
            encoding="utf-8",
        )

    paths = {
        "reviews": reviews_dir,
        "bundles": bundles_dir,
        "annotations": root / "annotations.jsonl",
        "verdicts": root / "verdicts.jsonl",
        "meta_labels": root / "meta_labels.jsonl",
        "calibration": root / "calibration.json",
    }
    paths["annotations"].write_text(
        "\n".join(annotation_lines()) + "\n", encoding="utf-8"
    )
    paths["verdicts"].write_text("\n".join(verdict_lines()) + "\n", encoding="utf-8")
    paths["meta_labels"].write_text(
        "\n".join(meta_label_lines()) + "\n", encoding="utf-8"
    )
    paths["calibration"].write_text(
        json.dumps({"tp": 61, "fn": 9, "fp": 3, "tn": 91}), encoding="utf-8"
    )
    return paths
