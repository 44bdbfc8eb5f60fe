"""Benchmark scoring for AI reviewers: recall against a rubric of
fully-positive human review items, precision via meta-review labels, and
per-paper F1 aggregated into a leaderboard.

The rubric for a paper is the set of human review items whose every
annotation row is fully positive. Overlapping rubric entries are kept on
purpose: a concern raised by two human reviewers appears twice, so covering
it earns credit twice. Papers whose rubric comes out empty are excluded
from the benchmark rather than scored. Matching runs generated -> rubric
only, at the "at least same criticism" similarity threshold.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .corpus import AnnotationRecord, ItemId, ReviewItem
from .errors import (
    EmptyGenerated,
    EmptyRubric,
    MissingDualAnnotation,
    PaperSetMismatch,
)
from .rubric import is_fully_positive, item_fully_positive
from .similarity import SIMILAR_THRESHOLD, SimilarityVerdict

VerdictFn = Callable[[ReviewItem, ReviewItem], "SimilarityVerdict | int"]
MetaLabelFn = Callable[[ReviewItem], AnnotationRecord]


@dataclass(frozen=True)
class Rubric:
    """The recall target for one paper: fully-positive human items."""

    paper_id: str
    entries: tuple[ReviewItem, ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise EmptyRubric(f"paper {self.paper_id} has an empty rubric")


@dataclass(frozen=True)
class BenchPaperResult:
    paper_id: str
    precision: float
    recall: float
    f1: float
    generated_count: int


@dataclass(frozen=True)
class LeaderboardRow:
    reviewer_id: str
    precision: float
    recall: float
    f1: float
    mean_items: float
    papers_scored: int


def build_rubric(
    paper_id: str,
    human_items: Sequence[ReviewItem],
    annotations: Mapping[ItemId, Sequence[AnnotationRecord]],
    *,
    require_dual: bool = True,
) -> Rubric | None:
    """Collect the human items every annotator rated fully positive.

    Returns ``None`` when no item qualifies (the paper is excluded from the
    benchmark). Duplicate concerns across reviewers are deliberately kept.
    With ``require_dual`` (the default) every human item must carry at
    least two annotation rows.
    """
    entries = []
    for item in human_items:
        records = annotations.get(item.item_id, ())
        if not records:
            raise MissingDualAnnotation(
                f"{item.item_id} has no annotation records"
            )
        if require_dual and len(records) < 2:
            raise MissingDualAnnotation(
                f"{item.item_id} has {len(records)} annotation record(s); "
                "rubric construction requires dual annotation"
            )
        if item_fully_positive(records):
            entries.append(item)
    if not entries:
        return None
    return Rubric(paper_id=paper_id, entries=tuple(entries))


def _ordinal(verdict: SimilarityVerdict | int) -> int:
    return verdict.ordinal if isinstance(verdict, SimilarityVerdict) else int(verdict)


def score_recall(
    rubric: Rubric,
    generated: Sequence[ReviewItem],
    verdicts: VerdictFn,
    threshold: int = SIMILAR_THRESHOLD,
) -> float:
    """Fraction of rubric entries matched by at least one generated item.

    A single generated item may match several rubric entries; duplicated
    human concerns therefore count once per entry.
    """
    if not rubric.entries:
        raise EmptyRubric(f"paper {rubric.paper_id} has an empty rubric")
    matched = 0
    for entry in rubric.entries:
        if any(_ordinal(verdicts(g, entry)) >= threshold for g in generated):
            matched += 1
    return matched / len(rubric.entries)


def score_precision(
    generated: Sequence[ReviewItem],
    meta_labels: MetaLabelFn,
) -> float:
    """Fraction of generated items the meta-reviewer judges fully positive."""
    if not generated:
        raise EmptyGenerated("precision over zero generated items is undefined")
    return sum(is_fully_positive(meta_labels(g)) for g in generated) / len(generated)


def f1(precision: float, recall: float) -> float:
    """Harmonic mean of precision and recall; 0 when both are 0."""
    if not 0.0 <= precision <= 1.0 or not 0.0 <= recall <= 1.0:
        raise ValueError("precision and recall must be in [0, 1]")
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def score_paper(
    rubric: Rubric,
    generated: Sequence[ReviewItem],
    verdicts: VerdictFn,
    meta_labels: MetaLabelFn,
) -> BenchPaperResult:
    """Score one candidate review against one paper's rubric.

    A zero-item review contributes (0, 0, 0): precision is undefined there
    and pinned to 0 so the macro mean stays total.
    """
    if not generated:
        return BenchPaperResult(
            paper_id=rubric.paper_id, precision=0.0, recall=0.0, f1=0.0,
            generated_count=0,
        )
    precision = score_precision(generated, meta_labels)
    recall = score_recall(rubric, generated, verdicts)
    return BenchPaperResult(
        paper_id=rubric.paper_id,
        precision=precision,
        recall=recall,
        f1=f1(precision, recall),
        generated_count=len(generated),
    )


def aggregate_leaderboard(
    results: Mapping[str, Sequence[BenchPaperResult]],
) -> list[LeaderboardRow]:
    """Unweighted paper-level macro means per reviewer, best F1 first.

    Every reviewer must be scored on exactly the same paper set. Note the
    reported F1 is the mean of per-paper F1 values, which differs from the
    harmonic mean of the precision and recall columns.
    """
    if not results:
        return []
    paper_sets = {
        reviewer: frozenset(r.paper_id for r in rows)
        for reviewer, rows in results.items()
    }
    reference = next(iter(paper_sets.values()))
    for reviewer, papers in paper_sets.items():
        if papers != reference:
            raise PaperSetMismatch(
                f"reviewer {reviewer} scored on a different paper set"
            )
    rows = []
    for reviewer in sorted(results):
        scored = list(results[reviewer])
        n = len(scored)
        rows.append(
            LeaderboardRow(
                reviewer_id=reviewer,
                precision=sum(r.precision for r in scored) / n,
                recall=sum(r.recall for r in scored) / n,
                f1=sum(r.f1 for r in scored) / n,
                mean_items=sum(r.generated_count for r in scored) / n,
                papers_scored=n,
            )
        )
    rows.sort(key=lambda r: (-r.f1, r.reviewer_id))
    return rows


def render_leaderboard(rows: Sequence[LeaderboardRow]) -> str:
    """Tab-delimited leaderboard with four fractional digits."""
    lines = ["reviewer_id\tprecision\trecall\tf1\tmean_items\tpapers_scored"]
    for row in rows:
        lines.append(
            f"{row.reviewer_id}\t{row.precision:.4f}\t{row.recall:.4f}\t"
            f"{row.f1:.4f}\t{row.mean_items:.4f}\t{row.papers_scored}"
        )
    return "\n".join(lines) + "\n"
