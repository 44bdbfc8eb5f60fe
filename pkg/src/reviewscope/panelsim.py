"""Reviewer panel composition simulation.

Panels of three reviewers are drawn from a paper's three human and three AI
reviewers (3H, 2H+1AI, 1H+2AI, 3AI). For each panel we count the items the
panel would deliver, how many are unique (no similar counterpart from
another panel reviewer, similarity ordinal < 2), how many fail the
fully-positive bar, and how many are both fully positive and unique. Counts
are averaged over all panels of a composition, then over papers; the three
ratio metrics (quality of unique items, overall yield, noise per gem) are
computed from those averaged counts.

The optional meta-reviewer filter removes items the meta labels as not
fully positive *before* uniqueness is computed, i.e. the filtered item set
is also the similarity universe.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Sequence

from .corpus import AnnotationDataset, ItemId
from .errors import BadSpec, MissingMetaLabels, MissingVerdicts
from .rubric import item_fully_positive
from .similarity import SIMILAR_THRESHOLD

PANEL_SIZE = 3


@dataclass(frozen=True)
class PanelSpec:
    """A panel composition: how many humans, how many AIs, filter on/off."""

    humans: int
    ais: int
    meta_filter: bool = False

    def __post_init__(self) -> None:
        if self.humans < 0 or self.ais < 0:
            raise BadSpec("reviewer counts must be non-negative")
        if self.humans + self.ais != PANEL_SIZE:
            raise BadSpec(
                f"panel size is {PANEL_SIZE}, got {self.humans}H + {self.ais}AI"
            )


ALL_COMPOSITIONS = ((3, 0), (2, 1), (1, 2), (0, 3))


@dataclass(frozen=True)
class PanelMetrics:
    """The seven per-paper panel metrics (counts are combinatorial means)."""

    total_items: float
    unique_items: float
    not_fully_pos: float
    fp_unique: float
    pct_fp_unique_of_unique: float
    pct_fp_unique_of_total: float
    noise_per_gem: float | None

    @classmethod
    def from_counts(
        cls, total: float, unique: float, not_fully_pos: float, fp_unique: float
    ) -> "PanelMetrics":
        return cls(
            total_items=total,
            unique_items=unique,
            not_fully_pos=not_fully_pos,
            fp_unique=fp_unique,
            pct_fp_unique_of_unique=fp_unique / unique if unique > 0 else 0.0,
            pct_fp_unique_of_total=fp_unique / total if total > 0 else 0.0,
            noise_per_gem=not_fully_pos / fp_unique if fp_unique > 0 else None,
        )


@dataclass(frozen=True)
class PaperPanelData:
    """Everything the simulation needs for one paper."""

    paper_id: str
    items_by_reviewer: Mapping[str, tuple[ItemId, ...]]
    reviewer_kinds: Mapping[str, str]
    fully_positive: Mapping[ItemId, bool]
    ordinals: Mapping[frozenset[ItemId], int]
    meta_fully_positive: Mapping[ItemId, bool] | None = None

    def reviewers_of_kind(self, kind: str) -> list[str]:
        return sorted(r for r, k in self.reviewer_kinds.items() if k == kind)

    def is_complete(self) -> bool:
        return (
            len(self.reviewers_of_kind("human")) == PANEL_SIZE
            and len(self.reviewers_of_kind("ai")) == PANEL_SIZE
        )

    def ordinal(self, a: ItemId, b: ItemId) -> int:
        value = self.ordinals.get(frozenset((a, b)))
        if value is None:
            raise MissingVerdicts(
                f"paper {self.paper_id}: no verdict for pair ({a}, {b})"
            )
        return value


def enumerate_panels(
    spec: PanelSpec,
    human_ids: Sequence[str],
    ai_ids: Sequence[str],
) -> list[tuple[str, ...]]:
    """All reviewer-id triples matching the composition.

    3H and 3AI each yield one panel; the mixed compositions yield
    C(3,2) * 3 = 9 panels each.
    """
    if len(human_ids) != PANEL_SIZE or len(ai_ids) != PANEL_SIZE:
        raise BadSpec(
            f"need exactly {PANEL_SIZE} candidates per side, got "
            f"{len(human_ids)} humans and {len(ai_ids)} AIs"
        )
    panels = []
    for humans in combinations(sorted(human_ids), spec.humans):
        for ais in combinations(sorted(ai_ids), spec.ais):
            panels.append(humans + ais)
    return panels


def unique_items(
    panel_items: Mapping[str, Sequence[ItemId]],
    ordinal_of: "PaperPanelData | Mapping[frozenset[ItemId], int]",
) -> set[ItemId]:
    """Items with no similar counterpart from any *other* reviewer.

    Within-reviewer pairs never affect uniqueness; an ordinal-1 counterpart
    (same target, different criticism) does not spoil it either.
    """
    if isinstance(ordinal_of, PaperPanelData):
        lookup = ordinal_of.ordinal
    else:
        table = ordinal_of

        def lookup(a: ItemId, b: ItemId) -> int:
            value = table.get(frozenset((a, b)))
            if value is None:
                raise MissingVerdicts(f"no verdict for pair ({a}, {b})")
            return value

    unique: set[ItemId] = set()
    reviewers = sorted(panel_items)
    for reviewer in reviewers:
        for item in panel_items[reviewer]:
            has_counterpart = any(
                lookup(item, other_item) >= SIMILAR_THRESHOLD
                for other in reviewers
                if other != reviewer
                for other_item in panel_items[other]
            )
            if not has_counterpart:
                unique.add(item)
    return unique


def _panel_counts(
    paper: PaperPanelData,
    panel: Sequence[str],
    meta_filter: bool,
) -> tuple[int, int, int, int]:
    """(total, unique, not fully positive, fully positive and unique)."""
    selected: dict[str, list[ItemId]] = {}
    for reviewer in panel:
        items = list(paper.items_by_reviewer.get(reviewer, ()))
        if meta_filter:
            if paper.meta_fully_positive is None:
                raise MissingMetaLabels(
                    f"paper {paper.paper_id}: meta filter requested without "
                    "meta labels"
                )
            kept = []
            for item in items:
                flag = paper.meta_fully_positive.get(item)
                if flag is None:
                    raise MissingMetaLabels(
                        f"paper {paper.paper_id}: no meta label for {item}"
                    )
                if flag:
                    kept.append(item)
            items = kept
        selected[reviewer] = items

    unique = unique_items(selected, paper)
    total = sum(len(items) for items in selected.values())
    not_fully_pos = 0
    fp_unique = 0
    for items in selected.values():
        for item in items:
            positive = paper.fully_positive.get(item, False)
            if not positive:
                not_fully_pos += 1
            elif item in unique:
                fp_unique += 1
    return total, len(unique), not_fully_pos, fp_unique


def panel_metrics(
    papers: Sequence[PaperPanelData],
    spec: PanelSpec,
) -> PanelMetrics:
    """Average the four counts over panels, then papers; derive the ratios.

    Incomplete papers (fewer than 3+3 reviews) must be filtered out first;
    use ``complete_papers``.
    """
    if not papers:
        raise BadSpec("panel_metrics needs at least one complete paper")
    per_paper: list[tuple[float, float, float, float]] = []
    for paper in sorted(papers, key=lambda p: p.paper_id):
        panels = enumerate_panels(
            spec, paper.reviewers_of_kind("human"), paper.reviewers_of_kind("ai")
        )
        sums = [0.0, 0.0, 0.0, 0.0]
        for panel in panels:
            counts = _panel_counts(paper, panel, spec.meta_filter)
            for i, c in enumerate(counts):
                sums[i] += c
        per_paper.append(tuple(s / len(panels) for s in sums))
    n = len(per_paper)
    means = [sum(row[i] for row in per_paper) / n for i in range(4)]
    return PanelMetrics.from_counts(*means)


def complete_papers(
    papers: Sequence[PaperPanelData],
) -> tuple[list[PaperPanelData], list[str]]:
    """Split into complete papers and skip notices for incomplete ones."""
    usable = []
    notices = []
    for paper in papers:
        if paper.is_complete():
            usable.append(paper)
        else:
            humans = len(paper.reviewers_of_kind("human"))
            ais = len(paper.reviewers_of_kind("ai"))
            notices.append(
                f"skipping paper {paper.paper_id}: has {humans} human and "
                f"{ais} AI reviews, needs {PANEL_SIZE}+{PANEL_SIZE}"
            )
    return usable, notices


def build_panel_data(
    dataset: AnnotationDataset,
    ordinals: Mapping[frozenset[ItemId], int],
    meta_fully_positive: Mapping[ItemId, bool] | None = None,
) -> list[PaperPanelData]:
    """Assemble per-paper simulation inputs from an annotation dataset, a
    verdict table, and optional meta-reviewer labels."""
    papers = []
    for paper_id in dataset.papers:
        by_item = dataset.records_by_item(paper_id)
        items_by_reviewer = {
            reviewer: tuple(items)
            for reviewer, items in dataset.items_by_reviewer(paper_id).items()
        }
        kinds = {
            reviewer: dataset.reviewer_kinds[(paper_id, reviewer)]
            for reviewer in items_by_reviewer
        }
        fully_positive = {
            item: item_fully_positive(records) for item, records in by_item.items()
        }
        meta = None
        if meta_fully_positive is not None:
            meta = {
                item: meta_fully_positive[item]
                for item in by_item
                if item in meta_fully_positive
            }
        papers.append(
            PaperPanelData(
                paper_id=paper_id,
                items_by_reviewer=items_by_reviewer,
                reviewer_kinds=kinds,
                fully_positive=fully_positive,
                ordinals=ordinals,
                meta_fully_positive=meta,
            )
        )
    return papers


TABLE_COLUMNS = (
    "humans", "ais", "meta_filter", "total_items", "unique_items",
    "not_fully_pos", "pct_fp_unique_of_unique", "fp_unique",
    "pct_fp_unique_of_total", "noise_per_gem",
)


def render_metrics_table(
    rows: Sequence[tuple[PanelSpec, PanelMetrics]],
) -> str:
    """Tab-delimited metrics table: counts to 1 decimal, percentages to 1,
    noise per gem to 2."""
    lines = ["\t".join(TABLE_COLUMNS)]
    for spec, m in rows:
        npg = f"{m.noise_per_gem:.2f}" if m.noise_per_gem is not None else ""
        lines.append(
            "\t".join(
                (
                    str(spec.humans),
                    str(spec.ais),
                    "yes" if spec.meta_filter else "no",
                    f"{m.total_items:.1f}",
                    f"{m.unique_items:.1f}",
                    f"{m.not_fully_pos:.1f}",
                    f"{m.pct_fp_unique_of_unique * 100:.1f}",
                    f"{m.fp_unique:.1f}",
                    f"{m.pct_fp_unique_of_total * 100:.1f}",
                    npg,
                )
            )
        )
    return "\n".join(lines) + "\n"
