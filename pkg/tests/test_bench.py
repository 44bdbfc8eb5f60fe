import itertools

import pytest
from hypothesis import given, settings, strategies as st

from reviewscope.bench import (
    BenchPaperResult,
    aggregate_leaderboard,
    build_rubric,
    f1,
    render_leaderboard,
    score_paper,
    score_precision,
    score_recall,
)
from reviewscope.corpus import (
    CORRECT,
    NOT_CORRECT,
    REQUIRES_MORE,
    SIGNIFICANT,
    SUFFICIENT,
    AnnotationRecord,
    ItemId,
    ReviewItem,
)
from reviewscope.errors import (
    EmptyGenerated,
    EmptyRubric,
    MissingDualAnnotation,
    PaperSetMismatch,
)


def item(reviewer: str, index: int, paper: str = "p") -> ReviewItem:
    return ReviewItem(
        item_id=ItemId(paper, reviewer, index),
        title=f"{reviewer}-{index}",
        main_point="point",
    )


def fp_record(item_id: ItemId, annotator: str) -> AnnotationRecord:
    return AnnotationRecord(item_id, annotator, CORRECT, SIGNIFICANT, SUFFICIENT)


def weak_record(item_id: ItemId, annotator: str) -> AnnotationRecord:
    return AnnotationRecord(item_id, annotator, CORRECT, SIGNIFICANT, REQUIRES_MORE)


def dual(item_obj: ReviewItem, positive: bool = True):
    maker = fp_record if positive else weak_record
    return [maker(item_obj.item_id, a) for a in ("ann-1", "ann-2")]


# --- rubric construction -----------------------------------------------------

def test_rubric_collects_dual_fully_positive_items():
    items = [item("h1", 1), item("h1", 2), item("h2", 1)]
    annotations = {
        items[0].item_id: dual(items[0], True),
        items[1].item_id: dual(items[1], False),
        items[2].item_id: dual(items[2], True),
    }
    rubric = build_rubric("p", items, annotations)
    assert rubric is not None
    assert [e.item_id for e in rubric.entries] == [
        items[0].item_id, items[2].item_id,
    ]


def test_rubric_empty_means_exclusion():
    items = [item("h1", 1)]
    annotations = {items[0].item_id: dual(items[0], False)}
    assert build_rubric("p", items, annotations) is None


def test_rubric_keeps_duplicate_concerns():
    first, second = item("h1", 1), item("h2", 1)
    annotations = {
        first.item_id: dual(first, True),
        second.item_id: dual(second, True),
    }
    rubric = build_rubric("p", [first, second], annotations)
    assert len(rubric.entries) == 2


def test_rubric_demands_dual_annotation():
    solo = item("h1", 1)
    annotations = {solo.item_id: [fp_record(solo.item_id, "ann-1")]}
    with pytest.raises(MissingDualAnnotation):
        build_rubric("p", [solo], annotations)
    relaxed = build_rubric("p", [solo], annotations, require_dual=False)
    assert len(relaxed.entries) == 1


def test_rubric_half_positive_dual_item_excluded():
    mixed = item("h1", 1)
    annotations = {
        mixed.item_id: [
            fp_record(mixed.item_id, "ann-1"),
            weak_record(mixed.item_id, "ann-2"),
        ]
    }
    assert build_rubric("p", [mixed], annotations) is None


# --- recall / precision / f1 -------------------------------------------------

def make_rubric(n: int):
    entries = [item("h", i) for i in range(1, n + 1)]
    annotations = {e.item_id: dual(e, True) for e in entries}
    return build_rubric("p", entries, annotations)


def test_recall_counts_matched_entries():
    rubric = make_rubric(2)
    generated = [item("g", 1)]

    def verdict(g, r):
        return 2 if r.item_id.index == 1 else 0

    assert score_recall(rubric, generated, verdict) == 0.5


def test_recall_empty_generated_is_zero():
    assert score_recall(make_rubric(3), [], lambda g, r: 3) == 0.0


def test_recall_full_coverage():
    rubric = make_rubric(4)
    generated = [item("g", i) for i in range(1, 5)]
    assert score_recall(rubric, generated, lambda g, r: 2) == 1.0


def test_recall_monotone_in_generated_set():
    rubric = make_rubric(5)
    pool = [item("g", i) for i in range(1, 6)]

    def verdict(g, r):
        return 2 if g.item_id.index == r.item_id.index else 0

    values = [
        score_recall(rubric, pool[:k], verdict) for k in range(len(pool) + 1)
    ]
    assert values == sorted(values)


def test_precision_counting():
    generated = [item("g", i) for i in range(1, 5)]

    def meta(g):
        positive = g.item_id.index <= 3
        return (fp_record if positive else weak_record)(g.item_id, "meta")

    assert score_precision(generated, meta) == 0.75


def test_precision_extremes_and_permutation_invariance():
    generated = [item("g", i) for i in range(1, 4)]
    assert score_precision(generated, lambda g: fp_record(g.item_id, "m")) == 1.0
    assert score_precision(generated, lambda g: weak_record(g.item_id, "m")) == 0.0

    def meta(g):
        positive = g.item_id.index == 2
        return (fp_record if positive else weak_record)(g.item_id, "m")

    for perm in itertools.permutations(generated):
        assert score_precision(list(perm), meta) == pytest.approx(1 / 3)


def test_precision_empty_generated():
    with pytest.raises(EmptyGenerated):
        score_precision([], lambda g: None)


def test_f1_values():
    assert f1(0.5, 0.5) == 0.5
    assert f1(0.75, 0.25) == pytest.approx(0.375)
    assert f1(0.0, 0.0) == 0.0
    assert f1(1.0, 0.0) == 0.0


@given(p=st.floats(0, 1), r=st.floats(0, 1))
@settings(max_examples=100)
def test_f1_bounds(p, r):
    value = f1(p, r)
    assert 0.0 <= value <= 1.0
    assert value <= min(2 * p, 2 * r) + 1e-12
    assert value <= max(p, r) + 1e-12


def test_score_paper_zero_items_convention():
    result = score_paper(make_rubric(2), [], lambda g, r: 3, lambda g: None)
    assert (result.precision, result.recall, result.f1) == (0.0, 0.0, 0.0)
    assert result.generated_count == 0


def test_everything_similar_everything_positive_scores_ones():
    rubric = make_rubric(3)
    generated = [item("g", i) for i in range(1, 4)]
    result = score_paper(
        rubric, generated, lambda g, r: 3, lambda g: fp_record(g.item_id, "m")
    )
    assert (result.precision, result.recall, result.f1) == (1.0, 1.0, 1.0)


# --- leaderboard ---------------------------------------------------------------

def result(paper, precision, recall, count=3):
    return BenchPaperResult(
        paper_id=paper, precision=precision, recall=recall,
        f1=f1(precision, recall), generated_count=count,
    )


def test_leaderboard_macro_mean():
    rows = aggregate_leaderboard(
        {"r1": [result("a", 0.4, 0.4), result("b", 0.6, 0.6)]}
    )
    assert rows[0].f1 == pytest.approx(0.5)
    assert rows[0].papers_scored == 2


def test_mean_of_f1_differs_from_f1_of_means():
    per_paper = [result("a", 1.0, 0.2), result("b", 0.2, 1.0)]
    rows = aggregate_leaderboard({"r": per_paper})
    macro_f1 = rows[0].f1
    harmonic_of_means = f1(rows[0].precision, rows[0].recall)
    assert macro_f1 == pytest.approx((f1(1.0, 0.2) + f1(0.2, 1.0)) / 2)
    assert abs(macro_f1 - harmonic_of_means) > 0.2


def test_single_paper_leaderboard_equals_paper_result():
    only = result("a", 0.7, 0.3)
    row = aggregate_leaderboard({"r": [only]})[0]
    assert (row.precision, row.recall, row.f1) == (
        only.precision, only.recall, only.f1,
    )


def test_paper_set_mismatch_rejected():
    with pytest.raises(PaperSetMismatch):
        aggregate_leaderboard(
            {"r1": [result("a", 1, 1)], "r2": [result("b", 1, 1)]}
        )


def test_leaderboard_sorted_by_f1_then_id():
    rows = aggregate_leaderboard(
        {
            "zeta": [result("a", 0.8, 0.8)],
            "alpha": [result("a", 0.8, 0.8)],
            "mid": [result("a", 0.5, 0.5)],
        }
    )
    assert [r.reviewer_id for r in rows] == ["alpha", "zeta", "mid"]


def test_render_leaderboard_format():
    text = render_leaderboard(
        aggregate_leaderboard({"r": [result("a", 2 / 3, 1 / 3)]})
    )
    header, row = text.strip().split("\n")
    assert header.split("\t") == [
        "reviewer_id", "precision", "recall", "f1", "mean_items", "papers_scored",
    ]
    assert row.split("\t")[1] == "0.6667"
