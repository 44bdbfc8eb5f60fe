"""The cascading three-axis rubric: composite indicators, the ordinal
significance score, and the ten-class joint expert-judgment label.

A review item is *fully positive* iff it is rated Correct, Significant (the
top of the 0-2 ordinal scale) and evidence-Sufficient. The joint class of a
dual-annotated item encodes both the cascade outcome and where the two
annotators agree or disagree.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

from .corpus import (
    CORRECT,
    MARGINALLY_SIGNIFICANT,
    NOT_CORRECT,
    NOT_SIGNIFICANT,
    REQUIRES_MORE,
    SIGNIFICANT,
    SUFFICIENT,
    AnnotationRecord,
    ItemId,
)
from .errors import EmptyInput, SameAnnotator

# The ten joint-class labels, bit-exact wire strings, indexed by class id.
JOINT_CLASS_LABELS = (
    "correct_significant_sufficient",            # 1
    "correct_significant_requires_more",         # 2
    "correct_significant_disagree_on_evidence",  # 3
    "correct_marginal_sufficient",               # 4
    "correct_marginal_requires_more",            # 5
    "correct_marginal_disagree_on_evidence",     # 6
    "correct_not_significant",                   # 7
    "correct_disagree_on_significance",          # 8
    "incorrect",                                 # 9
    "disagree_on_correctness",                   # 10
)

SIGNIFICANCE_SCORES = {NOT_SIGNIFICANT: 0, MARGINALLY_SIGNIFICANT: 1, SIGNIFICANT: 2}


@dataclass(frozen=True)
class JointClass:
    """One of the ten joint expert-judgment classes."""

    class_id: int
    class_label: str

    def __post_init__(self) -> None:
        if not 1 <= self.class_id <= 10:
            raise ValueError("class_id must be 1..10")
        if JOINT_CLASS_LABELS[self.class_id - 1] != self.class_label:
            raise ValueError(
                f"label {self.class_label!r} does not match class {self.class_id}"
            )

    @classmethod
    def from_id(cls, class_id: int) -> "JointClass":
        return cls(class_id, JOINT_CLASS_LABELS[class_id - 1])

    @classmethod
    def from_label(cls, label: str) -> "JointClass":
        try:
            return cls(JOINT_CLASS_LABELS.index(label) + 1, label)
        except ValueError:
            raise ValueError(f"unknown joint class label {label!r}") from None


def is_fully_positive(a: AnnotationRecord) -> bool:
    """Correct, Significant at the top level, and evidence-Sufficient."""
    return (
        a.correctness == CORRECT
        and a.significance == SIGNIFICANT
        and a.evidence == SUFFICIENT
    )


def significance_score(a: AnnotationRecord) -> int | None:
    """Map significance to the 0-2 ordinal scale; absent for Not Correct."""
    if a.correctness != CORRECT:
        return None
    assert a.significance is not None  # cascade guarantees this
    return SIGNIFICANCE_SCORES[a.significance]


def joint_class_of(a1: AnnotationRecord, a2: AnnotationRecord) -> JointClass:
    """Collapse two annotators' judgments of one item into a joint class.

    Classes 1-7: the annotators agree on correctness and significance, with
    evidence agreement/disagreement splitting the sub-classes; class 7 (both
    Not Significant) carries no evidence split because the cascade never
    populates evidence there. Class 8: agree Correct, disagree on
    significance (any split of the three levels). Class 9: both Not Correct.
    Class 10: disagree on correctness. Symmetric in argument order.
    """
    if a1.annotator_id == a2.annotator_id:
        raise SameAnnotator(
            f"joint class needs two annotators, got {a1.annotator_id!r} twice"
        )
    if a1.correctness != a2.correctness:
        return JointClass.from_id(10)
    if a1.correctness == NOT_CORRECT:
        return JointClass.from_id(9)
    if a1.significance != a2.significance:
        return JointClass.from_id(8)
    if a1.significance == NOT_SIGNIFICANT:
        return JointClass.from_id(7)
    base = 1 if a1.significance == SIGNIFICANT else 4
    if a1.evidence == a2.evidence:
        return JointClass.from_id(base if a1.evidence == SUFFICIENT else base + 1)
    return JointClass.from_id(base + 2)


def fully_positive_rate(records: Sequence[AnnotationRecord] | Iterable[AnnotationRecord]) -> float:
    """Fraction of records that are fully positive."""
    records = list(records)
    if not records:
        raise EmptyInput("fully_positive_rate needs at least one record")
    return sum(is_fully_positive(r) for r in records) / len(records)


def item_fully_positive(records: Sequence[AnnotationRecord]) -> bool:
    """An item is fully positive only if all of its annotation rows are.

    This is the rule shared by rubric construction and the panel
    simulation: dual-annotated items need both annotators on board.
    """
    records = list(records)
    return bool(records) and all(is_fully_positive(r) for r in records)


def cascade_legal_states() -> list[tuple[str, str | None, str | None]]:
    """Enumerate every cascade-legal (correctness, significance, evidence)
    triple. Used by exhaustiveness and symmetry tests."""
    states: list[tuple[str, str | None, str | None]] = [(NOT_CORRECT, None, None)]
    for significance in (SIGNIFICANT, MARGINALLY_SIGNIFICANT):
        for evidence in (SUFFICIENT, REQUIRES_MORE):
            states.append((CORRECT, significance, evidence))
    states.append((CORRECT, NOT_SIGNIFICANT, None))
    return states


def enumerate_joint_classes() -> dict[tuple, JointClass]:
    """Joint class for every ordered pair of cascade-legal states."""
    item = ItemId("paper", "reviewer", 1)
    table = {}
    for s1, s2 in product(cascade_legal_states(), repeat=2):
        a1 = AnnotationRecord(item, "annotator-1", *s1)
        a2 = AnnotationRecord(item, "annotator-2", *s2)
        table[(s1, s2)] = joint_class_of(a1, a2)
    return table
