"""Cross-reviewer overlap: the four-category similarity taxonomy, judge
calibration, misclassification-corrected prevalence, and coverage.

The similarity ordinal runs 0-3: 0 = different target, 1 = same target but
different criticism, 2 = same target and criticism with different evidence,
3 = same in all three. A pair is *similar* iff its ordinal is >= 2; that
binary boundary is where the prevalence correction applies. Judge verdicts
are directionless: (a, b) and (b, a) carry one verdict.

The correction divides out the judge's error rates: given apparent
prevalence p, sensitivity and specificity, the corrected estimate is
(p + spec - 1) / (sens + spec - 1), clipped into [0, 1]. Within each binary
side the four-way split keeps the raw within-side proportions. Error-rate
transfer across pair types (e.g. to human-human pairs the judge was never
calibrated on) is assumed constant; that assumption is not configurable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .corpus import ItemId, ReviewItem
from .errors import (
    EmptyClusters,
    EmptyNegativeClass,
    EmptyPositiveClass,
    EmptySideA,
    InputError,
    UninformativeJudge,
)
from .stats import BootstrapConfig, IntervalEstimate

SIMILAR_THRESHOLD = 2  # ordinal >= 2 means same target and same criticism

ORDINAL_MEANINGS = (
    "different target",
    "same target, different criticism",
    "same target, same criticism, different evidence",
    "same target, same criticism, same evidence",
)

VERDICT_SOURCES = ("judge", "reference")


@dataclass(frozen=True)
class SimilarityVerdict:
    """Ordinal 0-3 classification of one unordered item pair."""

    ordinal: int
    source: str = "judge"

    def __post_init__(self) -> None:
        if not 0 <= self.ordinal <= 3:
            raise InputError(f"similarity ordinal must be 0..3, got {self.ordinal}")
        if self.source not in VERDICT_SOURCES:
            raise InputError(f"unknown verdict source {self.source!r}")

    @property
    def similar(self) -> bool:
        return self.ordinal >= SIMILAR_THRESHOLD


@dataclass(frozen=True)
class JudgeCalibration:
    """Binary confusion counts of a judge against reference labels."""

    tp: int
    fn: int
    fp: int
    tn: int

    def __post_init__(self) -> None:
        if min(self.tp, self.fn, self.fp, self.tn) < 0:
            raise InputError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fn + self.fp + self.tn


def error_rates(c: JudgeCalibration) -> tuple[float, float]:
    """(sensitivity, specificity) = (tp/(tp+fn), tn/(fp+tn))."""
    if c.tp + c.fn < 1:
        raise EmptyPositiveClass("no reference-similar pairs in calibration")
    if c.fp + c.tn < 1:
        raise EmptyNegativeClass("no reference-not-similar pairs in calibration")
    return c.tp / (c.tp + c.fn), c.tn / (c.fp + c.tn)


def calibrate(
    reference: Iterable[bool],
    predicted: Iterable[bool],
) -> JudgeCalibration:
    """Build confusion counts from aligned reference/predicted binary labels."""
    tp = fn = fp = tn = 0
    ref = list(reference)
    pred = list(predicted)
    if len(ref) != len(pred):
        raise InputError("reference and predicted labels must align")
    for truth, guess in zip(ref, pred):
        if truth and guess:
            tp += 1
        elif truth:
            fn += 1
        elif guess:
            fp += 1
        else:
            tn += 1
    return JudgeCalibration(tp=tp, fn=fn, fp=fp, tn=tn)


# ---------------------------------------------------------------------------
# Prevalence correction
# ---------------------------------------------------------------------------

def rogan_gladen(apparent: float, sens: float, spec: float) -> float:
    """Misclassification-corrected prevalence, clipped into [0, 1].

    Valid only for an informative judge (sens + spec > 1); apparent rates
    below 1 - spec clip to zero, rates above sens clip to one.
    """
    if sens + spec <= 1.0:
        raise UninformativeJudge(
            f"sens + spec must exceed 1, got {sens:.4f} + {spec:.4f}"
        )
    corrected = (apparent + spec - 1.0) / (sens + spec - 1.0)
    return min(1.0, max(0.0, corrected))


def corrected_distribution(
    raw_counts: Sequence[float],
    sens: float,
    spec: float,
) -> tuple[float, float, float, float]:
    """Correct a four-category distribution at the binary similar boundary.

    ``raw_counts`` orders categories by descending ordinal: (same evidence,
    different evidence, different criticism, different target) — i.e.
    ordinals (3, 2, 1, 0). The binary boundary (ordinal >= 2 vs < 2) is
    corrected with ``rogan_gladen``; within each side the mass is split
    proportionally to the raw within-side shares. Accepts raw counts,
    percentages, or proportions.
    """
    if len(raw_counts) != 4:
        raise InputError("corrected_distribution expects exactly 4 categories")
    counts = [float(c) for c in raw_counts]
    if any(c < 0 for c in counts):
        raise InputError("category counts must be non-negative")
    total = sum(counts)
    if total <= 0:
        raise InputError("total count must be positive")
    similar_raw = (counts[0] + counts[1]) / total
    similar = rogan_gladen(similar_raw, sens, spec)
    not_similar = 1.0 - similar

    def split(mass: float, a: float, b: float) -> tuple[float, float]:
        side = a + b
        if mass == 0.0 or side == 0.0:
            return 0.0, 0.0
        return mass * a / side, mass * b / side

    c3, c2 = split(similar, counts[0], counts[1])
    c1, c0 = split(not_similar, counts[2], counts[3])
    return c3, c2, c1, c0


@dataclass(frozen=True)
class CorrectedPrevalence:
    """Raw and corrected similar-pair prevalence with its bootstrap CI."""

    raw: float
    corrected: float
    sensitivity: float
    specificity: float
    ci: IntervalEstimate


def _similar_totals(
    verdicts: Iterable[SimilarityVerdict | int],
) -> tuple[int, int]:
    similar = total = 0
    for v in verdicts:
        ordinal = v.ordinal if isinstance(v, SimilarityVerdict) else int(v)
        similar += ordinal >= SIMILAR_THRESHOLD
        total += 1
    return similar, total


def corrected_prevalence_ci(
    pairs_by_paper: Mapping[str, Sequence[SimilarityVerdict | int]],
    calibration: JudgeCalibration,
    cfg: BootstrapConfig,
) -> CorrectedPrevalence:
    """Cluster-bootstrap CI for the corrected similar-pair prevalence.

    Each iteration resamples papers with replacement, recomputes the
    apparent prevalence, redraws sensitivity ~ Binomial(tp+fn, sens)/(tp+fn)
    and specificity ~ Binomial(fp+tn, spec)/(fp+tn), applies the correction,
    and clips into [0, 1]; the interval is the percentile band of those
    draws. The draw order (paper indices, then sensitivities, then
    specificities) is fixed, so output is a pure function of the seed.
    """
    papers = sorted(pairs_by_paper)
    if not papers:
        raise EmptyClusters("corrected_prevalence_ci needs at least one paper")
    sens, spec = error_rates(calibration)
    counts = np.array(
        [_similar_totals(pairs_by_paper[p]) for p in papers], dtype=float
    )
    similar_counts, pair_counts = counts[:, 0], counts[:, 1]
    if pair_counts.sum() <= 0:
        raise EmptyClusters("no pairs found across papers")
    raw = float(similar_counts.sum() / pair_counts.sum())
    corrected = rogan_gladen(raw, sens, spec)

    n = len(papers)
    m_pos = calibration.tp + calibration.fn
    m_neg = calibration.fp + calibration.tn
    rng = np.random.default_rng(cfg.seed)
    idx = rng.integers(0, n, size=(cfg.iterations, n))
    sens_draws = rng.binomial(m_pos, sens, size=cfg.iterations) / m_pos
    spec_draws = rng.binomial(m_neg, spec, size=cfg.iterations) / m_neg

    sim = similar_counts[idx].sum(axis=1)
    tot = pair_counts[idx].sum(axis=1)
    apparent = np.divide(sim, tot, out=np.zeros_like(sim), where=tot > 0)
    numer = apparent + spec_draws - 1.0
    denom = sens_draws + spec_draws - 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        draws = np.where(
            denom != 0,
            numer / np.where(denom == 0, 1.0, denom),
            np.sign(numer) * np.inf,
        )
    # Uninformative resamples are clipped into [0, 1] like everything else.
    draws = np.clip(np.nan_to_num(draws, nan=0.0), 0.0, 1.0)

    alpha = (1.0 - cfg.level) / 2.0
    lower, upper = np.percentile(draws, [100.0 * alpha, 100.0 * (1.0 - alpha)])
    ci = IntervalEstimate(
        point=corrected,
        lower=min(float(lower), corrected),
        upper=max(float(upper), corrected),
        level=cfg.level,
        method="percentile_bootstrap",
    )
    return CorrectedPrevalence(
        raw=raw,
        corrected=corrected,
        sensitivity=sens,
        specificity=spec,
        ci=ci,
    )


# ---------------------------------------------------------------------------
# Coverage
# ---------------------------------------------------------------------------

def coverage(
    items_a: Sequence[ReviewItem],
    items_b: Sequence[ReviewItem],
    verdicts: Callable[[ReviewItem, ReviewItem], SimilarityVerdict | int],
    threshold: int = SIMILAR_THRESHOLD,
) -> tuple[list[ReviewItem], float]:
    """Items of side A with at least one side-B counterpart at or above the
    threshold, and the covered fraction of side A.

    Threshold 2 is "same criticism" coverage; threshold 1 relaxes to "same
    target" coverage.
    """
    if not items_a:
        raise EmptySideA("coverage needs at least one item on side A")
    covered = []
    for a in items_a:
        for b in items_b:
            verdict = verdicts(a, b)
            ordinal = verdict.ordinal if isinstance(verdict, SimilarityVerdict) else int(verdict)
            if ordinal >= threshold:
                covered.append(a)
                break
    return covered, len(covered) / len(items_a)


# ---------------------------------------------------------------------------
# External interfaces: calibration files and verdict dumps
# ---------------------------------------------------------------------------

def load_calibration_file(path: str | Path) -> JudgeCalibration:
    """Read a calibration record: a JSON object with tp/fn/fp/tn fields."""
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg})") from None
    missing = {"tp", "fn", "fp", "tn"} - set(obj)
    if missing:
        raise InputError(f"{path}: missing fields {sorted(missing)}")
    values = {}
    for key in ("tp", "fn", "fp", "tn"):
        if not isinstance(obj[key], int) or obj[key] < 0:
            raise InputError(f"{path}: {key} must be a non-negative integer")
        values[key] = obj[key]
    return JudgeCalibration(**values)


@dataclass(frozen=True)
class VerdictRecord:
    """One line of a verdict dump: an unordered item pair and its ordinal."""

    paper_id: str
    item_id_a: ItemId
    item_id_b: ItemId
    ordinal: int
    source: str = "judge"

    @property
    def pair_key(self) -> frozenset[ItemId]:
        return frozenset((self.item_id_a, self.item_id_b))


def _item_id_from_json(value: object, where: str) -> ItemId:
    if (
        not isinstance(value, list)
        or len(value) != 3
        or not isinstance(value[2], int)
    ):
        raise InputError(f"{where}item ids are [paper_id, reviewer_id, index]")
    return ItemId(str(value[0]), str(value[1]), value[2])


def load_verdict_dump(path: str | Path) -> list[VerdictRecord]:
    """Read a line-delimited verdict dump (paper_id, item_id_a, item_id_b,
    ordinal, source)."""
    records = []
    for lineno, line in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), start=1
    ):
        if not line.strip():
            continue
        where = f"{path}:{lineno}: "
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise InputError(f"{where}invalid JSON ({exc.msg})") from None
        missing = {"paper_id", "item_id_a", "item_id_b", "ordinal"} - set(obj)
        if missing:
            raise InputError(f"{where}missing fields {sorted(missing)}")
        ordinal = obj["ordinal"]
        if not isinstance(ordinal, int) or not 0 <= ordinal <= 3:
            raise InputError(f"{where}ordinal must be an integer 0..3")
        source = obj.get("source", "judge")
        if source not in VERDICT_SOURCES:
            raise InputError(f"{where}unknown source {source!r}")
        records.append(
            VerdictRecord(
                paper_id=str(obj["paper_id"]),
                item_id_a=_item_id_from_json(obj["item_id_a"], where),
                item_id_b=_item_id_from_json(obj["item_id_b"], where),
                ordinal=ordinal,
                source=source,
            )
        )
    return records


def dump_verdict_record(record: VerdictRecord) -> str:
    return json.dumps(
        {
            "paper_id": record.paper_id,
            "item_id_a": list(record.item_id_a),
            "item_id_b": list(record.item_id_b),
            "ordinal": record.ordinal,
            "source": record.source,
        },
        sort_keys=True,
    )


def verdict_table(records: Iterable[VerdictRecord]) -> dict[frozenset[ItemId], int]:
    """Index verdicts by unordered pair; self-pairs of identical items are
    dropped (an item is trivially similar to itself)."""
    table: dict[frozenset[ItemId], int] = {}
    for record in records:
        key = record.pair_key
        if len(key) < 2:
            continue
        existing = table.get(key)
        if existing is not None and existing != record.ordinal:
            raise InputError(
                f"conflicting verdicts for pair {sorted(key)}: "
                f"{existing} vs {record.ordinal}"
            )
        table[key] = record.ordinal
    return table
