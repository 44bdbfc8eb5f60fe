"""Exception hierarchy shared across the package.

Two branches matter for the CLI's exit codes: ``InputError`` (malformed or
contract-violating data, exit code 2) and ``JudgeFailure`` (a judge backend
that cannot be reached or keeps answering garbage, exit code 3). Anything
else escaping to the CLI is treated as an internal invariant violation
(exit code 4).
"""


class ReviewScopeError(Exception):
    """Base class for all errors raised by this package."""


class InputError(ReviewScopeError):
    """Bad input data: schema violations, contract violations, bad flags."""


class JudgeFailure(ReviewScopeError):
    """A judge backend failed in a way retries could not fix."""


# --- corpus ---------------------------------------------------------------

class MalformedItem(InputError):
    """A review item heading without a usable claim body."""


class NonContiguousIndices(InputError):
    """Review item numbers do not run 1..n in order."""


class DuplicateIndex(InputError):
    """The same item number appears twice in one review."""


class CascadeViolation(InputError):
    """Annotation labels that break the correctness -> significance ->
    evidence cascade."""


class UnknownLabelString(InputError):
    """A label string outside the exact vocabulary."""


class DuplicateAnnotatorItem(InputError):
    """Two records for the same (item, annotator) pair."""


# --- rubric ---------------------------------------------------------------

class SameAnnotator(InputError):
    """A joint judgment needs records from two different annotators."""


# --- stats ----------------------------------------------------------------

class EmptyInput(InputError):
    """An operation that needs at least one observation got none."""


class DegenerateMarginals(InputError):
    """Chance agreement is exactly 1; kappa is undefined."""


class SingleCategoryVocabulary(InputError):
    """Gwet's AC1 needs at least two categories."""


class ZeroVariance(InputError):
    """All paired differences identical; the t statistic is undefined."""


class AllZeroDiffs(InputError):
    """No nonzero differences remain for the signed-rank test."""


class EmptyClusters(InputError):
    """The cluster bootstrap needs at least one cluster."""


class EmptyGroup(InputError):
    """A per-paper group with zero records."""


# --- similarity -----------------------------------------------------------

class EmptyPositiveClass(InputError):
    """Calibration has no reference-positive pairs."""


class EmptyNegativeClass(InputError):
    """Calibration has no reference-negative pairs."""


class UninformativeJudge(InputError):
    """sensitivity + specificity <= 1; the prevalence correction is
    undefined."""


class EmptySideA(InputError):
    """Coverage needs at least one item on the covered side."""


# --- bench ----------------------------------------------------------------

class MissingDualAnnotation(InputError):
    """Rubric construction requires every human item to be dual-annotated."""


class EmptyRubric(InputError):
    """Recall against an empty rubric is undefined."""


class EmptyGenerated(InputError):
    """Precision over zero generated items is undefined."""


class PaperSetMismatch(InputError):
    """Leaderboard rows must aggregate over one shared paper set."""


# --- panelsim -------------------------------------------------------------

class BadSpec(InputError):
    """A panel composition outside the supported shapes."""


class MissingVerdicts(InputError):
    """A cross-reviewer pair has no similarity verdict."""


class MissingMetaLabels(InputError):
    """Meta-reviewer filtering requested but an item has no meta label."""


# --- judge ----------------------------------------------------------------

class TransportFailure(JudgeFailure):
    """All dispatch attempts to the backend failed."""


class UnparseableResponse(JudgeFailure):
    """The backend answered, but no structured verdict could be parsed."""


class ContextOverflow(JudgeFailure):
    """The rendered prompt exceeds the hard size limit even after
    context truncation."""


class InconsistentPrediction(InputError):
    """A meta-review prediction label that contradicts the axis labels."""
