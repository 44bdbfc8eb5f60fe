"""Criticism-level analytics and benchmark scoring for scientific peer
reviews: review-item data model, cascading rubric, agreement statistics,
misclassification-corrected overlap, benchmark scoring, and panel
composition simulation."""

__version__ = "0.1.0"

from .corpus import (
    AnnotationDataset,
    AnnotationRecord,
    EvidenceQuote,
    ItemId,
    PaperBundle,
    Review,
    ReviewItem,
    load_annotation_dataset,
    parse_review_markdown,
    serialize_review,
    validate_bundle,
)
from .rubric import (
    JOINT_CLASS_LABELS,
    JointClass,
    fully_positive_rate,
    is_fully_positive,
    joint_class_of,
    significance_score,
)
from .similarity import (
    CorrectedPrevalence,
    JudgeCalibration,
    SimilarityVerdict,
    corrected_distribution,
    corrected_prevalence_ci,
    coverage,
    error_rates,
    rogan_gladen,
)
from .stats import (
    BootstrapConfig,
    IntervalEstimate,
    cluster_bootstrap_ci,
    cohen_kappa,
    gwet_ac1,
    paired_t,
    per_paper_rates,
    percent_agreement,
    wilcoxon_signed_rank,
    wilson_ci,
)
from .bench import (
    BenchPaperResult,
    LeaderboardRow,
    Rubric,
    aggregate_leaderboard,
    build_rubric,
    f1,
    score_precision,
    score_recall,
)
from .panelsim import PanelMetrics, PanelSpec, enumerate_panels, panel_metrics, unique_items
from .judge import Judge, JudgeRequest, JudgeVerdict, MockBackend, RemoteBackend, cache_key

__all__ = [name for name in dir() if not name.startswith("_")]
