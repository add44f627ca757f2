"""scenebench: structured-scene benchmark generation and detection-based
image-text alignment scoring, with guidance-composition utilities."""

from .boxes import (
    BoundingBox,
    DetectedInstance,
    DetectionSet,
    PostProcessConfig,
    RawDetection,
    classify_color,
    extract_relations,
    iou,
    post_process,
)
from .generate import (
    BenchmarkEntry,
    BenchmarkStats,
    GeneratorConfig,
    benchmark_stats,
    build_benchmark,
    check_acyclic,
    generate_relations,
    sample_scene,
)
from .guidance import (
    GuidanceSpec,
    ToyDenoiser,
    cfg_combine,
    negative_combine,
    positive_combine,
    rte_combine,
    toy_denoise_loop,
)
from .revise import EnforcePair, MisalignmentReport, build_enforce_pair, diagnose
from .scene import InstanceSpec, RelationSpec, StructuredScene, validate_scene
from .scoring import (
    MatchingTargets,
    ScoreReport,
    align_score,
    best_matching,
    compute_bias,
    evaluate,
    score_matching,
)
from .stats import (
    ReportRow,
    group_scores,
    kendall_tau,
    krippendorff_alpha,
    pearson,
    relation_direction_accuracy,
    spearman,
    stability_report,
)
from .template import fill_template
from .vocab import PALETTE, RELATION_KINDS, CompatibilityTable, default_table

__version__ = "0.1.0"
