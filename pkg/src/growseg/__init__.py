"""Seeded segmentation toolkit.

Cellular-automaton engines (classical seeded growth and a fault-tolerant
membership-guarded variant), automatic seed generation, a region-growing
baseline, shape and overlap metrics, and a batch/report/serve harness.
"""

from .grid import (
    BinaryMask,
    CellGrid,
    GrayImage,
    Label,
    Neighborhood,
    Seed,
    SeedSet,
    crop_roi,
    neighbors,
    seed_set,
)
from .growcut import GrowCutConfig, SegmentationResult, attenuation, init_grid, run, step
from .fuzzy import (
    FuzzyConfig,
    MembershipModel,
    fit_membership_model,
    init_fuzzy,
    model_strength,
    run_fuzzy,
    step_fuzzy,
)
from .metrics import (
    MetricsReport,
    OverlapStats,
    ShapeStats,
    SlopeSpectrum,
    WilcoxonResult,
    balanced_accuracy,
    metrics_report,
    overlap_stats,
    perimeter,
    relative_error,
    shape_stats,
    slope_spectrum,
    spectrum_pvalue,
    trace_contours,
    wilcoxon_signed_rank,
)
from .mlt import (
    DiffusionParams,
    MltParams,
    diffuse,
    multilevel_threshold,
    run_ssgc,
    select_mass_region,
    synthesize_seeds,
    threshold_ladder,
)
from .deseed import DeParams, SeedSolution, evolve, generate_seeds, seed_fitness
from .regiongrow import GrowCriterion, RegionGrowConfig, region_grow
from .harness import (
    ExperimentSpec,
    RunFailure,
    RunRecord,
    report,
    run_experiment,
    segment_with_method,
    summarize,
)

__version__ = "0.1.0"

__all__ = [
    "BinaryMask", "CellGrid", "GrayImage", "Label", "Neighborhood", "Seed",
    "SeedSet", "crop_roi", "neighbors", "seed_set",
    "GrowCutConfig", "SegmentationResult", "attenuation", "init_grid", "run", "step",
    "FuzzyConfig", "MembershipModel", "fit_membership_model", "init_fuzzy",
    "model_strength", "run_fuzzy", "step_fuzzy",
    "MetricsReport", "OverlapStats", "ShapeStats", "SlopeSpectrum",
    "WilcoxonResult", "balanced_accuracy", "metrics_report", "overlap_stats",
    "perimeter", "relative_error", "shape_stats", "slope_spectrum",
    "spectrum_pvalue", "trace_contours", "wilcoxon_signed_rank",
    "DiffusionParams", "MltParams", "diffuse", "multilevel_threshold",
    "run_ssgc", "select_mass_region", "synthesize_seeds", "threshold_ladder",
    "DeParams", "SeedSolution", "evolve", "generate_seeds", "seed_fitness",
    "GrowCriterion", "RegionGrowConfig", "region_grow",
    "ExperimentSpec", "RunFailure", "RunRecord", "report", "run_experiment",
    "segment_with_method", "summarize",
    "__version__",
]
