"""Worst-case kinematic object relevance for urban driving scenes, plus
statistical validation of relevance filters against a motion predictor."""

__version__ = "0.1.0"

from .core import (
    Category,
    CapabilityError,
    EgoCapabilities,
    GeometryError,
    ObjectState,
    RadialTangentialState,
    Scene,
    ScenarioClass,
    Vec2,
    WorldAssumptions,
    classify_scenario,
    decompose_relative_state,
    region_filter,
)
from .criteria import (
    ExtendedScenario,
    ManeuverTimeline,
    PassingGeometry,
    RelevanceVerdict,
    base_pairwise_relevant,
    relevant_objects,
    rta_margin,
    rtt_margin,
    rtt_prime_applicable,
    rtt_prime_ego_maneuver,
    rtt_prime_margin,
    rtt_prime_opponent_state,
    txt_prime_gate_threshold,
    txt_prime_lateral_gate,
    worst_case_closest_approach,
)
from .config import DEFAULT_CAPABILITIES, DEFAULT_WORLD, Settings, resolve_settings
from .harness import (
    CONDITION_A,
    CONDITION_R,
    CONDITION_RV,
    CONDITION_RV2,
    Condition,
    ErrorSample,
    Verdict,
    apply_condition,
    pairwise_pvalues,
    run_campaign,
    validate_filter,
)
from .oracle import Phase, PhasePlan, simulate_min_gap
from .predictor import (
    PredictionSet,
    PredictorParams,
    Trajectory,
    generate_synthetic_dataset,
    min_ade_topk,
    predict_modes,
)
from .stats import (
    CvmResult,
    Ecdf,
    PValueSummary,
    cvm_pvalue,
    cvm_statistic,
    cvm_test,
    ecdf_eval,
    summarize_pvalues,
)

__all__ = [name for name in dir() if not name.startswith("_")]
