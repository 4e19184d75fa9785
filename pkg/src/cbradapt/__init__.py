"""Case-based, utility-driven self-adaptation engine."""

__version__ = "0.1.0"

from .config import EngineConfig, Heuristic, Paradigm, load_config
from .engine import (
    AdaptationEngine,
    AdaptationRequest,
    AdaptationResponse,
    Provenance,
    adapt,
    best_fit,
    first_fit,
    formulate_request_case,
    response_from_case,
)
from .errors import *  # noqa: F401,F403
from .knowledge import (
    QAF,
    KnowledgeBase,
    RetainOutcome,
    UsefulnessVariant,
    build_qaf,
    case_similarity,
    load_kb,
    local_similarity,
    retain,
    save_kb,
    select_best,
    usefulness,
)
from .mediator import Mediator, RunReport, Scenario, SimulatedSystem, adapt_once, load_scenario, run_scenario
from .model import (
    UNCERTAIN,
    AttributeSchema,
    Case,
    Kind,
    Origin,
    SystemSchema,
    SystemState,
    count_uncertain,
    data_path,
    load_schema,
    load_state,
    state_space_size,
    validate_state,
)
from .uncertainty import UncertaintyAssessment, assess, concretize, decide, enumerate_kappa, overall_uncertainty
from .utility import (
    RequestAnalysis,
    UtilityFunction,
    UtilityModel,
    analyze_request,
    eval_function,
    load_utility_model,
    needs_adaptation,
    overall_utility,
)
