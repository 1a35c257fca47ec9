from .bounds import MIDM_MAX_BOUND, UPPER_BOUNDS, Bound, QuadraticSurd, rational_sqrt, upper_bound
from .deviations import (
    AuditReport,
    DeviationModel,
    Violation,
    coalition_colocated_audit,
    coalition_report,
    colocated_coalitions,
    location_candidates,
    unilateral_audit,
    unilateral_report,
)
from .generator import GeneratorConfig, generate_instance, trial_instance
from .ratios import RatioReport, SearchReport, approximation_ratio, worst_case_search
from .witnesses import Fact, Witness, check_fact, check_witness, get_witness, medm_family, witness_corpus
