"""Single-facility location on [0, 1] with intra-group congestion costs."""

from .mechanisms import MECHANISMS, MechanismId, Outcome, left_m, lof_m, med_m, mid_m, res_m, run
from .model import (
    AgentProfile,
    AversionViolationError,
    EmptyInstanceError,
    GroupSpec,
    Instance,
    InstanceError,
    agent_cost,
    check_aversion,
    distance,
    max_cost,
    restructured_social_cost,
    social_cost,
)
from .oracle import (
    EnvelopePoint,
    OptimalInterval,
    grid_oracle,
    optimal_max,
    optimal_social,
    single_group_optimal_max,
)

__version__ = "0.1.0"
