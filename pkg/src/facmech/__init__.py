"""Strategyproof two-facility location with candidate locations on a line."""
from .model import (
    Agent,
    BoundExpr,
    ConfigurationError,
    DomainError,
    FacilityError,
    InfeasibleSolution,
    Instance,
    InstanceError,
    Objective,
    Solution,
    agent_cost,
    agent_costs,
    median_agent,
    nearest_candidates,
    objective_value,
    optimal,
    parse_rational,
)
from .mechanisms import MECHANISM_NAMES, AlphaParam, Mechanism, Outcome, alpha_index
from .instances import Fixture, Generator, build_fixture, duplicate, generate
from .verification import (
    RatioResult,
    SPViolation,
    SweepReport,
    check_sp,
    compare_ratio_to_bound,
    fuzz_sp,
    pivotal_misreports,
    ratio,
    sweep,
)
from .documents import dumps_instance, load_instance, loads_instance, save_instance

__version__ = "0.1.0"
