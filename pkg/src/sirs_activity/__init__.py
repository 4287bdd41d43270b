"""Behavioral SIRS epidemic model with endogenous social activity.

Computes decentralized and centralized (planner) equilibrium paths of
activity and disease states when immunity wanes.
"""

from .errors import (
    ConvergenceError,
    DomainError,
    IntegrityError,
    InvariantViolation,
    ModelError,
    ValidationError,
)
from .model import (
    NO_POLICY,
    ActivityPath,
    EpiState,
    InfectedActivityPolicy,
    ModelParams,
    StatePath,
    aggregate_infection_pressure,
    basic_reproduction_number,
    marginal_utility,
    simulate,
    step,
    utility,
)
from .scenarios import Scenario, load_scenario, preset
from .solver import (
    EquilibriumSolution,
    SolverConfig,
    endemic_steady_state,
    solve,
    welfare,
)
from .values import EquilibriumKind, ValuePath, backward_sweep, optimal_activity

__all__ = [name for name in dir() if not name.startswith("_")]
