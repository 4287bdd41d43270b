"""Backward recursion for shadow values and the implied optimal activities.

Convention: ``V[x][t]`` is the value, discounted to day t, of being in state x
on day t+1. The first-order condition for activity on day t then reads
``u'(a_t) = beta * i_t * (V_s[t] - V_i[t])``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import InvariantViolation
from .model import (
    NO_POLICY,
    ActivityPath,
    EpiState,
    InfectedActivityPolicy,
    ModelParams,
    StatePath,
    utility,
)


class EquilibriumKind(enum.Enum):
    DECENTRALIZED = "decentralized"
    CENTRALIZED = "centralized"

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        return cls(str(name).strip().lower())


class Values(NamedTuple):
    """Shadow values of the five health states at a single date."""

    s_p: float
    i_p: float
    r: float
    s_q: float
    i_q: float

    @property
    def gap_p(self):
        return self.s_p - self.i_p

    @property
    def gap_q(self):
        return self.s_q - self.i_q


@dataclass(frozen=True)
class ValuePath:
    """Values for days 0..T, stored as a (T+1, 5) array."""

    values: np.ndarray

    @property
    def horizon(self):
        return self.values.shape[0] - 1

    def __getitem__(self, t) -> Values:
        return Values(*(float(v) for v in self.values[t]))

    V_sp = property(lambda self: self.values[:, 0])
    V_ip = property(lambda self: self.values[:, 1])
    V_r = property(lambda self: self.values[:, 2])
    V_sq = property(lambda self: self.values[:, 3])
    V_iq = property(lambda self: self.values[:, 4])

    __hash__ = None


def optimal_activity(beta_j: float, i_t: float, value_gap: float) -> float:
    """Closed-form solution of 1/a - 1 = beta * i * gap."""
    if value_gap < 0:
        raise InvariantViolation(f"negative value gap {value_gap!r}; value path not converged")
    return 1.0 / (1.0 + beta_j * i_t * value_gap)


def _common(next_values: Values, activities_next, i_next, params, policy):
    params = policy.apply(params)
    lam = params.lam
    a_p, a_q = activities_next
    v = next_values
    qflow = policy.flow_utility
    V_sp = lam * (utility(a_p) + v.s_p - params.beta_p * a_p * i_next * v.gap_p)
    V_sq = lam * (utility(a_q) + v.s_q - params.beta_q * a_q * i_next * v.gap_q)
    V_r = lam * (v.r + params.alpha * (v.s_q - v.r))
    V_ip = lam * (qflow + v.i_p - params.gamma_p * (params.kappa_p + v.i_p - v.r))
    V_iq = lam * (qflow + v.i_q - params.gamma_q * (params.kappa_q + v.i_q - v.r))
    return V_sp, V_ip, V_r, V_sq, V_iq


def backward_step_decentralized(next_values: Values, state_next: EpiState, activities_next,
                                i_next: float, params: ModelParams,
                                infected_policy: InfectedActivityPolicy = NO_POLICY) -> Values:
    """One step of the individual's recursion."""
    return Values(*_common(next_values, activities_next, i_next, params, infected_policy))


def externality(next_values: Values, state_next: EpiState, activities_next,
                params: ModelParams, infected_policy: InfectedActivityPolicy = NO_POLICY) -> float:
    """Marginal value of contagion caused by one unit of (unweighted) infection pressure."""
    params = infected_policy.apply(params)
    a_p, a_q = activities_next
    v = next_values
    return infected_policy.mean_activity * (
        params.beta_p * a_p * state_next.s_p * v.gap_p
        + params.beta_q * a_q * state_next.s_q * v.gap_q
    )


def backward_step_centralized(next_values: Values, state_next: EpiState, activities_next,
                              i_next: float, params: ModelParams,
                              infected_policy: InfectedActivityPolicy = NO_POLICY) -> Values:
    """Planner's step: infected values also carry the contagion they cause."""
    V_sp, V_ip, V_r, V_sq, V_iq = _common(next_values, activities_next, i_next, params, infected_policy)
    ext = externality(next_values, state_next, activities_next, params, infected_policy)
    lam = params.lam
    return Values(V_sp, V_ip - lam * ext, V_r, V_sq, V_iq - lam * params.sigma * ext)


def disease_free_values(params: ModelParams,
                        infected_policy: InfectedActivityPolicy = NO_POLICY) -> Values:
    """Stationary values when infections are absent forever and activity is full."""
    lam = params.lam
    qflow = infected_policy.flow_utility

    def infected(gamma, kappa):
        return lam * (qflow - gamma * kappa) / (1.0 - lam * (1.0 - gamma))

    return Values(0.0, infected(params.gamma_p, params.kappa_p), 0.0,
                  0.0, infected(params.gamma_q, params.kappa_q))


@dataclass(frozen=True)
class SweepResult:
    values: ValuePath
    best_response: ActivityPath
    terminal_activity: tuple


def backward_sweep(kind: EquilibriumKind, states: StatePath, activities: ActivityPath,
                   params: ModelParams, infected_policy: InfectedActivityPolicy,
                   terminal: Values, strict=True) -> SweepResult:
    """Values for days T..0 under the given path, then best responses on days 0..T-1.

    ``params`` are the structural (unadjusted) parameters; the policy's mask
    multiplier is applied here. The activity needed on day T is the
    first-order optimum under ``terminal``. With ``strict=False`` a negative
    value gap (possible for the planner far from equilibrium) is clipped to
    zero in the best response instead of raising.
    """
    kind = EquilibriumKind.parse(kind)
    eff = infected_policy.apply(params)
    if states.horizon != activities.horizon:
        raise ValueError(f"state path covers {states.horizon} days, activities {activities.horizon}")
    V, best_p, best_q, terminal_a, bad = _kernels.backward(
        states.values, activities.a_p, activities.a_q, np.asarray(terminal, dtype=float),
        eff.beta_p, eff.beta_q, eff.gamma_p, eff.gamma_q, eff.alpha, eff.sigma,
        infected_policy.mean_activity, eff.kappa_p, eff.kappa_q, eff.lam,
        infected_policy.flow_utility, kind is EquilibriumKind.CENTRALIZED,
    )
    if strict and bad >= 0:
        raise InvariantViolation(f"value gap V_s - V_i negative on day {bad}", date=int(bad))
    return SweepResult(ValuePath(V), ActivityPath(best_p, best_q), (float(terminal_a[0]), float(terminal_a[1])))
