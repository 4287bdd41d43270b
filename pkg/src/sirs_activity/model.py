"""Domain types and laws of motion for the behavioral SIRS model.

Five health states: primary susceptible (never infected), primary infected,
recovered, secondary susceptible (lost immunity) and secondary infected.
Time is measured in days; the population has measure one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import _kernels
from .errors import DomainError, IntegrityError, ValidationError

COMPARTMENTS = ("s_p", "i_p", "r", "s_q", "i_q")
MASS_TOL = 1e-12


def _check_unit(name, value, lo=0.0, hi=1.0):
    if not (lo <= value <= hi) or math.isnan(value):
        raise ValidationError(f"{name}={value!r} outside [{lo}, {hi}]", field=name)


@dataclass(frozen=True)
class EpiState:
    s_p: float
    i_p: float
    r: float
    s_q: float
    i_q: float

    def __post_init__(self):
        for f in fields(self):
            _check_unit(f.name, getattr(self, f.name))
        total = self.total
        if abs(total - 1.0) > MASS_TOL:
            raise ValidationError(f"compartments sum to {total!r}, not 1", field="mass")

    @classmethod
    def seeded(cls, infected, recovered=0.0):
        """All remaining mass primary susceptible; infected mass is primary."""
        return cls(1.0 - infected - recovered, infected, recovered, 0.0, 0.0)

    @classmethod
    def from_array(cls, x):
        return cls(*(float(v) for v in x))

    def as_array(self):
        return np.array([self.s_p, self.i_p, self.r, self.s_q, self.i_q])

    @property
    def total(self):
        return self.s_p + self.i_p + self.r + self.s_q + self.i_q

    @property
    def infected(self):
        return self.i_p + self.i_q


@dataclass(frozen=True)
class ModelParams:
    """Structural parameters, all per day.

    ``rho`` and ``delta`` are the daily time-discount rate and the daily
    arrival rate of a vaccine or cure; only the composite factor ``lam``
    enters the value recursions.
    """

    beta_p: float
    beta_q: float
    gamma_p: float
    gamma_q: float
    alpha: float
    sigma: float
    kappa_p: float
    kappa_q: float
    rho: float
    delta: float

    def __post_init__(self):
        for name in ("beta_p", "beta_q", "gamma_p", "gamma_q", "alpha", "sigma", "rho", "delta"):
            _check_unit(name, getattr(self, name))
        for name in ("kappa_p", "kappa_q"):
            v = getattr(self, name)
            if not (v >= 0.0 and math.isfinite(v)):
                raise ValidationError(f"{name}={v!r} must be finite and >= 0", field=name)
        if self.beta_q > self.beta_p:
            raise ValidationError("invariant beta_q <= beta_p violated", field="beta_q")
        if self.kappa_q > self.kappa_p:
            raise ValidationError("invariant kappa_q <= kappa_p violated", field="kappa_q")

    @property
    def lam(self):
        return (1.0 / (1.0 + self.rho)) * (1.0 / (1.0 + self.delta))

    @classmethod
    def benchmark(cls):
        return cls(
            beta_p=2.4 / 18,
            beta_q=2.4 / 18,
            gamma_p=1 / 18,
            gamma_q=1 / 18,
            alpha=1 / 750,
            sigma=1.0,
            kappa_p=512.0,
            kappa_q=512.0,
            rho=0.05 / 365,
            delta=0.67 / 365,
        )

    def replace(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True)
class InfectedActivityPolicy:
    """Quarantine of identified infected agents plus mask use.

    The default instance is the identity policy (no intervention).
    """

    identified_fraction: float = 0.0
    quarantine_activity: float = 1.0
    mask_transmission_multiplier: float = 1.0

    def __post_init__(self):
        for f in fields(self):
            _check_unit(f.name, getattr(self, f.name))
        if self.identified_fraction > 0 and self.quarantine_activity <= 0:
            raise ValidationError("quarantine_activity must be > 0 when agents are identified",
                                  field="quarantine_activity")

    @property
    def mean_activity(self):
        f = self.identified_fraction
        return f * self.quarantine_activity + (1.0 - f)

    @property
    def flow_utility(self):
        """Per-day expected utility of an infected agent from the activity restriction."""
        if self.identified_fraction == 0.0:
            return 0.0
        return self.identified_fraction * utility(self.quarantine_activity)

    @property
    def is_identity(self):
        return self == NO_POLICY

    def apply(self, params: ModelParams) -> ModelParams:
        """Scale both contagiousness parameters by the mask multiplier."""
        k = self.mask_transmission_multiplier
        if k == 1.0:
            return params
        return params.replace(beta_p=params.beta_p * k, beta_q=params.beta_q * k)


NO_POLICY = InfectedActivityPolicy()


@dataclass(frozen=True)
class ActivityPath:
    a_p: np.ndarray
    a_q: np.ndarray

    def __post_init__(self):
        a_p = np.asarray(self.a_p, dtype=float)
        a_q = np.asarray(self.a_q, dtype=float)
        if a_p.shape != a_q.shape or a_p.ndim != 1:
            raise ValidationError("a_p and a_q must be 1-d arrays of equal length", field="shape")
        for name, a in (("a_p", a_p), ("a_q", a_q)):
            if not np.all((a > 0.0) & (a <= 1.0)):
                raise ValidationError(f"{name} entries must lie in (0, 1]", field=name)
        object.__setattr__(self, "a_p", a_p)
        object.__setattr__(self, "a_q", a_q)

    @classmethod
    def constant(cls, horizon, value=1.0):
        return cls(np.full(horizon, value), np.full(horizon, value))

    @property
    def horizon(self):
        return self.a_p.shape[0]

    def sup_distance(self, other: ActivityPath) -> float:
        return float(max(np.max(np.abs(self.a_p - other.a_p)), np.max(np.abs(self.a_q - other.a_q))))

    def __eq__(self, other):
        if not isinstance(other, ActivityPath):
            return NotImplemented
        return np.array_equal(self.a_p, other.a_p) and np.array_equal(self.a_q, other.a_q)

    __hash__ = None


@dataclass(frozen=True)
class StatePath:
    """States for days 0..T as a (T+1, 5) array; ``renormalized`` counts corrected steps."""

    values: np.ndarray
    renormalized: int = field(default=0, compare=False)

    @property
    def horizon(self):
        return self.values.shape[0] - 1

    def __len__(self):
        return self.values.shape[0]

    def __getitem__(self, t) -> EpiState:
        return EpiState.from_array(self.values[t])

    s_p = property(lambda self: self.values[:, 0])
    i_p = property(lambda self: self.values[:, 1])
    r = property(lambda self: self.values[:, 2])
    s_q = property(lambda self: self.values[:, 3])
    i_q = property(lambda self: self.values[:, 4])

    @property
    def infected(self):
        return self.values[:, 1] + self.values[:, 4]

    @property
    def susceptible(self):
        return self.values[:, 0] + self.values[:, 3]

    @property
    def secondary(self):
        return self.values[:, 2] + self.values[:, 3] + self.values[:, 4]

    @property
    def ever_infected(self):
        return 1.0 - self.values[:, 0]

    def pressure(self, params: ModelParams, policy: InfectedActivityPolicy = NO_POLICY):
        return policy.mean_activity * (self.i_p + params.sigma * self.i_q)

    __hash__ = None


def utility(a):
    """u(a) = log(a) - a + 1, maximal (zero) at full activity."""
    arr = np.asarray(a, dtype=float)
    if np.any(arr <= 0.0):
        raise DomainError(f"utility undefined for activity <= 0 (got {a!r})")
    out = np.log(arr) - arr + 1.0
    return float(out) if out.ndim == 0 else out


def marginal_utility(a):
    arr = np.asarray(a, dtype=float)
    if np.any(arr <= 0.0):
        raise DomainError(f"marginal utility undefined for activity <= 0 (got {a!r})")
    out = 1.0 / arr - 1.0
    return float(out) if out.ndim == 0 else out


def aggregate_infection_pressure(state: EpiState, params: ModelParams,
                                 infected_policy: InfectedActivityPolicy = NO_POLICY) -> float:
    return infected_policy.mean_activity * (state.i_p + params.sigma * state.i_q)


def step(state: EpiState, a_p: float, a_q: float, params: ModelParams,
         infected_policy: InfectedActivityPolicy = NO_POLICY) -> EpiState:
    """Advance the five compartments by one day."""
    eff = infected_policy.apply(params)
    it = aggregate_infection_pressure(state, eff, infected_policy)
    new_p = eff.beta_p * a_p * state.s_p * it
    new_q = eff.beta_q * a_q * state.s_q * it
    rec_p = eff.gamma_p * state.i_p
    rec_q = eff.gamma_q * state.i_q
    lost = eff.alpha * state.r
    for name, flow, src in (("new primary infections", new_p, state.s_p),
                            ("new secondary infections", new_q, state.s_q),
                            ("primary recoveries", rec_p, state.i_p),
                            ("secondary recoveries", rec_q, state.i_q),
                            ("immunity losses", lost, state.r)):
        if flow > src or flow < 0:
            raise IntegrityError(f"{name} {flow!r} exceed source compartment {src!r}")
    nxt = np.array([
        state.s_p - new_p,
        state.i_p + new_p - rec_p,
        state.r + rec_p + rec_q - lost,
        state.s_q + lost - new_q,
        state.i_q + new_q - rec_q,
    ])
    total = nxt.sum()
    if abs(total - 1.0) > MASS_TOL:
        nxt /= total
    return EpiState.from_array(nxt)


def basic_reproduction_number(params: ModelParams,
                              infected_policy: InfectedActivityPolicy = NO_POLICY) -> float:
    """beta_p / gamma_p at full susceptible activity, after any NPI adjustment."""
    if params.gamma_p == 0:
        raise DomainError("R0 undefined for gamma_p = 0")
    eff = infected_policy.apply(params)
    return eff.beta_p * infected_policy.mean_activity / eff.gamma_p


def asymptotic_reproduction_number(params: ModelParams,
                                   infected_policy: InfectedActivityPolicy = NO_POLICY) -> float:
    """R0 in an all-secondary population at full activity."""
    if params.gamma_q == 0:
        raise DomainError("asymptotic R0 undefined for gamma_q = 0")
    eff = infected_policy.apply(params)
    return eff.beta_q * params.sigma * infected_policy.mean_activity / eff.gamma_q


def simulate(initial: EpiState, activities: ActivityPath, params: ModelParams,
             infected_policy: InfectedActivityPolicy = NO_POLICY) -> StatePath:
    eff = infected_policy.apply(params)
    X, renormalized, bad = _kernels.forward(
        initial.as_array(), activities.a_p, activities.a_q,
        eff.beta_p, eff.beta_q, eff.gamma_p, eff.gamma_q, eff.alpha, eff.sigma,
        infected_policy.mean_activity,
    )
    if bad >= 0:
        raise IntegrityError(f"flow exceeded its source compartment on day {bad}")
    return StatePath(X, int(renormalized))


def mean_activity(states: StatePath, activities: ActivityPath,
                  infected_policy: InfectedActivityPolicy = NO_POLICY) -> np.ndarray:
    """Population-average activity; recovered agents are fully active."""
    X = states.values[: activities.horizon]
    m = infected_policy.mean_activity
    return (X[:, 0] * activities.a_p + X[:, 3] * activities.a_q
            + m * (X[:, 1] + X[:, 4]) + X[:, 2])
