"""Equilibrium paths by damped forward-backward iteration, plus endemic steady states."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, DomainError, InvariantViolation
from .model import (
    NO_POLICY,
    ActivityPath,
    EpiState,
    InfectedActivityPolicy,
    ModelParams,
    StatePath,
    asymptotic_reproduction_number,
    simulate,
    utility,
)
from .values import (
    EquilibriumKind,
    ValuePath,
    Values,
    backward_sweep,
    disease_free_values,
)

log = logging.getLogger(__name__)

TERMINAL_MODES = ("auto", "disease-free", "endemic")
SUMMARY_DAYS = (365, 730, 1095)


@dataclass(frozen=True)
class SolverConfig:
    horizon: int = 5000
    damping: float = 0.1
    tolerance: float = 1e-8
    max_iterations: int = 20000
    terminal: str = "auto"
    min_damping: float = 0.005

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if not 0 < self.damping <= 1:
            raise ValueError("damping must lie in (0, 1]")
        if not 0 < self.min_damping <= self.damping:
            raise ValueError("min_damping must lie in (0, damping]")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be > 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.terminal not in TERMINAL_MODES:
            raise ValueError(f"terminal must be one of {TERMINAL_MODES}")


@dataclass(frozen=True)
class SteadyState:
    state: EpiState
    a_p: float
    a_q: float
    values: Values
    endemic: bool
    iterations: int = 0

    @property
    def infected(self):
        return self.state.infected


@dataclass(frozen=True)
class Summary:
    peak_infected: float
    peak_day: int
    long_run_activity_p: float
    long_run_activity_q: float
    final_infected: float
    ever_infected: dict
    min_activity_p: float
    min_activity_day: int
    welfare: float

    def as_dict(self):
        d = dict(self.__dict__)
        d["ever_infected"] = {str(k): v for k, v in self.ever_infected.items()}
        return d


@dataclass(frozen=True)
class EquilibriumSolution:
    kind: EquilibriumKind
    params: ModelParams
    policy: InfectedActivityPolicy
    initial: EpiState
    states: StatePath
    activities: ActivityPath
    values: ValuePath
    terminal_activity: tuple
    iterations: int
    residual: float
    converged: bool
    welfare: float
    summary: Summary
    residual_history: list = field(default_factory=list, repr=False)

    @property
    def horizon(self):
        return self.activities.horizon

    def pressure(self):
        return self.states.pressure(self.params, self.policy)


def _steady_values(kind, eff, policy, s_p, s_q, i, a_p, a_q):
    """Solve the stationary value equations (linear in V) for fixed states and activities."""
    lam = eff.lam
    m = policy.mean_activity
    qflow = policy.flow_utility
    bp, bq = eff.beta_p, eff.beta_q
    A = np.zeros((5, 5))
    b = np.zeros(5)
    # order: s_p, i_p, r, s_q, i_q; each row is V_x/lam - rhs = 0
    A[0, 0] = 1 / lam - 1 + bp * a_p * i
    A[0, 1] = -bp * a_p * i
    b[0] = utility(a_p)
    A[1, 1] = 1 / lam - 1 + eff.gamma_p
    A[1, 2] = -eff.gamma_p
    b[1] = qflow - eff.gamma_p * eff.kappa_p
    A[2, 2] = 1 / lam - 1 + eff.alpha
    A[2, 3] = -eff.alpha
    A[3, 3] = 1 / lam - 1 + bq * a_q * i
    A[3, 4] = -bq * a_q * i
    b[3] = utility(a_q)
    A[4, 4] = 1 / lam - 1 + eff.gamma_q
    A[4, 2] = -eff.gamma_q
    b[4] = qflow - eff.gamma_q * eff.kappa_q
    if kind is EquilibriumKind.CENTRALIZED:
        for row, weight in ((1, 1.0), (4, eff.sigma)):
            c = weight * m
            A[row, 0] += c * bp * a_p * s_p
            A[row, 1] -= c * bp * a_p * s_p
            A[row, 3] += c * bq * a_q * s_q
            A[row, 4] -= c * bq * a_q * s_q
    return Values(*np.linalg.solve(A, b))


def _endemic_state(eff, policy, a_q):
    """Stationary compartments with no primary agents left, or None if infection dies out."""
    m = policy.mean_activity
    contact = eff.beta_q * eff.sigma * m * a_q
    if contact <= eff.gamma_q:
        return None
    s_q = eff.gamma_q / contact
    i_q = (1.0 - s_q) * eff.alpha / (eff.alpha + eff.gamma_q)
    r = 1.0 - s_q - i_q
    return EpiState(0.0, 0.0, r, s_q, i_q)


def endemic_steady_state(kind, params: ModelParams,
                         infected_policy: InfectedActivityPolicy = NO_POLICY,
                         damping=0.5, tolerance=1e-13, max_iterations=100000) -> SteadyState:
    """Stationary point of states, values and activities.

    Iterates on the susceptible activities: each pass maps them to the zero-flow
    compartments and the stationary values, then back through the first-order
    condition; the update is damped. Returns a disease-free result when the
    all-secondary population cannot sustain infection even at full activity.
    """
    kind = EquilibriumKind.parse(kind)
    if params.alpha <= 0:
        raise DomainError("no endemic steady state without waning immunity (alpha = 0)")
    eff = infected_policy.apply(params)
    m = infected_policy.mean_activity
    if asymptotic_reproduction_number(params, infected_policy) <= 1.0:
        return SteadyState(EpiState(0.0, 0.0, 0.0, 1.0, 0.0), 1.0, 1.0,
                           disease_free_values(eff, infected_policy), endemic=False)
    a_p = a_q = 1.0
    w = damping
    prev = np.inf
    for n in range(1, max_iterations + 1):
        state = _endemic_state(eff, infected_policy, a_q)
        if state is None:
            new_p = new_q = 1.0
        else:
            i = m * eff.sigma * state.i_q
            v = _steady_values(kind, eff, infected_policy, state.s_p, state.s_q, i, a_p, a_q)
            new_p = 1.0 / (1.0 + eff.beta_p * i * max(v.gap_p, 0.0))
            new_q = 1.0 / (1.0 + eff.beta_q * i * max(v.gap_q, 0.0))
        res = max(abs(new_p - a_p), abs(new_q - a_q))
        if state is not None and res < tolerance:
            return SteadyState(state, a_p, a_q, v, endemic=True, iterations=n)
        if res > prev:
            w = max(w / 2, 1e-3)
        prev = res
        a_p += w * (new_p - a_p)
        a_q += w * (new_q - a_q)
    raise ConvergenceError(f"steady state did not converge (residual {res:.3e})", [res])


def terminal_values(kind, params, infected_policy=NO_POLICY, mode="auto",
                    initial: EpiState | None = None) -> Values:
    """Continuation values closing the horizon.

    In ``auto`` mode these are the disease-free values under permanent
    immunity or when ``initial`` carries no infection (the disease can then
    never appear), and the endemic steady-state values otherwise.
    """
    kind = EquilibriumKind.parse(kind)
    eff = infected_policy.apply(params)
    clean = initial is not None and initial.infected == 0
    if mode == "disease-free" or (mode == "auto" and (params.alpha == 0 or clean)):
        return disease_free_values(eff, infected_policy)
    return endemic_steady_state(kind, params, infected_policy).values


def flow_payoff(X, a_p, a_q, params, infected_policy=NO_POLICY):
    """Per-day objective sum_j s_j u(a_j) - gamma_j kappa_j i_j (+ quarantine utility)."""
    qflow = infected_policy.flow_utility
    return (X[..., 0] * utility(a_p) + X[..., 3] * utility(a_q)
            - params.gamma_p * params.kappa_p * X[..., 1]
            - params.gamma_q * params.kappa_q * X[..., 4]
            + qflow * (X[..., 1] + X[..., 4]))


def welfare(states: StatePath, activities: ActivityPath, params: ModelParams,
            infected_policy: InfectedActivityPolicy = NO_POLICY, tail=True) -> float:
    """Discounted objective over days 0..T-1.

    With ``tail`` the day-T payoff (at the last activity) is continued as a
    perpetuity, which is exact once the path has settled into a steady state.
    """
    T = activities.horizon
    lam = params.lam
    disc = lam ** np.arange(T)
    flows = flow_payoff(states.values[:T], activities.a_p, activities.a_q, params, infected_policy)
    total = float(np.sum(disc * flows))
    if tail:
        last = flow_payoff(states.values[T], activities.a_p[-1], activities.a_q[-1],
                           params, infected_policy)
        total += float(lam ** T * last / (1.0 - lam))
    return total


def foc_residual(solution: EquilibriumSolution) -> float:
    """max_t |u'(a_t) - beta_j i_t (V_s - V_i)| over both susceptible types."""
    eff = solution.policy.apply(solution.params)
    T = solution.horizon
    i = solution.pressure()[:T]
    V = solution.values.values[:T]
    a = solution.activities
    r_p = 1.0 / a.a_p - 1.0 - eff.beta_p * i * (V[:, 0] - V[:, 1])
    r_q = 1.0 / a.a_q - 1.0 - eff.beta_q * i * (V[:, 3] - V[:, 4])
    return float(max(np.max(np.abs(r_p)), np.max(np.abs(r_q))))


def summarize(states: StatePath, activities: ActivityPath, welfare_value: float) -> Summary:
    infected = states.infected
    peak_day = int(np.argmax(infected))
    T = activities.horizon
    min_day = int(np.argmin(activities.a_p))
    ever = {d: float(states.ever_infected[d]) for d in SUMMARY_DAYS if d <= T}
    return Summary(
        peak_infected=float(infected[peak_day]),
        peak_day=peak_day,
        long_run_activity_p=float(activities.a_p[-1]),
        long_run_activity_q=float(activities.a_q[-1]),
        final_infected=float(infected[T]),
        ever_infected=ever,
        min_activity_p=float(activities.a_p[min_day]),
        min_activity_day=min_day,
        welfare=welfare_value,
    )


def _residual(best: ActivityPath, current: ActivityPath) -> float:
    # activity gap and first-order residual in marginal-utility units
    gap = best.sup_distance(current)
    foc = max(np.max(np.abs(1.0 / current.a_p - 1.0 / best.a_p)),
              np.max(np.abs(1.0 / current.a_q - 1.0 / best.a_q)))
    return float(max(gap, foc))


def _check_gaps(values: ValuePath):
    V = values.values[:-1]
    bad = np.flatnonzero((V[:, 0] < V[:, 1]) | (V[:, 3] < V[:, 4]))
    if bad.size:
        raise InvariantViolation(f"converged path has V_s < V_i on day {bad[0]}", date=int(bad[0]))


def solve(kind, initial: EpiState, params: ModelParams,
          infected_policy: InfectedActivityPolicy = NO_POLICY,
          config: SolverConfig = SolverConfig(), initial_guess: ActivityPath | None = None,
          raise_on_failure=True) -> EquilibriumSolution:
    """Equilibrium activity path by damped fixed-point iteration.

    Each pass simulates forward under the current activities, sweeps values
    backward and forms best responses, then moves a fraction ``w`` of the way
    towards them; ``w`` halves whenever the residual grows.
    """
    kind = EquilibriumKind.parse(kind)
    T = config.horizon
    terminal = terminal_values(kind, params, infected_policy, config.terminal, initial)
    current = initial_guess if initial_guess is not None else ActivityPath.constant(T)
    if current.horizon != T:
        raise ValueError("initial guess does not match the configured horizon")
    w = config.damping
    history = []
    prev = np.inf
    converged = False
    for n in range(1, config.max_iterations + 1):
        states = simulate(initial, current, params, infected_policy)
        sweep = backward_sweep(kind, states, current, params, infected_policy, terminal, strict=False)
        res = _residual(sweep.best_response, current)
        history.append(res)
        if res <= config.tolerance:
            converged = True
            break
        if res > prev:
            w = max(w / 2, config.min_damping)
        prev = res
        current = ActivityPath(current.a_p + w * (sweep.best_response.a_p - current.a_p),
                               current.a_q + w * (sweep.best_response.a_q - current.a_q))
    log.debug("%s solve: %d iterations, residual %.3e", kind.value, n, res)
    if not converged and raise_on_failure:
        raise ConvergenceError(
            f"{kind.value} equilibrium not converged after {n} iterations (residual {res:.3e})",
            history)
    if converged:
        _check_gaps(sweep.values)
    W = welfare(states, current, params, infected_policy)
    return EquilibriumSolution(
        kind=kind, params=params, policy=infected_policy, initial=initial,
        states=states, activities=current, values=sweep.values,
        terminal_activity=sweep.terminal_activity, iterations=n, residual=res,
        converged=converged, welfare=W, summary=summarize(states, current, W),
        residual_history=history,
    )


def horizon_sensitivity(kind, initial, params, infected_policy=NO_POLICY,
                        config: SolverConfig = SolverConfig(), extra=500) -> float:
    """Sup-norm change of the activity path on days 0..T-1 when the horizon grows by ``extra``."""
    from dataclasses import replace

    base = solve(kind, initial, params, infected_policy, config)
    longer = solve(kind, initial, params, infected_policy, replace(config, horizon=config.horizon + extra))
    T = config.horizon
    return float(max(np.max(np.abs(base.activities.a_p - longer.activities.a_p[:T])),
                     np.max(np.abs(base.activities.a_q - longer.activities.a_q[:T]))))
