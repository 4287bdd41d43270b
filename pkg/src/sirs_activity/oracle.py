"""Exhaustive grid search over activity paths on tiny horizons.

This is a check on the first-order solver that shares none of its
machinery: paths are simulated forward and scored directly on the
discounted objective. Only the terminal continuation values (used to close
the horizon) are borrowed from the solver's terminal condition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba as nb
import numpy as np

from .model import NO_POLICY, ActivityPath, EpiState, InfectedActivityPolicy, ModelParams, simulate
from .solver import EquilibriumSolution, terminal_values
from .values import EquilibriumKind

MAX_LEAVES = 2 * 10**8
MAX_HORIZON = 4


@nb.njit(cache=True)
def _advance(x, ap, aq, it, bp, bq, gp, gq, alpha, out):
    new_p = bp * ap * x[0] * it
    new_q = bq * aq * x[3] * it
    out[0] = x[0] - new_p
    out[1] = x[1] + new_p - gp * x[1]
    out[2] = x[2] + gp * x[1] + gq * x[4] - alpha * x[2]
    out[3] = x[3] + alpha * x[2] - new_q
    out[4] = x[4] + new_q - gq * x[4]


@nb.njit(cache=True)
def _flow(x, ap, aq, up, uq, gp, gq, kp, kq, qflow):
    return x[0] * up + x[3] * uq - gp * kp * x[1] - gq * kq * x[4] + qflow * (x[1] + x[4])


@nb.njit(cache=True)
def _pressure(x, sigma, m):
    return m * (x[1] + sigma * x[4])


@nb.njit(cache=True)
def _terminal(x, it, VT, bp, bq, gp, gq, alpha, kp, kq, qflow, buf):
    # a linear continuation makes the last-day problem concave with a closed-form optimum
    gap_p = max(VT[0] - VT[1], 0.0)
    gap_q = max(VT[3] - VT[4], 0.0)
    ap = 1.0 / (1.0 + bp * it * gap_p)
    aq = 1.0 / (1.0 + bq * it * gap_q)
    up = np.log(ap) - ap + 1.0
    uq = np.log(aq) - aq + 1.0
    _advance(x, ap, aq, it, bp, bq, gp, gq, alpha, buf)
    cont = 0.0
    for k in range(5):
        cont += VT[k] * buf[k]
    return _flow(x, ap, aq, up, uq, gp, gq, kp, kq, qflow) + cont


@nb.njit(cache=True)
def _enumerate(x0, grid, T, active, fixed_p, fixed_q, exo, ipath,
               bp, bq, gp, gq, alpha, sigma, m, kp, kq, lam, qflow, VT):
    """Best objective over all gridded paths; ``active[t, j]`` marks enumerated entries."""
    n = grid.shape[0]
    D = 0
    for t in range(T):
        for j in range(2):
            if active[t, j]:
                D += 1
    dim_date = np.empty(D, dtype=np.int64)
    slot = np.full((T, 2), -1, dtype=np.int64)
    d = 0
    for t in range(T):
        for j in range(2):
            if active[t, j]:
                slot[t, j] = d
                dim_date[d] = t
                d += 1
    ugrid = np.log(grid) - grid + 1.0
    idx = np.zeros(D, dtype=np.int64)
    X = np.empty((T + 1, 5))
    acc = np.zeros(T + 1)
    X[0] = x0
    disc = np.empty(T + 1)
    disc[0] = 1.0
    for t in range(1, T + 1):
        disc[t] = disc[t - 1] * lam
    buf = np.empty(5)
    best = -np.inf
    best_idx = np.zeros(D, dtype=np.int64)
    start = 0
    while True:
        for t in range(start, T):
            if slot[t, 0] >= 0:
                ap = grid[idx[slot[t, 0]]]
                up = ugrid[idx[slot[t, 0]]]
            else:
                ap = fixed_p[t]
                up = np.log(ap) - ap + 1.0
            if slot[t, 1] >= 0:
                aq = grid[idx[slot[t, 1]]]
                uq = ugrid[idx[slot[t, 1]]]
            else:
                aq = fixed_q[t]
                uq = np.log(aq) - aq + 1.0
            it = ipath[t] if exo else _pressure(X[t], sigma, m)
            acc[t + 1] = acc[t] + disc[t] * _flow(X[t], ap, aq, up, uq, gp, gq, kp, kq, qflow)
            _advance(X[t], ap, aq, it, bp, bq, gp, gq, alpha, X[t + 1])
        iT = ipath[T] if exo else _pressure(X[T], sigma, m)
        val = acc[T] + disc[T] * _terminal(X[T], iT, VT, bp, bq, gp, gq, alpha, kp, kq, qflow, buf)
        if val > best:
            best = val
            best_idx[:] = idx
        k = D - 1
        while k >= 0:
            idx[k] += 1
            if idx[k] < n:
                break
            idx[k] = 0
            k -= 1
        if k < 0:
            break
        start = dim_date[k]
    return best, best_idx


def activity_grid(step):
    """Grid points step, 2*step, ..., 1 covering (0, 1] with the endpoint."""
    n = int(round(1.0 / step))
    if n < 1 or abs(n * step - 1.0) > 1e-9:
        raise ValueError(f"grid step {step!r} must divide 1")
    return np.arange(1, n + 1) / n


def _active_entries(initial, params, policy, T):
    # (date, type) entries whose susceptible pool is non-empty; the zero pattern
    # does not depend on the (strictly positive) activities
    X = simulate(initial, ActivityPath.constant(T), params, policy).values[:T]
    return np.column_stack([X[:, 0] > 0, X[:, 3] > 0])


def _check_size(n, dims):
    leaves = float(n) ** dims
    if leaves > MAX_LEAVES:
        raise ValueError(f"enumeration of {n}^{dims} = {leaves:.3g} paths is infeasible (limit {MAX_LEAVES:.0e})")


def _kernel_args(params, policy, terminal):
    eff = policy.apply(params)
    return (eff.beta_p, eff.beta_q, eff.gamma_p, eff.gamma_q, eff.alpha, eff.sigma,
            policy.mean_activity, eff.kappa_p, eff.kappa_q, eff.lam, policy.flow_utility,
            np.asarray(terminal, dtype=float))


def _objective(x0, a_p, a_q, params, policy, terminal, ipath=None):
    """Direct evaluation of the tiny-horizon objective for one path."""
    T = len(a_p)
    exo = ipath is not None
    grid = np.array([1.0])
    args = _kernel_args(params, policy, terminal)
    value, _ = _enumerate(np.asarray(x0, dtype=float), grid, T, np.zeros((T, 2), dtype=np.bool_),
                          np.asarray(a_p, dtype=float), np.asarray(a_q, dtype=float),
                          exo, np.zeros(T + 1) if ipath is None else np.asarray(ipath, dtype=float),
                          *args)
    return float(value)


@dataclass(frozen=True)
class GridResult:
    activities: ActivityPath
    welfare: float
    grid_step: float


def planner_objective(initial: EpiState, activities: ActivityPath, params: ModelParams,
                      infected_policy: InfectedActivityPolicy = NO_POLICY, terminal=None) -> float:
    """Discounted welfare of a short path closed with the stationary continuation values."""
    if terminal is None:
        terminal = terminal_values(EquilibriumKind.CENTRALIZED, params, infected_policy,
                                   initial=initial)
    return _objective(initial.as_array(), activities.a_p, activities.a_q,
                      params, infected_policy, terminal)


def grid_search_planner(initial: EpiState, params: ModelParams, horizon: int, grid_step=0.01,
                        infected_policy: InfectedActivityPolicy = NO_POLICY, terminal=None) -> GridResult:
    """Best gridded activity path for the planner.

    Activity of an empty susceptible pool has no effect on the objective, so
    those entries are held at 1 rather than enumerated.
    """
    if not 1 <= horizon <= MAX_HORIZON:
        raise ValueError(f"horizon must be in 1..{MAX_HORIZON}")
    grid = activity_grid(grid_step)
    active = _active_entries(initial, params, infected_policy, horizon)
    _check_size(len(grid), int(active.sum()))
    if terminal is None:
        terminal = terminal_values(EquilibriumKind.CENTRALIZED, params, infected_policy,
                                   initial=initial)
    ones = np.ones(horizon)
    best, idx = _enumerate(initial.as_array(), grid, horizon, active, ones, ones,
                           False, np.zeros(horizon + 1),
                           *_kernel_args(params, infected_policy, terminal))
    return GridResult(_decode(idx, grid, horizon, active), float(best), grid_step)


def _decode(idx, grid, T, active):
    a = np.ones((2, T))
    d = 0
    for t in range(T):
        for j in range(2):
            if active[t, j]:
                a[j, t] = grid[idx[d]]
                d += 1
    return ActivityPath(a[0], a[1])


def one_cell_bound(initial, activities: ActivityPath, params, infected_policy=NO_POLICY,
                   grid_step=0.01, terminal=None) -> float:
    """Largest objective change from moving a single activity entry by one grid step."""
    base = planner_objective(initial, activities, params, infected_policy, terminal)
    worst = 0.0
    for arr_name in ("a_p", "a_q"):
        for t in range(activities.horizon):
            for sign in (-1.0, 1.0):
                a = {"a_p": activities.a_p.copy(), "a_q": activities.a_q.copy()}
                a[arr_name][t] = np.clip(a[arr_name][t] + sign * grid_step, grid_step, 1.0)
                moved = planner_objective(initial, ActivityPath(a["a_p"], a["a_q"]), params,
                                          infected_policy, terminal)
                worst = max(worst, abs(moved - base))
    return worst


def individual_objective(solution: EquilibriumSolution, own_a_p, terminal=None) -> float:
    """Expected payoff of one primary susceptible agent taking the aggregate path as given.

    The agent's own activity if it later becomes secondary susceptible follows
    the solution's a_q.
    """
    if terminal is None:
        terminal = terminal_values(EquilibriumKind.DECENTRALIZED, solution.params, solution.policy,
                                   initial=solution.initial)
    x0 = np.array([1.0, 0.0, 0.0, 0.0, 0.0])
    return _objective(x0, own_a_p, solution.activities.a_q, solution.params, solution.policy,
                      terminal, ipath=solution.pressure())


def best_response_check(solution: EquilibriumSolution, grid_step=0.01, terminal=None) -> float:
    """Largest payoff gain a single agent can find by deviating on the grid.

    Returns best gridded payoff minus the payoff of the solution's own path;
    values at or below the one-cell bound confirm the equilibrium.
    """
    if solution.kind is not EquilibriumKind.DECENTRALIZED:
        raise ValueError("best_response_check applies to decentralized solutions")
    T = solution.horizon
    if not 1 <= T <= MAX_HORIZON:
        raise ValueError(f"horizon must be in 1..{MAX_HORIZON}")
    grid = activity_grid(grid_step)
    _check_size(len(grid), T)
    if terminal is None:
        terminal = terminal_values(EquilibriumKind.DECENTRALIZED, solution.params, solution.policy,
                                   initial=solution.initial)
    x0 = np.array([1.0, 0.0, 0.0, 0.0, 0.0])
    active = np.zeros((T, 2), dtype=np.bool_)
    active[:, 0] = True
    best, _ = _enumerate(x0, grid, T, active, np.ones(T), solution.activities.a_q,
                         True, solution.pressure(),
                         *_kernel_args(solution.params, solution.policy, terminal))
    own = individual_objective(solution, solution.activities.a_p, terminal)
    return float(best) - own


def individual_cell_bound(solution: EquilibriumSolution, grid_step=0.01, terminal=None) -> float:
    base = individual_objective(solution, solution.activities.a_p, terminal)
    worst = 0.0
    for t in range(solution.horizon):
        for sign in (-1.0, 1.0):
            a = solution.activities.a_p.copy()
            a[t] = np.clip(a[t] + sign * grid_step, grid_step, 1.0)
            worst = max(worst, abs(individual_objective(solution, a, terminal) - base))
    return worst
