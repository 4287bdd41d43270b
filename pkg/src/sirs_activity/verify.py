"""Solver-versus-oracle agreement checks on tiny benchmark-derived scenarios."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import oracle
from .model import ActivityPath, EpiState, ModelParams
from .solver import EquilibriumSolution, SolverConfig, solve
from .scenarios import preset
from .values import EquilibriumKind

# slack for floating-point noise in objectives of magnitude ~1e2
NOISE = 1e-9


@dataclass(frozen=True)
class TinyCase:
    name: str
    initial: EpiState
    params: ModelParams
    policy: object
    horizon: int


def tiny_cases(horizons=(2, 3, 4)):
    """Benchmark-derived cases whose enumeration fits the oracle's size limit."""
    seeded = EpiState.seeded(0.05)
    bench = preset("benchmark")
    permanent = bench.params.replace(alpha=0.0)
    cases = []
    for T in horizons:
        cases.append(TinyCase(f"benchmark-permanent T={T}", seeded, permanent, bench.policy, T))
        cases.append(TinyCase(f"low-kappa-permanent T={T}", seeded,
                              preset("low-kappa").params.replace(alpha=0.0), bench.policy, T))
    for T in (h for h in horizons if h <= 3):
        cases.append(TinyCase(f"benchmark T={T}", seeded, bench.params, bench.policy, T))
    if 2 in horizons:
        for name in ("today-benchmark", "today-optimistic"):
            sc = preset(name)
            cases.append(TinyCase(f"{name} T=2", sc.initial, sc.params, sc.policy, 2))
    return cases


def _solve(kind, case):
    return solve(kind, case.initial, case.params, case.policy,
                 SolverConfig(horizon=case.horizon, tolerance=1e-12))


def planner_agreement(case: TinyCase, grid_step=0.01):
    """(passed, details) for the centralized solver against exhaustive search."""
    sol = _solve(EquilibriumKind.CENTRALIZED, case)
    grid = oracle.grid_search_planner(case.initial, case.params, case.horizon, grid_step, case.policy)
    J = oracle.planner_objective(case.initial, sol.activities, case.params, case.policy)
    bound = oracle.one_cell_bound(case.initial, sol.activities, case.params, case.policy, grid_step)
    active = oracle._active_entries(case.initial, case.params, case.policy, case.horizon)
    dist = max(
        np.max(np.abs(grid.activities.a_p - sol.activities.a_p)[active[:, 0]], initial=0.0),
        np.max(np.abs(grid.activities.a_q - sol.activities.a_q)[active[:, 1]], initial=0.0),
    )
    ok_w = J >= grid.welfare - bound - NOISE and grid.welfare >= J - bound - NOISE
    ok_path = dist <= grid_step + 1e-12
    detail = (f"solver J={J:.10g} oracle J={grid.welfare:.10g} one-cell bound={bound:.3g} "
              f"path distance={dist:.4f}")
    return ok_w and ok_path, detail


def perturbed(solution: EquilibriumSolution, t, amount) -> EquilibriumSolution:
    """Copy of a solution with a_p[t] moved by ``amount`` (towards the interior)."""
    a = solution.activities.a_p.copy()
    a[t] = a[t] - amount if a[t] - amount > 0 else a[t] + amount
    return replace(solution, activities=ActivityPath(a, solution.activities.a_q))


def planner_detection(case: TinyCase, grid_step=0.01, steps=5):
    sol = _solve(EquilibriumKind.CENTRALIZED, case)
    J = oracle.planner_objective(case.initial, sol.activities, case.params, case.policy)
    losses = []
    for t in range(case.horizon):
        p = perturbed(sol, t, steps * grid_step)
        losses.append(J - oracle.planner_objective(case.initial, p.activities, case.params, case.policy))
    return min(losses) > NOISE, f"smallest welfare loss from a {steps}-step perturbation: {min(losses):.3g}"


def decentralized_agreement(case: TinyCase, grid_step=0.01, steps=5):
    sol = _solve(EquilibriumKind.DECENTRALIZED, case)
    gain = oracle.best_response_check(sol, grid_step)
    bound = oracle.individual_cell_bound(sol, grid_step)
    gains = [oracle.best_response_check(perturbed(sol, t, steps * grid_step), grid_step)
             for t in range(case.horizon)]
    ok = gain <= bound + NOISE and min(gains) > NOISE
    return ok, (f"deviation gain={gain:.3g} (bound {bound:.3g}); "
                f"smallest gain against {steps}-step perturbations={min(gains):.3g}")


def run_oracle_suite(horizons=(2, 3, 4), grid_step=0.01):
    results = []
    for case in tiny_cases(tuple(horizons)):
        ok, detail = planner_agreement(case, grid_step)
        results.append((f"planner agreement [{case.name}]: {detail}", ok))
        ok, detail = planner_detection(case, grid_step)
        results.append((f"planner detection [{case.name}]: {detail}", ok))
        ok, detail = decentralized_agreement(case, grid_step)
        results.append((f"best response [{case.name}]: {detail}", ok))
    return results
