import math

import numpy as np
import pytest
from scipy.optimize import minimize

from sirs_activity.errors import ConvergenceError, DomainError
from sirs_activity.model import NO_POLICY, ActivityPath, EpiState, ModelParams, simulate
from sirs_activity.oracle import planner_objective
from sirs_activity.scenarios import PRESETS, preset
from sirs_activity.solver import (
    SolverConfig,
    endemic_steady_state,
    foc_residual,
    horizon_sensitivity,
    solve,
    terminal_values,
    welfare,
)
from sirs_activity.values import EquilibriumKind, disease_free_values

BENCH = ModelParams.benchmark()
KINDS = ["decentralized", "centralized"]


@pytest.mark.parametrize("kind", KINDS)
def test_no_infection_solution(kind):
    init = EpiState(0.7, 0.0, 0.3, 0.0, 0.0)
    sol = solve(kind, init, BENCH, config=SolverConfig(horizon=800))
    assert sol.converged and sol.iterations == 1
    assert np.all(sol.activities.a_p == 1.0) and np.all(sol.activities.a_q == 1.0)
    # only the r -> s_q drain moves mass
    assert np.all(sol.states.i_p == 0) and np.all(sol.states.i_q == 0)
    np.testing.assert_allclose(sol.states.r, 0.3 * (1 - BENCH.alpha) ** np.arange(801), rtol=1e-12)
    assert sol.welfare == 0.0


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("name", ["benchmark", "immunity-permanent", "today-benchmark", "het-sigma"])
def test_fixed_point_verification(solved, kind, name):
    sol = solved(name, kind)
    assert sol.converged and sol.residual <= 1e-8
    again = simulate(sol.initial, sol.activities, sol.params, sol.policy)
    assert np.max(np.abs(again.values - sol.states.values)) <= 1e-10
    assert foc_residual(sol) <= 1e-8
    V = sol.values.values[:-1]
    assert np.all(V[:, 0] > V[:, 1]) and np.all(V[:, 3] > V[:, 4])
    assert math.isfinite(sol.welfare)


def test_deterministic_bit_identical():
    sc = preset("benchmark")
    cfg = SolverConfig(horizon=1500)
    a = solve("centralized", sc.initial, sc.params, config=cfg)
    b = solve("centralized", sc.initial, sc.params, config=cfg)
    assert a.iterations == b.iterations
    assert a.activities.a_p.tobytes() == b.activities.a_p.tobytes()
    assert a.states.values.tobytes() == b.states.values.tobytes()
    assert a.welfare == b.welfare


def test_non_convergence_carries_history():
    sc = preset("benchmark")
    with pytest.raises(ConvergenceError) as err:
        solve("decentralized", sc.initial, sc.params, config=SolverConfig(horizon=500, max_iterations=3))
    assert len(err.value.residual_history) == 3
    sol = solve("decentralized", sc.initial, sc.params,
                config=SolverConfig(horizon=500, max_iterations=3), raise_on_failure=False)
    assert not sol.converged and sol.residual > 1e-8


def test_initial_guess_must_match_horizon():
    with pytest.raises(ValueError):
        solve("decentralized", EpiState.seeded(1e-3), BENCH, config=SolverConfig(horizon=10),
              initial_guess=ActivityPath.constant(11))


def test_config_invariants():
    for bad in (dict(tolerance=0.0), dict(max_iterations=0), dict(damping=1.5), dict(terminal="x")):
        with pytest.raises(ValueError):
            SolverConfig(**bad)


# -- steady states ---------------------------------------------------------------

def test_steady_state_examples():
    c = endemic_steady_state("centralized", BENCH)
    d = endemic_steady_state("decentralized", BENCH)
    assert c.endemic and d.endemic
    assert c.a_p == pytest.approx(0.45, abs=0.05)
    assert d.a_p == pytest.approx(0.70, abs=0.05)
    assert c.state.infected < d.state.infected


@pytest.mark.parametrize("kind", KINDS)
def test_steady_state_is_stationary(kind):
    ss = endemic_steady_state(kind, BENCH)
    nxt = simulate(ss.state, ActivityPath(np.array([ss.a_p]), np.array([ss.a_q])), BENCH).values[1]
    np.testing.assert_allclose(nxt, ss.state.as_array(), atol=1e-14)
    assert abs(ss.state.total - 1) < 1e-12


def test_steady_state_disease_free_when_asymptotic_r0_below_one():
    ss = endemic_steady_state("centralized", preset("het-beta").params)
    assert not ss.endemic and ss.infected == 0 and ss.a_p == ss.a_q == 1.0


def test_steady_state_needs_waning():
    with pytest.raises(DomainError):
        endemic_steady_state("decentralized", BENCH.replace(alpha=0.0))


def test_terminal_values_modes():
    assert terminal_values("centralized", BENCH.replace(alpha=0.0)) == disease_free_values(BENCH)
    assert terminal_values("decentralized", BENCH, mode="disease-free") == disease_free_values(BENCH)
    assert terminal_values("decentralized", BENCH) == endemic_steady_state("decentralized", BENCH).values


# homogeneous presets: p and q agents are interchangeable, so compare aggregates
STEADY_CASES = [(n, k) for n in ("benchmark", "immunity-10m", "today-benchmark") for k in KINDS]


@pytest.mark.parametrize("name,kind", STEADY_CASES)
def test_tail_approaches_steady_state(solved, name, kind):
    sol = solved(name, kind)
    ss = endemic_steady_state(kind, sol.params, sol.policy)
    tail = slice(-100, None)
    st = sol.states
    assert np.max(np.abs(sol.activities.a_p[tail] - ss.a_p)) < 1e-3
    assert np.max(np.abs(sol.activities.a_q[tail] - ss.a_q)) < 1e-3
    ref = ss.state
    assert np.max(np.abs(st.infected[:-1][tail] - ref.infected)) < 1e-3
    assert np.max(np.abs(st.susceptible[:-1][tail] - (ref.s_p + ref.s_q))) < 1e-3
    assert np.max(np.abs(st.r[:-1][tail] - ref.r)) < 1e-3


# -- welfare ---------------------------------------------------------------------

def test_welfare_examples():
    T = 300
    clean = simulate(EpiState(0.6, 0.0, 0.4, 0.0, 0.0), ActivityPath.constant(T), BENCH)
    assert welfare(clean, ActivityPath.constant(T), BENCH) == 0.0
    sick = simulate(EpiState.seeded(0.01), ActivityPath.constant(T), BENCH)
    assert welfare(sick, ActivityPath.constant(T), BENCH) < 0
    a = ActivityPath(np.full(T, 0.8), np.full(T, 0.9))
    assert welfare(simulate(EpiState.seeded(0.0), a, BENCH), a, BENCH) < 0


def test_welfare_tail_is_perpetuity():
    T = 50
    a = ActivityPath(np.full(T, 0.8), np.full(T, 0.8))
    st = simulate(EpiState.seeded(0.0), a, BENCH)
    lam = BENCH.lam
    flow = math.log(0.8) - 0.8 + 1
    expected = flow / (1 - lam)  # disease-free: s_p = 1 every day
    assert welfare(st, a, BENCH) == pytest.approx(expected, rel=1e-12)
    assert welfare(st, a, BENCH, tail=False) == pytest.approx(flow * (1 - lam**T) / (1 - lam), rel=1e-12)


@pytest.mark.parametrize("name", ["benchmark", "immunity-permanent", "low-kappa"])
def test_welfare_dominance(solved, name):
    d = solved(name, "decentralized")
    c = solved(name, "centralized")
    assert c.welfare >= d.welfare - 1e-6 * abs(d.welfare)


def test_planner_is_local_optimum_under_direct_search():
    # moderate horizon, optimized directly on the objective with finite differences
    T = 40
    init = EpiState.seeded(0.05)
    p = BENCH.replace(alpha=0.0)
    sol = solve("centralized", init, p, config=SolverConfig(horizon=T, tolerance=1e-12))
    term = terminal_values("centralized", p)

    def neg(x):
        return -planner_objective(init, ActivityPath(x, np.ones(T)), p, NO_POLICY, term)

    res = minimize(neg, np.ones(T), method="L-BFGS-B", bounds=[(1e-3, 1.0)] * T,
                   options=dict(ftol=1e-15, gtol=1e-10, maxiter=2000))
    J = planner_objective(init, sol.activities, p, NO_POLICY, term)
    assert J >= -res.fun - 1e-7
    assert np.max(np.abs(res.x - sol.activities.a_p)) < 1e-3


def test_horizon_sensitivity_small():
    sc = preset("immunity-permanent")
    cfg = SolverConfig(horizon=2500)
    assert horizon_sensitivity("decentralized", sc.initial, sc.params, config=cfg, extra=500) < 1e-4


def test_summary_fields(solved):
    sol = solved("benchmark", "decentralized")
    s = sol.summary
    assert s.peak_infected == pytest.approx(sol.states.infected.max())
    assert s.long_run_activity_p == sol.activities.a_p[-1]
    assert set(s.ever_infected) == {365, 730, 1095}
    assert s.ever_infected[1095] == pytest.approx(1 - sol.states.s_p[1095])
    assert s.welfare == sol.welfare
    assert 150 <= s.min_activity_day <= 250
