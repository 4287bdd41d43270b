"""Run scenarios and write their outputs: per-day CSV, JSON summary and SVG plots."""

from __future__ import annotations

import csv
import json
import logging
from pathlib import Path

import numpy as np

from .model import mean_activity
from .scenarios import Scenario
from .solver import SUMMARY_DAYS, EquilibriumSolution, solve
from .values import EquilibriumKind

log = logging.getLogger(__name__)

CSV_COLUMNS = ("date", "s_p", "i_p", "r", "s_q", "i_q", "a_p", "a_q", "infected_total",
               "susceptible_total", "secondary_total", "mean_activity", "ever_infected")


def solve_scenario(scenario: Scenario, kinds=None) -> dict:
    kinds = scenario.kinds if kinds is None else tuple(EquilibriumKind.parse(k) for k in kinds)
    return {k: solve(k, scenario.initial, scenario.params, scenario.policy, scenario.config)
            for k in kinds}


def solution_rows(solution: EquilibriumSolution):
    st, act = solution.states, solution.activities
    T = act.horizon
    X = st.values[:T]
    cols = [
        X[:, 0], X[:, 1], X[:, 2], X[:, 3], X[:, 4], act.a_p, act.a_q,
        st.infected[:T], st.susceptible[:T], st.secondary[:T],
        mean_activity(st, act, solution.policy), st.ever_infected[:T],
    ]
    for t in range(T):
        yield [str(t)] + [repr(float(c[t])) for c in cols]


def write_csv(solution: EquilibriumSolution, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        w.writerows(solution_rows(solution))


def _plot(solutions: dict, path, title):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(1, 2, figsize=(10, 3.5))
    for kind, sol in solutions.items():
        days = np.arange(sol.horizon + 1)
        axes[0].plot(days, sol.states.infected, label=kind.value)
        axes[1].plot(days[:-1], sol.activities.a_p, label=f"{kind.value} a_p")
        if np.any(sol.states.s_q > 0):
            axes[1].plot(days[:-1], sol.activities.a_q, ls="--", label=f"{kind.value} a_q")
    axes[0].set(title="infected", xlabel="day")
    axes[1].set(title="activity", xlabel="day", ylim=(0, 1.02))
    for ax in axes:
        ax.legend(fontsize=8)
    fig.suptitle(title)
    fig.tight_layout()
    # fixed hash salt keeps the SVG byte-stable across runs
    matplotlib.rcParams["svg.hashsalt"] = "sirs-activity"
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def run_and_report(scenario: Scenario, out_dir, kinds=None, plots=True) -> dict:
    """Solve the scenario and write ``<out_dir>/<name>/`` outputs; returns the summary dict."""
    target = Path(out_dir) / scenario.name.replace("/", "_").replace(":", "_")
    target.mkdir(parents=True, exist_ok=True)
    solutions = solve_scenario(scenario, kinds)
    summary = {"scenario": scenario.name, "kinds": {}}
    for kind, sol in solutions.items():
        write_csv(sol, target / f"{kind.value}.csv")
        entry = sol.summary.as_dict()
        entry.update(iterations=sol.iterations, residual=sol.residual)
        summary["kinds"][kind.value] = entry
        log.info("%s/%s: peak %.4g on day %d, welfare %.6g", scenario.name, kind.value,
                 sol.summary.peak_infected, sol.summary.peak_day, sol.welfare)
    (target / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    if plots:
        _plot(solutions, target / "paths.svg", scenario.name)
    summary["solutions"] = solutions
    return summary


STAT_ROWS = ("peak_infected", "peak_day", "long_run_activity_p", "long_run_activity_q",
             "final_infected", "min_activity_p", "min_activity_day", "welfare") + tuple(
    f"ever_infected_{d}" for d in SUMMARY_DAYS)
RATIO_ROWS = ("peak_infected", "peak_day", "long_run_activity_p", "welfare")


def _stat(summary_entry, name):
    if name.startswith("ever_infected_"):
        return summary_entry["ever_infected"].get(name.rsplit("_", 1)[1], float("nan"))
    return summary_entry[name]


def compare(scenarios, out_dir, kinds=None, plots=False) -> dict:
    """Side-by-side summary table; ratio rows are relative to the first scenario.

    Columns are ``<scenario>/<kind>``. Returns {"columns", "rows"} and writes
    ``comparison.csv`` into ``out_dir``.
    """
    if len(scenarios) < 2:
        raise ValueError("compare needs at least two scenarios")
    out_dir = Path(out_dir)
    columns, entries = [], []
    for sc in scenarios:
        rep = run_and_report(sc, out_dir, kinds, plots=plots)
        for kind, entry in rep["kinds"].items():
            columns.append(f"{sc.name}/{kind}")
            entries.append(entry)
    rows = {name: [_stat(e, name) for e in entries] for name in STAT_ROWS}
    n_kinds = len(entries) // len(scenarios)
    for name in RATIO_ROWS:
        ratios = []
        for i, e in enumerate(entries):
            ref = _stat(entries[i % n_kinds], name)
            val = _stat(e, name)
            ratios.append(val / ref if ref != 0 else (1.0 if val == 0 else float("inf")))
        rows[f"ratio_{name}"] = ratios
    with open(out_dir / "comparison.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["statistic"] + columns)
        for name, vals in rows.items():
            w.writerow([name] + [repr(float(v)) for v in vals])
    return {"columns": columns, "rows": rows}
