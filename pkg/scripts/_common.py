"""Shared plumbing for the experiment scripts: solve a set of variants and plot them."""

import argparse
import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from sirs_activity.model import mean_activity
from sirs_activity.report import write_csv
from sirs_activity.solver import solve

log = logging.getLogger("experiments")


def parse_args(description, default_out):
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--out", type=Path, default=Path(default_out))
    p.add_argument("--horizon", type=int, default=None, help="override the 5000-day horizon")
    args = p.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    args.out.mkdir(parents=True, exist_ok=True)
    return args


def run_variants(variants, kinds, out, horizon=None):
    """Solve each (label, scenario) for each kind; writes one CSV per run."""
    results = {}
    for label, sc in variants:
        if horizon is not None:
            sc = sc.with_overrides(horizon=horizon)
        for kind in kinds:
            sol = solve(kind, sc.initial, sc.params, sc.policy, sc.config)
            slug = label.replace(" ", "_").replace("/", "-").replace("=", "")
            write_csv(sol, out / f"{slug}_{kind}.csv")
            s = sol.summary
            log.info("%-28s %-13s peak %.4f on day %4d  long-run a_p %.3f  ever(1095) %.3f  W %.2f",
                     label, kind, s.peak_infected, s.peak_day, s.long_run_activity_p,
                     s.ever_infected.get(1095, np.nan), sol.welfare)
            results[label, kind] = sol
    return results


def plot_panels(results, path, days=1500, title=None, secondary=False):
    """Infections, primary activity and mean activity for every run."""
    ncol = 4 if secondary else 3
    fig, axes = plt.subplots(1, ncol, figsize=(4 * ncol, 3.4))
    for (label, kind), sol in results.items():
        n = min(days, sol.horizon)
        t = np.arange(n)
        ls = "-" if kind == "centralized" else "--"
        name = f"{label} ({kind[0].upper()})"
        axes[0].plot(t, sol.states.infected[:n], ls=ls, label=name)
        axes[1].plot(t, sol.activities.a_p[:n], ls=ls, label=name)
        axes[2].plot(t, mean_activity(sol.states, sol.activities, sol.policy)[:n], ls=ls, label=name)
        if secondary:
            axes[3].plot(t, sol.activities.a_q[:n], ls=ls, label=name)
    titles = ["infected share", "primary activity a_p", "mean activity", "secondary activity a_q"]
    for ax, ttl in zip(axes, titles):
        ax.set(title=ttl, xlabel="day")
    axes[0].legend(fontsize=7)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    matplotlib.rcParams["svg.hashsalt"] = "sirs-activity"
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    log.info("wrote %s", path)
