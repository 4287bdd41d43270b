"""Centralized equilibrium under a slower cure (low delta) and a cheaper infection (low kappa)."""

import math

from _common import parse_args, plot_panels, run_variants

from sirs_activity.scenarios import preset

if __name__ == "__main__":
    args = parse_args(__doc__, "results/robustness")
    variants = []
    for name in ("low-delta", "low-kappa"):
        variants.append((f"{name} permanent", preset(name).with_overrides(alpha_days=math.inf)))
        variants.append((f"{name} alpha=1/750", preset(name)))
    res = run_variants(variants, ("centralized",), args.out, args.horizon)
    peaks = {label: sol.summary.peak_infected for (label, _), sol in res.items()}
    for name in ("low-delta", "low-kappa"):
        ratio = peaks[f"{name} permanent"] / peaks[f"{name} alpha=1/750"]
        print(f"{name}: peak ratio permanent / waning = {ratio:.2f}")
    plot_panels(res, args.out / "robustness.svg", days=3000, title="centralized robustness")
