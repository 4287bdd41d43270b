"""Benchmark under permanent immunity, immunity lasting 750 days and 300 days, both equilibria."""

from _common import parse_args, plot_panels, run_variants

from sirs_activity.scenarios import preset

if __name__ == "__main__":
    args = parse_args(__doc__, "results/immunity_duration")
    variants = [("permanent", preset("immunity-permanent")),
                ("alpha=1/750", preset("benchmark")),
                ("alpha=1/300", preset("immunity-10m"))]
    res = run_variants(variants, ("decentralized", "centralized"), args.out, args.horizon)
    plot_panels(res, args.out / "immunity_duration.svg", days=3000, title="duration of immunity")
