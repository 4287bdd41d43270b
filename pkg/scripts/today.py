"""Starting from a mid-epidemic state with quarantine of identified infected and masks."""

from _common import parse_args, plot_panels, run_variants

from sirs_activity.scenarios import preset

if __name__ == "__main__":
    args = parse_args(__doc__, "results/today")
    names = ("today-benchmark", "today-permanent", "today-optimistic")
    res = run_variants([(n, preset(n)) for n in names], ("decentralized", "centralized"),
                       args.out, args.horizon)
    plot_panels(res, args.out / "today.svg", days=1500, title="current-epidemic scenario",
                secondary=True)
