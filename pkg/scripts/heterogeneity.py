"""Secondary agents that are less contagious, shed less, or bear a lower cost of infection."""

from _common import parse_args, plot_panels, run_variants

from sirs_activity.model import asymptotic_reproduction_number
from sirs_activity.scenarios import preset

if __name__ == "__main__":
    args = parse_args(__doc__, "results/heterogeneity")
    names = ("benchmark", "het-beta", "het-sigma", "het-kappa")
    for n in names:
        sc = preset(n)
        print(f"{n}: asymptotic R0 = {asymptotic_reproduction_number(sc.params, sc.policy):.3f}")
    res = run_variants([(n, preset(n)) for n in names], ("decentralized", "centralized"),
                       args.out, args.horizon)
    plot_panels(res, args.out / "heterogeneity.svg", days=5000, title="heterogeneous agents",
                secondary=True)
