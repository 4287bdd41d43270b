"""Named experiment presets and the flat ``key = value`` scenario file format.

A scenario file names a preset and overrides any of its knobs::

    # waning immunity after ten months
    preset = benchmark
    alpha_days = 300
    kinds = both

Rates are entered the way they are usually quoted (annual discount and cure
arrival rates, durations in days, ratios for secondary agents) and
converted when the scenario is built. ``alpha_days = inf`` means permanent
immunity.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .errors import ValidationError
from .model import EpiState, InfectedActivityPolicy, ModelParams
from .solver import SolverConfig
from .values import EquilibriumKind

KINDS = {
    "decentralized": (EquilibriumKind.DECENTRALIZED,),
    "centralized": (EquilibriumKind.CENTRALIZED,),
    "both": (EquilibriumKind.DECENTRALIZED, EquilibriumKind.CENTRALIZED),
}


@dataclass(frozen=True)
class ScenarioSettings:
    """Every knob a scenario file can set, in file units."""

    name: str = "benchmark"
    alpha_days: float = 750.0
    beta_p: float = 2.4 / 18
    beta_q_ratio: float = 1.0
    sigma: float = 1.0
    kappa_p: float = 512.0
    kappa_q_ratio: float = 1.0
    rho_annual: float = 0.05
    delta_annual: float = 0.67
    gamma_days: float = 18.0
    horizon: int = 5000
    damping: float = 0.1
    tolerance: float = 1e-8
    initial_infected: float = 1e-6
    initial_recovered: float = 0.0
    identified_fraction: float = 0.0
    quarantine_activity: float = 1.0
    mask_multiplier: float = 1.0
    kinds: str = "both"

    def build(self) -> Scenario:
        if self.alpha_days <= 0:
            raise ValidationError("alpha_days must be positive (inf for permanent immunity)",
                                  field="alpha_days")
        if self.gamma_days < 1:
            raise ValidationError("gamma_days must be >= 1", field="gamma_days")
        if self.kinds not in KINDS:
            raise ValidationError(f"kinds must be one of {sorted(KINDS)}", field="kinds")
        alpha = 0.0 if math.isinf(self.alpha_days) else 1.0 / self.alpha_days
        gamma = 1.0 / self.gamma_days
        params = ModelParams(
            beta_p=self.beta_p,
            beta_q=self.beta_q_ratio * self.beta_p,
            gamma_p=gamma,
            gamma_q=gamma,
            alpha=alpha,
            sigma=self.sigma,
            kappa_p=self.kappa_p,
            kappa_q=self.kappa_q_ratio * self.kappa_p,
            rho=self.rho_annual / 365,
            delta=self.delta_annual / 365,
        )
        initial = EpiState.seeded(self.initial_infected, self.initial_recovered)
        policy = InfectedActivityPolicy(self.identified_fraction, self.quarantine_activity,
                                        self.mask_multiplier)
        try:
            config = SolverConfig(horizon=self.horizon, damping=self.damping, tolerance=self.tolerance,
                                  min_damping=min(SolverConfig.min_damping, self.damping))
        except ValueError as exc:
            raise ValidationError(str(exc), field="solver") from exc
        return Scenario(self.name, params, initial, policy, config, KINDS[self.kinds], self)


@dataclass(frozen=True)
class Scenario:
    name: str
    params: ModelParams
    initial: EpiState
    policy: InfectedActivityPolicy
    config: SolverConfig
    kinds: tuple
    settings: ScenarioSettings

    def with_overrides(self, **changes) -> Scenario:
        return replace(self.settings, **changes).build()


_TODAY = dict(initial_infected=0.002, initial_recovered=0.06, identified_fraction=0.5,
              quarantine_activity=0.4, mask_multiplier=0.7)
_OPTIMISTIC = dict(beta_q_ratio=0.25, sigma=0.25, kappa_q_ratio=0.25)

PRESETS = {
    "benchmark": {},
    "immunity-10m": dict(alpha_days=300.0),
    "immunity-permanent": dict(alpha_days=math.inf),
    "low-delta": dict(delta_annual=0.67 / 3),
    "low-kappa": dict(kappa_p=512.0 / 3),
    "het-beta": dict(beta_q_ratio=0.25),
    "het-sigma": dict(sigma=0.25),
    "het-kappa": dict(kappa_q_ratio=0.25),
    "today-benchmark": dict(_TODAY),
    "today-permanent": dict(_TODAY, alpha_days=math.inf),
    "today-optimistic": dict(_TODAY, **_OPTIMISTIC),
}


def preset_settings(name: str) -> ScenarioSettings:
    try:
        overrides = PRESETS[name]
    except KeyError:
        raise ValidationError(f"unknown preset {name!r}; valid presets: {', '.join(PRESETS)}",
                              field="preset") from None
    return replace(ScenarioSettings(name=name), **overrides)


def preset(name: str) -> Scenario:
    return preset_settings(name).build()


_FIELD_TYPES = {f.name: f.type for f in fields(ScenarioSettings)}


def _convert(key, raw, lineno):
    kind = _FIELD_TYPES[key]
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
    except ValueError:
        raise ValidationError(f"line {lineno}: {key} expects a number, got {raw!r}", field=key) from None
    return raw


def parse_scenario(text: str, source="<string>") -> Scenario:
    entries = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{source}:{lineno}: expected 'key = value', got {line!r}", field="syntax")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key != "preset" and key not in _FIELD_TYPES:
            raise ValidationError(f"{source}:{lineno}: unknown key {key!r}", field=key)
        if key in entries:
            raise ValidationError(f"{source}:{lineno}: duplicate key {key!r}", field=key)
        entries[key] = (raw, lineno)
    base_name = entries.pop("preset", ("benchmark", 0))[0]
    settings = preset_settings(base_name)
    overrides = {k: _convert(k, raw, n) for k, (raw, n) in entries.items()}
    if overrides and "name" not in overrides:
        overrides["name"] = base_name + "-custom"
    return replace(settings, **overrides).build()


def load_scenario(path) -> Scenario:
    path = Path(path)
    return parse_scenario(path.read_text(), source=str(path))


def format_scenario(scenario: Scenario) -> str:
    s = scenario.settings
    lines = [f"preset = {s.name if s.name in PRESETS else 'benchmark'}"]
    for key, value in asdict(s).items():
        lines.append(f"{key} = {value!r}" if isinstance(value, float) else f"{key} = {value}")
    return "\n".join(lines) + "\n"


def dump_scenario(scenario: Scenario, path) -> None:
    Path(path).write_text(format_scenario(scenario))


def resolve(target: str) -> Scenario:
    """A preset name, ``preset:key=value,...``, or a path to a scenario file."""
    if target in PRESETS:
        return preset(target)
    if ":" in target and target.split(":", 1)[0] in PRESETS:
        base, rest = target.split(":", 1)
        lines = [f"preset = {base}", f"name = {target}"]
        lines += [item.strip() for item in rest.split(",") if item.strip()]
        return parse_scenario("\n".join(lines), source=target)
    path = Path(target)
    if path.exists():
        return load_scenario(path)
    raise ValidationError(f"{target!r} is neither a preset ({', '.join(PRESETS)}) nor a file",
                          field="preset")
