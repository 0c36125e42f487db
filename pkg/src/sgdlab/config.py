"""Strict YAML scenario/experiment configs.

Unknown keys are fatal and errors name the offending path: a silent typo in
epsilon or alpha invalidates an experiment. Parsers return frozen dataclasses
plus `to_dict` emitters, and parse(emit(parse(f))) == parse(f).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import yaml

from .errors import ConfigError
from .landscape import KCriticalSpec, Landscape, VShapeSpec, make_double_well, make_k_critical, make_linear, make_vshape
from .montecarlo import Scenario, StartRule
from .noise import (
    NoiseModel,
    SlowlyVarying,
    alpha_stable,
    gaussian,
    log_corrected_pareto,
    make_double_exponential,
    no_noise,
    pareto_symmetric,
)
from .sgd import StopRule
from .timescales import TimeScaleSpec

_MISSING = object()


def _mapping(obj, path: str) -> dict:
    if obj is None:
        return {}
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: expected a mapping, got {type(obj).__name__}")
    return dict(obj)


def _take(d: dict, key: str, path: str, kind, default=_MISSING):
    if key not in d:
        if default is _MISSING:
            raise ConfigError(f"{path}.{key}: required key is missing")
        return default
    raw = d.pop(key)
    try:
        if kind is float:
            if isinstance(raw, bool) or not isinstance(raw, (int, float)):
                raise TypeError
            return float(raw)
        if kind is int:
            if isinstance(raw, bool) or not isinstance(raw, int):
                raise TypeError
            return int(raw)
        if kind is str:
            if not isinstance(raw, str):
                raise TypeError
            return raw
        if kind is list:
            if not isinstance(raw, list):
                raise TypeError
            return list(raw)
        if kind is dict:
            return _mapping(raw, f"{path}.{key}")
    except TypeError:
        raise ConfigError(f"{path}.{key}: expected {kind.__name__}, got {type(raw).__name__}") from None
    raise AssertionError(kind)


def _done(d: dict, path: str):
    if d:
        raise ConfigError(f"{path}: unknown keys {sorted(d)}")


def _float_list(d: dict, key: str, path: str, default=_MISSING) -> tuple:
    if key not in d:
        if default is _MISSING:
            raise ConfigError(f"{path}.{key}: required key is missing")
        return tuple(float(v) for v in default)
    raw = _take(d, key, path, list)
    out = []
    for i, v in enumerate(raw):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{path}.{key}[{i}]: expected number")
        out.append(float(v))
    return tuple(out)


def parse_noise(obj, path: str = "noise") -> NoiseModel:
    d = _mapping(obj, path)
    family = _take(d, "family", path, str)
    if family == "gaussian":
        m = gaussian(_take(d, "sigma", path, float, 1.0))
    elif family == "pareto_symmetric":
        m = pareto_symmetric(_take(d, "alpha", path, float), _take(d, "u0", path, float, 1.0))
    elif family == "alpha_stable":
        m = alpha_stable(_take(d, "alpha", path, float))
    elif family == "double_exponential":
        m = make_double_exponential(_take(d, "alpha_param", path, float), _take(d, "beta_param", path, float))
    elif family == "log_corrected_pareto":
        m = log_corrected_pareto(_take(d, "alpha", path, float), _take(d, "u0", path, float, 1.0))
    elif family == "none":
        m = no_noise()
    else:
        raise ConfigError(f"{path}.family: unknown family {family!r}")
    _done(d, path)
    return m


def noise_to_dict(m: NoiseModel) -> dict:
    if m.family == "gaussian":
        return {"family": m.family, "sigma": m.sigma}
    if m.family == "pareto_symmetric":
        return {"family": m.family, "alpha": m.alpha, "u0": m.u0}
    if m.family == "alpha_stable":
        return {"family": m.family, "alpha": m.alpha}
    if m.family == "double_exponential":
        return {"family": m.family, "alpha_param": m.alpha_param, "beta_param": m.beta_param}
    if m.family == "log_corrected_pareto":
        return {"family": m.family, "alpha": m.alpha, "u0": m.u0}
    return {"family": "none"}


def parse_landscape(obj, path: str = "landscape") -> Landscape:
    d = _mapping(obj, path)
    preset = _take(d, "preset", path, str)
    if preset == "double_well":
        land = make_double_well()
    elif preset == "vshape":
        spec = VShapeSpec(
            c_l=_take(d, "c_l", path, float),
            c_r=_take(d, "c_r", path, float),
            delta=_take(d, "delta", path, float),
        )
        land = make_vshape(spec, _take(d, "outer_slope", path, float, 1.0))
    elif preset == "k_critical":
        land = make_k_critical(
            KCriticalSpec(
                K=_take(d, "K", path, int),
                c=_take(d, "c", path, float, 0.0),
                lead_coeff=_take(d, "a", path, float, 1.0),
                delta=_take(d, "delta", path, float, 1.0),
            )
        )
    elif preset == "linear":
        land = make_linear(_take(d, "slope", path, float))
    elif preset == "himmelblau":
        raise ConfigError(f"{path}.preset: himmelblau is 2-D; use the himmelblau subcommand")
    else:
        raise ConfigError(f"{path}.preset: unknown preset {preset!r}")
    _done(d, path)
    return land


def landscape_to_dict(land: Landscape) -> dict:
    if land.name == "double_well":
        return {"preset": "double_well"}
    if land.name == "vshape":
        c_l, c_r, delta, outer = land.params
        return {"preset": "vshape", "c_l": float(c_l), "c_r": float(c_r), "delta": float(delta), "outer_slope": float(outer)}
    if land.name == "k_critical":
        k, c, a, delta, _ = land.params
        return {"preset": "k_critical", "K": int(k), "c": float(c), "a": float(a), "delta": float(delta)}
    return {"preset": "linear", "slope": float(land.params[0])}


def _parse_svf(obj, path: str) -> SlowlyVarying:
    d = _mapping(obj, path)
    svf = SlowlyVarying(
        form=_take(d, "form", path, str, "constant"),
        c=_take(d, "c", path, float, 1.0),
        p=_take(d, "p", path, float, 0.0),
    )
    _done(d, path)
    return svf


def parse_steps(obj, path: str = "steps") -> tuple[TimeScaleSpec | int, float]:
    """Returns (steps, multiple): a literal budget or a TimeScaleSpec."""
    d = _mapping(obj, path)
    mode = _take(d, "mode", path, str)
    multiple = _take(d, "multiple", path, float, 1.0)
    if mode == "literal":
        value = _take(d, "value", path, int)
        _done(d, path)
        return value, multiple
    if mode != "n_eps":
        raise ConfigError(f"{path}.mode: expected literal|n_eps, got {mode!r}")
    regime = _take(d, "regime", path, str)
    gamma = _take(d, "gamma", path, float, None)
    spec = TimeScaleSpec(
        regime=regime,
        alpha=_take(d, "alpha", path, float, None),
        L=_parse_svf(_take(d, "L", path, dict, {}), f"{path}.L") if "L" in d else SlowlyVarying(),
        gamma_override=gamma,
        override_scale=_take(d, "scale", path, float, 1.0),
    )
    _done(d, path)
    return spec, multiple


def steps_to_dict(steps, multiple: float) -> dict:
    if isinstance(steps, int):
        return {"mode": "literal", "value": steps, "multiple": multiple}
    out = {"mode": "n_eps", "regime": steps.regime, "multiple": multiple}
    if steps.alpha is not None:
        out["alpha"] = steps.alpha
    if steps.gamma_override is not None:
        out["gamma"] = steps.gamma_override
        out["scale"] = steps.override_scale
    if steps.L != SlowlyVarying():
        out["L"] = {"form": steps.L.form, "c": steps.L.c, "p": steps.L.p}
    return out


def parse_start(obj, path: str = "start") -> StartRule:
    d = _mapping(obj, path)
    kind = _take(d, "kind", path, str)
    if kind == "point":
        rule = StartRule(kind="point", x=_take(d, "x", path, float))
    elif kind == "uniform":
        rule = StartRule(kind="uniform", a=_take(d, "a", path, float), b=_take(d, "b", path, float))
    else:
        raise ConfigError(f"{path}.kind: expected point|uniform, got {kind!r}")
    _done(d, path)
    return rule


def parse_stop(obj, path: str = "stop") -> StopRule:
    d = _mapping(obj, path)
    rule = _take(d, "rule", path, str)
    if rule == "fixed_steps":
        out = StopRule(kind="fixed_steps")
    elif rule in ("exit_interval", "either"):
        out = StopRule(kind=rule, a=_take(d, "a", path, float), b=_take(d, "b", path, float))
    else:
        raise ConfigError(f"{path}.rule: expected fixed_steps|exit_interval|either, got {rule!r}")
    _done(d, path)
    return out


def parse_scenario_dict(d: dict, path: str = "scenario") -> Scenario:
    d = dict(d)
    steps, multiple = parse_steps(_take(d, "steps", path, dict), f"{path}.steps")
    scen = Scenario(
        landscape=parse_landscape(_take(d, "landscape", path, dict), f"{path}.landscape"),
        noise=parse_noise(_take(d, "noise", path, dict), f"{path}.noise"),
        epsilon=_take(d, "epsilon", path, float),
        steps=steps,
        start=parse_start(_take(d, "start", path, dict), f"{path}.start"),
        stop=parse_stop(_take(d, "stop", path, dict), f"{path}.stop"),
        n_runs=_take(d, "n_runs", path, int, 1),
        seed=_take(d, "seed", path, int, 0),
        steps_multiple=multiple,
    )
    _done(d, path)
    return scen


def scenario_to_dict(s: Scenario) -> dict:
    return {
        "landscape": landscape_to_dict(s.landscape),
        "noise": noise_to_dict(s.noise),
        "epsilon": s.epsilon,
        "steps": steps_to_dict(s.steps, s.steps_multiple),
        "start": (
            {"kind": "point", "x": s.start.x}
            if s.start.kind == "point"
            else {"kind": "uniform", "a": s.start.a, "b": s.start.b}
        ),
        "stop": (
            {"rule": "fixed_steps"}
            if s.stop.kind == "fixed_steps"
            else {"rule": s.stop.kind, "a": s.stop.a, "b": s.stop.b}
        ),
        "n_runs": s.n_runs,
        "seed": s.seed,
    }


def load_yaml(path) -> dict:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    try:
        data = yaml.safe_load(p.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"{p}: not valid YAML: {exc}") from None
    return _mapping(data, str(p))


def parse_scenario(path) -> Scenario:
    return parse_scenario_dict(load_yaml(path), path=str(path))


def emit_yaml(d: dict, path) -> None:
    Path(path).write_text(yaml.safe_dump(d, sort_keys=False))


@dataclass(frozen=True)
class SweepConfig:
    """Config for the exit-probability sweep (table3/escape subcommands)."""

    betas: tuple
    alpha: float = 1.0
    c_l: float = 5.0
    c_r: float = 1.0
    delta: float = 1.0
    epsilon: float = 0.01
    n_runs: int = 100_000
    max_steps: int = 1_000_000

    def to_dict(self) -> dict:
        return {
            "betas": list(self.betas),
            "alpha": self.alpha,
            "c_l": self.c_l,
            "c_r": self.c_r,
            "delta": self.delta,
            "epsilon": self.epsilon,
            "n_runs": self.n_runs,
            "max_steps": self.max_steps,
        }


DEFAULT_BETAS = (0.10, 0.25, 0.50, 0.75, 1.00, 1.50, 2.00, 3.00, 5.00)


def parse_sweep(d: dict, path: str = "sweep") -> SweepConfig:
    d = dict(d)
    cfg = SweepConfig(
        betas=_float_list(d, "betas", path, DEFAULT_BETAS),
        alpha=_take(d, "alpha", path, float, 1.0),
        c_l=_take(d, "c_l", path, float, 5.0),
        c_r=_take(d, "c_r", path, float, 1.0),
        delta=_take(d, "delta", path, float, 1.0),
        epsilon=_take(d, "epsilon", path, float, 0.01),
        n_runs=_take(d, "n_runs", path, int, 100_000),
        max_steps=_take(d, "max_steps", path, int, 1_000_000),
    )
    _done(d, path)
    return cfg
