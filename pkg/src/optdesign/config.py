"""Run configuration: a JSON document with lowercase snake_case keys.

Unspecified keys take the defaults below. :meth:`RunConfig.to_dict` output
parses back to an equal config, which is what result documents echo.
"""
import json
from dataclasses import asdict, dataclass, field, fields

from .solver import SolverConfig
from .spaces import FeatureMap, SpaceSpec

__all__ = ["ConfigError", "RunConfig", "PRESETS", "load_config"]


class ConfigError(ValueError):
    """Invalid configuration; ``keys`` lists the offending keys."""

    def __init__(self, keys, message=None):
        self.keys = list(keys)
        super().__init__(message or f"invalid config keys: {', '.join(self.keys)}")


# model and space pairs for the standard test problems
PRESETS = {
    "square": {"model": {"kind": "full_quadratic", "q": 2}, "space": {"kind": "square_grid", "side": 3}},
    "disk": {"model": {"kind": "full_quadratic", "q": 2}, "space": {"kind": "disk_grid", "resolution": 21}},
    "wynn": {"model": {"kind": "full_quadratic", "q": 2},
        "space": {"kind": "wynn_grid", "resolution": 20, "inject": True}},
    "cube": {"model": {"kind": "full_quadratic", "q": 3}, "space": {"kind": "cube_grid", "side": 3}},
    "sphere": {"model": {"kind": "quadratic_no_intercept", "q": 3},
        "space": {"kind": "sphere_fibonacci", "n": 500}},
}

_BENCHMARK_DEFAULTS = {
    "algorithms": ["proposed", "vdm", "mul"],
    "criteria": ["D", "A"],
    "sizes": [21],
    "max_seconds": 60.0,
    "proposed_gamma": 1e-5,
    "baseline_gamma": 1e-4,
    "reference_gamma": 1e-8,
    "trace_stride": 10,
}
_CONVERGE_DEFAULTS = {
    "n_schedule": [50, 200, 1000, 5000],
    "replicates": 5,
    "reference_space": None,
}
_SCALING_DEFAULTS = {
    "q_list": [8, 10, 12, 14],
    "iterations": 200,
    "n_random": 2000,
    "n_factorial": 1000,
}
_OUTPUT_KEYS = ("result", "design", "trace", "csv")


def _section(name, given, defaults, bad):
    given = dict(given or {})
    for k in given:
        if k not in defaults:
            bad.append(f"{name}.{k}")
    return {**defaults, **given}


@dataclass
class RunConfig:
    model: dict = field(default_factory=lambda: {"kind": "full_quadratic", "q": 2})
    space: dict = field(default_factory=lambda: {"kind": "square_grid", "side": 3})
    criterion: str = "D"
    algorithm: str = "proposed"
    mul_lambda: float = None
    gamma: float = 5e-4
    delta: float = 1e-4
    max_iterations: int = 100_000
    max_restart_rounds: int = 10
    max_seconds: float = None
    trace_stride: int = 1
    initial: str = "uniform"
    seed: int = 0
    thread_count: int = 1
    certify_tolerance: float = 1e-2
    output: dict = field(default_factory=dict)
    benchmark: dict = field(default_factory=lambda: dict(_BENCHMARK_DEFAULTS))
    converge_n: dict = field(default_factory=lambda: dict(_CONVERGE_DEFAULTS))
    quad_scaling: dict = field(default_factory=lambda: dict(_SCALING_DEFAULTS))

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise ConfigError(["<root>"], "config must be a JSON object")
        d = dict(d)
        bad = []
        preset = d.pop("preset", None)
        if preset is not None:
            if preset not in PRESETS:
                raise ConfigError(["preset"], f"preset must be one of {sorted(PRESETS)}")
            for k, v in PRESETS[preset].items():
                d.setdefault(k, v)
        names = {f.name for f in fields(cls)}
        bad += [k for k in d if k not in names]
        kw = {k: v for k, v in d.items() if k in names}
        kw["benchmark"] = _section("benchmark", kw.get("benchmark"), _BENCHMARK_DEFAULTS, bad)
        kw["converge_n"] = _section("converge_n", kw.get("converge_n"), _CONVERGE_DEFAULTS, bad)
        kw["quad_scaling"] = _section("quad_scaling", kw.get("quad_scaling"), _SCALING_DEFAULTS, bad)
        out = dict(kw.get("output") or {})
        bad += [f"output.{k}" for k in out if k not in _OUTPUT_KEYS]
        kw["output"] = out
        if bad:
            raise ConfigError(bad)
        cfg = cls(**kw)
        cfg.check()
        return cfg

    def check(self):
        bad = []
        try:
            self.feature_map()
        except (ValueError, KeyError, TypeError):
            bad.append("model")
        try:
            self.space_spec()
        except (ValueError, KeyError, TypeError):
            bad.append("space")
        try:
            self.solver_config()
        except (ValueError, TypeError) as exc:
            msg = str(exc)
            bad += [k for k in ("criterion", "algorithm", "gamma", "delta", "max_iterations",
                                "max_restart_rounds", "trace_stride", "thread_count",
                                "mul_lambda", "initial", "max_seconds")
                    if k in msg] or ["solver"]
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            bad.append("seed")
        if not (isinstance(self.certify_tolerance, (int, float)) and self.certify_tolerance > 0):
            bad.append("certify_tolerance")
        if bad:
            raise ConfigError(bad)

    def feature_map(self):
        return FeatureMap.from_dict(self.model)

    def space_spec(self):
        return SpaceSpec.from_dict(self.space)

    def solver_config(self, **overrides):
        kw = dict(
            criterion=self.criterion, algorithm=self.algorithm, gamma=self.gamma,
            delta=self.delta, max_iterations=self.max_iterations,
            max_restart_rounds=self.max_restart_rounds, mul_lambda=self.mul_lambda,
            trace_stride=self.trace_stride, thread_count=self.thread_count,
            max_seconds=self.max_seconds, initial=self.initial, seed=self.seed,
        )
        kw.update(overrides)
        return SolverConfig(**kw)

    def to_dict(self):
        return json.loads(json.dumps(asdict(self)))


def load_config(path=None, overrides=None):
    """Read a JSON config file (optional) and apply flat key overrides."""
    d = {}
    if path is not None:
        try:
            with open(path) as fh:
                d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(["<file>"], f"config is not valid JSON: {exc}") from None
    for k, v in (overrides or {}).items():
        if v is not None:
            d[k] = v
    return RunConfig.from_dict(d)
