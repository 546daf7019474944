"""Run configuration: a flat JSON key set with strict validation.

Unknown keys are hard errors (sweeps depend on it), and every error names the
offending key path. Seed lists accept inclusive ranges like "0..4".
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any


class ConfigError(ValueError):
    def __init__(self, message: str, key: str = ""):
        super().__init__(f"{key}: {message}" if key else message)
        self.key = key


def _positive(x):
    return x > 0


def _non_negative(x):
    return x >= 0


# key -> (type coercion, default, validator or None)
KEYS: dict[str, tuple] = {
    "name": (str, "", None),
    "game": (str, None, lambda v: v in ("rps", "matrix", "kuhn", "deceptive", "pgg")),
    "solver": (str, "gems", lambda v: v in ("gems", "psro", "double_oracle")),
    "iterations": (int, 10, _positive),
    "seeds": (object, "0", None),
    "out": (str, "runs", None),
    # game parameters
    "matrix_payoffs": (object, None, None),
    "matrix_shape": (object, None, None),
    "matrix_random_k": (int, 0, _non_negative),
    "matrix_random_seed": (int, 0, None),
    "pgg_n": (int, 5, lambda v: v >= 2),
    "pgg_r": (float, 1.6, _positive),
    "pgg_c": (float, 1.0, _positive),
    # generator
    "zdim": (int, 8, _positive),
    "hidden": (int, 32, _positive),
    "tau": (float, 1.0, lambda v: v >= 1.0),
    "k0": (int, 1, _positive),
    # meta-solver
    "eta": (float, 0.08, _positive),
    "eta_sched": (str, "const", lambda v: v in ("const", "sqrt", "harmonic")),
    "alpha": (float, 0.5, _positive),
    "slowdown": (float, 1.0, lambda v: v >= 1.0),
    "ema": (float, 0.0, lambda v: 0.0 <= v < 1.0),
    "mwu_grad_cap": (float, 1.0, _positive),
    "preset": (object, None, lambda v: v in (None, "slow")),
    # estimation budgets
    "n": (int, 4, _positive),
    "m": (int, 4, _positive),
    "B": (int, 16, _positive),
    "sigma_floor": (float, 1e-3, _positive),
    "iw_mix": (float, 0.01, lambda v: 0.0 <= v < 1.0),
    # oracle
    "pool_mut": (int, 8, _non_negative),
    "pool_rand": (int, 8, _non_negative),
    "pool_rho": (float, 0.3, _non_negative),
    "oracle_nz": (int, 4, _positive),
    "oracle_m": (int, 4, _positive),
    "lambda_jac": (float, 0.0, _non_negative),
    "oracle_period": (int, 1, _positive),
    # ABR
    "abr_lr": (float, 0.05, _positive),
    "abr_steps": (int, 5, _positive),
    "beta_kl": (float, 0.1, _non_negative),
    "abr_batch": (int, 16, _positive),
    "abr_m": (int, 2, _positive),
    # baselines
    "m_table": (int, 20, _positive),
    "psro_br_steps": (int, 200, _positive),
    # sweep grid: key -> list of values
    "sweep": (object, None, None),
}

SLOW_PRESET = {"eta_sched": "harmonic", "ema": 0.5, "oracle_period": 2}


@dataclass
class RunConfig:
    values: dict[str, Any] = field(default_factory=dict)

    def __getattr__(self, key):
        try:
            return self.values[key]
        except KeyError as exc:
            raise AttributeError(key) from exc

    def override(self, **updates) -> "RunConfig":
        merged = dict(self.values)
        for key, value in updates.items():
            if key not in KEYS:
                raise ConfigError("unknown key", key)
            merged[key] = _coerce(key, value)
        return RunConfig(merged)


def _coerce(key: str, value):
    typ, _, validate = KEYS[key]
    if typ in (int, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"expected {typ.__name__}, got {value!r}", key)
        if typ is int and float(value) != int(value):
            raise ConfigError(f"expected integer, got {value!r}", key)
        value = typ(value)
    elif typ is str:
        if not isinstance(value, str):
            raise ConfigError(f"expected string, got {value!r}", key)
    if validate is not None and not validate(value):
        raise ConfigError(f"invalid value {value!r}", key)
    return value


def parse_seeds(spec) -> list[int]:
    """Accept "a..b" inclusive ranges, comma lists, ints, or lists of ints."""
    if isinstance(spec, int):
        return [spec]
    if isinstance(spec, (list, tuple)):
        return [int(s) for s in spec]
    if isinstance(spec, str):
        text = spec.strip()
        if ".." in text:
            lo, hi = text.split("..", 1)
            a, b = int(lo), int(hi)
            if b < a:
                raise ConfigError(f"range '{text}' is reversed", "seeds")
            return list(range(a, b + 1))
        return [int(part) for part in text.split(",") if part.strip() != ""]
    raise ConfigError(f"cannot parse seeds from {spec!r}", "seeds")


def build_config(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    for key in raw:
        if key not in KEYS:
            raise ConfigError("unknown key", key)
    if "game" not in raw:
        raise ConfigError("required key missing", "game")
    values = {}
    explicit = set(raw)
    for key, (typ, default, validate) in KEYS.items():
        values[key] = _coerce(key, raw[key]) if key in raw else default
    if values.get("preset") == "slow":
        for key, preset_value in SLOW_PRESET.items():
            if key not in explicit:
                values[key] = preset_value
    cfg = RunConfig(values)
    parse_seeds(cfg.seeds)  # validate early
    if cfg.game == "matrix":
        has_payoffs = cfg.matrix_payoffs is not None
        if has_payoffs:
            if cfg.matrix_shape is None:
                raise ConfigError("matrix_shape required with matrix_payoffs", "matrix_shape")
            rows, cols = cfg.matrix_shape
            if len(cfg.matrix_payoffs) != rows * cols:
                raise ConfigError("payoff list length does not match shape", "matrix_payoffs")
        elif cfg.matrix_random_k < 2:
            raise ConfigError("matrix game needs matrix_payoffs or matrix_random_k >= 2", "matrix_random_k")
    if cfg.sweep is not None:
        if not isinstance(cfg.sweep, dict) or not cfg.sweep:
            raise ConfigError("sweep must be a non-empty object of key -> list", "sweep")
        for key, grid in cfg.sweep.items():
            if key not in KEYS or key in ("sweep", "seeds", "out", "game"):
                raise ConfigError("not sweepable", f"sweep.{key}")
            if not isinstance(grid, list) or not grid:
                raise ConfigError("grid must be a non-empty list", f"sweep.{key}")
            for v in grid:
                _coerce(key, v)
    return cfg


def load_config(path) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    return build_config(raw)


def game_from_config(cfg: RunConfig):
    from .games import make_game

    if cfg.game == "matrix":
        if cfg.matrix_payoffs is not None:
            return make_game("matrix", payoffs=cfg.matrix_payoffs, shape=tuple(cfg.matrix_shape))
        return make_game("matrix", random_k=cfg.matrix_random_k, random_seed=cfg.matrix_random_seed)
    if cfg.game == "pgg":
        return make_game("pgg", n_players=cfg.pgg_n, multiplier=cfg.pgg_r, cost=cfg.pgg_c)
    return make_game(cfg.game)
