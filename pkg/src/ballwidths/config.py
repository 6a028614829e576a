"""Run configuration: a JSON document describing a family and what to compute.

Example::

    {
      "command": "estimate",
      "N": 16, "n": 4, "q": 2,
      "balls": [{"p": 4, "nu": 1}, {"p": 1, "nu": 2}],
      "auto_normalize": false
    }

See README.md for the full schema.
"""

from __future__ import annotations

import dataclasses
import json
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional, Union

from .balls import BallFamily, BallSpec
from .exceptions import ConfigError
from .oracle import DEFAULT_SEED, Resolution

COMMANDS = ("estimate", "normalize", "check", "sandwich", "sweep")
FORMATS = ("csv", "jsonl")

Exponent = Union[int, float, Fraction, str]

_TOP_KEYS = {
    "command", "balls", "N", "n", "q", "auto_normalize", "seed", "resolution", "sweep", "output",
}
_BALL_KEYS = {"p", "nu"}
_SWEEP_KEYS = {"n", "N", "q", "sandwich", "workers"}
_OUTPUT_KEYS = {"path", "format"}
_Q_MESSAGE = "q must be ≥ 1 or 'inf'"


@dataclass(frozen=True)
class BallEntry:
    p: Exponent
    nu: float

    def spec(self) -> BallSpec:
        return BallSpec(exponent_z(self.p), float(self.nu))


@dataclass(frozen=True)
class SweepAxes:
    n: tuple = ()
    N: tuple = ()
    q: tuple = ()
    sandwich: bool = False
    workers: int = 1


@dataclass(frozen=True)
class OutputSpec:
    path: Optional[str] = None
    format: str = "csv"


@dataclass(frozen=True)
class RunConfig:
    command: str
    balls: tuple
    N: Optional[int] = None
    n: Optional[int] = None
    q: Optional[Exponent] = None
    auto_normalize: bool = False
    seed: int = DEFAULT_SEED
    resolution: Resolution = Resolution()
    sweep: Optional[SweepAxes] = None
    output: OutputSpec = OutputSpec()

    def family(self, N: Optional[int] = None) -> BallFamily:
        return BallFamily.from_balls(self.N if N is None else N, (b.spec() for b in self.balls))


def exponent_z(p: Exponent) -> float:
    """``1/p`` for a validated exponent value."""
    if p == "inf":
        return 0.0
    return float(1 / Fraction(p)) if isinstance(p, Fraction) else 1.0 / float(p)


def _exponent(value: Any, where: str, message: str) -> Exponent:
    """Parse ``"inf"``, a number, or a rational string like ``"3/2"``; require >= 1."""
    if isinstance(value, bool):
        raise ConfigError(f"{where}: {message}")
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "infinity"):
            return "inf"
        try:
            value = Fraction(text) if "/" in text else float(text)
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"{where}: {message}") from None
    if isinstance(value, float) and math.isinf(value) and value > 0:
        return "inf"
    if not isinstance(value, (int, float, Fraction)) or not (value >= 1):
        raise ConfigError(f"{where}: {message}")
    return value


def _int(value: Any, where: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}: expected an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(f"{where}: must be >= {minimum}, got {value}")
    return value


def _bool(value: Any, where: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(f"{where}: expected true or false, got {value!r}")
    return value


def _object(value: Any, where: str, allowed: set) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"{where}: expected an object")
    unknown = sorted(set(value) - allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(map(repr, unknown))}")
    return value


def _list(value: Any, where: str) -> list:
    if not isinstance(value, list):
        raise ConfigError(f"{where}: expected a list")
    return value


def load_document(text: str) -> Any:
    """Decode JSON, reporting the position of a syntax error."""
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def parse_config(text: Union[str, dict], command: Optional[str] = None) -> RunConfig:
    """Validate a configuration document and return a :class:`RunConfig`.

    ``command`` (from the command line) takes precedence over the document's
    own ``command`` field.
    """
    doc = _object(text if isinstance(text, dict) else load_document(text), "config", _TOP_KEYS)

    cmd = command or doc.get("command")
    if cmd not in COMMANDS:
        raise ConfigError(f"command: expected one of {', '.join(COMMANDS)}, got {cmd!r}")

    raw_balls = _list(doc.get("balls", []), "balls")
    if not raw_balls:
        raise ConfigError("balls: family must be non-empty")
    balls = []
    for i, item in enumerate(raw_balls):
        where = f"balls[{i}]"
        item = _object(item, where, _BALL_KEYS)
        if "p" not in item or "nu" not in item:
            raise ConfigError(f"{where}: both 'p' and 'nu' are required")
        p = _exponent(item["p"], f"{where}.p", "p must be ≥ 1 or 'inf'")
        nu = item["nu"]
        if isinstance(nu, bool) or not isinstance(nu, (int, float)) or not (math.isfinite(nu) and nu > 0):
            raise ConfigError(f"{where}.nu: must be a positive finite number, got {nu!r}")
        balls.append(BallEntry(p, nu))
    zs = [exponent_z(b.p) for b in balls]
    if len(set(zs)) != len(zs):
        warnings.warn("balls: repeated exponents will be collapsed to the smallest radius", UserWarning)

    kw: dict = {"command": cmd, "balls": tuple(balls)}
    if "N" in doc:
        kw["N"] = _int(doc["N"], "N", 1)
    if "n" in doc:
        kw["n"] = _int(doc["n"], "n", 0)
    if "q" in doc:
        kw["q"] = _exponent(doc["q"], "q", _Q_MESSAGE)
    if "auto_normalize" in doc:
        kw["auto_normalize"] = _bool(doc["auto_normalize"], "auto_normalize")
    if "seed" in doc:
        kw["seed"] = _int(doc["seed"], "seed", 0)
    if "resolution" in doc:
        kw["resolution"] = _resolution(doc["resolution"])
    if "sweep" in doc:
        kw["sweep"] = _sweep(doc["sweep"])
    if "output" in doc:
        out = _object(doc["output"], "output", _OUTPUT_KEYS)
        path = out.get("path")
        if path is not None and not isinstance(path, str):
            raise ConfigError("output.path: expected a string")
        fmt = out.get("format", "csv")
        if fmt not in FORMATS:
            raise ConfigError(f"output.format: expected one of {', '.join(FORMATS)}, got {fmt!r}")
        kw["output"] = OutputSpec(path, fmt)

    cfg = RunConfig(**kw)
    check_required(cfg)
    return cfg


def _resolution(value) -> Resolution:
    names = {f.name for f in dataclasses.fields(Resolution)}
    doc = _object(value, "resolution", names)
    kw = {}
    for k, v in doc.items():
        if k == "refine_steps":
            steps = _list(v, "resolution.refine_steps")
            if not steps or any(isinstance(s, bool) or not isinstance(s, (int, float)) or s <= 0 for s in steps):
                raise ConfigError("resolution.refine_steps: expected a non-empty list of positive numbers")
            kw[k] = tuple(steps)
        else:
            kw[k] = _int(v, f"resolution.{k}", 1)
    return Resolution(**kw)


def _sweep(value) -> SweepAxes:
    doc = _object(value, "sweep", _SWEEP_KEYS)
    kw = {}
    for axis, minimum in (("n", 0), ("N", 1)):
        if axis in doc:
            kw[axis] = tuple(_int(v, f"sweep.{axis}[{i}]", minimum) for i, v in enumerate(_list(doc[axis], f"sweep.{axis}")))
    if "q" in doc:
        kw["q"] = tuple(
            _exponent(v, f"sweep.q[{i}]", _Q_MESSAGE) for i, v in enumerate(_list(doc["q"], "sweep.q"))
        )
    if "sandwich" in doc:
        kw["sandwich"] = _bool(doc["sandwich"], "sweep.sandwich")
    if "workers" in doc:
        kw["workers"] = _int(doc["workers"], "sweep.workers", 1)
    return SweepAxes(**kw)


def check_required(cfg: RunConfig) -> None:
    """Per-command presence checks (run again after command-line overrides)."""
    need = {
        "estimate": ("N", "n", "q"),
        "sandwich": ("N", "n", "q"),
        "normalize": ("N",),
        "check": ("N",),
        "sweep": (),
    }[cfg.command]
    for name in need:
        if getattr(cfg, name) is None:
            raise ConfigError(f"{name}: required for command '{cfg.command}'")
    if cfg.command == "sweep":
        axes = cfg.sweep or SweepAxes()
        for name in ("n", "N", "q"):
            if not getattr(axes, name) and getattr(cfg, name) is None:
                raise ConfigError(f"sweep.{name}: give a grid or a scalar '{name}'")


def _exponent_json(p: Exponent):
    if isinstance(p, Fraction):
        return f"{p.numerator}/{p.denominator}"
    return p


def config_to_dict(cfg: RunConfig) -> dict:
    doc: dict = {
        "command": cfg.command,
        "balls": [{"p": _exponent_json(b.p), "nu": b.nu} for b in cfg.balls],
    }
    for name in ("N", "n"):
        if getattr(cfg, name) is not None:
            doc[name] = getattr(cfg, name)
    if cfg.q is not None:
        doc["q"] = _exponent_json(cfg.q)
    doc["auto_normalize"] = cfg.auto_normalize
    doc["seed"] = cfg.seed
    res = dataclasses.asdict(cfg.resolution)
    res["refine_steps"] = list(res["refine_steps"])
    doc["resolution"] = res
    if cfg.sweep is not None:
        doc["sweep"] = {
            "n": list(cfg.sweep.n),
            "N": list(cfg.sweep.N),
            "q": [_exponent_json(q) for q in cfg.sweep.q],
            "sandwich": cfg.sweep.sandwich,
            "workers": cfg.sweep.workers,
        }
    doc["output"] = {"path": cfg.output.path, "format": cfg.output.format}
    return doc


def serialize_config(cfg: RunConfig) -> str:
    return json.dumps(config_to_dict(cfg), indent=2)
