"""Scenario files: INI text with a ``[scenario]`` section.

Waveforms are written as ``<name>.kind`` plus comma-separated ``<name>.params``:

=================  ==========================================================
kind               params
=================  ==========================================================
constant           ``c``
polynomial         ``c0, c1, c2, ...`` (ascending powers of t)
fourier            ``omega, a0, a1, b1, a2, b2, ...`` (cos/sin interleaved)
piecewise_linear   ``t0, v0, t1, v1, ...``
step               ``t0, v0, t1, v1, ..., tn`` (``v_i`` on ``[t_i, t_{i+1})``)
sampled            ``t0, dt, v0, v1, ...``
=================  ==========================================================

Numbers may be plain floats or arithmetic on ``pi`` (``4*pi``, ``pi/2``).
"""

from __future__ import annotations

import ast
import configparser
import math
import operator
import re
from dataclasses import dataclass, field
from pathlib import Path

from .signals import Constant, Fourier, PiecewiseLinear, Polynomial, Sampled, Step, Waveform

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "KINDS",
    "parse_number",
    "parse_waveform",
    "format_waveform",
    "load_config",
    "load_waveform",
    "parse_config",
    "waveform_section",
]

KINDS = ("oneport", "twoport", "mechanical", "inductor-dual", "paradox")
SECTION = "scenario"


class ConfigError(ValueError):
    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"field '{key}'")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.key = key
        self.line = line


_OPS = {
    ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
    ast.Div: operator.truediv, ast.Pow: operator.pow,
    ast.USub: operator.neg, ast.UAdd: operator.pos,
}


def _eval(node):
    if isinstance(node, ast.Expression):
        return _eval(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id == "pi":
        return math.pi
    if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
        return _OPS[type(node.op)](_eval(node.left), _eval(node.right))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
        return _OPS[type(node.op)](_eval(node.operand))
    raise ValueError("unsupported expression")


def parse_number(text: str) -> float:
    text = text.strip()
    try:
        return float(text)
    except ValueError:
        pass
    try:
        return _eval(ast.parse(text, mode="eval"))
    except (SyntaxError, ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a number: {text!r}") from exc


def _numbers(text: str) -> list[float]:
    return [parse_number(x) for x in text.split(",") if x.strip()]


def parse_waveform(kind: str, params: str) -> Waveform:
    kind = kind.strip().lower()
    p = _numbers(params)
    if kind == "constant":
        if len(p) != 1:
            raise ValueError("constant takes exactly one parameter")
        return Constant(p[0])
    if kind == "polynomial":
        if not p:
            raise ValueError("polynomial needs at least one coefficient")
        return Polynomial(p)
    if kind == "fourier":
        if len(p) < 2 or len(p) % 2:
            raise ValueError("fourier takes omega, a0 and (a_k, b_k) pairs")
        return Fourier(p[0], p[1], p[2::2], p[3::2])
    if kind == "piecewise_linear":
        if len(p) < 4 or len(p) % 2:
            raise ValueError("piecewise_linear takes (t, value) pairs")
        return PiecewiseLinear(list(zip(p[0::2], p[1::2])))
    if kind == "step":
        if len(p) < 3 or len(p) % 2 == 0:
            raise ValueError("step takes t0, v0, ..., tn")
        return Step(p[0::2], p[1::2])
    if kind == "sampled":
        if len(p) < 4:
            raise ValueError("sampled takes t0, dt and at least two values")
        return Sampled(p[0], p[1], p[2:])
    raise ValueError(f"unknown waveform kind {kind!r}")


def format_waveform(w: Waveform) -> tuple[str, str]:
    """``(kind, params)`` strings that :func:`parse_waveform` maps back to ``w``."""
    f = lambda xs: ", ".join(repr(float(x)) for x in xs)  # noqa: E731
    if isinstance(w, Constant):
        return "constant", f([w.value])
    if isinstance(w, Polynomial):
        return "polynomial", f(w.coeffs)
    if isinstance(w, Fourier):
        inter = [x for pair in zip(w.a, w.b) for x in pair]
        return "fourier", f([w.omega, w.a0, *inter])
    if isinstance(w, PiecewiseLinear):
        return "piecewise_linear", f([x for pt in w.breakpoints for x in pt])
    if isinstance(w, Step):
        flat = [x for pair in zip(w.times, w.values) for x in pair] + [w.times[-1]]
        return "step", f(flat)
    if isinstance(w, Sampled):
        return "sampled", f([w.t0, w.dt, *w.values])
    raise TypeError(f"{type(w).__name__} has no config representation")


def waveform_section(name: str, w: Waveform) -> str:
    kind, params = format_waveform(w)
    return f"{name}.kind = {kind}\n{name}.params = {params}\n"


@dataclass
class ScenarioConfig:
    kind: str
    waveforms: dict[str, Waveform] = field(default_factory=dict)
    values: dict[str, float] = field(default_factory=dict)
    out: str | None = None
    source: Path | None = None

    def number(self, key: str, default: float | None = None) -> float:
        if key in self.values:
            return self.values[key]
        if default is None:
            raise ConfigError("required field missing", key)
        return default


_NUMERIC_KEYS = ("Q0", "C0", "V0", "t_end", "dt", "period", "k", "T", "J", "Theta0", "P0")
_WAVEFORMS = ("C", "I", "U", "tau")
_REQUIRED = {
    "oneport": (("C", "I"), ("t_end", "dt")),
    "twoport": (("I",), ("t_end", "dt")),
    "mechanical": (("C", "I", "tau"), ("J", "t_end", "dt")),
    "inductor-dual": (("C", "I"), ("t_end", "dt")),
    "paradox": ((), ("Q0", "C0")),
}


def _line_of(text: str, key: str) -> int | None:
    pat = re.compile(rf"^\s*{re.escape(key)}\s*[=:]", re.IGNORECASE)
    for n, line in enumerate(text.splitlines(), start=1):
        if pat.match(line):
            return n
    return None


def parse_config(text: str, source: Path | None = None) -> ScenarioConfig:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str  # keys are case-sensitive (Q0 vs q0)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc).splitlines()[0], line=getattr(exc, "lineno", None)) from exc
    if not cp.has_section(SECTION):
        raise ConfigError(f"missing [{SECTION}] section")
    sec = cp[SECTION]
    known = {"kind", "out", *_NUMERIC_KEYS, *(f"{w}.{p}" for w in _WAVEFORMS for p in ("kind", "params"))}
    for key in sec:
        if key not in known:
            raise ConfigError("unknown field", key, _line_of(text, key))

    kind = sec.get("kind", "").strip()
    if kind not in KINDS:
        raise ConfigError(f"kind must be one of {', '.join(KINDS)}", "kind", _line_of(text, "kind"))
    cfg = ScenarioConfig(kind, out=sec.get("out") or None, source=source)

    for key in _NUMERIC_KEYS:
        if key in sec:
            try:
                cfg.values[key] = parse_number(sec[key])
            except ValueError as exc:
                raise ConfigError(str(exc), key, _line_of(text, key)) from None
    for name in _WAVEFORMS:
        k_key, p_key = f"{name}.kind", f"{name}.params"
        if (k_key in sec) != (p_key in sec):
            missing = p_key if k_key in sec else k_key
            raise ConfigError("waveform needs both .kind and .params", missing,
                              _line_of(text, k_key if k_key in sec else p_key))
        if k_key in sec:
            try:
                cfg.waveforms[name] = parse_waveform(sec[k_key], sec[p_key])
            except ValueError as exc:
                raise ConfigError(str(exc), p_key, _line_of(text, p_key)) from None

    wave_req, num_req = _REQUIRED[kind]
    for name in wave_req:
        if name not in cfg.waveforms:
            raise ConfigError("required waveform missing", f"{name}.kind")
    for key in num_req:
        if key not in cfg.values:
            raise ConfigError("required field missing", key)
    if kind == "twoport" and "U" not in cfg.waveforms and "C" not in cfg.waveforms:
        raise ConfigError("twoport needs U.* (with C0) or C.* to derive U", "U.kind")
    if kind == "twoport" and "U" in cfg.waveforms and "C0" not in cfg.values:
        raise ConfigError("required field missing", "C0")
    if "dt" in cfg.values and not cfg.values["dt"] > 0:
        raise ConfigError("dt must be positive", "dt", _line_of(text, "dt"))
    if "t_end" in cfg.values and not cfg.values["t_end"] > 0:
        raise ConfigError("t_end must be positive", "t_end", _line_of(text, "t_end"))
    return cfg


def load_waveform(path: str | Path, name: str = "I") -> Waveform:
    """Read one waveform (``<name>.kind`` / ``<name>.params``) from a scenario file."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    cp.read_string(Path(path).read_text())
    sec = cp[SECTION]
    try:
        return parse_waveform(sec[f"{name}.kind"], sec[f"{name}.params"])
    except KeyError as exc:
        raise ConfigError("waveform missing", exc.args[0]) from None


def load_config(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text, source=path)
