"""Scalar time functions: waveforms with exact calculus, and capacitance profiles.

Closed-form variants (:class:`Constant`, :class:`Polynomial`, :class:`Fourier`)
evaluate, differentiate and integrate exactly.  :class:`PiecewiseLinear`,
:class:`Step` and :class:`Sampled` have finite support and raise
:class:`DomainError` outside of it.  Sums and products that do not close
within a variant become :class:`Sum` / :class:`Product` nodes which are
evaluated pointwise and integrated by composite Simpson quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.integrate import simpson

__all__ = [
    "DomainError",
    "UnsupportedOperation",
    "ModelError",
    "Waveform",
    "Constant",
    "Polynomial",
    "Fourier",
    "PiecewiseLinear",
    "Step",
    "Sampled",
    "Sum",
    "Product",
    "CapacitanceProfile",
    "evaluate",
    "derivative",
    "integrate",
    "simpson_uniform",
    "cumulative_simpson_even",
    "QUAD_INTERVALS",
]

# default number of Simpson panels (x2 intervals) for composite integrands
QUAD_INTERVALS = 4096

_REL_GRID_TOL = 1e-9


class DomainError(ValueError):
    """Evaluation outside a waveform's support."""


class UnsupportedOperation(TypeError):
    """The operation has no exact form for this waveform variant."""


class ModelError(RuntimeError):
    """A physical model left its admissible region (e.g. C <= 0).

    ``t`` holds the offending time when known.
    """

    def __init__(self, message: str, t: float | None = None):
        super().__init__(message)
        self.t = t


def _as_float_tuple(values) -> tuple[float, ...]:
    return tuple(float(v) for v in np.asarray(values, dtype=float).ravel())


def _trim(values: tuple[float, ...]) -> tuple[float, ...]:
    n = len(values)
    while n and values[n - 1] == 0.0:
        n -= 1
    return values[:n]


def simpson_uniform(y: np.ndarray, dx: float, axis: int = -1) -> np.ndarray | float:
    """Composite Simpson rule on uniformly spaced samples."""
    return simpson(y, dx=dx, axis=axis)


def cumulative_simpson_even(y: np.ndarray, dx: float) -> np.ndarray:
    """Running Simpson integral evaluated at the even sample indices.

    Returns an array ``out`` with ``out[j] = integral from y[0] to y[2j]``.
    """
    y = np.asarray(y, dtype=float)
    m = (len(y) - 1) // 2
    panels = dx / 3.0 * (y[0:2 * m:2] + 4.0 * y[1:2 * m:2] + y[2:2 * m + 1:2])
    return np.concatenate(([0.0], np.cumsum(panels)))


class Waveform:
    """Base class for immutable scalar signals of time.

    Subclasses implement ``__call__``, ``derivative`` and ``integrate``.
    Arithmetic (``+``, ``-``, ``*`` with waveforms or numbers) stays inside a
    closed-form variant whenever the algebra closes, otherwise it builds a
    :class:`Sum` or :class:`Product` node.
    """

    closed_form = False

    def __call__(self, t):
        raise NotImplementedError

    def derivative(self) -> "Waveform":
        raise UnsupportedOperation(f"{type(self).__name__} has no exact derivative")

    def integrate(self, t1: float, t2: float, intervals: int | None = None) -> float:
        return _simpson_integral(self, t1, t2, intervals)

    def support(self) -> tuple[float, float]:
        return (-math.inf, math.inf)

    def _check_domain(self, t) -> None:
        lo, hi = self.support()
        if math.isinf(lo) and math.isinf(hi):
            return
        ta = np.asarray(t, dtype=float)
        slack = _REL_GRID_TOL * max(1.0, abs(lo), abs(hi))
        if np.any(ta < lo - slack) or np.any(ta > hi + slack):
            bad = ta[(ta < lo - slack) | (ta > hi + slack)].ravel()[0]
            raise DomainError(f"t={bad!r} outside support [{lo}, {hi}] of {type(self).__name__}")

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return _add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return _scale(self, -1.0)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return _add(self, _scale(other, -1.0))

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return _add(other, _scale(self, -1.0))

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return _scale(self, float(other))
        if not isinstance(other, Waveform):
            return NotImplemented
        return _mul(self, other)

    __rmul__ = __mul__


def _coerce(x):
    if isinstance(x, Waveform):
        return x
    if isinstance(x, (int, float, np.floating, np.integer)):
        return Constant(float(x))
    return NotImplemented


@dataclass(frozen=True)
class Constant(Waveform):
    value: float

    closed_form = True

    def __call__(self, t):
        if np.ndim(t) == 0:
            return float(self.value)
        return np.full(np.shape(t), float(self.value))

    def derivative(self) -> Waveform:
        return Constant(0.0)

    def integrate(self, t1, t2, intervals=None):
        return self.value * (t2 - t1)


@dataclass(frozen=True, init=False)
class Polynomial(Waveform):
    """``sum(coeffs[k] * t**k)``.  Degree-0 results collapse to :class:`Constant`."""

    coeffs: tuple[float, ...]

    closed_form = True

    def __init__(self, coeffs: Sequence[float]):
        object.__setattr__(self, "coeffs", _as_float_tuple(coeffs) or (0.0,))

    def __call__(self, t):
        return npoly.polyval(t, self.coeffs)

    def derivative(self) -> Waveform:
        return _poly(npoly.polyder(self.coeffs))

    def integrate(self, t1, t2, intervals=None):
        anti = npoly.polyint(self.coeffs)
        return float(npoly.polyval(t2, anti) - npoly.polyval(t1, anti))


def _poly(coeffs) -> Waveform:
    c = _trim(_as_float_tuple(coeffs))
    if len(c) <= 1:
        return Constant(c[0] if c else 0.0)
    return Polynomial(c)


@dataclass(frozen=True, init=False)
class Fourier(Waveform):
    """Truncated Fourier series with fundamental ``omega`` [rad/s].

    ``a0 + sum_k a[k-1] cos(k omega t) + b[k-1] sin(k omega t)``.
    """

    omega: float
    a0: float
    a: tuple[float, ...]
    b: tuple[float, ...]

    closed_form = True

    def __init__(self, omega: float, a0: float = 0.0, a: Sequence[float] = (), b: Sequence[float] = ()):
        if not omega > 0:
            raise ValueError("Fourier fundamental omega must be positive")
        a = _as_float_tuple(a)
        b = _as_float_tuple(b)
        n = max(len(a), len(b))
        a = _trim(a + (0.0,) * (n - len(a)))
        b = _trim(b + (0.0,) * (n - len(b)))
        n = max(len(a), len(b))
        object.__setattr__(self, "omega", float(omega))
        object.__setattr__(self, "a0", float(a0))
        object.__setattr__(self, "a", a + (0.0,) * (n - len(a)))
        object.__setattr__(self, "b", b + (0.0,) * (n - len(b)))

    @property
    def order(self) -> int:
        return len(self.a)

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, self.a0)
        for k, (ak, bk) in enumerate(zip(self.a, self.b), start=1):
            x = k * self.omega * t
            out = out + ak * np.cos(x) + bk * np.sin(x)
        return float(out) if out.ndim == 0 else out

    def derivative(self) -> Waveform:
        k = np.arange(1, self.order + 1) * self.omega
        return Fourier(self.omega, 0.0, k * np.asarray(self.b), -k * np.asarray(self.a))

    def integrate(self, t1, t2, intervals=None):
        total = self.a0 * (t2 - t1)
        for k, (ak, bk) in enumerate(zip(self.a, self.b), start=1):
            w = k * self.omega
            total += ak * (math.sin(w * t2) - math.sin(w * t1)) / w
            total -= bk * (math.cos(w * t2) - math.cos(w * t1)) / w
        return total

    def coefficient_vector(self) -> np.ndarray:
        """Interleaved ``[a1, b1, a2, b2, ...]`` (the mean is excluded)."""
        return np.column_stack([self.a, self.b]).ravel() if self.order else np.zeros(0)

    @classmethod
    def from_coefficient_vector(cls, omega: float, c, a0: float = 0.0) -> "Fourier":
        c = np.asarray(c, dtype=float)
        return cls(omega, a0, c[0::2], c[1::2])

    def _complex(self) -> np.ndarray:
        # index n + N holds c_n, n = -N..N, with f = sum c_n exp(i n omega t)
        a = np.asarray(self.a)
        b = np.asarray(self.b)
        pos = 0.5 * (a - 1j * b)
        return np.concatenate((np.conj(pos[::-1]), [self.a0], pos))

    @classmethod
    def _from_complex(cls, omega: float, c: np.ndarray) -> "Fourier":
        n = (len(c) - 1) // 2
        pos = c[n + 1:]
        return cls(omega, float(c[n].real), 2.0 * pos.real, -2.0 * pos.imag)


@dataclass(frozen=True, init=False)
class PiecewiseLinear(Waveform):
    """Linear interpolation between ``(t, value)`` breakpoints."""

    times: tuple[float, ...]
    values: tuple[float, ...]

    def __init__(self, breakpoints: Sequence[tuple[float, float]]):
        pts = np.asarray(breakpoints, dtype=float).reshape(-1, 2)
        if len(pts) < 2:
            raise ValueError("piecewise_linear needs at least two breakpoints")
        if np.any(np.diff(pts[:, 0]) <= 0):
            raise ValueError("piecewise_linear breakpoints must be strictly increasing in t")
        object.__setattr__(self, "times", _as_float_tuple(pts[:, 0]))
        object.__setattr__(self, "values", _as_float_tuple(pts[:, 1]))

    @property
    def breakpoints(self) -> tuple[tuple[float, float], ...]:
        return tuple(zip(self.times, self.values))

    def support(self):
        return (self.times[0], self.times[-1])

    def __call__(self, t):
        self._check_domain(t)
        out = np.interp(t, self.times, self.values)
        return float(out) if np.ndim(out) == 0 else out

    def derivative(self) -> Waveform:
        slopes = np.diff(self.values) / np.diff(self.times)
        return Step(self.times, slopes)

    def integrate(self, t1, t2, intervals=None):
        self._check_domain([t1, t2])
        knots = [t for t in self.times if t1 < t < t2]
        xs = np.array([t1, *knots, t2])
        ys = np.interp(xs, self.times, self.values)
        return float(np.trapezoid(ys, xs))


@dataclass(frozen=True, init=False)
class Step(Waveform):
    """Piecewise-constant signal: ``values[i]`` on ``[times[i], times[i+1])``.

    The last interval is closed, so the support is ``[times[0], times[-1]]``.
    """

    times: tuple[float, ...]
    values: tuple[float, ...]

    def __init__(self, times: Sequence[float], values: Sequence[float]):
        times = _as_float_tuple(times)
        values = _as_float_tuple(values)
        if len(times) != len(values) + 1 or not values:
            raise ValueError("step needs len(times) == len(values) + 1 >= 2")
        if np.any(np.diff(times) <= 0):
            raise ValueError("step times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def support(self):
        return (self.times[0], self.times[-1])

    def __call__(self, t):
        self._check_domain(t)
        idx = np.searchsorted(self.times, t, side="right") - 1
        idx = np.clip(idx, 0, len(self.values) - 1)
        out = np.asarray(self.values)[idx]
        return float(out) if np.ndim(out) == 0 else out

    def integrate(self, t1, t2, intervals=None):
        self._check_domain([t1, t2])
        edges = np.clip(np.asarray(self.times), t1, t2)
        return float(np.sum(np.diff(edges) * np.asarray(self.values)))


@dataclass(frozen=True, init=False)
class Sampled(Waveform):
    """Uniformly sampled data ``values[i]`` at ``t0 + i*dt``; linear in between."""

    t0: float
    dt: float
    values: tuple[float, ...]

    def __init__(self, t0: float, dt: float, values: Sequence[float]):
        if not dt > 0:
            raise ValueError("sampled waveform needs dt > 0")
        values = _as_float_tuple(values)
        if len(values) < 2:
            raise ValueError("sampled waveform needs at least two samples")
        object.__setattr__(self, "t0", float(t0))
        object.__setattr__(self, "dt", float(dt))
        object.__setattr__(self, "values", values)

    @property
    def grid(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self.values))

    def support(self):
        return (self.t0, self.t0 + self.dt * (len(self.values) - 1))

    def __call__(self, t):
        self._check_domain(t)
        out = np.interp(t, self.grid, self.values)
        return float(out) if np.ndim(out) == 0 else out

    def integrate(self, t1, t2, intervals=None):
        self._check_domain([t1, t2])
        i1 = (t1 - self.t0) / self.dt
        i2 = (t2 - self.t0) / self.dt
        j1, j2 = round(i1), round(i2)
        if abs(i1 - j1) < 1e-9 and abs(i2 - j2) < 1e-9:
            if j2 == j1:
                return 0.0
            y = np.asarray(self.values[j1:j2 + 1])
            if len(y) == 2:
                return float(0.5 * self.dt * (y[0] + y[1]))
            return float(simpson_uniform(y, self.dt))
        # off-grid endpoints: exact integral of the linear interpolant
        grid = self.grid
        knots = grid[(grid > t1) & (grid < t2)]
        xs = np.concatenate(([t1], knots, [t2]))
        return float(np.trapezoid(np.interp(xs, grid, self.values), xs))


@dataclass(frozen=True)
class Sum(Waveform):
    terms: tuple[Waveform, ...]

    def __post_init__(self):
        object.__setattr__(self, "closed_form", all(w.closed_form for w in self.terms))

    def __call__(self, t):
        return sum(w(t) for w in self.terms)

    def derivative(self) -> Waveform:
        out: Waveform = Constant(0.0)
        for w in self.terms:
            out = out + w.derivative()
        return out

    def integrate(self, t1, t2, intervals=None):
        return sum(w.integrate(t1, t2, intervals) for w in self.terms)

    def support(self):
        lo = max(w.support()[0] for w in self.terms)
        hi = min(w.support()[1] for w in self.terms)
        return (lo, hi)


@dataclass(frozen=True)
class Product(Waveform):
    factors: tuple[Waveform, ...]

    def __post_init__(self):
        object.__setattr__(self, "closed_form", all(w.closed_form for w in self.factors))

    def __call__(self, t):
        out = 1.0
        for w in self.factors:
            out = out * w(t)
        return out

    def derivative(self) -> Waveform:
        out: Waveform = Constant(0.0)
        for i, w in enumerate(self.factors):
            term = w.derivative()
            for j, v in enumerate(self.factors):
                if j != i:
                    term = term * v
            out = out + term
        return out

    def support(self):
        lo = max(w.support()[0] for w in self.factors)
        hi = min(w.support()[1] for w in self.factors)
        return (lo, hi)


def _simpson_integral(w: Waveform, t1: float, t2: float, intervals: int | None) -> float:
    if t2 == t1:
        return 0.0
    n = intervals or QUAD_INTERVALS
    n += n % 2
    t = np.linspace(t1, t2, n + 1)
    return float(simpson_uniform(np.asarray(w(t), dtype=float), (t2 - t1) / n))


def _scale(w: Waveform, s: float) -> Waveform:
    if s == 1.0:
        return w
    if isinstance(w, Constant):
        return Constant(s * w.value)
    if isinstance(w, Polynomial):
        return _poly(s * np.asarray(w.coeffs))
    if isinstance(w, Fourier):
        return Fourier(w.omega, s * w.a0, s * np.asarray(w.a), s * np.asarray(w.b))
    if isinstance(w, PiecewiseLinear):
        return PiecewiseLinear(list(zip(w.times, s * np.asarray(w.values))))
    if isinstance(w, Step):
        return Step(w.times, s * np.asarray(w.values))
    if isinstance(w, Sampled):
        return Sampled(w.t0, w.dt, s * np.asarray(w.values))
    if isinstance(w, Sum):
        return Sum(tuple(_scale(v, s) for v in w.terms))
    return Product((Constant(s), *w.factors)) if s != 0.0 else Constant(0.0)


def _is_zero(w: Waveform) -> bool:
    return isinstance(w, Constant) and w.value == 0.0


def _add(x: Waveform, y: Waveform) -> Waveform:
    if _is_zero(x):
        return y
    if _is_zero(y):
        return x
    if isinstance(y, Constant) and not isinstance(x, Constant):
        x, y = y, x
    if isinstance(x, Constant):
        if isinstance(y, Constant):
            return Constant(x.value + y.value)
        if isinstance(y, Polynomial):
            return _poly(npoly.polyadd(y.coeffs, [x.value]))
        if isinstance(y, Fourier):
            return Fourier(y.omega, y.a0 + x.value, y.a, y.b)
        if isinstance(y, PiecewiseLinear):
            return PiecewiseLinear(list(zip(y.times, np.asarray(y.values) + x.value)))
        if isinstance(y, Step):
            return Step(y.times, np.asarray(y.values) + x.value)
        if isinstance(y, Sampled):
            return Sampled(y.t0, y.dt, np.asarray(y.values) + x.value)
    if isinstance(x, Polynomial) and isinstance(y, Polynomial):
        return _poly(npoly.polyadd(x.coeffs, y.coeffs))
    if isinstance(x, Fourier) and isinstance(y, Fourier) and x.omega == y.omega:
        n = max(x.order, y.order)
        pad = lambda v: np.pad(np.asarray(v), (0, n - len(v)))  # noqa: E731
        return Fourier(x.omega, x.a0 + y.a0, pad(x.a) + pad(y.a), pad(x.b) + pad(y.b))
    xs = x.terms if isinstance(x, Sum) else (x,)
    ys = y.terms if isinstance(y, Sum) else (y,)
    return Sum(xs + ys)


def _mul(x: Waveform, y: Waveform) -> Waveform:
    if isinstance(y, Constant):
        return _scale(x, y.value)
    if isinstance(x, Constant):
        return _scale(y, x.value)
    if isinstance(x, Polynomial) and isinstance(y, Polynomial):
        return _poly(npoly.polymul(x.coeffs, y.coeffs))
    if isinstance(x, Fourier) and isinstance(y, Fourier) and x.omega == y.omega:
        return Fourier._from_complex(x.omega, np.convolve(x._complex(), y._complex()))
    xs = x.factors if isinstance(x, Product) else (x,)
    ys = y.factors if isinstance(y, Product) else (y,)
    return Product(xs + ys)


def evaluate(w: Waveform, t):
    return w(t)


def derivative(w: Waveform) -> Waveform:
    return w.derivative()


def integrate(w: Waveform, t1: float, t2: float, intervals: int | None = None) -> float:
    if t1 > t2:
        raise ValueError("integrate requires t1 <= t2")
    return w.integrate(t1, t2, intervals)


@dataclass(frozen=True)
class CapacitanceProfile:
    """Capacitance ``C(t)`` [F] paired with its rate ``dC/dt`` [F/s].

    When ``rate`` is omitted it is taken as the exact derivative of
    ``waveform``; sampled profiles must supply it explicitly.
    """

    waveform: Waveform
    rate: Waveform | None = field(default=None)

    def __post_init__(self):
        if self.rate is None:
            object.__setattr__(self, "rate", self.waveform.derivative())

    def __call__(self, t):
        return self.waveform(t)

    def dot(self, t):
        return self.rate(t)

    @classmethod
    def constant(cls, c0: float) -> "CapacitanceProfile":
        return cls(Constant(c0))

    @classmethod
    def ramp(cls, c0: float, slope: float) -> "CapacitanceProfile":
        """``C(t) = c0 + slope * t``."""
        return cls(_poly([c0, slope]))

    @classmethod
    def sinusoidal(cls, mean: float, amplitude: float, omega: float) -> "CapacitanceProfile":
        """``C(t) = mean + amplitude * sin(omega t)``."""
        return cls(Fourier(omega, mean, [0.0], [amplitude]))

    @classmethod
    def piecewise_linear(cls, breakpoints) -> "CapacitanceProfile":
        return cls(PiecewiseLinear(breakpoints))

    def check_positive(self, t_start: float, t_end: float, dt: float) -> None:
        """Raise :class:`ModelError` if C <= 0 anywhere on a grid of spacing ``dt/4``."""
        n = max(1, math.ceil((t_end - t_start) / (dt / 4.0)))
        t = np.linspace(t_start, t_end, n + 1)
        c = np.asarray(self.waveform(t), dtype=float)
        bad = np.flatnonzero(c <= 0.0)
        if bad.size:
            tb = float(t[bad[0]])
            raise ModelError(f"nonpositive capacitance C={c[bad[0]]:.6g} at t={tb:.6g}", t=tb)

    def period_mismatch(self, period: float, samples: int = 257) -> float:
        """Max ``|C(t+T) - C(t)|`` over one period, relative to ``max |C|``."""
        lo, _ = self.waveform.support()
        t0 = 0.0 if math.isinf(lo) else lo
        t = np.linspace(t0, t0 + period, samples)
        try:
            c = np.asarray(self.waveform(t))
            c_shift = np.asarray(self.waveform(t + period))
        except DomainError:
            return math.inf
        return float(np.max(np.abs(c_shift - c)) / max(np.max(np.abs(c)), 1e-300))
