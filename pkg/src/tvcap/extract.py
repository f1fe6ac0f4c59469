"""Worst-case periodic currents for the one-port capacitor.

With ``Q(0) = 0`` the voltage is linear in the Fourier coefficients ``c`` of
a zero-mean current, so the energy supplied over one capacitance cycle is an
exact quadratic form ``E(c) = 1/2 c^T M c`` with

    M_ij = integral over one period of dC/dt * V_i * V_j

where ``V_i`` is the voltage response to the ``i``-th basis current.  The
most negative eigenvalue of ``M`` gives the best extraction per unit
coefficient norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .oneport import PortTrajectory
from .ode import rk4_input_driven
from .signals import CapacitanceProfile, Fourier

__all__ = [
    "ExtractionProblem",
    "QuadraticEnergyForm",
    "ExtractionResult",
    "LissajousLoop",
    "build_energy_form",
    "synthesize_extraction_current",
    "harvesting_profile",
    "harvesting_capacitance",
    "lissajous",
    "signed_area",
    "HARVESTING_PERIOD",
]

HARVESTING_OMEGA = 0.5
HARVESTING_PERIOD = 2.0 * math.pi / HARVESTING_OMEGA


def harvesting_capacitance() -> CapacitanceProfile:
    """``C(t) = 2 + sin(t/2)`` [F], period 4 pi s."""
    return CapacitanceProfile.sinusoidal(2.0, 1.0, HARVESTING_OMEGA)


def harvesting_profile() -> Fourier:
    """Zero-mean 4 pi-periodic current that extracts energy from ``2 + sin(t/2)``.

    ``5/2 sin(wt) - 1/4 cos(wt) - 5 sin(2wt) - 5/4 cos(2wt) + 11/4 cos(3wt)
    - 5/4 cos(4wt)`` with ``w = 1/2``.
    """
    return Fourier(HARVESTING_OMEGA, 0.0,
                   a=[-0.25, -1.25, 2.75, -1.25],
                   b=[2.5, -5.0, 0.0, 0.0])


@dataclass(frozen=True)
class ExtractionProblem:
    """One capacitance cycle of length ``period`` and a harmonic order.

    ``steps`` is the number of RK4 steps per period (even).
    """

    capacitance: CapacitanceProfile
    period: float
    order: int
    Q0: float = 0.0
    steps: int = 4096
    periodic_rtol: float = 1e-9

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("harmonic order must be >= 1")
        if not self.period > 0:
            raise ValueError("period must be positive")
        if self.steps < 2 or self.steps % 2:
            raise ValueError("steps per period must be even and >= 2")
        if self.Q0 != 0.0:
            raise ValueError("only Q(0) = 0 gives a quadratic energy form")
        mismatch = self.capacitance.period_mismatch(self.period)
        if mismatch > self.periodic_rtol:
            raise ValueError(f"capacitance is not {self.period}-periodic (mismatch {mismatch:.3g})")

    @property
    def omega(self) -> float:
        return 2.0 * math.pi / self.period

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.period, self.steps + 1)

    def current(self, c) -> Fourier:
        """Current with interleaved coefficients ``[a1, b1, a2, b2, ...]``."""
        c = np.asarray(c, dtype=float)
        if c.shape != (2 * self.order,):
            raise ValueError(f"expected {2 * self.order} coefficients, got {c.shape}")
        return Fourier.from_coefficient_vector(self.omega, c)

    def coefficients(self, current: Fourier) -> np.ndarray:
        """Interleaved coefficients of ``current`` at this problem's order."""
        if not math.isclose(current.omega, self.omega, rel_tol=1e-12):
            raise ValueError("current fundamental does not match the capacitance period")
        if current.order > self.order:
            raise ValueError("current has more harmonics than the problem order")
        c = np.zeros(2 * self.order)
        v = current.coefficient_vector()
        c[:len(v)] = v
        return c


@dataclass(frozen=True)
class QuadraticEnergyForm:
    M: np.ndarray
    omega: float
    order: int

    def energy(self, c) -> float:
        c = np.asarray(c, dtype=float)
        return float(0.5 * c @ self.M @ c)

    def gradient(self, c) -> np.ndarray:
        return self.M @ np.asarray(c, dtype=float)

    def eigh(self):
        return np.linalg.eigh(self.M)

    def to_csv(self, path: str | Path) -> None:
        labels = [f"{kind}{k}" for k in range(1, self.order + 1) for kind in ("a", "b")]
        np.savetxt(path, self.M, delimiter=",", header=",".join(labels), comments="", fmt="%.17g")


def _simpson_weights(n: int, h: float) -> np.ndarray:
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * h / 3.0


def basis_voltages(p: ExtractionProblem) -> np.ndarray:
    """Voltage responses (rows) to the unit basis currents, ``Q(0) = 0``."""
    t = p.grid
    k = np.repeat(np.arange(1, p.order + 1), 2)[:, None] * p.omega
    is_cos = np.tile([True, False], p.order)[:, None]

    def currents(s):
        x = k * np.asarray(s)[None, :]
        return np.where(is_cos, np.cos(x), np.sin(x))

    Q = rk4_input_driven(currents, np.zeros(2 * p.order), t)
    return Q / np.asarray(p.capacitance(t), dtype=float)


def build_energy_form(p: ExtractionProblem) -> QuadraticEnergyForm:
    """Assemble ``M`` from simulated basis responses and Simpson weights."""
    t = p.grid
    V = basis_voltages(p)
    w = _simpson_weights(p.steps, p.period / p.steps) * np.asarray(p.capacitance.dot(t)) * np.ones_like(t)
    M = (V * w) @ V.T
    return QuadraticEnergyForm(0.5 * (M + M.T), p.omega, p.order)


@dataclass(frozen=True)
class ExtractionResult:
    current: Fourier
    coefficients: np.ndarray
    energy_per_cycle: float          # at the requested coefficient norm [J]
    energy_per_unit_norm: float      # 1/2 lambda_min [J per unit norm^2]
    amplitude: float
    passive: bool

    @property
    def verdict(self) -> str:
        return "passive over family" if self.passive else "extracting"


def synthesize_extraction_current(p: ExtractionProblem, amplitude: float = 1.0,
                                  form: QuadraticEnergyForm | None = None) -> ExtractionResult:
    """Minimal-energy current of coefficient norm ``amplitude``.

    Returns the eigenvector of the most negative eigenvalue; if ``M`` has no
    negative eigenvalue the family cannot extract energy and a zero current
    is returned.
    """
    form = form or build_energy_form(p)
    lam, vec = form.eigh()
    scale = max(1.0, float(np.max(np.abs(lam))))
    if lam[0] >= -1e-12 * scale:
        c = np.zeros(2 * p.order)
        return ExtractionResult(p.current(c), c, 0.0, 0.0, amplitude, True)
    v = vec[:, 0]
    v = v * np.sign(v[np.argmax(np.abs(v))])
    c = amplitude * v
    return ExtractionResult(p.current(c), c, form.energy(c), 0.5 * float(lam[0]), amplitude, False)


# --- Lissajous (Q, V) loops ------------------------------------------------------

def signed_area(Q: np.ndarray, V: np.ndarray) -> float:
    """``closed integral of V dQ`` for the polygon through ``(Q, V)``.

    Computed with the shoelace formula; the polygon is closed back to the
    first point.  Counter-clockwise loops in the (Q, V) plane give negative
    values (energy released by the device).
    """
    Q = np.asarray(Q, dtype=float)
    V = np.asarray(V, dtype=float)
    Qn, Vn = np.roll(Q, -1), np.roll(V, -1)
    return float(0.5 * np.sum(Qn * V - Q * Vn))


@dataclass(frozen=True)
class LissajousLoop:
    Q: np.ndarray
    V: np.ndarray
    loop_areas: list[float]
    total_area: float

    def to_csv(self, path: str | Path) -> None:
        np.savetxt(path, np.column_stack((self.Q, self.V)), delimiter=",", header="Q,V",
                   comments="", fmt="%.17g")


def lissajous(traj: PortTrajectory, period: float | None = None) -> LissajousLoop:
    """``(Q, V)`` samples and the signed area of each period's loop.

    Without ``period`` the whole trajectory is treated as a single loop.
    """
    from .energy import cycle_indices

    spans = cycle_indices(traj, period) if period is not None else [(0, len(traj) - 1)]
    # drop the repeated endpoint: the shoelace sum closes the polygon itself
    areas = [signed_area(traj.Q[i0:i1], traj.V[i0:i1]) for i0, i1 in spans]
    return LissajousLoop(traj.Q.copy(), traj.V.copy(), areas, float(sum(areas)))
