"""A charged capacitor whose capacitance ramps from C0 to k*C0 at fixed charge.

The stored energy drops from ``Q**2/(2 C0)`` to ``Q**2/(2 k C0)``; the
difference leaves through the mechanical port as ``integral F U dt``, for
every ramp duration ``T`` and therefore also in the impulsive limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .oneport import stored_energy
from .signals import Constant, simpson_uniform
from .twoport import TwoPortModel, simulate_two_port

__all__ = ["ParadoxScenario", "ParadoxResult", "ramp_segments", "run_paradox", "closed_form_limit", "sweep"]


@dataclass(frozen=True)
class ParadoxScenario:
    Q: float
    C0: float
    T: float
    k: float = 2.0

    def __post_init__(self):
        if not self.C0 > 0:
            raise ValueError("C0 must be positive")
        if not self.k > 0:
            raise ValueError("capacitance factor k must be positive")
        if self.T < 0:
            raise ValueError("ramp duration T must be nonnegative")


@dataclass(frozen=True)
class ParadoxResult:
    T: float
    S_before: float
    S_after: float
    W_mech: float
    residual: float


def ramp_segments(s: ParadoxScenario) -> np.ndarray:
    """Breakpoints in ``[0, T]`` at which ``C`` has grown by equal ratios <= 2.

    ``F U`` scales like ``1/C**2``, so a single uniform grid cannot resolve
    large ``k``; each segment gets its own grid.
    """
    m = max(1, math.ceil(abs(math.log(s.k)) / math.log(2.0) - 1e-12))
    if s.k == 1.0:
        return np.array([0.0, s.T])
    return s.T * (s.k ** (np.arange(m + 1) / m) - 1.0) / (s.k - 1.0)


def run_paradox(s: ParadoxScenario, steps: int = 1000) -> ParadoxResult:
    """Simulate the ramp ``U = (k-1) C0 / T`` on ``[0, T]`` with ``I = 0``.

    ``steps`` RK4 steps are used per segment of :func:`ramp_segments`.
    """
    if not s.T > 0:
        raise ValueError("T must be positive; use closed_form_limit for the impulsive case")
    U = Constant((s.k - 1.0) * s.C0 / s.T)
    Q, C, W = s.Q, s.C0, 0.0
    edges = ramp_segments(s)
    for t0, t1 in zip(edges[:-1], edges[1:]):
        traj = simulate_two_port(TwoPortModel(Q, C), Constant(0.0), U, t1 - t0, (t1 - t0) / steps)
        W += float(simpson_uniform(traj.F * traj.U, traj.dt))
        Q, C = float(traj.Q[-1]), float(traj.C[-1])
    S0, S1 = stored_energy(s.Q, s.C0), stored_energy(Q, C)
    return ParadoxResult(s.T, float(S0), float(S1), W, abs(W - (S1 - S0)))


def closed_form_limit(s: ParadoxScenario) -> float:
    """Mechanical work ``-Q**2 (1 - 1/k) / (2 C0)``, independent of ``T``."""
    return -s.Q ** 2 * (1.0 - 1.0 / s.k) / (2.0 * s.C0)


def sweep(Q: float, C0: float, k: float, durations: Iterable[float], steps: int = 1000) -> list[ParadoxResult]:
    return [run_paradox(ParadoxScenario(Q, C0, T, k), steps) for T in durations]
