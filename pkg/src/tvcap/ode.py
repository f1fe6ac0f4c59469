"""Fixed-step classical Runge-Kutta integration."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np


def uniform_grid(t_end: float, dt: float, t0: float = 0.0) -> np.ndarray:
    """Uniform grid on ``[t0, t_end]`` whose spacing is the largest value <= ``dt``
    that divides the window exactly."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    if t_end < t0:
        raise ValueError("t_end must not precede t0")
    n = max(1, math.ceil((t_end - t0) / dt - 1e-9))
    return np.linspace(t0, t_end, n + 1)


def rk4(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0,
    t: np.ndarray,
    check: Callable[[float, np.ndarray], None] | None = None,
) -> np.ndarray:
    """Integrate ``y' = rhs(t, y)`` over the grid ``t``.

    Returns an array of shape ``(len(t), *shape(y0))``.  ``check`` is called
    on every accepted state and may raise to abort the run.
    """
    y = np.asarray(y0, dtype=float)
    out = np.empty((len(t), *y.shape))
    out[0] = y
    if check is not None:
        check(float(t[0]), y)
    for n in range(len(t) - 1):
        tn = t[n]
        h = t[n + 1] - tn
        k1 = rhs(tn, y)
        k2 = rhs(tn + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(tn + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(tn + h, y + h * k3)
        y = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[n + 1] = y
        if check is not None:
            check(float(t[n + 1]), y)
    return out


def rk4_input_driven(u: Callable, y0, t: np.ndarray) -> np.ndarray:
    """RK4 for ``y' = u(t)`` (state-independent right-hand side), vectorized.

    Evaluates ``u`` once on all step starts, midpoints and ends; the update is
    algebraically identical to :func:`rk4` for this class of systems.
    """
    t = np.asarray(t, dtype=float)
    h = np.diff(t)
    mid = t[:-1] + 0.5 * h
    u_grid = np.asarray(u(t), dtype=float)
    u_mid = np.asarray(u(mid), dtype=float)
    inc = h / 6.0 * (u_grid[..., :-1] + 4.0 * u_mid + u_grid[..., 1:])
    y0 = np.asarray(y0, dtype=float)
    return np.concatenate((y0[..., None], y0[..., None] + np.cumsum(inc, axis=-1)), axis=-1)
