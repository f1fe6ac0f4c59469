"""The classical one-port time-varying capacitor.

Charge is the integrated state, ``dQ/dt = I``, and the voltage is the output
map ``V = Q / C(t)``.  The stored energy ``Q**2 / (2 C(t))`` obeys

    d/dt [Q**2 / (2C)] = V I - 1/2 dC/dt V**2

so the device is passive only while ``dC/dt V**2 >= 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .ode import rk4_input_driven, uniform_grid
from .signals import CapacitanceProfile, ModelError, Sampled, UnsupportedOperation, Waveform

__all__ = [
    "OnePortModel",
    "PortTrajectory",
    "simulate_current_driven",
    "solve_voltage_ode",
    "current_from_voltage",
    "gauge_residual",
    "stored_energy",
]


def stored_energy(Q, C):
    """``Q**2 / (2C)``, the capacitor storage function."""
    return np.asarray(Q) ** 2 / (2.0 * np.asarray(C))


@dataclass(frozen=True)
class OnePortModel:
    capacitance: CapacitanceProfile
    V0: float = 0.0

    def __post_init__(self):
        if not self.capacitance(0.0) > 0:
            raise ModelError("capacitance must be positive at t=0", t=0.0)

    @classmethod
    def from_charge(cls, capacitance: CapacitanceProfile, Q0: float) -> "OnePortModel":
        return cls(capacitance, Q0 / capacitance(0.0))

    @property
    def Q0(self) -> float:
        return self.capacitance(0.0) * self.V0


@dataclass
class PortTrajectory:
    """Time-aligned port samples on a uniform grid.

    ``Cdot`` is the capacitance rate at each sample; for two-port runs it is
    the mechanical input ``U`` and ``F`` holds the back-EMF output.
    """

    t: np.ndarray
    Q: np.ndarray
    C: np.ndarray
    V: np.ndarray
    I: np.ndarray
    Cdot: np.ndarray
    F: np.ndarray | None = None
    U: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    @property
    def two_port(self) -> bool:
        return self.F is not None

    def __len__(self) -> int:
        return len(self.t)

    def stored_energy(self) -> np.ndarray:
        return stored_energy(self.Q, self.C)

    def columns(self) -> dict[str, np.ndarray]:
        cols = {"t": self.t, "Q": self.Q, "C": self.C, "V": self.V, "I": self.I}
        if self.two_port:
            cols["F"] = self.F
            cols["U"] = self.U
        return cols

    def to_csv(self, path: str | Path, names: dict[str, str] | None = None) -> None:
        """Write ``t,Q,C,V,I`` (plus ``F,U`` for two-port runs), one row per sample.

        ``names`` optionally renames columns in the header.
        """
        cols = self.columns()
        header = ",".join((names or {}).get(k, k) for k in cols)
        data = np.column_stack(list(cols.values()))
        np.savetxt(path, data, delimiter=",", header=header, comments="", fmt="%.17g")

    def slice(self, i0: int, i1: int) -> "PortTrajectory":
        """Samples ``i0..i1`` inclusive."""
        s = np.s_[i0:i1 + 1]
        opt = lambda a: None if a is None else a[s]  # noqa: E731
        return PortTrajectory(self.t[s], self.Q[s], self.C[s], self.V[s], self.I[s],
                              self.Cdot[s], opt(self.F), opt(self.U), dict(self.meta))


def simulate_current_driven(model: OnePortModel, I: Waveform, t_end: float,
                            dt: float = 1e-3) -> PortTrajectory:
    """Drive the one-port with current ``I`` over ``[0, t_end]``.

    RK4 on ``dQ/dt = I(t)``; the grid spacing is ``t_end / ceil(t_end / dt)``.
    Raises :class:`ModelError` if the capacitance profile is not positive on
    the window.
    """
    t = uniform_grid(t_end, dt)
    cap = model.capacitance
    cap.check_positive(0.0, t_end, t[1] - t[0])
    Q = rk4_input_driven(I, model.Q0, t)
    C = np.asarray(cap(t), dtype=float)
    return PortTrajectory(
        t=t, Q=Q, C=C, V=Q / C, I=np.asarray(I(t), dtype=float),
        Cdot=np.asarray(cap.dot(t), dtype=float),
    )


def solve_voltage_ode(model: OnePortModel, I: Waveform, t):
    """Complete solution of ``dV/dt + (dC/dt / C) V = I / C`` by integrating factor.

    With ``alpha = ln C`` the factor ``exp(alpha) = C`` turns the equation
    into ``d/dt [C V] = I``, hence

        V(t) = exp(-alpha(t)) * (integral_0^t exp(alpha) I/C dtau + gamma),
        gamma = C(0) V(0).

    The first term is the forced (particular) response, the second the
    homogeneous decay ``C(0) V(0) / C(t)``.  ``t`` may be a scalar or array.
    """
    cap = model.capacitance
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    t_max = float(ts.max())
    if t_max > 0:
        cap.check_positive(0.0, t_max, t_max / 1024)
    factor = np.asarray(cap(ts), dtype=float)          # exp(alpha(t))
    gamma = cap(0.0) * model.V0
    # exp(alpha) * f = C * I / C = I; integrated exactly when I is closed-form
    forced = np.array([I.integrate(0.0, float(tk)) for tk in ts])
    V = (forced + gamma) / factor
    return float(V[0]) if np.ndim(t) == 0 else V


def current_from_voltage(model: OnePortModel, V: Waveform, fd_step: float | None = None) -> Waveform:
    """``I = C dV/dt + dC/dt V`` for a prescribed voltage.

    This inverts the physical causality (it differentiates the voltage), which
    is why an applied voltage step demands an impulsive current.  Exact when
    ``C`` and ``V`` are closed-form.  Sampled voltages need an explicit
    ``fd_step`` and are differentiated by central differences.
    """
    cap = model.capacitance
    try:
        dV = V.derivative()
    except UnsupportedOperation:
        if fd_step is None:
            raise UnsupportedOperation(
                "voltage has no exact derivative; pass fd_step for finite differences") from None
        dV = _central_difference(V, fd_step)
    return cap.waveform * dV + cap.rate * V


def _central_difference(V: Waveform, h: float) -> Waveform:
    lo, hi = V.support()
    t = np.arange(lo, hi + 0.5 * h, h)
    return Sampled(lo, h, np.gradient(np.asarray(V(t)), h, edge_order=2))


def gauge_residual(model: OnePortModel, V: Waveform, psi: float) -> Waveform:
    """Change in the current when the voltage reference shifts by ``psi``.

    Equal to ``dC/dt * psi``: zero only for constant capacitance.
    """
    return current_from_voltage(model, V + psi) - current_from_voltage(model, V)
