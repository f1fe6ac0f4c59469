"""Lossless two-port capacitor, its state-modulated mechanical version, and the
time-varying inductor obtained by renaming symbols.

The two-port has states ``(Q, C)`` with ``dQ/dt = I`` and ``dC/dt = U``, and
outputs ``V = Q/C`` and ``F = -Q**2 / (2 C**2)``, so that

    d/dt [Q**2 / (2C)] = V I + F U.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .energy import EnergyReport, energy_balance
from .ode import rk4, rk4_input_driven, uniform_grid
from .oneport import (
    OnePortModel,
    PortTrajectory,
    current_from_voltage,
    simulate_current_driven,
)
from .signals import CapacitanceProfile, ModelError, Waveform

__all__ = [
    "TwoPortModel",
    "MechanicalCapModel",
    "MechanicalTrajectory",
    "InductorTrajectory",
    "simulate_two_port",
    "energy_balance",
    "EnergyReport",
    "back_emf",
    "simulate_state_modulated",
    "simulate_voltage_driven",
    "simulate_inductor_two_port",
    "voltage_from_current",
    "INDUCTOR_NAMES",
]


def back_emf(Q, C):
    """Mechanical-port output ``F = -Q**2 / (2 C**2)``; never positive."""
    return -np.asarray(Q) ** 2 / (2.0 * np.asarray(C) ** 2)


@dataclass(frozen=True)
class TwoPortModel:
    Q0: float
    C0: float

    def __post_init__(self):
        if not self.C0 > 0:
            raise ModelError("C0 must be positive", t=0.0)


def simulate_two_port(model: TwoPortModel, I: Waveform, U: Waveform, t_end: float,
                      dt: float = 1e-3) -> PortTrajectory:
    """RK4 on ``(Q, C)`` driven by current ``I`` and capacitance rate ``U``.

    Raises :class:`ModelError` at the first grid time where ``C <= 0``.
    """
    t = uniform_grid(t_end, dt)
    both = lambda s: np.stack((np.asarray(I(s), dtype=float) * np.ones_like(s),  # noqa: E731
                               np.asarray(U(s), dtype=float) * np.ones_like(s)))
    Q, C = rk4_input_driven(both, [model.Q0, model.C0], t)
    bad = np.flatnonzero(C <= 0.0)
    if bad.size:
        tb = float(t[bad[0]])
        raise ModelError(f"capacitance driven to {C[bad[0]]:.6g} <= 0 at t={tb:.6g}", t=tb)
    Iv = np.asarray(I(t), dtype=float) * np.ones_like(t)
    Uv = np.asarray(U(t), dtype=float) * np.ones_like(t)
    return PortTrajectory(t=t, Q=Q, C=C, V=Q / C, I=Iv, Cdot=Uv, F=back_emf(Q, C), U=Uv)


# --- state-modulated capacitor --------------------------------------------

@dataclass(frozen=True)
class MechanicalCapModel:
    """Rotating-plate capacitor: ``C`` is a function of the angle ``Theta``.

    ``capacitance`` is a waveform in the angle variable [rad -> F] and must be
    differentiable; ``J`` is the moment of inertia [kg m^2].
    """

    J: float
    capacitance: Waveform
    Q0: float = 0.0
    theta0: float = 0.0
    P0: float = 0.0

    def __post_init__(self):
        if not self.J > 0:
            raise ValueError("moment of inertia J must be positive")
        if not self.capacitance(self.theta0) > 0:
            raise ModelError("C(theta0) must be positive", t=0.0)


@dataclass
class MechanicalTrajectory:
    t: np.ndarray
    Q: np.ndarray
    theta: np.ndarray
    P: np.ndarray
    C: np.ndarray
    dC_dtheta: np.ndarray
    V: np.ndarray
    I: np.ndarray
    tau: np.ndarray
    J: float

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    @property
    def omega(self) -> np.ndarray:
        return self.P / self.J

    @property
    def electrostatic_torque(self) -> np.ndarray:
        """``-d/dTheta [Q**2 / (2 C(Theta))]``."""
        return 0.5 * self.Q ** 2 * self.dC_dtheta / self.C ** 2

    def hamiltonian(self) -> np.ndarray:
        return self.Q ** 2 / (2.0 * self.C) + self.P ** 2 / (2.0 * self.J)

    def as_two_port(self) -> PortTrajectory:
        """The matched two-port view with ``U = C'(Theta) dTheta/dt``."""
        U = self.dC_dtheta * self.omega
        return PortTrajectory(t=self.t, Q=self.Q, C=self.C, V=self.V, I=self.I,
                              Cdot=U, F=back_emf(self.Q, self.C), U=U)

    def to_csv(self, path: str | Path) -> None:
        cols = {"t": self.t, "Q": self.Q, "C": self.C, "V": self.V, "I": self.I,
                "Theta": self.theta, "P": self.P, "tau": self.tau}
        np.savetxt(path, np.column_stack(list(cols.values())), delimiter=",",
                   header=",".join(cols), comments="", fmt="%.17g")


def simulate_state_modulated(model: MechanicalCapModel, I: Waveform, tau: Waveform,
                             t_end: float, dt: float = 1e-3) -> MechanicalTrajectory:
    """Integrate ``dQ/dt = I``, ``dTheta/dt = P/J``,
    ``dP/dt = tau + Q**2 C'(Theta) / (2 C(Theta)**2)``.

    The total energy ``H = Q**2/(2C(Theta)) + P**2/(2J)`` then satisfies
    ``dH/dt = V I + (dTheta/dt) tau``.
    """
    C = model.capacitance
    dC = C.derivative()
    J = model.J

    def rhs(t, y):
        q, th, p = y
        c = C(th)
        return np.array([I(t), p / J, tau(t) + 0.5 * q * q * dC(th) / (c * c)])

    def check(t, y):
        if not C(y[1]) > 0:
            raise ModelError(f"C(Theta) <= 0 reached at t={t:.6g}", t=t)

    t = uniform_grid(t_end, dt)
    y = rk4(rhs, [model.Q0, model.theta0, model.P0], t, check=check)
    Q, th, P = y.T
    Cv = np.asarray(C(th), dtype=float)
    return MechanicalTrajectory(
        t=t, Q=Q, theta=th, P=P, C=Cv, dC_dtheta=np.asarray(dC(th), dtype=float) * np.ones_like(t),
        V=Q / Cv, I=np.asarray(I(t), dtype=float) * np.ones_like(t),
        tau=np.asarray(tau(t), dtype=float) * np.ones_like(t), J=J,
    )


# --- inductor dual -----------------------------------------------------------
# Q -> Phi (flux linkage), C -> L, V -> I, I -> V.  The capacitor code is reused
# unchanged; these helpers only rename inputs and columns.

INDUCTOR_NAMES = {"Q": "Phi", "C": "L", "V": "I", "I": "V"}


@dataclass
class InductorTrajectory:
    """Inductor view of a capacitor trajectory (same arrays, swapped names)."""

    base: PortTrajectory

    t = property(lambda self: self.base.t)
    Phi = property(lambda self: self.base.Q)
    L = property(lambda self: self.base.C)
    I = property(lambda self: self.base.V)
    V = property(lambda self: self.base.I)
    F = property(lambda self: self.base.F)
    U = property(lambda self: self.base.U)

    def energy_balance(self, period: float | None = None) -> EnergyReport:
        return energy_balance(self.base, period)

    def to_csv(self, path: str | Path) -> None:
        self.base.to_csv(path, names=INDUCTOR_NAMES)


def simulate_voltage_driven(inductance: CapacitanceProfile, V: Waveform, t_end: float,
                            dt: float = 1e-3, I0: float = 0.0) -> InductorTrajectory:
    """One-port inductor ``dPhi/dt = V``, ``I = Phi / L(t)``."""
    model = OnePortModel(inductance, I0)
    return InductorTrajectory(simulate_current_driven(model, V, t_end, dt))


def voltage_from_current(inductance: CapacitanceProfile, I: Waveform) -> Waveform:
    """``V = L dI/dt + dL/dt I``."""
    return current_from_voltage(OnePortModel(inductance, 0.0), I)


def simulate_inductor_two_port(Phi0: float, L0: float, V: Waveform, U: Waveform,
                               t_end: float, dt: float = 1e-3) -> InductorTrajectory:
    """Two-port inductor with ``dL/dt = U`` and back-EMF ``F = -Phi**2/(2 L**2)``."""
    return InductorTrajectory(simulate_two_port(TwoPortModel(Phi0, L0), V, U, t_end, dt))
