"""Energy accounting: supply rates, storage functions and dissipativity checks.

All time integrals run over the trajectory's own uniform grid with the
composite Simpson rule, so they share the fourth-order accuracy of the RK4
state update.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.integrate import cumulative_simpson

from .oneport import PortTrajectory, stored_energy
from .signals import simpson_uniform

__all__ = [
    "SupplyRate",
    "StorageCandidate",
    "EnergyReport",
    "CycleEnergy",
    "DissipationCheck",
    "CycleError",
    "AvailableStorageEstimate",
    "PASSIVITY_SUPPLY",
    "ELECTRICAL_SUPPLY",
    "CAPACITOR_STORAGE",
    "energy_balance",
    "check_dissipation_inequality",
    "cycle_energy",
    "cycle_indices",
    "estimate_available_storage",
]

# relative tolerance on C and V when matching cycle endpoints
CYCLE_RTOL = 1e-9


class CycleError(ValueError):
    """Interval endpoints do not close a cycle in (C, V)."""


@dataclass(frozen=True)
class SupplyRate:
    name: str
    rate: Callable[[PortTrajectory], np.ndarray]

    def __call__(self, traj: PortTrajectory) -> np.ndarray:
        return np.asarray(self.rate(traj), dtype=float)


def _passivity(traj: PortTrajectory) -> np.ndarray:
    s = traj.V * traj.I
    if traj.two_port:
        s = s + traj.F * traj.U
    return s


#: ``y^T u`` over every port the trajectory carries.
PASSIVITY_SUPPLY = SupplyRate("passivity", _passivity)
#: Electrical port only, ``V I``.
ELECTRICAL_SUPPLY = SupplyRate("electrical", lambda tr: tr.V * tr.I)


@dataclass(frozen=True)
class StorageCandidate:
    name: str
    function: Callable[[np.ndarray, np.ndarray], np.ndarray]
    nonnegative: bool = True

    def __call__(self, traj: PortTrajectory) -> np.ndarray:
        S = np.asarray(self.function(traj.Q, traj.C), dtype=float)
        if self.nonnegative and np.any(S < 0):
            raise ValueError(f"storage {self.name!r} flagged nonnegative but takes negative values")
        return S


CAPACITOR_STORAGE = StorageCandidate("Q^2/(2C)", stored_energy)


class CycleEnergy(NamedTuple):
    index: int
    t_start: float
    t_end: float
    E_elec: float
    E_mech: float


@dataclass
class EnergyReport:
    """Energy bookkeeping of one trajectory [J].

    For one-port runs ``E_mech`` is the unaccounted term
    ``-integral(1/2 dC/dt V**2)``, i.e. what a mechanical port would have
    had to supply.
    """

    E_elec: float
    E_mech: float
    dS: float
    residual: float
    per_cycle: list[CycleEnergy] = field(default_factory=list)
    two_port: bool = False
    t_end: float = 0.0

    @property
    def supplied(self) -> float:
        return self.E_elec + self.E_mech

    def summary(self) -> str:
        mech = "E_mech" if self.two_port else "E_mech (one-port deficit)"
        lines = [
            f"{'E_elec':<26s}{self.E_elec: .12g} J",
            f"{mech:<26s}{self.E_mech: .12g} J",
            f"{'dS':<26s}{self.dS: .12g} J",
            f"{'residual':<26s}{self.residual: .3e} J",
        ]
        if self.t_end > 0:
            lines.append(f"{'mean electrical power':<26s}{self.E_elec / self.t_end: .12g} W")
        for c in self.per_cycle:
            lines.append(f"cycle {c.index:<4d} [{c.t_start:.6g}, {c.t_end:.6g}]  "
                         f"E_elec={c.E_elec: .12g} J  E_mech={c.E_mech: .12g} J")
        return "\n".join(lines)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["quantity", "cycle", "t_start", "t_end", "value"])
            for name in ("E_elec", "E_mech", "dS", "residual"):
                w.writerow([name, "", "", "", repr(getattr(self, name))])
            for c in self.per_cycle:
                w.writerow(["E_elec", c.index, repr(c.t_start), repr(c.t_end), repr(c.E_elec)])
                w.writerow(["E_mech", c.index, repr(c.t_start), repr(c.t_end), repr(c.E_mech)])


def _mech_power(traj: PortTrajectory) -> np.ndarray:
    if traj.two_port:
        return traj.F * traj.U
    return -0.5 * traj.Cdot * traj.V ** 2


def cycle_indices(traj: PortTrajectory, period: float) -> list[tuple[int, int]]:
    """Sample index pairs delimiting consecutive full periods."""
    steps = period / traj.dt
    n = round(steps)
    if n < 1 or abs(steps - n) > 1e-6 * max(1.0, steps):
        raise ValueError(f"period {period} is not a whole number of grid steps ({steps:.6g})")
    return [(i, i + n) for i in range(0, len(traj) - n, n)]


def energy_balance(traj: PortTrajectory, period: float | None = None) -> EnergyReport:
    """Supplied energy through each port versus the change in ``Q**2/(2C)``."""
    h = traj.dt
    p_elec = traj.V * traj.I
    p_mech = _mech_power(traj)
    E_elec = float(simpson_uniform(p_elec, h))
    E_mech = float(simpson_uniform(p_mech, h))
    S = traj.stored_energy()
    dS = float(S[-1] - S[0])
    cycles = []
    if period is not None:
        for k, (i0, i1) in enumerate(cycle_indices(traj, period)):
            cycles.append(CycleEnergy(
                k, float(traj.t[i0]), float(traj.t[i1]),
                float(simpson_uniform(p_elec[i0:i1 + 1], h)),
                float(simpson_uniform(p_mech[i0:i1 + 1], h)),
            ))
    return EnergyReport(E_elec, E_mech, dS, E_elec + E_mech - dS, cycles,
                        two_port=traj.two_port, t_end=float(traj.t[-1] - traj.t[0]))


@dataclass(frozen=True)
class DissipationCheck:
    holds: bool
    worst_violation: float
    location: float
    tolerance: float


def check_dissipation_inequality(
    traj: PortTrajectory,
    storage: StorageCandidate = CAPACITOR_STORAGE,
    supply: SupplyRate = PASSIVITY_SUPPLY,
    tol: float | None = None,
) -> DissipationCheck:
    """Test ``S(x(t)) - S(x(0)) <= integral_0^t s dt`` at every sample ``t``.

    ``worst_violation`` is the largest positive excess of stored-energy gain
    over supplied energy (0 when the inequality holds everywhere) and
    ``location`` the time at which it occurs.  The default tolerance scales
    with the energy levels on the trajectory.
    """
    S = storage(traj)
    supplied = cumulative_simpson(supply(traj), dx=traj.dt, initial=0.0)
    slack = supplied - (S - S[0])
    if tol is None:
        tol = 1e-7 * max(1.0, float(np.max(np.abs(S))), float(np.max(np.abs(supplied))))
    i = int(np.argmin(slack))
    worst = max(0.0, -float(slack[i]))
    return DissipationCheck(worst <= tol, worst, float(traj.t[i]) if worst > 0 else math.nan, tol)


def _grid_index(traj: PortTrajectory, t: float) -> int:
    x = (t - traj.t[0]) / traj.dt
    i = round(x)
    if abs(x - i) > 1e-6 or not 0 <= i < len(traj):
        raise ValueError(f"t={t} is not a grid point of the trajectory")
    return i


def _close(a: float, b: float, scale: float) -> bool:
    return abs(a - b) <= CYCLE_RTOL * max(abs(a), abs(b), scale)


def cycle_energy(traj: PortTrajectory, t1: float, t2: float, identity_rtol: float = 1e-6) -> float:
    """Electrical energy supplied over the cycle ``[t1, t2]``.

    Requires ``C(t1) = C(t2)`` and ``V(t1) = V(t2)`` (relative tolerance
    1e-9, scaled by the largest magnitude on the interval).  Over such an
    interval ``integral(V I) = integral(1/2 dC/dt V**2)``; both sides are
    computed and a :class:`ValueError` is raised if they disagree by more
    than ``identity_rtol * (1 + |E|)``.
    """
    i1, i2 = _grid_index(traj, t1), _grid_index(traj, t2)
    seg = slice(i1, i2 + 1)
    C, V = traj.C[seg], traj.V[seg]
    if not _close(C[0], C[-1], float(np.max(np.abs(C)))):
        raise CycleError(f"C(t1)={C[0]!r} != C(t2)={C[-1]!r}: interval is not a cycle")
    if not _close(V[0], V[-1], float(np.max(np.abs(V)))):
        raise CycleError(f"V(t1)={V[0]!r} != V(t2)={V[-1]!r}: interval is not a cycle")
    h = traj.dt
    E = float(simpson_uniform(V * traj.I[seg], h))
    E_parts = float(simpson_uniform(0.5 * traj.Cdot[seg] * V ** 2, h))
    if abs(E - E_parts) > identity_rtol * (1.0 + abs(E)):
        raise ValueError(f"cycle identity violated: {E!r} vs {E_parts!r}")
    return E


@dataclass
class AvailableStorageEstimate:
    """Lower bounds on extractable energy per horizon (in cycles).

    Bounds come from simulated candidate excitations in a truncated Fourier
    family, so they never certify the true supremum.
    """

    cycles: list[int]
    lower_bounds: list[float]
    verdict: str                       # "growing" or "finite"
    supremum_estimate: float
    per_cycle_increment: float
    stored_energy_bound: float | None = None


def estimate_available_storage(model, problem, cycles: Sequence[int] = (1, 2, 4, 8),
                               amplitude: float = 1.0) -> AvailableStorageEstimate:
    """Best-effort lower bounds on the available storage from ``model``'s initial state.

    ``model`` is a :class:`~tvcap.oneport.OnePortModel` or a
    :class:`~tvcap.twoport.TwoPortModel`; ``problem`` is an
    :class:`~tvcap.extract.ExtractionProblem` fixing the capacitance cycle,
    harmonic order and grid, and ``amplitude`` bounds the coefficient norm of
    the candidate currents.  For two-port models the capacitance cycle is
    imposed through ``U = dC/dt``.  Idling (zero inputs) supplies no energy,
    so bounds are made nondecreasing across horizons.
    """
    from . import extract, twoport
    from .oneport import OnePortModel, simulate_current_driven
    from .signals import Constant

    horizons = sorted(int(n) for n in cycles)
    if not horizons or horizons[0] < 1:
        raise ValueError("horizons must be positive cycle counts")
    T = problem.period
    dt = T / problem.steps
    best = extract.synthesize_extraction_current(problem, amplitude=amplitude)
    currents = [best.current, -1.0 * best.current]

    bounds = []
    if isinstance(model, OnePortModel):
        om = OnePortModel(problem.capacitance, model.V0)
        S0 = None
        for n in horizons:
            extracted = 0.0
            for cur in currents:
                tr = simulate_current_driven(om, cur, n * T, dt)
                extracted = max(extracted, -float(simpson_uniform(tr.V * tr.I, tr.dt)))
            bounds.append(extracted)
    elif isinstance(model, twoport.TwoPortModel):
        S0 = model.Q0 ** 2 / (2.0 * model.C0)
        U = problem.capacitance.rate
        for n in horizons:
            extracted = 0.0
            # bleed the initial charge off over the horizon
            for cur in currents + [Constant(0.0)]:
                for bleed in (0.0, 0.5, 1.0):
                    I = cur + Constant(-bleed * model.Q0 / (n * T))
                    tr = twoport.simulate_two_port(model, I, U, n * T, dt)
                    supplied = float(simpson_uniform(PASSIVITY_SUPPLY(tr), tr.dt))
                    extracted = max(extracted, -supplied)
            bounds.append(extracted)
    else:
        raise TypeError(f"unsupported model type {type(model).__name__}")

    bounds = list(np.maximum.accumulate(bounds))
    scale = max(1.0, abs(bounds[-1]))
    per_cycle = bounds[0] / horizons[0]
    growing = (
        len(horizons) > 1
        and per_cycle > 1e-9 * scale
        and all(b >= 0.9 * per_cycle * n for n, b in zip(horizons, bounds))
    )
    return AvailableStorageEstimate(
        cycles=horizons,
        lower_bounds=[float(b) for b in bounds],
        verdict="growing" if growing else "finite",
        supremum_estimate=math.inf if growing else float(max(bounds)),
        per_cycle_increment=float(per_cycle),
        stored_energy_bound=S0,
    )
