import math

import numpy as np
import pytest

from conftest import periodic_dt
from tvcap.oneport import (
    OnePortModel,
    current_from_voltage,
    gauge_residual,
    simulate_current_driven,
    solve_voltage_ode,
)
from tvcap.signals import (
    CapacitanceProfile,
    Constant,
    Fourier,
    ModelError,
    Polynomial,
    Sampled,
    UnsupportedOperation,
)


def ramp_case(C0=1.0, phi=1.0, a=1.0, V0=2.0):
    """C = C0 + phi t driven by I = (C0 + 2 phi t) a; V = a t + C0 V0 / C."""
    model = OnePortModel(CapacitanceProfile.ramp(C0, phi), V0)
    I = Polynomial([C0 * a, 2 * phi * a])
    exact = lambda t: a * t + C0 * V0 / (C0 + phi * t)  # noqa: E731
    return model, I, exact


class TestSimulateCurrentDriven:
    def test_unit_integrator(self):
        tr = simulate_current_driven(OnePortModel(CapacitanceProfile.constant(1.0)), Constant(1.0), 1.0)
        assert tr.Q[-1] == pytest.approx(1.0, abs=1e-12)
        assert tr.V[-1] == pytest.approx(1.0, abs=1e-12)

    def test_complete_solution_instance(self):
        model, I, exact = ramp_case()
        tr = simulate_current_driven(model, I, 1.0, 1e-3)
        assert tr.V[-1] == pytest.approx(2.0, abs=1e-8)
        assert np.max(np.abs(tr.V - exact(tr.t))) < 1e-8

    def test_pure_cosine_returns_to_rest(self, cap):
        tr = simulate_current_driven(OnePortModel(cap, 0.0), Fourier(0.5, 0.0, a=[0.0, 1.0]),
                                     4 * math.pi, periodic_dt())
        assert abs(tr.Q[-1]) < 1e-12
        assert abs(tr.V[-1]) < 1e-12

    def test_output_map(self, harvest_model, profile, period):
        tr = simulate_current_driven(harvest_model, profile, period, periodic_dt())
        np.testing.assert_array_equal(tr.V, tr.Q / tr.C)
        assert np.allclose(np.diff(tr.t), tr.dt)

    def test_rejects_nonpositive_capacitance(self):
        model = OnePortModel(CapacitanceProfile.ramp(1.0, -0.5))
        with pytest.raises(ModelError) as err:
            simulate_current_driven(model, Constant(0.0), 3.0, 1e-2)
        assert err.value.t == pytest.approx(2.0, abs=1e-2)

    def test_rk4_is_fourth_order(self):
        model, I, exact = ramp_case()
        I = Fourier(3.0, 0.0, a=[1.0], b=[0.5])
        ref = lambda t: (2.0 + I.integrate(0.0, t)) / (1.0 + t)  # noqa: E731
        errs = [abs(simulate_current_driven(model, I, 1.0, h).V[-1] - ref(1.0)) for h in (0.1, 0.05)]
        assert errs[0] / errs[1] > 14.0


class TestSolveVoltageODE:
    def test_homogeneous_decay(self):
        C0, phi, v0 = 1.5, 0.7, 3.0
        model = OnePortModel(CapacitanceProfile.ramp(C0, phi), v0)
        t = np.linspace(0, 2, 41)
        V = solve_voltage_ode(model, Constant(0.0), t)
        np.testing.assert_allclose(V, C0 * v0 / (C0 + phi * t), rtol=1e-14)
        # residual of dV/dt + (phi/C) V = 0 with the exact derivative of C0 v0 / C
        dV = -C0 * v0 * phi / (C0 + phi * t) ** 2
        assert np.max(np.abs(dV + phi / (C0 + phi * t) * V)) < 1e-10

    def test_complete_solution(self):
        model, I, exact = ramp_case(C0=2.0, phi=0.5, a=3.0, V0=1.5)
        t = np.linspace(0, 3, 31)
        np.testing.assert_allclose(solve_voltage_ode(model, I, t), exact(t), rtol=1e-13)

    def test_constant_capacitor_ramp(self):
        model = OnePortModel(CapacitanceProfile.constant(2.0), 1.0)
        assert solve_voltage_ode(model, Constant(0.5), 4.0) == pytest.approx(1.0 + 0.5 * 4.0 / 2.0)

    def test_agrees_with_simulation(self, harvest_model, profile, period):
        tr = simulate_current_driven(harvest_model, profile, period, periodic_dt())
        V = solve_voltage_ode(harvest_model, profile, tr.t[::64])
        assert np.max(np.abs(V - tr.V[::64])) < 1e-8


class TestCurrentFromVoltage:
    def test_linear_voltage_on_ramp(self):
        C0, phi, a = 1.0, 0.5, 2.0
        model = OnePortModel(CapacitanceProfile.ramp(C0, phi))
        I = current_from_voltage(model, Polynomial([0.0, a]))
        assert I == Polynomial([C0 * a, 2 * phi * a])
        assert I(0.0) == C0 * a

    def test_constant_voltage_on_ramp(self):
        model = OnePortModel(CapacitanceProfile.ramp(1.0, 0.25))
        assert current_from_voltage(model, Constant(4.0))(0.0) == pytest.approx(0.25 * 4.0)

    def test_constant_capacitor_constant_voltage(self):
        model = OnePortModel(CapacitanceProfile.constant(3.0))
        assert current_from_voltage(model, Constant(2.0)) == Constant(0.0)

    def test_sampled_needs_finite_difference_step(self):
        model = OnePortModel(CapacitanceProfile.constant(1.0))
        V = Sampled(0.0, 0.01, np.linspace(0, 1, 101) ** 2)
        with pytest.raises(UnsupportedOperation):
            current_from_voltage(model, V)
        I = current_from_voltage(model, V, fd_step=0.01)
        assert I(0.5) == pytest.approx(1.0, abs=1e-6)

    def test_round_trip(self, cap):
        V = Fourier(0.5, 0.3, a=[0.2, -0.1], b=[0.5])
        model = OnePortModel(cap, V(0.0))
        I = current_from_voltage(model, V)
        tr = simulate_current_driven(model, I, 4 * math.pi, periodic_dt())
        assert np.max(np.abs(tr.V - V(tr.t))) < 1e-8


class TestGauge:
    def test_constant_capacitor_is_gauge_invariant(self):
        model = OnePortModel(CapacitanceProfile.constant(2.0))
        r = gauge_residual(model, Fourier(1.0, 0.0, b=[1.0]), 3.7)
        assert np.max(np.abs(r(np.linspace(0, 10, 101)))) == 0.0

    def test_ramp_residual_is_rate_times_shift(self):
        model = OnePortModel(CapacitanceProfile.ramp(1.0, 0.5))
        assert gauge_residual(model, Polynomial([0.0, 2.0]), 1.0) == Constant(0.5)

    def test_zero_shift(self, cap):
        r = gauge_residual(OnePortModel(cap), Fourier(0.5, 1.0, a=[1.0]), 0.0)
        assert np.max(np.abs(r(np.linspace(0, 10, 11)))) == 0.0

    def test_matches_rate_pointwise(self, cap):
        V = Fourier(0.5, 1.0, a=[1.0, 0.3], b=[-0.2])
        psi = 2.5
        t = np.linspace(0, 12, 97)
        r = gauge_residual(OnePortModel(cap), V, psi)
        np.testing.assert_allclose(r(t), cap.dot(t) * psi, atol=1e-12)


def test_power_balance_along_trajectory(harvest_model, profile, period):
    from tvcap.signals import cumulative_simpson_even

    tr = simulate_current_driven(harvest_model, profile, period, periodic_dt())
    S = tr.stored_energy()
    rhs = tr.V * tr.I - 0.5 * tr.Cdot * tr.V ** 2
    assert np.max(np.abs(cumulative_simpson_even(rhs, tr.dt) - (S[::2] - S[0]))) < 1e-9


def test_csv_export(tmp_path, harvest_model, profile, period):
    tr = simulate_current_driven(harvest_model, profile, period, periodic_dt(64))
    path = tmp_path / "traj.csv"
    tr.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,Q,C,V,I"
    assert len(lines) == len(tr) + 1
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    np.testing.assert_array_equal(data[:, 3], tr.V)
