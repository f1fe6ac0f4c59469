import csv
import math

import numpy as np
import pytest

from conftest import HARVEST_ENERGY, periodic_dt
from tvcap.energy import (
    CAPACITOR_STORAGE,
    ELECTRICAL_SUPPLY,
    PASSIVITY_SUPPLY,
    CycleError,
    StorageCandidate,
    check_dissipation_inequality,
    cycle_energy,
    energy_balance,
    estimate_available_storage,
)
from tvcap.extract import ExtractionProblem
from tvcap.oneport import OnePortModel, simulate_current_driven
from tvcap.signals import CapacitanceProfile, Constant, Fourier
from tvcap.twoport import TwoPortModel, simulate_two_port


class TestDissipationInequality:
    def test_two_port_harvesting_run(self, cap, profile, period):
        tr = simulate_two_port(TwoPortModel(0.0, 2.0), profile, cap.rate, 3 * period, periodic_dt())
        chk = check_dissipation_inequality(tr)
        assert chk.holds
        assert chk.worst_violation < 1e-9

    def test_two_port_random_drive(self, rng):
        I = Fourier(1.0, 0.0, a=rng.normal(size=3), b=rng.normal(size=3))
        U = Fourier(1.0, 0.0, a=[0.2], b=[0.3])
        tr = simulate_two_port(TwoPortModel(0.7, 1.5), I, U, 10.0, 1e-3)
        assert check_dissipation_inequality(tr).holds

    def test_increasing_capacitance_oneport(self):
        # dC/dt > 0 means the one-port dumps energy into the unmodelled port
        tr = simulate_current_driven(OnePortModel(CapacitanceProfile.ramp(1.0, 0.5), 1.0),
                                     Fourier(2.0, 0.3, b=[1.0]), 5.0, 1e-3)
        assert check_dissipation_inequality(tr).holds

    def test_harvesting_oneport_violates(self, harvest_model, profile, period):
        tr = simulate_current_driven(harvest_model, profile, period, periodic_dt())
        chk = check_dissipation_inequality(tr)
        assert not chk.holds
        assert chk.worst_violation > 1.0
        assert 0.0 < chk.location <= period

    def test_electrical_supply_on_two_port_is_not_passive(self, cap, profile, period):
        tr = simulate_two_port(TwoPortModel(0.0, 2.0), profile, cap.rate, period, periodic_dt())
        assert not check_dissipation_inequality(tr, supply=ELECTRICAL_SUPPLY).holds

    def test_negative_storage_rejected(self):
        tr = simulate_current_driven(OnePortModel(CapacitanceProfile.constant(1.0), 1.0), Constant(0.0), 1.0)
        bad = StorageCandidate("negative", lambda Q, C: -np.ones_like(Q))
        with pytest.raises(ValueError):
            check_dissipation_inequality(tr, storage=bad)

    def test_supply_rates(self, cap, profile, period):
        tr = simulate_two_port(TwoPortModel(0.0, 2.0), profile, cap.rate, period, periodic_dt(64))
        np.testing.assert_array_equal(PASSIVITY_SUPPLY(tr), tr.V * tr.I + tr.F * tr.U)
        np.testing.assert_array_equal(CAPACITOR_STORAGE(tr), tr.Q ** 2 / (2 * tr.C))


class TestCycleEnergy:
    def test_control_cosine_current(self, harvest_model, period):
        I = Fourier(0.5, 0.0, a=[1.0])
        tr = simulate_current_driven(harvest_model, I, period, periodic_dt())
        assert abs(cycle_energy(tr, 0.0, period)) < 1e-8

    def test_harvesting_profile(self, harvest_model, profile, period):
        tr = simulate_current_driven(harvest_model, profile, period, periodic_dt())
        assert cycle_energy(tr, 0.0, period) == pytest.approx(HARVEST_ENERGY, abs=1e-9)

    def test_second_cycle(self, harvest_model, profile, period):
        tr = simulate_current_driven(harvest_model, profile, 2 * period, periodic_dt())
        assert cycle_energy(tr, period, 2 * period) == pytest.approx(HARVEST_ENERGY, abs=1e-9)

    def test_constant_capacitance(self):
        tr = simulate_current_driven(OnePortModel(CapacitanceProfile.constant(2.0), 0.5),
                                     Fourier(1.0, 0.0, a=[0.3], b=[1.2]), 2 * math.pi, 2 * math.pi / 2000)
        assert abs(cycle_energy(tr, 0.0, 2 * math.pi)) < 1e-12

    def test_not_a_cycle(self, harvest_model, profile, period):
        tr = simulate_current_driven(harvest_model, profile, period, periodic_dt())
        with pytest.raises(CycleError, match=r"C\(t1\)"):
            cycle_energy(tr, 0.0, period / 4)

    def test_voltage_not_closed(self, harvest_model, period):
        tr = simulate_current_driven(harvest_model, Fourier(0.5, 0.1), period, periodic_dt())
        with pytest.raises(CycleError, match=r"V\(t1\)"):
            cycle_energy(tr, 0.0, period)

    def test_off_grid_time(self, harvest_model, profile, period):
        tr = simulate_current_driven(harvest_model, profile, period, periodic_dt())
        with pytest.raises(ValueError):
            cycle_energy(tr, 0.0, period * 0.3333333)


class TestEnergyReport:
    def test_per_cycle_and_csv(self, tmp_path, harvest_model, profile, period):
        tr = simulate_current_driven(harvest_model, profile, 3 * period, periodic_dt())
        rep = energy_balance(tr, period)
        assert len(rep.per_cycle) == 3
        for c in rep.per_cycle:
            assert c.E_elec == pytest.approx(HARVEST_ENERGY, abs=1e-9)
            assert c.E_mech == pytest.approx(-HARVEST_ENERGY, abs=1e-9)
        assert "mean electrical power" in rep.summary()
        rep.to_csv(tmp_path / "r.csv")
        rows = list(csv.reader(open(tmp_path / "r.csv")))
        assert rows[0] == ["quantity", "cycle", "t_start", "t_end", "value"]
        assert float(rows[1][4]) == rep.E_elec
        assert len(rows) == 1 + 4 + 2 * 3

    def test_period_off_grid(self, harvest_model, profile, period):
        tr = simulate_current_driven(harvest_model, profile, period, periodic_dt())
        with pytest.raises(ValueError):
            energy_balance(tr, period * 0.77777)


class TestAvailableStorage:
    @pytest.fixture
    def problem(self, cap, period):
        return ExtractionProblem(cap, period, 4, steps=1024)

    def test_oneport_grows(self, problem):
        est = estimate_available_storage(OnePortModel(problem.capacitance, 0.0), problem)
        assert est.verdict == "growing"
        assert math.isinf(est.supremum_estimate)
        assert est.per_cycle_increment > 4.0
        # linear growth with the horizon
        ratios = np.array(est.lower_bounds) / np.array(est.cycles)
        np.testing.assert_allclose(ratios, ratios[0], rtol=1e-6)

    def test_two_port_is_bounded(self, problem):
        model = TwoPortModel(1.0, 2.0)
        est = estimate_available_storage(model, problem)
        assert est.verdict == "finite"
        assert est.stored_energy_bound == pytest.approx(0.25)
        assert max(est.lower_bounds) <= est.stored_energy_bound + 1e-9
        assert max(est.lower_bounds) > 0.2

    def test_constant_capacitance_oneport(self):
        p = ExtractionProblem(CapacitanceProfile.constant(1.0), 2 * math.pi, 3, steps=512)
        est = estimate_available_storage(OnePortModel(p.capacitance, 0.0), p)
        assert est.verdict == "finite"
        assert max(est.lower_bounds) < 1e-12

    def test_bad_horizons(self, problem):
        with pytest.raises(ValueError):
            estimate_available_storage(OnePortModel(problem.capacitance, 0.0), problem, cycles=(0, 1))
