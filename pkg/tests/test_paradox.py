import numpy as np
import pytest

from tvcap.paradox import ParadoxScenario, closed_form_limit, ramp_segments, run_paradox, sweep


class TestRunParadox:
    def test_doubling(self):
        r = run_paradox(ParadoxScenario(1.0, 1.0, 1.0))
        assert r.S_before == pytest.approx(0.5)
        assert r.S_after == pytest.approx(0.25, abs=1e-12)
        assert r.W_mech == pytest.approx(-0.25, abs=1e-10)
        assert r.residual < 1e-10

    def test_no_change(self):
        r = run_paradox(ParadoxScenario(1.0, 1.0, 1.0, k=1.0))
        assert r.W_mech == 0.0
        assert r.S_after == r.S_before

    def test_fast_ramp(self):
        r = run_paradox(ParadoxScenario(2.0, 1.0, 0.1))
        assert r.W_mech == pytest.approx(-1.0, abs=1e-10)

    def test_shrinking_gap_supplies_work(self):
        r = run_paradox(ParadoxScenario(1.0, 1.0, 1.0, k=0.5))
        assert r.W_mech == pytest.approx(0.5, abs=1e-10)
        assert r.S_after == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("k", [1.5, 2.0, 5.0, 100.0])
    def test_work_is_negative_when_capacitance_grows(self, k):
        r = run_paradox(ParadoxScenario(0.3, 2.0, 0.5, k))
        assert r.W_mech < 0
        assert r.W_mech == pytest.approx(closed_form_limit(ParadoxScenario(0.3, 2.0, 0.0, k)), abs=1e-10)

    def test_invalid(self):
        with pytest.raises(ValueError):
            ParadoxScenario(1.0, 0.0, 1.0)
        with pytest.raises(ValueError):
            ParadoxScenario(1.0, 1.0, -1.0)
        with pytest.raises(ValueError):
            ParadoxScenario(1.0, 1.0, 1.0, k=0.0)
        with pytest.raises(ValueError):
            run_paradox(ParadoxScenario(1.0, 1.0, 0.0))


def test_sweep_is_independent_of_duration():
    rows = sweep(1.0, 1.0, 2.0, [10.0, 1.0, 1e-1, 1e-2, 1e-3, 1e-4])
    for r in rows:
        assert r.W_mech == pytest.approx(-0.25, abs=1e-10)
        assert r.residual < 1e-10


def test_large_factor_limit():
    # k -> infinity: all stored energy leaves through the mechanical port
    s = ParadoxScenario(1.0, 1.0, 1.0, k=1e9)
    assert closed_form_limit(s) == pytest.approx(-0.5, rel=1e-8)
    assert run_paradox(s, steps=2000).W_mech == pytest.approx(-0.5, rel=1e-6)


def test_segments_cover_the_ramp():
    e = ramp_segments(ParadoxScenario(1.0, 1.0, 2.0, k=1000.0))
    assert e[0] == 0.0 and e[-1] == pytest.approx(2.0)
    ratios = (1 + 999 * e[1:] / 2) / (1 + 999 * e[:-1] / 2)
    np.testing.assert_allclose(ratios, ratios[0])
    assert ratios[0] <= 2.0
    assert len(ramp_segments(ParadoxScenario(1.0, 1.0, 2.0, k=2.0))) == 2
