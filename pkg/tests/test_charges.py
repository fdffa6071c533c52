import math

import numpy as np
import pytest
from scipy.integrate import quad

from jointmaxwell.charges import (
    HALF_PERIOD_BOX,
    PERIOD_BOX,
    ChargeError,
    SliceSpec,
    charge,
    conservation_check,
    periodic_wave,
    periodicity_residual,
)
from jointmaxwell.currents import duality_current, stress_energy
from jointmaxwell.geometry import translation


@pytest.fixture(scope="module")
def wave():
    return periodic_wave()


def _line_integral(c, t):
    # the current depends on x^1 only; integrate it with adaptive quadrature
    return quad(lambda x1: float(c.phi.at([t, x1, 0.3, 0.7])[0]), 0.0, 2 * math.pi, limit=200)[0]


def test_periodic_wave_is_a_solution(wave, points):
    assert wave.is_valid(points)


def test_duality_charge_value(wave):
    c = duality_current(wave)
    q = charge(c, SliceSpec(0.0, PERIOD_BOX))
    assert q == pytest.approx(_line_integral(c, 0.0), abs=1e-10)
    assert q == pytest.approx(2 * math.pi, abs=1e-10)


def test_energy_charge_value(wave):
    c = stress_energy(translation(1, 0, 0, 0), wave)
    q = charge(c, SliceSpec(0.4, PERIOD_BOX))
    assert q == pytest.approx(_line_integral(c, 0.4), abs=1e-10)
    assert q == pytest.approx(-1.5 * math.pi, abs=1e-10)


def test_single_wave_energy_hand_value(waves):
    # Phi^0 = -1/2 cos^2(x1 - x0) integrates to -pi/2 over one period of x^1
    c = stress_energy(translation(1, 0, 0, 0), waves[0])
    assert charge(c, SliceSpec(0.0, PERIOD_BOX)) == pytest.approx(-0.5 * math.pi, abs=1e-12)


@pytest.mark.parametrize("which", ["duality", "energy"])
def test_conservation(wave, which):
    c = duality_current(wave) if which == "duality" else stress_energy(translation(1, 0, 0, 0), wave)
    res = conservation_check(c, 0.0, 1.7, PERIOD_BOX)
    assert res["pass"] and res["difference"] <= 1e-10
    assert res["converged"]
    assert res["periodicity"] <= 1e-12


def test_half_period_box_rejected(wave):
    with pytest.raises(ChargeError, match="period"):
        conservation_check(duality_current(wave), 0.0, 1.0, HALF_PERIOD_BOX)


def test_half_period_charges_actually_drift(wave):
    # the rejection is not spurious: without the periodicity guard the charge moves
    c = duality_current(wave)
    q0 = charge(c, SliceSpec(0.0, HALF_PERIOD_BOX))
    q1 = charge(c, SliceSpec(1.0, HALF_PERIOD_BOX))
    assert abs(q0 - q1) > 1e-3


def test_periodicity_residual(wave):
    c = duality_current(wave)
    assert periodicity_residual(c, PERIOD_BOX, (0.0, 2.0)) <= 1e-12
    assert periodicity_residual(c, HALF_PERIOD_BOX, (0.0,)) > 1e-3


def test_quadrature_nodes_and_weights():
    s = SliceSpec(1.5, ((0, 2), (0, 1), (-1, 1)), resolution=(4, 5, 6))
    pts, w = s.nodes()
    assert pts.shape == (120, 4) and np.all(pts[:, 0] == 1.5)
    assert math.fsum(w) == pytest.approx(4.0, abs=1e-14)
    assert s.refined().resolution == (8, 10, 12)
    assert s.at(2.0).t == 2.0


@pytest.mark.parametrize("kwargs", [
    {"box": ((0, 1), (0, 1))},
    {"box": ((0, 1), (1, 1), (0, 1))},
    {"box": ((0, 1),) * 3, "resolution": 3},
    {"box": ((0, 1),) * 3, "rule": "simpson"},
])
def test_slice_validation(kwargs):
    with pytest.raises(ChargeError):
        SliceSpec(0.0, **kwargs)
