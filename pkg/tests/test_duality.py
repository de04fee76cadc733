import math

import numpy as np
import pytest

from besseweyl import ad, duality, geometry, weyl
from besseweyl.arith import Weights
from besseweyl.forms import MetricField, one_form

from conftest import WEIGHT_SET


def _x3(rng, n=300):
    return [rng.uniform(0.05, math.pi - 0.05, n), rng.uniform(0, 2 * math.pi, n), rng.uniform(0, 2 * math.pi, n)]


SPHERE = MetricField(2, lambda x: [[1.0 + 0 * x[0], 0 * x[0]], [0 * x[0], ad.sin(x[0]) ** 2]])


def test_round_sphere_coframe(rng):
    x = _x3(rng)
    rc = duality.riemannian_coframe(SPHERE)
    assert max(rc.structure_residuals(x).values()) < 1e-10
    z = rc.zeta(x)
    assert np.max(np.abs(z[(1,)] - np.cos(x[0]))) < 1e-14 and np.all(z[(2,)] == 1)


def test_sphere_finsler_is_riemannian(rng):
    x = _x3(rng)
    fc = duality.finsler_from_weyl(weyl.riemannian(SPHERE), check_grid=[x[0], x[1]])
    vs = duality.verify_structure(fc, x)
    assert max(vs.values()) < 1e-9
    assert np.max(np.abs(fc.I(x))) == 0 and np.max(np.abs(fc.J(x))) == 0


@pytest.fixture
def gauged():
    g = geometry.chart_metric(Weights(3, 1))
    th = one_form(2, lambda x: [0 * x[0], 0.05 * ad.sin(x[0]) ** 2])
    return weyl.natural_gauge(weyl.WeylPair(g, th), radial_fit=(0.01, math.pi - 0.01))


def test_structure_and_bianchi(gauged, rng):
    x = _x3(rng)
    vs = duality.verify_structure(duality.finsler_from_weyl(gauged), x)
    assert max(vs.values()) < 1e-7


def test_I_direct_formula(gauged, rng):
    x = _x3(rng, 50)
    fc = duality.finsler_from_weyl(gauged)
    th = gauged.theta_components([x[0], x[1]])
    g = gauged.g([x[0], x[1]])
    # diagonal metric: v = cos psi dr/|dr| + sin psi dphi/|dphi|
    direct = -(th[0] * np.cos(x[2]) / np.sqrt(g[0][0]) + th[1] * np.sin(x[2]) / np.sqrt(g[1][1]))
    assert np.max(np.abs(fc.I(x) - direct)) < 1e-12
    assert np.max(np.abs(duality.extract_invariants(fc, x)["I"] - direct)) < 1e-10


def test_round_trip(gauged, rng):
    xb = [rng.uniform(0.05, 3.0, 200), rng.uniform(0, 6.28, 200)]
    g, th = duality.weyl_from_finsler(duality.finsler_from_weyl(gauged), xb)
    g0, th0 = duality.pair_components(gauged, xb)
    assert np.max(np.abs(g - g0)) < 1e-6 and np.max(np.abs(th - th0)) < 1e-6


def test_natural_gauge_precondition(rng):
    g = geometry.chart_metric(Weights(3, 1))
    with pytest.raises(duality.NaturalGaugeError):
        duality.finsler_from_weyl(weyl.riemannian(g), check_grid=[np.array([1.0]), np.array([0.0])])


def test_flipped_zeta_is_detected(rng):
    x = _x3(rng)
    bad = duality.riemannian_coframe(geometry.chart_metric(Weights(3, 1)), flip_zeta=True)
    assert max(bad.structure_residuals(x).values()) > 1e-2


@pytest.mark.parametrize("w", WEIGHT_SET)
def test_lengths(w):
    ng = weyl.natural_gauge(weyl.riemannian(geometry.chart_metric(w)), radial_fit=(0.01, math.pi - 0.01))
    fl = duality.finsler_lengths(ng, w)
    assert max(fl.deltas().values()) < 1e-6
    assert fl.fiber_spread < 1e-8


def test_lengths_reject_asymmetric():
    g = geometry.chart_metric(Weights(3, 1))
    th = one_form(2, lambda x: [0.01 * ad.sin(x[0]) * ad.cos(x[1]), 0 * x[0]])
    with pytest.raises(ValueError):
        duality.finsler_lengths(weyl.WeylPair(g, th), Weights(3, 1))
