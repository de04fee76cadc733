import math

import numpy as np
import pytest

from besseweyl import geometry
from besseweyl.arith import Weights
from besseweyl.forms import gauss_curvature_of_metric

from conftest import WEIGHT_SET


def test_scr_u_examples():
    w = Weights(3, 1)
    assert geometry.scr_u(1.0, 0.0, w) == pytest.approx(3)
    assert geometry.scr_u(0.0, 1.0, w) == pytest.approx(1)
    s = 1 / math.sqrt(2)
    assert geometry.scr_u(s, s, w) == pytest.approx(2)


def test_chart_metric_examples():
    g = geometry.chart_metric(Weights(3, 1))([math.pi / 2, 0.0])
    assert g[0][0] == pytest.approx(1.0)
    g = geometry.chart_metric(Weights(1, 1))([0.7, 0.0])
    assert g[0][0] == pytest.approx(0.25) and g[1][1] == pytest.approx(math.sin(0.7) ** 2 / 4)


@pytest.mark.parametrize("w", WEIGHT_SET + [Weights(7, 5)])
def test_curvature_formula(w):
    r = np.linspace(1e-3, math.pi - 1e-3, 100)
    K = gauss_curvature_of_metric(geometry.chart_metric(w))([r, 0 * r])[()]
    assert np.max(np.abs(K / geometry.gauss_curvature_formula(r, w) - 1)) < 1e-8


@pytest.mark.parametrize("w", WEIGHT_SET)
def test_coframe_identities(w, rng):
    cf = geometry.SU2Coframe(w)
    x = cf.chart.sample(500, rng)
    assert max(cf.structure_residuals(x).values()) < 1e-9
    assert max(cf.identity_residuals(x).values()) < 1e-10
    assert max(cf.equivariance_residuals(x, 1.234).values()) < 1e-10
    assert cf.volume_residual(x) < 1e-10


def test_a_flow_period_round():
    p = geometry.SU2Point.random(np.random.default_rng(1))
    assert geometry.a_flow_period(p, Weights(1, 1)) == pytest.approx(2 * math.pi, abs=1e-8)


def test_equator_and_meridian_geodesics():
    G = geometry.fubini_study(Weights(5, 3)).christoffel_array()
    tr = geometry.chart_geodesic(G, [math.pi / 2, 0.0], [0.0, 1.0], 10.0)
    assert np.max(np.abs(tr.y[0] - math.pi / 2)) < 1e-9
    tr = geometry.chart_geodesic(G, [0.5, 1.0], [1.0, 0.0], 1.0)
    assert np.max(np.abs(tr.y[1] - 1.0)) < 1e-12


def test_return_angles_round_sphere():
    G = geometry.fubini_study(Weights(1, 1)).christoffel_array()
    for c in (0.2, 0.6, 0.9):
        assert geometry.return_angle(G, math.asin(c)) == pytest.approx(2 * math.pi, abs=1e-6)


def test_return_angle_rational_for_5_3():
    G = geometry.fubini_study(Weights(5, 3)).christoffel_array()
    a = [geometry.return_angle(G, math.asin(c)) for c in (0.3, 0.7)]
    assert abs(a[0] - a[1]) < 1e-6
    assert a[0] / (2 * math.pi) == pytest.approx(4, abs=1e-8)


def test_embed_profile_round():
    r, rad, h = geometry.embed_profile(Weights(1, 1), 33)
    assert h[-1] - h[0] == pytest.approx(1.0, abs=1e-6)
    r, rad, h = geometry.embed_profile(Weights(3, 1), 33)
    assert np.all(np.diff(rad[r <= math.pi / 2]) > 0) and np.all(np.diff(rad[r >= math.pi / 2]) < 0)
