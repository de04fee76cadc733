import math

import numpy as np
import pytest

from besseweyl import twistor as T
from besseweyl.arith import Weights

from conftest import WEIGHT_SET


def test_forward_examples():
    w = Weights(3, 1)
    y = T.xi_forward(T.TwistorPoint(0.6, 0.8j, 0.0), w)
    assert np.allclose(y.y, (0.36, 0.48j, -0.64))
    y = T.xi_forward(T.TwistorPoint(1.0, 0.0, 0.3 + 0.2j), w)
    assert np.allclose(y.y, (1.0, 0.0, -(0.3 + 0.2j)))


def test_inverse_examples():
    w = Weights(3, 1)
    t = T.xi_inverse(T.WeightedPoint.of((1, 0, 0), w), w)
    assert t.distance(T.TwistorPoint(1, 0, 0), w) < 1e-12
    y = T.WeightedPoint.of((1, 1j, 1), w)
    assert not T.on_real_locus(y, w)
    assert T.xi_forward(T.xi_inverse(y, w), w).distance(y) < 1e-9


@pytest.mark.parametrize("w", WEIGHT_SET)
def test_round_trip(w, rng):
    for _ in range(200):
        t = T.TwistorPoint.random(rng)
        assert t.distance(T.xi_inverse(T.xi_forward(t, w), w), w) < 1e-8


def test_root_bracket_sign_change(rng):
    w = Weights(5, 3)
    grid = np.logspace(-8, math.log10(1 - 1e-9), 400)
    for _ in range(20):
        y = T._normalize_mu(T.xi_forward(T.TwistorPoint.random(rng), w), w)[0]
        vals = np.array([T.ff_minus_gg(l, y.y[0], y.y[2], w) for l in grid])
        assert np.count_nonzero(np.diff(np.sign(vals))) == 1


def test_injectivity_witness(rng):
    w = Weights(3, 1)
    for _ in range(200):
        a, b = T.TwistorPoint.random(rng), T.TwistorPoint.random(rng)
        if a.distance(b, w) > 1e-3:
            assert T.xi_forward(a, w).distance(T.xi_forward(b, w)) > 1e-6


def test_real_locus():
    w = Weights(3, 1)
    assert T.on_real_locus(T.WeightedPoint.of((1, 0, 1), w), w)
    assert T.on_real_locus(T.WeightedPoint.of(T.real_locus_point(0.6, 0.8), w), w)
    assert not T.on_real_locus(T.WeightedPoint.of((1, 0.5j, 1), w), w)
    with pytest.raises(T.NoPreimageError):
        T.xi_inverse(T.WeightedPoint.of((1, 0, 1), w), w)


@pytest.mark.parametrize("w", WEIGHT_SET)
def test_holomorphicity(w, rng):
    tf = T.TwistorForms(w)
    x = T.twistor_chart_sample(200, rng)
    assert max(tf.residuals(x).values()) < 1e-9
    assert max(tf.coefficient_residuals(x).values()) < 1e-9
    assert max(T.TwistorForms(w, conjugate_mu=True).residuals(x).values()) > 1e-2


def test_jacobian():
    assert T.jacobian_det(1 / math.sqrt(2), 1 / math.sqrt(2), 0j) == pytest.approx(4)
    z, w, mu = 0.3 + 0.1j, 0.5 - 0.2j, 0.4 + 0.3j
    assert T.jacobian_det(2 * z, 2 * w, mu) / T.jacobian_det(z, w, mu) == pytest.approx(256)
    assert T.jacobian_det(z, w, mu) == pytest.approx(T.jacobian_det_formula(z, w, mu), rel=1e-8)


def test_section():
    s = 1 / math.sqrt(2)
    assert T.deformed_section(1.0, 0.6, 0.8 + 0j) == 0
    assert T.deformed_section(1.2, 1.0 + 0j, 0j) == 0
    mu = T.deformed_section(1.1, s, s + 0j)
    assert mu == pytest.approx((1.05 - math.sqrt(1.1)) / 0.05, abs=1e-14)
    assert T.curve_residual(1.1, s, s, mu) < 1e-12
    with pytest.raises(T.SectionError):
        T.deformed_section(-1.0, s, s + 0j)


def test_section_rotation_and_metric(rng):
    from besseweyl import geometry
    from besseweyl.forms import spindle_chart

    lam = 1.05 + 0.05j
    z = rng.normal(size=300) + 1j * rng.normal(size=300)
    w = rng.normal(size=300) + 1j * rng.normal(size=300)
    n = np.sqrt(abs(z) ** 2 + abs(w) ** 2)
    z, w = z / n, w / n
    y = T.rotate_y(T.xi_hat(z, w, T.deformed_section(lam, z, w)), 0.4)
    assert np.max(np.abs(y[1] ** 2 - lam * y[0] * y[2])) < 1e-10
    x = spindle_chart(0.02).grid(64)
    g = T.section_metric(Weights(3, 1), 1.1)
    assert np.min(g.min_eigenvalue(x)) > 0
    g0, gc = T.section_metric(Weights(3, 1), 1.0)(x), geometry.chart_metric(Weights(3, 1))(x)
    assert max(np.max(np.abs(g0[i][j] - gc[i][j])) for i in range(2) for j in range(2)) < 1e-12


def test_appendix(rng):
    for _ in range(50):
        t = T.TwistorPoint.random(rng, 0.9)
        R = T.adjoint(t.z, t.w)
        assert np.allclose(R @ R.T, np.eye(3), atol=1e-12) and np.linalg.det(R) == pytest.approx(1)
        a = T.appendix_sphere_map(t.z, t.w, t.mu)
        assert a.distance(T.WeightedPoint(T.xi_hat(t.z, t.w, t.mu), (1, 1, 1))) < 1e-10
    assert np.allclose(T.beltrami_matrix(0j), [[0, -1], [1, 0]])
    J = T.beltrami_matrix(0.2 + 0.5j)
    assert np.allclose(J @ J, -np.eye(2))
