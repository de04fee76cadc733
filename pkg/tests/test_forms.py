import math

import numpy as np

from besseweyl import ad
from besseweyl.forms import (
    Form,
    MetricField,
    codifferential,
    d,
    euclidean,
    gauss_curvature_of_metric,
    hodge_star,
    max_abs,
    one_form,
    pullback,
    scalar,
    spindle_chart,
)


def test_d_squared_and_leibniz(rng):
    x = [rng.uniform(-1, 1, 300) for _ in range(3)]
    a = one_form(3, lambda y: [y[1] * ad.sin(y[2]), ad.exp(y[0] * y[2]), y[0] ** 3])
    b = one_form(3, lambda y: [ad.cos(y[1]), y[2], y[0] * y[1]])
    assert max_abs(d(d(a))(x)) < 1e-12
    assert max_abs((d(a ^ b) - (d(a) ^ b) + (a ^ d(b)))(x)) < 1e-12


def test_trivial_examples(rng):
    x = [rng.uniform(-1, 1, 50), rng.uniform(-1, 1, 50)]
    assert max_abs(d(scalar(2, lambda y: 3.0 + 0 * y[0]))(x)) == 0
    dx = one_form(2, lambda y: [1.0 + 0 * y[0], 0 * y[0]])
    dy = one_form(2, lambda y: [0 * y[0], 1.0 + 0 * y[0]])
    assert max_abs((dx ^ dx)(x)) == 0
    assert max_abs(((dx ^ dy) - Form(2, 2, lambda y: {(0, 1): 1.0}))(x)) == 0
    E = euclidean()
    assert max_abs((hodge_star(E, dx) - dy)(x)) == 0
    assert max_abs((hodge_star(E, dy) + dx)(x)) == 0
    assert max_abs(codifferential(E, dx)(x)) == 0
    assert max_abs(codifferential(E, one_form(2, lambda y: [0 * y[0], y[0]]))(x)) < 1e-15


def test_pullback_identity_and_naturality(rng):
    x = [rng.uniform(-1, 1, 100), rng.uniform(-1, 1, 100)]
    a = one_form(2, lambda y: [y[0] * y[1], ad.sin(y[0])])
    assert max_abs((pullback(lambda y: y, 2, a) - a)(x)) == 0
    f = lambda y: [y[0] ** 2 - y[1], y[0] * y[1]]
    assert max_abs((pullback(f, 2, d(a)) - d(pullback(f, 2, a)))(x)) < 1e-12


def test_curvatures():
    r = np.linspace(0.01, math.pi - 0.01, 50)
    sph = MetricField(2, lambda y: [[1.0 + 0 * y[0], 0 * y[0]], [0 * y[0], ad.sin(y[0]) ** 2]])
    assert np.max(np.abs(gauss_curvature_of_metric(sph)([r, 0 * r])[()] - 1)) < 1e-9
    assert max_abs(gauss_curvature_of_metric(euclidean())([r, r])) == 0


def test_spindle_chart_clamps():
    c = spindle_chart()
    x = c.sample(1000, np.random.default_rng(0))
    assert x[0].min() >= 1e-3 and x[0].max() <= math.pi - 1e-3
