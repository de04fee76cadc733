import numpy as np
import pytest

from besseweyl import ad, geometry, weyl
from besseweyl.arith import Weights
from besseweyl.forms import MetricField, levi_civita, one_form, spindle_chart


@pytest.fixture
def pair():
    g = geometry.chart_metric(Weights(3, 1))
    th = one_form(2, lambda x: [0.1 * ad.sin(x[0]) * ad.cos(x[1]), 0.05 * ad.sin(x[0]) ** 2])
    return weyl.WeylPair(g, th)


def test_metricity_and_ricci(pair, rng):
    x = spindle_chart(0.05).sample(300, rng)
    assert weyl.metricity_residual(pair, x) < 1e-10
    s1, k1 = weyl.ricci_weyl(pair, x)
    s2, k2 = weyl.ricci_direct(pair, x)
    assert np.max(np.abs(np.asarray(k1) - np.asarray(k2))) < 1e-9
    for i in range(2):
        for j in range(2):
            assert np.max(np.abs(np.asarray(s1[i][j]) - np.asarray(s2[i][j]))) < 1e-9


def test_flat_skew_ricci_is_d_theta():
    flat = MetricField(2, lambda x: [[1.0 + 0 * x[0], 0 * x[0]], [0 * x[0], 1.0 + 0 * x[0]]])
    p = weyl.WeylPair(flat, one_form(2, lambda x: [0 * x[0], x[0]]))
    _, skew = weyl.ricci_direct(p, [np.array([0.3]), np.array([0.2])])
    assert float(np.real(skew[0])) == pytest.approx(1.0)


def test_natural_gauge(pair, rng):
    x = spindle_chart(0.02).sample(300, rng)
    ng = weyl.natural_gauge(pair, grid=spindle_chart(0.02).grid(16))
    assert np.max(np.abs(np.asarray(ng.positivity()(x)[()]) - 1)) < 1e-9
    ok, m = weyl.is_positive(ng, x)
    assert ok and m > 0


def test_positivity_error():
    g = geometry.chart_metric(Weights(3, 1))
    p = weyl.WeylPair(g, one_form(2, lambda x: [3.0 * ad.cos(x[0]), 0 * x[0]]))
    with pytest.raises(weyl.PositivityError):
        weyl.natural_gauge(p, grid=spindle_chart(0.02).grid(12))


def test_besse_chart_metric():
    rep = weyl.besse_report(weyl.tabulate_radial(levi_civita(geometry.chart_metric(Weights(3, 1)))), n=6)
    assert rep.closing and rep.spread < 1e-6
    assert str(rep.ratio) == "2"


def test_non_besse_metric_detected():
    g = MetricField(2, lambda x: [[0.25 * (1 + 0.3 * ad.sin(x[0]) ** 2), 0 * x[0]],
                                  [0 * x[0], 0.25 * ad.sin(x[0]) ** 2]])
    rep = weyl.besse_report(weyl.tabulate_radial(levi_civita(g)), n=5)
    assert rep.spread > 1e-2
