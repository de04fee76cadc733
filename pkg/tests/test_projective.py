import math

import numpy as np
import pytest

from besseweyl import ad, geometry, projective
from besseweyl.arith import Weights
from besseweyl.forms import d, levi_civita, max_abs, scalar, spindle_chart


@pytest.fixture
def setup(rng):
    w = Weights(3, 1)
    return w, levi_civita(geometry.chart_metric(w)), spindle_chart(0.02).sample(400, rng)


def test_r_closed_forms(setup):
    w, c, x = setup
    R = projective.r_coefficients(c, x)
    assert np.max(np.abs(R[1] - projective.r1_formula(x[0], w))) < 1e-8
    assert np.max(np.abs(R[3] - projective.r3_formula(x[0], w))) < 1e-8


def test_killing_and_tau_fields(setup):
    _, c, x = setup
    assert max(max_abs(e) for e in projective.projective_pde_residual(c, projective.killing_phi, x)) < 1e-8
    assert max(max_abs(e) for e in projective.projective_pde_residual(c, projective.tau_field, x)) > 0.1


def test_tau_family():
    r = np.linspace(0.1, 3.0, 50)
    assert projective.tau_generator_residual(r) < 1e-12
    assert projective.tau_composition_residual(2.0, 0.4, r) < 1e-12
    assert float(projective.tau_lambda(2.0, math.pi / 6)) == pytest.approx(math.atan(2 * math.tan(math.pi / 6)))


def test_equivalence_of_shifted_connection(setup):
    _, c, x = setup
    psi = lambda y: [ad.sin(y[0]), 0.3 * ad.cos(y[1])]
    res = projective.projective_equivalence_residual(c, c.shift(psi), x)
    assert res.max_residual < 1e-12
    assert np.max(np.abs(res.psi[0] - np.sin(x[0]))) < 1e-12


def test_weyl_solve_conformal(setup):
    w, c, x = setup
    u = lambda y: 0.2 * ad.cos(y[0]) + 0.1 * ad.sin(y[0]) ** 2 * ad.sin(y[1])
    g = geometry.chart_metric(w).conformal(u)
    sol = projective.weyl_from_conformal_in_class(g, c, x)
    du = d(scalar(2, u))(x)
    assert sol.max_residual < 1e-10
    assert np.max(np.abs(sol.theta[0] - du[(0,)])) < 1e-10
    assert np.max(np.abs(sol.theta[1] - du[(1,)])) < 1e-10
