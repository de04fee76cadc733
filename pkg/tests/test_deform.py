import numpy as np
import pytest

from besseweyl import deform, duality
from besseweyl.arith import Weights


@pytest.fixture(scope="module")
def result():
    return deform.run(Weights(3, 1), 1.1, n_besse=8)


def test_all_stages_pass(result):
    assert result.passed, [s.as_dict() for s in result.stages]
    assert [s.name for s in result.stages] == ["section", "metric", "solver", "natural-gauge", "besse",
                                               "finsler-lengths"]


def test_theta_is_nontrivial(result):
    th = result.pair.theta_components([np.array([0.7, 1.5]), np.array([0.0, 0.0])])
    assert np.max(np.abs(np.asarray(th))) > 1e-4


def test_finsler_recovers_pipeline_pair(result, rng):
    xb = [rng.uniform(0.1, 3.0, 100), rng.uniform(0, 6.28, 100)]
    fc = duality.finsler_from_weyl(result.pair)
    g, th = duality.weyl_from_finsler(fc, xb)
    g0, th0 = duality.pair_components(result.pair, xb)
    assert np.max(np.abs(g - g0)) < 1e-5 and np.max(np.abs(th - th0)) < 1e-5


def test_lambda_disk():
    with pytest.raises(ValueError):
        deform.validate_lambda(2.0)


def test_stage_abort_is_named():
    res = deform.run(Weights(3, 1), 1.1, tol=deform.Tolerances(section=1e-30), n_besse=4)
    assert res.aborted == "section" and not res.passed
