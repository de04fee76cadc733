import numpy as np

from besseweyl import ad


def test_first_and_second_derivative():
    x = np.linspace(0.1, 2.0, 7)
    _, d1 = ad.derivative(lambda s: ad.sin(s) * ad.exp(s), x)
    assert np.allclose(d1, np.exp(x) * (np.sin(x) + np.cos(x)), atol=1e-14)
    _, d2 = ad.derivative(lambda s: ad.derivative(lambda t: t ** 3, s)[1], x)
    assert np.allclose(d2, 6 * x, atol=1e-13)


def test_no_perturbation_confusion():
    # d/dx [ x * d/dy (x + y) ] = 1
    _, val = ad.derivative(lambda x: x * ad.derivative(lambda y: x + y, 1.0)[1], 1.0)
    assert abs(val - 1.0) < 1e-15


def test_complex_and_partials():
    v, ps = ad.partials(lambda xs: ad.exp(1j * xs[0]) * xs[1] ** 2, [0.3, 2.0])
    assert abs(ps[0] - 1j * np.exp(0.3j) * 4) < 1e-14
    assert abs(ps[1] - np.exp(0.3j) * 4) < 1e-14


def test_jacobian_shape():
    _, J = ad.jacobian(lambda xs: [xs[0] * xs[1], xs[0] + xs[1], ad.sqrt(xs[0])], [4.0, 3.0])
    assert np.allclose(np.array(J, dtype=float), [[3, 4], [1, 1], [0.25, 0]])
