"""Weyl structures of positive curvature versus Finsler structures with K = 1.

Everything lives on the 3-chart (r, phi, psi) of the unit tangent bundle,
where the unit vector over (r, phi) is v = cos(psi) E1 + sin(psi) E2 for the
g-orthonormal frame (E1, E2) adapted to dr.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from . import ad
from .arith import LengthSpectrum, Weights, length_spectrum
from .forms import (
    Form,
    MetricField,
    d,
    det2,
    gauss_curvature_of_metric,
    hodge_star,
    max_abs,
    one_form,
)
from .weyl import WeylPair

GAUGE_TOL = 1e-6
RICHARDSON_EPS = (1e-2, 5e-3, 2.5e-3)


class NaturalGaugeError(ValueError):
    pass


class ProjectionError(ValueError):
    pass


def _base(x):
    return [x[0], x[1]]


def _frame_parts(g: MetricField, x):
    """sqrt(g11), g12/g11, sqrt(det/g11) at the base point of ``x``."""
    gm = g(_base(x))
    g11, g12 = gm[0][0], gm[0][1]
    return ad.sqrt(g11), g12 / g11, ad.sqrt(det2(gm) / g11)


def _orthonormal_coframe(g: MetricField) -> tuple[Form, Form]:
    """(e1, e2) on the base with e1 = sqrt(g11)(dr + g12/g11 dphi)."""

    def e1(x):
        s1, q, _ = _frame_parts(g, x)
        return [s1, s1 * q]

    def e2(x):
        _, _, s2 = _frame_parts(g, x)
        return [0.0 * s2, s2]

    return one_form(2, e1), one_form(2, e2)


def _lift3(form: Form) -> Form:
    """Pull a base 1-form back to the (r, phi, psi) chart."""
    return Form(1, 3, lambda x: {k: v for k, v in form(_base(x)).items()})


@dataclass
class RiemannianCoframe:
    g: MetricField
    alpha: Form
    beta: Form
    zeta: Form

    def structure_residuals(self, x) -> dict[str, float]:
        a, b, z = self.alpha, self.beta, self.zeta
        K = gauss_curvature_of_metric(self.g)
        Kp = Form(0, 3, lambda y: {(): K(_base(y))[()]})
        vol = area_pullback(self.g)
        return {
            "d alpha + beta^zeta": max_abs((d(a) + (b ^ z))(x)),
            "d beta + zeta^alpha": max_abs((d(b) + (z ^ a))(x)),
            "d zeta + K alpha^beta": max_abs((d(z) + (a ^ b) * (lambda y: Kp(y)[()]))(x)),
            "pi^* area - alpha^beta": max_abs(((a ^ b) - vol)(x)),
        }


def area_pullback(g: MetricField) -> Form:
    return Form(2, 3, lambda x: {(0, 1): ad.sqrt(det2(g(_base(x))))})


def riemannian_coframe(g: MetricField, flip_zeta: bool = False) -> RiemannianCoframe:
    """Tautological coframe (alpha, beta, zeta) of the unit tangent bundle.

    ``flip_zeta`` reverses the connection form and exists only to produce a
    deliberately wrong coframe for negative controls.
    """
    e1, e2 = _orthonormal_coframe(g)
    de1, de2 = d(e1), d(e2)

    def rho(x):
        y = _base(x)
        sq = ad.sqrt(det2(g(y)))
        c1 = de1(y).get((0, 1), 0.0) / sq
        c2 = de2(y).get((0, 1), 0.0) / sq
        a1, a2 = e1(y), e2(y)
        return [c1 * a1[(0,)] + c2 * a2.get((0,), 0.0), c1 * a1[(1,)] + c2 * a2[(1,)]]

    def alpha(x):
        s1, q, s2 = _frame_parts(g, x)
        c, s = ad.cos(x[2]), ad.sin(x[2])
        return [c * s1, c * s1 * q + s * s2, 0.0 * c]

    def beta(x):
        s1, q, s2 = _frame_parts(g, x)
        c, s = ad.cos(x[2]), ad.sin(x[2])
        return [-s * s1, -s * s1 * q + c * s2, 0.0 * c]

    sign = -1.0 if flip_zeta else 1.0

    def zeta(x):
        rr = rho(x)
        return [sign * rr[0], sign * rr[1], sign + 0.0 * x[2]]

    return RiemannianCoframe(g, one_form(3, alpha), one_form(3, beta), one_form(3, zeta))


def unit_vector_components(g: MetricField, x, rotate: bool = False):
    """Chart components of v (or of iv) at (r, phi, psi)."""
    s1, q, s2 = _frame_parts(g, x)
    c, s = ad.cos(x[2]), ad.sin(x[2])
    if rotate:
        c, s = -s, c
    # v = c E1 + s E2 with E1 = d_r / s1, E2 = (d_phi - q d_r) / s2
    return [c / s1 - s * q / s2, s / s2]


@dataclass
class FinslerCoframe:
    chi: Form
    eta: Form
    nu: Form
    I: Callable[[Sequence[Any]], Any]
    J: Callable[[Sequence[Any]], Any]
    K: Callable[[Sequence[Any]], Any]
    source: WeylPair | None = None

    def matrix(self, x) -> np.ndarray:
        """Coframe matrix rows (chi, eta, nu), shape (npts, 3, 3)."""
        rows = []
        for f in (self.chi, self.eta, self.nu):
            c = f(x)
            rows.append([np.real(np.asarray(ad.value(c.get((i,), 0.0)), dtype=complex)) for i in range(3)])
        shape = np.broadcast(*[np.asarray(v) for row in rows for v in row]).shape
        M = np.empty(shape + (3, 3))
        for a in range(3):
            for i in range(3):
                M[..., a, i] = rows[a][i]
        return M.reshape((-1, 3, 3))

    def dual_frame(self, x) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(X, H, V) as component arrays of shape (3, npts)."""
        Minv = np.linalg.inv(self.matrix(x))
        return Minv[:, :, 0].T, Minv[:, :, 1].T, Minv[:, :, 2].T

    def volume(self, x) -> np.ndarray:
        return np.linalg.det(self.matrix(x))


def _scalar_value(v, shape):
    return np.broadcast_to(np.real(np.asarray(ad.value(v), dtype=complex)), shape).ravel()


def _pair2(form: Form, x, A, B) -> np.ndarray:
    """Evaluate a 2-form of the 3-chart on component arrays A, B."""
    c = form(x)
    out = 0.0
    for (i, j), v in c.items():
        vv = np.real(np.asarray(ad.value(v), dtype=complex)).ravel()
        out = out + vv * (A[i] * B[j] - A[j] * B[i])
    return np.asarray(out) * np.ones(A.shape[1])


def _directional(f: Callable, x, X: np.ndarray) -> np.ndarray:
    _, grads = ad.partials(lambda xs: f(xs), list(x))
    shape = (X.shape[1],)
    return sum(_scalar_value(grads[i], shape) * X[i] for i in range(3))


def finsler_from_weyl(p: WeylPair, check_grid: Sequence[np.ndarray] | None = None,
                      tol: float = GAUGE_TOL) -> FinslerCoframe:
    """Coframe chi = pi^*(star theta) - zeta, eta = -beta, nu = -alpha."""
    if check_grid is not None:
        pos = np.real(np.asarray(ad.value(p.positivity()(list(check_grid))[()]), dtype=complex))
        dev = float(np.max(np.abs(pos - 1.0)))
        if dev > tol:
            raise NaturalGaugeError(f"pair is not in natural gauge: max |K - delta theta - 1| = {dev:.3e}")
    rc = riemannian_coframe(p.g)
    st = _lift3(hodge_star(p.g, p.theta))
    chi = st - rc.zeta
    eta = -rc.beta
    nu = -rc.alpha

    def theta_on(x, rotate):
        v = unit_vector_components(p.g, x, rotate)
        th = p.theta_components(_base(x))
        return th[0] * v[0] + th[1] * v[1]

    I = lambda x: -theta_on(x, False)
    J = lambda x: theta_on(x, True)
    K = lambda x: 1.0 + 0.0 * x[0]
    return FinslerCoframe(chi, eta, nu, I, J, K, source=p)


def extract_invariants(fc: FinslerCoframe, x) -> dict[str, np.ndarray]:
    """I, J, K read off from the structure equations and the dual frame."""
    X, H, V = fc.dual_frame(x)
    dn, de = d(fc.nu), d(fc.eta)
    return {
        "K": -_pair2(dn, x, X, H),
        "I": _pair2(de, x, V, H),
        "J": _pair2(dn, x, V, H),
    }


def verify_structure(fc: FinslerCoframe, x) -> dict[str, float]:
    """Max residuals of the structure equations and Bianchi identities."""
    chi, eta, nu = fc.chi, fc.eta, fc.nu
    I = lambda y: fc.I(y)
    J = lambda y: fc.J(y)
    K = lambda y: fc.K(y)
    r1 = d(chi) + (eta ^ nu)
    r2 = d(eta) + (nu ^ (chi - eta * I))
    r3 = d(nu) + ((chi * K - nu * J) ^ eta)
    X, H, V = fc.dual_frame(x)
    npts = X.shape[1]
    XI = _directional(I, x, X)
    XJ = _directional(J, x, X)
    Iv = _scalar_value(I(x), (npts,))
    Jv = _scalar_value(J(x), (npts,))
    ext = extract_invariants(fc, x)
    return {
        "d chi + eta^nu": max_abs(r1(x)),
        "d eta + nu^(chi - I eta)": max_abs(r2(x)),
        "d nu + (K chi - J nu)^eta": max_abs(r3(x)),
        "K extracted - 1": float(np.max(np.abs(ext["K"] - 1.0))),
        "I extracted - I": float(np.max(np.abs(ext["I"] - Iv))),
        "J extracted - J": float(np.max(np.abs(ext["J"] - Jv))),
        "XI - J": float(np.max(np.abs(XI - Jv))),
        "XJ + I": float(np.max(np.abs(XJ + Iv))),
    }


def weyl_from_finsler(fc: FinslerCoframe, x, tol: float = GAUGE_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Recover (g, theta) at base points from a K = 1 coframe.

    ``x`` is a list of (r, phi) arrays. The metric is eta^2 + nu^2 restricted
    to the horizontal directions, which must not depend on psi. theta solves
    -(J alpha + I beta) = pi^*(star theta). Returns g of shape (2, 2, npts)
    and theta of shape (2, npts).
    """
    r, ph = [np.ravel(np.asarray(v, dtype=float)) for v in x]
    npts = r.size
    gs, ths = [], []
    for psi in (0.0, 1.1, 2.3, 4.0):
        y = [r, ph, np.full(npts, psi)]
        ext = extract_invariants(fc, y)
        if float(np.max(np.abs(ext["K"] - 1.0))) > tol:
            raise ValueError("coframe does not have K = 1")
        M = fc.matrix(y)  # rows chi, eta, nu
        eta_b, nu_b = M[:, 1, :2], M[:, 2, :2]
        g = np.einsum("pi,pj->ijp", eta_b, eta_b) + np.einsum("pi,pj->ijp", nu_b, nu_b)
        Iv = _scalar_value(fc.I(y), (npts,))
        Jv = _scalar_value(fc.J(y), (npts,))
        # alpha = -nu, beta = -eta, so star theta = J nu + I eta
        st = Jv[:, None] * nu_b + Iv[:, None] * eta_b
        # invert star on 1-forms: theta = -star(star theta)
        det = g[0, 0] * g[1, 1] - g[0, 1] ** 2
        sq = np.sqrt(det)
        gi = np.array([[g[1, 1], -g[0, 1]], [-g[0, 1], g[0, 0]]]) / det
        up0 = gi[0, 0] * st[:, 0] + gi[0, 1] * st[:, 1]
        up1 = gi[1, 0] * st[:, 0] + gi[1, 1] * st[:, 1]
        theta = -np.array([-sq * up1, sq * up0])
        gs.append(g)
        ths.append(theta)
    spread = max(float(np.max(np.abs(gs[k] - gs[0]))) for k in range(1, len(gs)))
    if spread > tol:
        raise ProjectionError(f"candidate metric depends on psi (spread {spread:.3e})")
    return gs[0], ths[0]


def pair_components(p: WeylPair, x) -> tuple[np.ndarray, np.ndarray]:
    r, ph = [np.ravel(np.asarray(v, dtype=float)) for v in x]
    gm = p.g([r, ph])
    g = np.array([[np.broadcast_to(np.real(np.asarray(ad.value(gm[i][j]), dtype=complex)), r.shape)
                   for j in range(2)] for i in range(2)])
    th = p.theta_components([r, ph])
    theta = np.array([np.broadcast_to(np.real(np.asarray(ad.value(t), dtype=complex)), r.shape) for t in th])
    return g, theta


# ---------------------------------------------------------------------------
# fiber integrals and lengths


def fiber_integral(fc: FinslerCoframe, r: float, phi: float, psi_range: float = 2 * math.pi,
                   n: int = 64) -> float:
    """Integral of chi along the psi-fiber over (r, phi), periodic trapezoid rule."""
    psi = np.linspace(0.0, psi_range, n, endpoint=False)
    c = fc.chi([np.full(n, r), np.full(n, phi), psi]).get((2,), 0.0)
    vals = np.real(np.asarray(ad.value(c), dtype=complex)) * np.ones(n)
    return float(np.sum(vals) * psi_range / n)


def richardson(values: Sequence[float], eps: Sequence[float]) -> float:
    """Extrapolate f(eps) -> f(0) assuming a power series in eps."""
    h = np.asarray(eps, dtype=float)
    V = np.vander(h, len(h), increasing=True)
    return float(np.linalg.solve(V, np.asarray(values, dtype=float))[0])


@dataclass
class FinslerLengths:
    weights: Weights
    lengths: dict[str, float]
    orientation: int
    fiber_spread: float
    formula: LengthSpectrum = field(repr=False)

    @property
    def shortest(self) -> float:
        return min(self.lengths.values())

    def deltas(self) -> dict[str, float]:
        out = {}
        for length in self.formula.lengths:
            out[length.role] = abs(self.lengths[length.role] - length.radians)
        return out

    def as_dict(self) -> dict:
        return {
            "lengths": dict(self.lengths),
            "formula": {l.role: str(l) for l in self.formula.lengths},
            "deltas": self.deltas(),
            "orientation": self.orientation,
            "fiber_spread": self.fiber_spread,
        }


def finsler_lengths(p: WeylPair, w: Weights, n_base: int = 9, symmetry_tol: float = 1e-8) -> FinslerLengths:
    """Closed-geodesic lengths of the Finsler structure dual to ``p``.

    The geodesics are the psi-fibers. A regular fiber has psi-range 2 pi,
    the fibers over the cone points 2 pi / a1 and 2 pi / a2 (taken as limits
    r -> 0, pi). Each integral is multiplied by the covering degree
    (a1 + a2)/2 and the overall sign is normalized to make lengths positive.
    """
    expected = length_spectrum(w)
    rs = np.linspace(0.3, math.pi - 0.3, 5)
    probe = [np.repeat(rs, 3), np.tile([0.0, 2.0, 4.0], 5)]
    g0, th0 = pair_components(p, probe)
    g1, th1 = pair_components(p, [probe[0], probe[1] + 1.0])
    asym = max(float(np.max(np.abs(g0 - g1))), float(np.max(np.abs(th0 - th1))))
    if asym > symmetry_tol:
        raise ValueError(f"pair is not rotationally symmetric (deviation {asym:.3e})")
    fc = finsler_from_weyl(p)
    regular = []
    for r in np.linspace(0.2, math.pi - 0.2, n_base):
        for phi in (0.0, 2.5):
            regular.append(fiber_integral(fc, float(r), phi))
    regular = np.array(regular)
    mean = float(np.mean(regular))
    orientation = 1 if mean > 0 else -1
    deg = w.p
    cone1 = richardson([fiber_integral(fc, e, 0.0, 2 * math.pi / w.a1) for e in RICHARDSON_EPS], RICHARDSON_EPS)
    cone2 = richardson([fiber_integral(fc, math.pi - e, 0.0, 2 * math.pi / w.a2) for e in RICHARDSON_EPS],
                       RICHARDSON_EPS)
    lengths = {"regular": orientation * deg * mean, "shortest": orientation * deg * cone1}
    if w.a2 > 1:
        lengths["second-exceptional"] = orientation * deg * cone2
    return FinslerLengths(w, lengths, orientation, float(np.ptp(regular)), expected)
