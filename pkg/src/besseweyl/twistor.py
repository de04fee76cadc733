"""Twistor space of CP(a1, a2) and its map into CP(a1, (a1+a2)/2, a2).

Points of the twistor space are classes [z:w:mu] with |z|^2 + |w|^2 = 1,
|mu| < 1, modulo (z, w, mu) ~ (s^a1 z, s^a2 w, s^(2n) mu) for |s| = 1,
n = a1 + a2. The target carries the C* action y_i -> lam^(w_i) y_i with
weights (a1, n/2, a2).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from . import ad
from .arith import Weights
from .forms import MetricField, d, max_abs, scalar
from .geometry import SU2Coframe, lift, scr_u

ROOT_EPS = 1e-12
DEGENERATE_DELTA = 1e-4


class NoPreimageError(ValueError):
    """Raised for points of the real locus j(S^2), which have no preimage."""


class SectionError(ValueError):
    pass


@dataclass(frozen=True)
class TwistorPoint:
    z: complex
    w: complex
    mu: complex

    def __post_init__(self):
        nrm = math.hypot(abs(self.z), abs(self.w))
        if nrm == 0:
            raise ValueError("z and w cannot both vanish")
        if not abs(self.mu) < 1:
            raise ValueError("Beltrami coefficient must satisfy |mu| < 1")
        object.__setattr__(self, "z", complex(self.z) / nrm)
        object.__setattr__(self, "w", complex(self.w) / nrm)
        object.__setattr__(self, "mu", complex(self.mu))

    @classmethod
    def random(cls, rng: np.random.Generator, mu_max: float = 0.95) -> "TwistorPoint":
        v = rng.normal(size=4)
        rad = mu_max * math.sqrt(rng.uniform())
        return cls(complex(v[0], v[1]), complex(v[2], v[3]), rad * cmath.exp(2j * math.pi * rng.uniform()))

    def act(self, theta: float, weights: Weights) -> "TwistorPoint":
        """The circle action with parameter e^{i theta}."""
        s = cmath.exp(1j * theta)
        return TwistorPoint(s ** weights.a1 * self.z, s ** weights.a2 * self.w, s ** (2 * weights.n) * self.mu)

    def distance(self, other: "TwistorPoint", weights: Weights) -> float:
        """Distance between circle orbits (minimum over the matching phases)."""
        a1, a2 = weights.a1, weights.a2
        if abs(self.z) >= abs(self.w):
            base = cmath.phase(self.z / other.z) if other.z != 0 else 0.0
            cands = [(base + 2 * math.pi * k) / a1 for k in range(a1)]
        else:
            base = cmath.phase(self.w / other.w) if other.w != 0 else 0.0
            cands = [(base + 2 * math.pi * k) / a2 for k in range(a2)]
        best = math.inf
        for th in cands:
            o = other.act(th, weights)
            best = min(best, max(abs(o.z - self.z), abs(o.w - self.w), abs(o.mu - self.mu)))
        return best


@dataclass(frozen=True)
class WeightedPoint:
    y: tuple[complex, complex, complex]
    weights: tuple[int, int, int]

    def __post_init__(self):
        if all(abs(c) == 0 for c in self.y):
            raise ValueError("the origin is not a point of weighted projective space")
        object.__setattr__(self, "y", tuple(complex(c) for c in self.y))

    @classmethod
    def of(cls, y: Sequence[complex], w: Weights) -> "WeightedPoint":
        return cls(tuple(y), (w.a1, w.p, w.a2))

    def scaled(self, lam: complex) -> "WeightedPoint":
        return WeightedPoint(tuple(lam ** k * c for k, c in zip(self.weights, self.y)), self.weights)

    def _pivot(self) -> int:
        mags = [abs(c) ** (1.0 / k) for c, k in zip(self.y, self.weights)]
        return int(np.argmax(mags))

    def canonical(self) -> "WeightedPoint":
        """Representative with the dominant coordinate equal to 1.

        The dominant index maximizes |y_i|^(1/w_i). Among the w_i roots of
        unity that remain, the one giving the smallest phase of the next
        nonzero coordinate (in [0, 2 pi)) is chosen.
        """
        i = self._pivot()
        k = self.weights[i]
        base = abs(self.y[i]) ** (-1.0 / k) * cmath.exp(-1j * cmath.phase(self.y[i]) / k)
        best, best_key = None, None
        for m in range(k):
            cand = self.scaled(base * cmath.exp(2j * math.pi * m / k))
            key = tuple(
                round(float(np.mod(cmath.phase(c), 2 * math.pi)), 9) if abs(c) > 1e-12 else -1.0
                for j, c in enumerate(cand.y) if j != i
            )
            if best_key is None or key < best_key:
                best, best_key = cand, key
        return best

    def distance(self, other: "WeightedPoint") -> float:
        """Minimum over C* of the sup-distance after rescaling ``other``."""
        a, b = self.canonical(), other
        i = a._pivot()
        k = a.weights[i]
        if abs(b.y[i]) == 0:
            return max(abs(c) for c in a.y)
        root = (a.y[i] / b.y[i])
        base = abs(root) ** (1.0 / k) * cmath.exp(1j * cmath.phase(root) / k)
        best = math.inf
        for m in range(k):
            cand = b.scaled(base * cmath.exp(2j * math.pi * m / k))
            best = min(best, max(abs(x - y) for x, y in zip(a.y, cand.y)))
        return best


def xi_hat(z, w, mu):
    """The C*-equivariant lift (z^2 - mu wb^2, zw + zb wb mu, w^2 - mu zb^2)."""
    zb, wb = ad.conj(z), ad.conj(w)
    return (z * z - mu * wb * wb, z * w + zb * wb * mu, w * w - mu * zb * zb)


def xi_forward(t: TwistorPoint, weights: Weights) -> WeightedPoint:
    return WeightedPoint.of(xi_hat(t.z, t.w, t.mu), weights)


def _sqrt_pair(y1, y2, y3, mu):
    den = 1.0 - abs(mu) ** 2
    z = cmath.sqrt((y1 + y3.conjugate() * mu) / den)
    w = cmath.sqrt((y3 + y1.conjugate() * mu) / den)
    plus = z * w + (z * w).conjugate() * mu
    if abs(plus + y2) < abs(plus - y2):
        z = -z
    return z, w


def ff_minus_gg(lam: float, y1: complex, y3: complex, w: Weights) -> float:
    """F(lam) - G(lam) of the surjectivity construction (mu normalized to -1)."""
    a1, a2 = w.a1, w.a2
    F = lam ** a1 * abs(y1 - lam ** (2 * a2) * y3.conjugate()) + lam ** a2 * abs(y3 - lam ** (2 * a1) * y1.conjugate())
    return F - (1.0 - lam ** (2 * (a1 + a2)))


def _normalize_mu(y: WeightedPoint, w: Weights) -> list[WeightedPoint]:
    """All rescalings with mu = y2^2 - y1 y3 equal to -1."""
    y1, y2, y3 = y.y
    mu = y2 * y2 - y1 * y3
    n = w.n
    root = (-1.0 / mu)
    base = abs(root) ** (1.0 / n) * cmath.exp(1j * cmath.phase(root) / n)
    return [y.scaled(base * cmath.exp(2j * math.pi * k / n)) for k in range(n)]


def xi_inverse(y: WeightedPoint, weights: Weights) -> TwistorPoint:
    """Preimage under Xi, following the intermediate-value construction."""
    a1, a2, n = weights.a1, weights.a2, weights.n
    y1, y2, y3 = y.y
    scale = max(abs(y1) ** (1 / a1), abs(y2) ** (1 / weights.p), abs(y3) ** (1 / a2))
    y = y.scaled(1.0 / scale)
    y1, y2, y3 = y.y
    mu = y2 * y2 - y1 * y3
    if abs(mu) < 1e-14:
        f = lambda lam: lam ** a1 * abs(y1) + lam ** a2 * abs(y3) - 1.0
        hi = 1.0
        while f(hi) < 0:
            hi *= 2.0
        lam = brentq(f, 0.0, hi, xtol=1e-16, rtol=4 * np.finfo(float).eps)
        yy = y.scaled(lam)
        z, w = _sqrt_pair(*yy.y, 0.0)
        return TwistorPoint(z, w, 0.0)
    y = _normalize_mu(y, weights)[0]
    y1, y2, y3 = y.y
    g = lambda lam: ff_minus_gg(lam, y1, y3, weights)
    lo, hi = ROOT_EPS, 1.0 - ROOT_EPS
    if g(hi) <= 0:
        # F(1) = 0: either on the real locus or the boundary-degenerate branch
        if abs(y1) <= 1.0 + 1e-12:
            raise NoPreimageError("point lies on the real locus j(S^2)")
        hi = 1.0 - DEGENERATE_DELTA
        while g(hi) <= 0 and hi > 0.5:
            hi = 1.0 - (1.0 - hi) * 0.1 if (1.0 - hi) > 1e-15 else 0.5
        if g(hi) <= 0:
            raise NoPreimageError("degenerate branch did not bracket a root")
    lam = brentq(g, lo, hi, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=500)
    yy = y.scaled(lam)
    mu = -lam ** n
    z, w = _sqrt_pair(*yy.y, mu)
    return TwistorPoint(z, w, mu)


def on_real_locus(y: WeightedPoint, weights: Weights, tol: float = 1e-9) -> bool:
    return real_locus_distance(y, weights) <= tol


def real_locus_distance(y: WeightedPoint, weights: Weights) -> float:
    """Smallest |y1 - conj y3| + |Re y2| over rescalings with mu = -1."""
    y1, y2, y3 = y.y
    mu = y2 * y2 - y1 * y3
    if abs(mu) < 1e-14 * max(1.0, max(abs(c) for c in y.y)) ** 2:
        return math.inf
    best = math.inf
    for cand in _normalize_mu(y, weights):
        c1, c2, c3 = cand.y
        best = min(best, abs(c1 - c3.conjugate()) + abs(c2.real))
    return best


def real_locus_point(zeta: complex, t: float) -> tuple[complex, complex, complex]:
    """j(zeta, t) = (zeta, i t, conj zeta)."""
    return (zeta, 1j * t, zeta.conjugate())


# ---------------------------------------------------------------------------
# holomorphicity on the 5-chart SU(2) x D with coordinates (r, phi, t, Re mu, Im mu)


class TwistorForms:
    """xi_1, xi_2 and the pullbacks Psi^* Pi_i on the 5-chart."""

    def __init__(self, weights: Weights, conjugate_mu: bool = False):
        self.weights = weights
        cf = SU2Coframe(weights)
        L = lift(weights)
        proj = lambda x: [x[0], x[1], x[2]]
        from .forms import pullback

        self.omega = pullback(proj, 5, cf.omega)
        self.zeta = pullback(proj, 5, cf.zeta)
        mu = lambda x: x[3] + 1j * x[4]
        self._mu = mu
        self._L = L
        n = weights.n
        self.xi1 = self.omega + self.omega.conj() * mu
        dmu = d(scalar(5, mu))
        self.xi2 = dmu + self.zeta * (lambda x: 2j * n * mu(x))

        def psi(x):
            z, w = L(x[:3])
            m = ad.conj(mu(x)) if conjugate_mu else mu(x)
            return xi_hat(z, w, m)

        self._psi = psi
        Y = [scalar(5, (lambda k: lambda x: psi(x)[k])(k)) for k in range(3)]
        dY = [d(v) for v in Y]
        a1, a2, p = weights.a1, weights.a2, weights.p
        self.pi1 = dY[0] * (lambda x: a2 * psi(x)[2]) - dY[2] * (lambda x: a1 * psi(x)[0])
        self.pi2 = dY[0] * (lambda x: p * psi(x)[1]) - dY[1] * (lambda x: a1 * psi(x)[0])

    def residuals(self, x) -> dict[str, float]:
        base = self.xi1 ^ self.xi2
        return {
            "xi1^xi2^Pi1": max_abs((base ^ self.pi1)(x)),
            "xi1^xi2^Pi2": max_abs((base ^ self.pi2)(x)),
        }

    def scale(self, x) -> float:
        """Size of xi1^xi2 (for relative residuals)."""
        return max_abs((self.xi1 ^ self.xi2)(x))

    def coefficient_residuals(self, x) -> dict[str, float]:
        """Compare Psi^*Pi_i with the closed-form combinations of xi_1, xi_2."""
        a1, a2 = self.weights.a1, self.weights.a2
        L, mu = self._L, self._mu
        Uf = lambda x: scr_u(*L(x[:3]), self.weights)

        def parts(x):
            z, w = L(x[:3])
            return z, w, ad.conj(z), ad.conj(w), mu(x), Uf(x)

        def c11(x):
            z, w, zb, wb, m, U = parts(x)
            return -2.0 / U * (a1 * (z * z - m * wb * wb) * zb * w + a2 * (w * w - m * zb * zb) * z * wb)

        def c12(x):
            z, w, zb, wb, m, U = parts(x)
            return a1 * (z * z - m * wb * wb) * zb * zb - a2 * (w * w - m * zb * zb) * wb * wb

        def c21(x):
            z, w, zb, wb, m, U = parts(x)
            return -1.0 / U * (a1 * (z ** 3 * zb + m * w * wb ** 3) + a2 * (z * w + m * zb * wb) * z * wb)

        def c22(x):
            z, w, zb, wb, m, U = parts(x)
            return 0.5 * (a1 * (m * zb * wb * wb - ad.abs2(w) * z - 2 * ad.abs2(z) * z) * wb
                          - a2 * (m * zb * wb + z * w) * wb * wb)

        r1 = self.pi1 - (self.xi1 * c11 + self.xi2 * c12)
        r2 = self.pi2 - (self.xi1 * c21 + self.xi2 * c22)
        return {"Pi1": max_abs(r1(x)), "Pi2": max_abs(r2(x))}


def twistor_chart_sample(n: int, rng: np.random.Generator, mu_max: float = 0.95, eps: float = 1e-3):
    r = rng.uniform(eps, math.pi - eps, n)
    ph = rng.uniform(0, 2 * math.pi, n)
    t = rng.uniform(0, 2 * math.pi, n)
    rad = mu_max * np.sqrt(rng.uniform(size=n))
    ang = rng.uniform(0, 2 * math.pi, n)
    return [r, ph, t, rad * np.cos(ang), rad * np.sin(ang)]


def jacobian_det(z: complex, w: complex, mu: complex) -> float:
    """Determinant of the real 6x6 Jacobian of xi_hat."""

    def real_map(v):
        zz = v[0] + 1j * v[1]
        ww = v[2] + 1j * v[3]
        mm = v[4] + 1j * v[5]
        out = xi_hat(zz, ww, mm)
        res = []
        for c in out:
            res.extend([ad.real(c), ad.imag(c)])
        return res

    v0 = [z.real, z.imag, w.real, w.imag, mu.real, mu.imag]
    _, J = ad.jacobian(real_map, v0)
    return float(np.linalg.det(np.array(J, dtype=float)))


def jacobian_det_formula(z: complex, w: complex, mu: complex) -> float:
    return 4.0 * (1 - abs(mu) ** 2) * (abs(z) ** 2 + abs(w) ** 2) ** 4


# ---------------------------------------------------------------------------
# deformations of the Veronese curve


def section_roots(lam, z, w):
    """Both roots of the section quadratic; the first is the small one."""
    zb, wb = ad.conj(z), ad.conj(w)
    A = (lam - 1.0) * zb * zb * wb * wb
    B = (lam - 1.0) * (ad.abs2(z) ** 2 + ad.abs2(w) ** 2) + 1.0
    C = (lam - 1.0) * z * z * w * w
    s = ad.sqrt(B * B - 4.0 * A * C + 0j)
    # take the branch that avoids cancellation in B + s
    flip = np.real(ad.value(B) * np.conj(ad.value(s))) < 0
    s = ad.where(flip, -s, s)
    small = 2.0 * C / (B + s)
    Av = np.asarray(ad.value(A))
    with np.errstate(divide="ignore", invalid="ignore"):
        big = np.where(np.abs(Av) > 0, np.asarray(ad.value(B + s)) / (2.0 * Av), np.inf)
    return small, big


def deformed_section(lam, z, w):
    """Beltrami coefficient mu with Xi([z:w:mu]) on y2^2 = lam y1 y3."""
    small, big = section_roots(lam, z, w)
    sv = np.abs(np.asarray(ad.value(small)))
    bv = np.abs(np.asarray(big))
    if np.any(sv >= 1.0) or np.any(bv < 1.0):
        raise SectionError(f"no unique root with |mu| < 1 (small root up to {np.max(sv):.3e}, "
                           f"large root down to {np.min(bv):.3e})")
    return small


def curve_residual(lam, z, w, mu) -> np.ndarray:
    y1, y2, y3 = xi_hat(z, w, mu)
    return np.abs(y2 * y2 - lam * y1 * y3)


def rotate_y(y, theta):
    """[y1:y2:y3] -> [e^{-2 i theta} y1 : y2 : e^{2 i theta} y3]."""
    return (np.exp(-2j * theta) * y[0], y[1], np.exp(2j * theta) * y[2])


def section_metric(weights: Weights, lam) -> MetricField:
    """Real part of (omega + mu omega-bar) (x) conj(same), along t = 0."""
    from .forms import pullback

    cf = SU2Coframe(weights)
    L = lift(weights)
    sec = lambda y: [y[0], y[1], 0.0 * y[0]]
    om = pullback(sec, 2, cf.omega)

    def mu_of(y):
        z, w = L([y[0], y[1], 0.0 * y[0]])
        return deformed_section(lam, z, w)

    def fn(y):
        c = om(y)
        o = [c.get((0,), 0.0), c.get((1,), 0.0)]
        m = mu_of(y)
        xi = [o[i] + m * ad.conj(o[i]) for i in range(2)]
        return [[ad.real(xi[i] * ad.conj(xi[j])) for j in range(2)] for i in range(2)]

    return MetricField(2, fn)


def section_mu_field(weights: Weights, lam):
    L = lift(weights)

    def mu_of(y):
        z, w = L([y[0], y[1], 0.0 * y[0]])
        return deformed_section(lam, z, w)

    return mu_of


# ---------------------------------------------------------------------------
# the round case via the adjoint representation


def adjoint(z: complex, w: complex) -> np.ndarray:
    zb, wb = z.conjugate(), w.conjugate()
    M = 0.5 * np.array(
        [
            [z * z + w * w + zb * zb + wb * wb, -1j * (z * z + w * w - zb * zb - wb * wb), 2j * (z * wb - zb * w)],
            [1j * (z * z - w * w - zb * zb + wb * wb), z * z + zb * zb - w * w - wb * wb, -2 * (z * wb + zb * w)],
            [2j * (z * w - zb * wb), 2 * (z * w + zb * wb), 2 * (abs(z) ** 2 - abs(w) ** 2)],
        ]
    )
    return np.real(M)


def beltrami_matrix(mu: complex) -> np.ndarray:
    m2 = abs(mu) ** 2
    return np.array(
        [[-2 * mu.imag, -m2 + 2 * mu.real - 1], [m2 + 2 * mu.real + 1, 2 * mu.imag]]
    ) / (1 - m2)


def appendix_sphere_map(z: complex, w: complex, mu: complex) -> WeightedPoint:
    R = adjoint(z, w)
    e1, e2 = R[:, 0], R[:, 1]
    J = beltrami_matrix(mu)
    je1 = J[0, 0] * e1 + J[1, 0] * e2
    v = e1 + 1j * je1
    y = (1j * v[0] + v[1], v[2], 1j * v[0] - v[1])
    return WeightedPoint(y, (1, 1, 1))
