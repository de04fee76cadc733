"""The Besse metric on CP(a1, a2) from its SU(2) presentation.

SU(2) is parametrized locally by ``(r, phi, t)``::

    z = cos(r/2) exp(-i phi/n) exp(-i a1 t)
    w = sin(r/2) exp(+i phi/n) exp(-i a2 t),      n = a1 + a2,

so ``t`` runs along the circle action and ``t = 0`` is a section over the
``(r, phi)`` chart of the spindle. All identities are tensorial and are
checked pointwise in this chart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np
from scipy.integrate import quad

from . import ad
from . import flow
from .arith import Weights
from .forms import (
    EPS_POLE,
    AffineConnection,
    Chart,
    MetricField,
    area_form,
    d,
    pullback,
    scalar,
)


@dataclass(frozen=True)
class SU2Point:
    z: complex
    w: complex

    def __post_init__(self):
        nrm = math.sqrt(abs(self.z) ** 2 + abs(self.w) ** 2)
        if nrm == 0:
            raise ValueError("(0, 0) is not a point of SU(2)")
        object.__setattr__(self, "z", complex(self.z) / nrm)
        object.__setattr__(self, "w", complex(self.w) / nrm)

    @classmethod
    def random(cls, rng: np.random.Generator) -> "SU2Point":
        v = rng.normal(size=4)
        return cls(complex(v[0], v[1]), complex(v[2], v[3]))


def scr_u(z, w, weights: Weights):
    """U = a1|z|^2 + a2|w|^2."""
    return weights.a1 * ad.abs2(z) + weights.a2 * ad.abs2(w)


def scr_v(z, w, weights: Weights):
    """V = i(a1 - a2) z w."""
    return 1j * (weights.a1 - weights.a2) * z * w


def u_of_r(r, weights: Weights):
    """U along the section: n/2 + (a1 - a2)/2 cos r."""
    return 0.5 * weights.n + 0.5 * (weights.a1 - weights.a2) * ad.cos(r)


def gauss_curvature_formula(r, weights: Weights):
    """Closed-form curvature 2n / U^3 of the chart metric."""
    return 2.0 * weights.n / u_of_r(r, weights) ** 3


def su2_chart(eps: float = EPS_POLE) -> Chart:
    return Chart(("r", "phi", "t"), (eps, 0.0, 0.0), (math.pi - eps, 2 * math.pi, 2 * math.pi),
                 (None, 2 * math.pi, 2 * math.pi))


def lift(weights: Weights) -> Callable[[Sequence[Any]], tuple[Any, Any]]:
    """Chart map (r, phi, t) -> (z, w)."""
    n, a1, a2 = weights.n, weights.a1, weights.a2

    def fn(x):
        r, ph, t = x
        z = ad.cos(0.5 * r) * ad.exp(-1j * (ph / n + a1 * t))
        w = ad.sin(0.5 * r) * ad.exp(1j * (ph / n - a2 * t))
        return z, w

    return fn


def project(z, w, weights: Weights) -> tuple[np.ndarray, np.ndarray]:
    """(z, w) -> (r, phi) with phi reduced to [0, 2 pi)."""
    r = 2.0 * np.arccos(np.clip(np.abs(z), 0.0, 1.0))
    phi = np.mod(weights.a1 * np.angle(w) - weights.a2 * np.angle(z), 2 * math.pi)
    return r, phi


def chart_coordinates(z, w, weights: Weights) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Inverse of :func:`lift`: (z, w) -> (r, phi, t) with phi in [0, 2 pi)."""
    r, phi = project(z, w, weights)
    n = weights.n
    # arg z = -phi/n - a1 t  (mod 2 pi)
    t = (-np.angle(z) - phi / n) / weights.a1
    # pick the branch consistent with arg w as well
    best = t
    for k in range(weights.a1):
        tk = t + 2 * math.pi * k / weights.a1
        zz, ww = lift(weights)([r, phi, tk])
        if np.all(np.abs(zz - z) + np.abs(ww - w) < 1e-8):
            best = tk
            break
    return r, phi, np.mod(best, 2 * math.pi)


class SU2Coframe:
    """The coframe (alpha, beta, zeta) and its ingredients on the 3-chart."""

    def __init__(self, weights: Weights):
        self.weights = weights
        self.chart = su2_chart()
        L = lift(weights)
        self.z = scalar(3, lambda x: L(x)[0])
        self.w = scalar(3, lambda x: L(x)[1])
        self.U = scalar(3, lambda x: scr_u(*L(x), weights))
        self.V = scalar(3, lambda x: scr_v(*L(x), weights))
        dz, dw = d(self.z), d(self.w)
        zf = lambda x: L(x)[0]
        wf = lambda x: L(x)[1]
        # Maurer-Cartan components
        self.phi_form = dw * zf - dz * wf
        self.kappa = (dz * (lambda x: 1j * ad.conj(zf(x)))) + (dw * (lambda x: 1j * ad.conj(wf(x))))
        Uf = lambda x: scr_u(*L(x), weights)
        Vf = lambda x: scr_v(*L(x), weights)
        self.omega = self.phi_form * Uf - self.kappa * Vf
        self.zeta = self.kappa * (lambda x: 1.0 / Uf(x))
        self.alpha = self.omega.real()
        self.beta = self.omega.imag()
        self._L, self._U = L, Uf

    def curvature(self, x):
        return 2.0 * self.weights.n / self._U(x) ** 3

    def structure_residuals(self, x) -> dict[str, float]:
        from .forms import max_abs

        n = self.weights.n
        om, ze = self.omega, self.zeta
        r1 = d(om) + ((ze ^ om) * (1j * n))
        r2 = d(ze) + ((om ^ om.conj()) * (lambda y: 1j * self.curvature(y) / (2 * n)))
        r3 = d(ze) + ((self.alpha ^ self.beta) * (lambda y: self.curvature(y) / n))
        return {"d_omega": max_abs(r1(x)), "d_zeta": max_abs(r2(x)), "d_zeta_real": max_abs(r3(x))}

    def identity_residuals(self, x) -> dict[str, float]:
        """dz + (conj w / U) omega + i a1 z zeta and the analogue for w."""
        from .forms import max_abs

        a1, a2 = self.weights.a1, self.weights.a2
        L, Uf = self._L, self._U
        rz = d(self.z) + self.omega * (lambda y: ad.conj(L(y)[1]) / Uf(y)) + self.zeta * (lambda y: 1j * a1 * L(y)[0])
        rw = d(self.w) - self.omega * (lambda y: ad.conj(L(y)[0]) / Uf(y)) + self.zeta * (lambda y: 1j * a2 * L(y)[1])
        return {"dz": max_abs(rz(x)), "dw": max_abs(rw(x))}

    def omega_decomposition_residual(self, x) -> float:
        """omega - (U phi - V kappa) from independently computed pieces."""
        from .forms import max_abs

        # recompute U, V from the scalar fields to avoid reusing the same lambdas
        alt = self.phi_form * (lambda y: self.U(y)[()]) - self.kappa * (lambda y: self.V(y)[()])
        return max_abs((self.omega - alt)(x))

    def equivariance_residuals(self, x, theta: float) -> dict[str, float]:
        """T_theta acts by t -> t + theta; compare pulled-back forms."""
        from .forms import max_abs

        n = self.weights.n
        shift = lambda y: [y[0], y[1], y[2] + theta]
        om_t = pullback(shift, 3, self.omega)
        ze_t = pullback(shift, 3, self.zeta)
        r1 = om_t - self.omega * np.exp(-1j * n * theta)
        r2 = ze_t - self.zeta
        return {"omega": max_abs(r1(x)), "zeta": max_abs(r2(x))}

    def section_metric(self) -> MetricField:
        """Pullback of alpha^2 + beta^2 along the t = 0 section."""
        sec = lambda y: [y[0], y[1], 0.0 * y[0]]
        a = pullback(sec, 2, self.alpha)
        b = pullback(sec, 2, self.beta)

        def fn(y):
            ca, cb = a(y), b(y)
            A = [ca.get((0,), 0.0), ca.get((1,), 0.0)]
            B = [cb.get((0,), 0.0), cb.get((1,), 0.0)]
            return [[A[i] * A[j] + B[i] * B[j] for j in range(2)] for i in range(2)]

        return MetricField(2, fn)

    def volume_residual(self, x) -> float:
        """pi^* (area form of chart metric) - alpha ^ beta."""
        from .forms import max_abs

        proj = lambda y: [y[0], y[1]]
        vol = pullback(proj, 3, area_form(chart_metric(self.weights)))
        return max_abs((vol - (self.alpha ^ self.beta))(x))


# ---------------------------------------------------------------------------
# metrics of revolution


@dataclass
class RevolutionMetric:
    """``scale * ((n/2 + h(cos r))^2 dr^2 + sin^2 r dphi^2)``."""

    weights: Weights
    h: Callable[[Any], Any]
    scale: float = 0.25

    def __post_init__(self):
        xs = np.linspace(-1, 1, 41)
        hv = np.asarray(self.h(xs))
        if np.max(np.abs(hv + np.asarray(self.h(-xs)))) > 1e-12:
            raise ValueError("h must be odd")
        if abs(float(self.h(1.0)) - 0.5 * (self.weights.a1 - self.weights.a2)) > 1e-12:
            raise ValueError("h(1) must equal (a1 - a2)/2")
        if np.max(np.abs(hv)) >= 0.5 * self.weights.n:
            raise ValueError("|h| must stay below (a1 + a2)/2")

    def f(self, r):
        return math.sqrt(self.scale) * (0.5 * self.weights.n + self.h(ad.cos(r)))

    def m(self, r):
        return math.sqrt(self.scale) * ad.sin(r)

    def metric(self) -> MetricField:
        return MetricField(2, lambda x: [[self.f(x[0]) ** 2, 0.0 * x[0]], [0.0 * x[0], self.m(x[0]) ** 2]])

    def connection(self) -> AffineConnection:
        """Closed-form Christoffels of a metric of revolution."""

        def fn(x):
            r = x[0]
            f, fp = ad.derivative(self.f, r)
            m, mp = ad.derivative(self.m, r)
            z = 0.0 * r
            return [
                [[fp / f, z], [z, -m * mp / f ** 2]],
                [[z, mp / m], [mp / m, z]],
            ]

        return AffineConnection(2, fn)

    def christoffel_array(self) -> Callable[[np.ndarray], np.ndarray]:
        """Fast numeric Christoffels ``G[k, i, j]`` at a single point."""
        conn = self.connection()
        return lambda x: np.array(conn([float(x[0]), float(x[1])]), dtype=float)

    def clairaut(self, y: np.ndarray) -> np.ndarray:
        """m(r)^2 phi' normalized to the g_h convention sin^2 r phi'."""
        return np.sin(y[0]) ** 2 * y[3]

    def speed2(self, y: np.ndarray) -> np.ndarray:
        return np.asarray(self.f(y[0])) ** 2 * y[2] ** 2 + np.asarray(self.m(y[0])) ** 2 * y[3] ** 2


def fubini_study(weights: Weights) -> RevolutionMetric:
    k = 0.5 * (weights.a1 - weights.a2)
    return RevolutionMetric(weights, lambda x: k * x, 0.25)


def chart_metric(weights: Weights) -> MetricField:
    """(U^2/4) dr^2 + (sin^2 r / 4) dphi^2."""
    return fubini_study(weights).metric()


# ---------------------------------------------------------------------------
# geodesic flows


def a_flow(z, w, sigma):
    """Right multiplication by exp(sigma e1) in (z, w) coordinates."""
    c, s = np.cos(sigma), np.sin(sigma)
    return z * c - np.conj(w) * s, w * c + np.conj(z) * s


def su2_geodesic_orbit(p: SU2Point, s_values: np.ndarray, weights: Weights) -> tuple[np.ndarray, np.ndarray]:
    """Points of the A-flow through ``p`` at arclengths ``s_values``."""
    z0, w0 = p.z, p.w

    def rhs(_s, y):
        z, w = a_flow(z0, w0, y[0])
        return np.array([1.0 / float(scr_u(z, w, weights))])

    s_values = np.asarray(s_values, dtype=float)
    traj = flow.integrate(rhs, np.array([0.0]), float(np.max(s_values)) + 1e-9)
    from scipy.interpolate import CubicHermiteSpline

    # dense re-evaluation through a Hermite interpolant of sigma(s)
    sig = traj.y[0]
    dsig = np.array([rhs(0, [sv])[0] for sv in sig])
    spline = CubicHermiteSpline(traj.t, sig, dsig)
    sigma = spline(s_values)
    return a_flow(z0, w0, sigma)


def a_flow_period(p: SU2Point, weights: Weights) -> float:
    """Arclength at which the A-flow closes (sigma reaches 2 pi)."""
    z0, w0 = p.z, p.w

    def rhs(_s, y):
        z, w = a_flow(z0, w0, y[0])
        return np.array([1.0 / float(scr_u(z, w, weights))])

    traj = flow.integrate(rhs, np.array([0.0]), 4 * math.pi * weights.n,
                          event=lambda s, y: y[0] - 2 * math.pi, stop_after=1)
    if traj.status != "ok":
        raise RuntimeError(f"A-flow integration failed: {traj.status}")
    return traj.events[0][0]


def a_flow_chart_velocity(p: SU2Point, weights: Weights) -> tuple[np.ndarray, np.ndarray]:
    """Chart position and d/ds of the projected A-flow at s = 0."""

    def proj(sig):
        z, w = a_flow(p.z, p.w, sig)
        r = 2.0 * ad.arccos(ad.absolute(z))
        # phi = a1 arg w - a2 arg z, differentiated through log
        phi = ad.imag(weights.a1 * ad.log(w) - weights.a2 * ad.log(z))
        return [r, phi]

    sig = ad.seed([0.0])[0]
    out = proj(sig)
    r0, phi0 = project(p.z, p.w, weights)
    U = float(scr_u(p.z, p.w, weights))
    vel = np.array([out[0].der[0], out[1].der[0]], dtype=float) / U
    return np.array([r0, phi0]), vel


def chart_geodesic(
    christoffel: Callable[[np.ndarray], np.ndarray],
    x0: Sequence[float],
    v0: Sequence[float],
    T: float,
    eps: float = EPS_POLE,
    **kw,
) -> flow.Trajectory:
    """Geodesic of a 2D connection; stops with ``left-domain`` near a pole."""
    y0 = np.array([x0[0], x0[1], v0[0], v0[1]], dtype=float)
    guard = lambda y: eps < y[0] < math.pi - eps
    return flow.integrate(flow.geodesic_rhs(christoffel), y0, T, guard=guard, **kw)


def return_angle(
    christoffel: Callable[[np.ndarray], np.ndarray],
    r_m: float,
    phi_dot: float | None = None,
    t_max: float = 400.0,
    eps: float = EPS_POLE,
) -> float:
    """phi-advance between successive minima of r, starting at r = r_m.

    The initial velocity is purely azimuthal, so the start is a turning
    point of the radial oscillation. The default azimuthal rate
    ``2 / sin r_m`` is unit speed for the chart metric; any positive rate
    gives the same image for an affine connection.
    """
    if not eps < r_m < math.pi / 2:
        raise ValueError("turning radius must lie in (eps, pi/2)")
    if phi_dot is None:
        phi_dot = 2.0 / math.sin(r_m)
    y0 = np.array([r_m, 0.0, 0.0, phi_dot])
    rhs = flow.geodesic_rhs(christoffel)
    traj = flow.integrate(rhs, y0, t_max, event=lambda t, y: y[2], direction=1, stop_after=1,
                          guard=lambda y: eps < y[0] < math.pi - eps)
    if traj.status != "ok":
        raise RuntimeError(f"return angle integration: {traj.status}")
    return float(traj.events[0][1][1])


def clairaut_turning_radius(c: float) -> float:
    """Turning radius r_m with sin r_m = c."""
    if not 0 < c < 1:
        raise ValueError("Clairaut value must lie in (0, 1)")
    return math.asin(c)


def embed_profile(weights: Weights, n_samples: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Profile curve of the surface of revolution isometric to the chart metric."""
    if n_samples < 16:
        raise ValueError("need at least 16 samples")
    r = np.linspace(0.0, math.pi, n_samples)
    radius = np.sin(r) / 2
    integrand = lambda s: math.sqrt(max(float(u_of_r(s, weights)) ** 2 / 4 - (math.cos(s) / 2) ** 2, 0.0))
    pieces = [quad(integrand, a, b, epsabs=1e-13, epsrel=1e-13)[0] for a, b in zip(r[:-1], r[1:])]
    height = np.concatenate([[0.0], np.cumsum(pieces)])
    return r, radius, height
