"""Weyl structures on a 2-chart: connection, gauge, natural gauge, Besse test."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from . import ad, cheb, geometry
from .arith import rational_fit
from .forms import (
    AffineConnection,
    Form,
    MetricField,
    codifferential,
    covariant_derivative_metric,
    d,
    gauss_curvature_of_metric,
    inverse2,
    levi_civita,
    max_abs,
    ricci,
    scalar,
    zero,
)


@dataclass
class WeylPair:
    """A metric together with a 1-form, modulo (e^{2u} g, theta + du)."""

    g: MetricField
    theta: Form

    def __post_init__(self):
        if self.g.dim != 2 or self.theta.dim != 2 or self.theta.degree != 1:
            raise ValueError("WeylPair lives on a 2-chart with a 1-form theta")

    def theta_components(self, x) -> list[Any]:
        c = self.theta(x)
        return [c.get((0,), 0.0 * x[0]), c.get((1,), 0.0 * x[0])]

    def positivity(self) -> Form:
        """K_g - delta_g theta as a 0-form."""
        return gauss_curvature_of_metric(self.g) - codifferential(self.g, self.theta)


def riemannian(g: MetricField) -> WeylPair:
    return WeylPair(g, zero(1, 2))


def weyl_connection(p: WeylPair) -> AffineConnection:
    """Levi-Civita of g plus g_ij theta^k - delta^k_i theta_j - delta^k_j theta_i."""
    lc = levi_civita(p.g)

    def fn(x):
        G = lc(x)
        g = p.g(x)
        gi = inverse2(g)
        th = p.theta_components(x)
        up = [gi[k][0] * th[0] + gi[k][1] * th[1] for k in range(2)]
        return [
            [
                [
                    G[k][i][j] + g[i][j] * up[k] - (th[j] if k == i else 0.0) - (th[i] if k == j else 0.0)
                    for j in range(2)
                ]
                for i in range(2)
            ]
            for k in range(2)
        ]

    return AffineConnection(2, fn)


def metricity_residual(p: WeylPair, x) -> float:
    """max |nabla g - 2 theta (x) g| for the Weyl connection."""
    Dg = covariant_derivative_metric(weyl_connection(p), p.g, x)
    g = p.g(x)
    th = p.theta_components(x)
    res = [[[Dg[k][i][j] - 2.0 * th[k] * g[i][j] for j in range(2)] for i in range(2)] for k in range(2)]
    return max_abs(res)


def gauge_transform(p: WeylPair, u: Callable[[Sequence[Any]], Any]) -> WeylPair:
    return WeylPair(p.g.conformal(u), p.theta + d(scalar(2, u)))


class PositivityError(ValueError):
    pass


def natural_gauge_factor(p: WeylPair) -> Callable[[Sequence[Any]], Any]:
    """u = 1/2 ln(K - delta theta) as an AD-capable scalar function."""
    pos = p.positivity()

    def u(x):
        return 0.5 * ad.log(pos(x)[()])

    return u


def natural_gauge(p: WeylPair, grid: Sequence[np.ndarray] | None = None,
                  radial_fit: tuple[float, float] | None = None, degree: int = 96) -> WeylPair:
    """Gauge with K - delta theta = 1.

    ``grid`` is checked for positivity first. If ``radial_fit = (lo, hi)``
    the pair is assumed rotationally symmetric and ``u`` is replaced by a
    Chebyshev interpolant in ``r`` (keeps the output cheap to differentiate).
    """
    pos = p.positivity()
    if grid is not None:
        vals = np.asarray(ad.value(pos(list(grid))[()]))
        bad = np.flatnonzero(~(np.real(vals) > 0))
        if bad.size:
            i = bad[0]
            raise PositivityError(
                f"K - delta theta = {vals[i]:.3e} <= 0 at r={np.asarray(grid[0]).ravel()[i]:.6f}, "
                f"phi={np.asarray(grid[1]).ravel()[i]:.6f}"
            )
    u = natural_gauge_factor(p)
    if radial_fit is not None:
        lo, hi = radial_fit
        ufit = cheb.fit(lambda r: np.real(ad.value(u([r, 0.0 * r]))), lo, hi, degree)
        u = lambda x: ufit(x[0])
    return gauge_transform(p, u)


def ricci_weyl(p: WeylPair, x) -> tuple[list, Any]:
    """Closed-form Ricci pieces ``((K - delta theta) g, skew)``.

    ``skew`` is the (0, 1) entry of the antisymmetric part of Ric as a
    bilinear form. It equals the dx^dy coefficient of d theta; written with
    the wedge normalization alpha^beta = (alpha(x)beta - beta(x)alpha)/2 this
    is the form 2 d theta.
    """
    pos = p.positivity()(x)[()]
    g = p.g(x)
    sym = [[pos * g[i][j] for j in range(2)] for i in range(2)]
    dth = d(p.theta)(x).get((0, 1), 0.0 * x[0])
    return sym, dth


def ricci_direct(p: WeylPair, x) -> tuple[list, Any]:
    """Same pieces as :func:`ricci_weyl`, from the curvature tensor of the
    Weyl connection."""
    Ric = ricci(weyl_connection(p), x)
    sym = [[0.5 * (Ric[i][j] + Ric[j][i]) for j in range(2)] for i in range(2)]
    skew = 0.5 * (Ric[0][1] - Ric[1][0])
    return sym, skew


def is_positive(p: WeylPair, grid: Sequence[np.ndarray]) -> tuple[bool, float]:
    vals = np.real(np.asarray(ad.value(p.positivity()(list(grid))[()])))
    m = float(np.min(vals))
    return bool(m > 0), m


# ---------------------------------------------------------------------------
# geodesics


def christoffel_array(c: AffineConnection) -> Callable[[np.ndarray], np.ndarray]:
    """Direct (AD-backed) numeric Christoffels at a single point."""
    return lambda x: np.real(np.array(ad.value(c([float(x[0]), float(x[1])])), dtype=complex))


@dataclass
class RadialConnection:
    """Chebyshev tabulation of a rotationally symmetric connection.

    ``sin(r) * G^k_ij(r)`` is interpolated (the factor removes the 1/sin r
    behaviour of polar Christoffels), so evaluation is a handful of
    polynomial sums.
    """

    fits: list  # fits[k][i][j] (RadialFit)
    lo: float
    hi: float
    fit_error: float
    phi_spread: float

    def __call__(self, x) -> np.ndarray:
        r = float(x[0])
        s = math.sin(r)
        return np.array([[[self.fits[k][i][j](r) / s for j in range(2)] for i in range(2)] for k in range(2)])


def tabulate_radial(c: AffineConnection, lo: float = 0.02, hi: float = math.pi - 0.02,
                    degree: int = 120) -> RadialConnection:
    r = cheb.nodes(lo, hi, degree)
    G = c([r, 0.0 * r])
    G2 = c([r, 0.0 * r + 1.234])
    spread = 0.0
    fits = [[[None, None], [None, None]] for _ in range(2)]
    for k in range(2):
        for i in range(2):
            for j in range(2):
                v = np.real(np.asarray(ad.value(G[k][i][j]), dtype=complex)) * np.ones_like(r)
                v2 = np.real(np.asarray(ad.value(G2[k][i][j]), dtype=complex)) * np.ones_like(r)
                spread = max(spread, float(np.max(np.abs(v - v2))))
                fits[k][i][j] = cheb.fit_values(r, np.sin(r) * v, lo, hi)
    # validation against direct evaluation off the nodes
    rc = np.linspace(lo, hi, 211)[1:-1]
    Gc = c([rc, 0.0 * rc])
    err = 0.0
    for k in range(2):
        for i in range(2):
            for j in range(2):
                exact = np.real(np.asarray(ad.value(Gc[k][i][j]), dtype=complex)) * np.sin(rc)
                err = max(err, float(np.max(np.abs(fits[k][i][j](rc) - exact))))
    return RadialConnection(fits, lo, hi, err, spread)


def weyl_geodesic(christoffel: Callable[[np.ndarray], np.ndarray], x0, v0, T: float, **kw):
    """Solve x'' + G(x', x') = 0 in the chart."""
    return geometry.chart_geodesic(christoffel, x0, v0, T, **kw)


@dataclass
class BesseReport:
    angles: np.ndarray
    clairaut: np.ndarray
    mean: float
    spread: float
    ratio: Any  # Fraction or None
    failures: list

    @property
    def closing(self) -> bool:
        return not self.failures

    def as_dict(self) -> dict:
        return {
            "mean_return_angle": self.mean,
            "spread": self.spread,
            "ratio_to_2pi": None if self.ratio is None else str(self.ratio),
            "n_initial_conditions": int(len(self.clairaut)),
            "failures": self.failures,
        }


def besse_report(christoffel: Callable[[np.ndarray], np.ndarray], clairaut_values: Sequence[float] | None = None,
                 n: int = 20, t_max: float = 400.0) -> BesseReport:
    """Return angles for turning radii arcsin(c), c spanning [0.1, 0.95]."""
    cs = np.linspace(0.1, 0.95, n) if clairaut_values is None else np.asarray(clairaut_values, dtype=float)
    angles, failures = [], []
    for c in cs:
        try:
            angles.append(geometry.return_angle(christoffel, math.asin(c), t_max=t_max))
        except (RuntimeError, ValueError) as exc:
            failures.append({"clairaut": float(c), "reason": str(exc)})
            angles.append(float("nan"))
    a = np.array(angles)
    good = a[np.isfinite(a)]
    if good.size:
        mean, spread = float(np.mean(good)), float(np.ptp(good))
        ratio = rational_fit(mean / (2 * math.pi))
    else:
        mean, spread, ratio = float("nan"), float("inf"), None
    return BesseReport(a, cs, mean, spread, ratio, failures)
