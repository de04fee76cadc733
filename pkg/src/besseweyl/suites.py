"""Verification suites: one list of residual checks per module.

Every suite carries at least one negative control, a deliberately corrupted
input whose residual must exceed its threshold (``expect="large"``).
"""

from __future__ import annotations

import cmath
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

import numpy as np

from . import ad, deform, duality, geometry, projective, twistor, weyl
from .arith import (
    Weights,
    is_admissible,
    length_spectrum,
    seifert_quotient_order,
    spindle_from_finsler,
)
from .forms import (
    EPS_POLE,
    Form,
    MetricField,
    area_form,
    codifferential,
    d,
    euclidean,
    gauss_curvature_of_metric,
    hodge_star,
    laplacian,
    levi_civita,
    max_abs,
    one_form,
    pullback,
    scalar,
    spindle_chart,
)

SUITES = ("arith", "forms", "geometry", "weyl", "duality", "twistor", "projective")
NEGATIVE_FLOOR = 1e-2


@dataclass
class Config:
    weights: Weights = field(default_factory=lambda: Weights(3, 1))
    lam: complex = 1.1
    grid: int = 32
    samples: int = 1000
    seed: int = 20240601
    eps_pole: float = EPS_POLE
    tol_structure: float = 1e-7
    tol_roundtrip: float = 1e-8
    tol_besse: float = 1e-4
    tol_identity: float = 1e-9
    threads: int = 1
    fmt: str = "json"

    def __post_init__(self):
        for name in ("tol_structure", "tol_roundtrip", "tol_besse", "tol_identity", "eps_pole"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.grid < 8:
            raise ValueError("grid must have at least 8 points per axis")
        if self.samples < 1:
            raise ValueError("samples must be positive")

    def rng(self, salt: int = 0) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64([self.seed, salt]))


@dataclass
class Check:
    name: str
    residual: float
    threshold: float
    expect: str = "small"  # "large" for negative controls

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.residual):
            return False
        if self.expect == "large":
            return self.residual > self.threshold
        return self.residual <= self.threshold

    def as_dict(self) -> dict:
        out = {"name": self.name, "residual": self.residual, "threshold": self.threshold, "pass": self.passed}
        if self.expect == "large":
            out["negative_control"] = True
        return out


@dataclass
class Report:
    suite: str
    checks: list[Check]
    weights: Weights
    lam: complex | None
    seed: int
    grid: int
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]


def small(name, residual, threshold) -> Check:
    return Check(name, float(residual), float(threshold))


def large(name, residual, threshold=NEGATIVE_FLOOR) -> Check:
    return Check(name, float(residual), float(threshold), "large")


def _errcheck(name: str, fn: Callable[[], Any], exc: type) -> Check:
    """Passes (residual 0) iff ``fn`` raises ``exc``."""
    try:
        fn()
    except exc:
        return small(name, 0.0, 0.0)
    return small(name, 1.0, 0.0)


def _real(v) -> np.ndarray:
    return np.real(np.asarray(ad.value(v), dtype=complex))


# ---------------------------------------------------------------------------


def suite_arith(cfg: Config) -> list[Check]:
    out = []
    table = {(3, 1): True, (2, 1): False, (6, 2): False, (4, 2): True, (1, 1): True, (2, 2): False, (3, 3): False}
    bad = sum(is_admissible(Weights(*k)) != v for k, v in table.items())
    out.append(small("is_admissible table", bad, 0))
    bad = 0
    for k in range(1, 2001):
        for a1 in range(1, 40, 3):
            for a2 in range(1, a1 + 1, 2):
                if k % seifert_quotient_order(k, Weights(a1, a2)):
                    bad += 1
    out.append(small("seifert order divides k", bad, 0))
    bad = 0
    for a1 in range(1, 60):
        for a2 in range(1, a1 + 1):
            w = Weights(a1, a2)
            if is_admissible(w) and w.c == 1:
                s = length_spectrum(w)
                if spindle_from_finsler(s.p, s.q) != w:
                    bad += 1
    out.append(small("spindle_from_finsler round trip", bad, 0))
    expected = {(1, 1): Fraction(2), (3, 1): Fraction(4, 3), (5, 3): Fraction(8, 5)}
    err = max(abs(length_spectrum(Weights(*k)).shortest.pi_multiple - v) for k, v in expected.items())
    out.append(small("shortest lengths 2pi, 4pi/3, 8pi/5", float(err), 0))
    w = cfg.weights
    if w.c == 1 and is_admissible(w):
        s = length_spectrum(w)
        out.append(small("regular length 2pi p", abs(s.by_role("regular").pi_multiple - 2 * w.p), 0))
    # negative control: swapping the roles of a1 and a2 changes the shortest length
    wrong = Fraction(w.a1 + w.a2, w.a2) if w.a1 != w.a2 else Fraction(w.a1 + w.a2 + 1, w.a1)
    out.append(large("control: swapped-weight spectrum",
                     abs(float(wrong) - float(length_spectrum(Weights(3, 1)).shortest.pi_multiple))))
    out.append(_errcheck("c = 2 spectrum rejected", lambda: length_spectrum(Weights(2, 2)), ValueError))
    return out


def suite_forms(cfg: Config) -> list[Check]:
    rng = cfg.rng(1)
    out = []
    n = cfg.samples
    x2 = [rng.uniform(-1, 1, n), rng.uniform(-1, 1, n)]
    x3 = [rng.uniform(-1, 1, n) for _ in range(3)]
    c = rng.normal(size=6)
    f = scalar(3, lambda x: ad.sin(c[0] * x[0] + x[1] * x[2]) * ad.exp(c[1] * x[1]))
    a = one_form(3, lambda x: [ad.cos(x[1] * c[2]) * x[2], x[0] ** 2 * ad.sin(x[2]), ad.exp(c[3] * x[0] * x[1])])
    b = one_form(3, lambda x: [x[1] * x[2], ad.sin(c[4] * x[0]), x[0] * ad.cos(c[5] * x[1])])
    out.append(small("d d f = 0", max_abs(d(d(f))(x3)), 1e-10))
    out.append(small("d d a = 0", max_abs(d(d(a))(x3)), 1e-10))
    lhs = d(a ^ b)
    rhs = (d(a) ^ b) - (a ^ d(b))
    out.append(small("Leibniz", max_abs((lhs - rhs)(x3)), 1e-10))
    fmap = lambda y: [y[0] * y[1], ad.sin(y[0]) + y[1], y[0] - y[1] ** 2]
    nat = pullback(fmap, 2, d(a)) - d(pullback(fmap, 2, a))
    nat2 = pullback(fmap, 2, a ^ b) - (pullback(fmap, 2, a) ^ pullback(fmap, 2, b))
    out.append(small("pullback commutes with d", max_abs(nat(x2)), 1e-9))
    out.append(small("pullback commutes with wedge", max_abs(nat2(x2)), 1e-9))
    E = euclidean()
    xdy = one_form(2, lambda x: [0.0 * x[0], x[0]])
    out.append(small("d(x dy) = dx^dy", max_abs((d(xdy) - Form(2, 2, lambda x: {(0, 1): 1.0}))(x2)), 1e-14))
    star_dx = hodge_star(E, one_form(2, lambda x: [1.0 + 0 * x[0], 0.0 * x[0]]))
    out.append(small("star dx = dy", max_abs((star_dx - one_form(2, lambda x: [0.0 * x[0], 1.0 + 0 * x[0]]))(x2)),
                     1e-14))
    w = cfg.weights
    g = geometry.chart_metric(w)
    chart = spindle_chart(cfg.eps_pole)
    xs = chart.sample(n, rng)
    th = one_form(2, lambda x: [ad.sin(x[0]) * ad.cos(x[1]), ad.sin(x[0]) ** 2 * (1 + ad.sin(2 * x[1]))])
    out.append(small("star star = -1", max_abs((hodge_star(g, hodge_star(g, th)) + th)(xs)), 1e-12))
    vol = area_form(g)(xs)[(0, 1)]
    ustar = geometry.u_of_r(xs[0], w) * np.sin(xs[0]) / 4
    out.append(small("star 1 = U sin r / 4", float(np.max(np.abs(_real(vol) - ustar))), 1e-12))
    rel = np.max(np.abs(_real(codifferential(g.scaled(4.0), th)(xs)[()]) - 0.25 * _real(codifferential(g, th)(xs)[()])))
    out.append(small("delta_4g = delta_g / 4", rel, 1e-10))
    # conformal curvature identity K_{e^{2u}g} = e^{-2u}(K_g - Delta_g u)
    u = lambda x: 0.3 * ad.sin(x[0]) ** 2 * ad.cos(x[1]) + 0.1 * ad.cos(x[0])
    K2 = _real(gauss_curvature_of_metric(g.conformal(u))(xs)[()])
    K1 = _real(gauss_curvature_of_metric(g)(xs)[()])
    Lu = _real(laplacian(g, scalar(2, u))(xs)[()])
    e = np.exp(-2 * _real(u(xs)))
    err = np.max(np.abs(K2 - e * (K1 - Lu)) / np.abs(K2))
    out.append(small("conformal curvature identity", err, 1e-6))
    sph = MetricField(2, lambda x: [[1.0 + 0 * x[0], 0 * x[0]], [0 * x[0], ad.sin(x[0]) ** 2]])
    out.append(small("K(unit sphere) = 1", float(np.max(np.abs(_real(gauss_curvature_of_metric(sph)(xs)[()]) - 1))),
                     1e-10))
    # negative controls: the identity with the wrong sign of the Laplacian, and the wrong Hodge square
    bad = np.max(np.abs(K2 - e * (K1 + Lu)) / np.abs(K2))
    out.append(large("control: conformal identity with +Delta u", bad))
    out.append(large("control: star star = +1", max_abs((hodge_star(g, hodge_star(g, th)) - th)(xs))))
    return out


def suite_geometry(cfg: Config) -> list[Check]:
    rng = cfg.rng(2)
    out = []
    r = np.linspace(cfg.eps_pole, math.pi - cfg.eps_pole, 100)
    for wt in ((1, 1), (3, 1), (5, 3), (7, 5)):
        w = Weights(*wt)
        K = _real(gauss_curvature_of_metric(geometry.chart_metric(w))([r, 0 * r])[()])
        Kf = geometry.gauss_curvature_formula(r, w)
        out.append(small(f"curvature formula {w}", float(np.max(np.abs(K / Kf - 1))), 1e-8))
    w = cfg.weights
    cf = geometry.SU2Coframe(w)
    x3 = cf.chart.sample(cfg.samples, rng)
    sr = cf.structure_residuals(x3)
    out.append(small("SU(2) structure equations", max(sr.values()), cfg.tol_identity))
    ir = cf.identity_residuals(x3)
    out.append(small("dz, dw identities", max(ir.values()), 1e-10))
    er = cf.equivariance_residuals(x3, 0.731)
    out.append(small("circle equivariance", max(er.values()), 1e-10))
    out.append(small("omega decomposition", cf.omega_decomposition_residual(x3), 1e-10))
    out.append(small("pi^* area = alpha^beta", cf.volume_residual(x3), 1e-10))
    xb = [x3[0], x3[1]]
    gs, gc = cf.section_metric()(xb), geometry.chart_metric(w)(xb)
    out.append(small("chart metric = section pullback",
                     max(float(np.max(np.abs(_real(gs[i][j]) - _real(gc[i][j])))) for i in range(2) for j in range(2)),
                     1e-10))
    per = 0.0
    for _ in range(20):
        p = geometry.SU2Point.random(rng)
        per = max(per, abs(geometry.a_flow_period(p, w) - math.pi * w.n))
    out.append(small("A-flow period = pi (a1 + a2)", per, 1e-6))
    Gm = geometry.fubini_study(w).christoffel_array()
    angles = [geometry.return_angle(Gm, math.asin(c)) for c in np.linspace(0.15, 0.95, 6)]
    frac = Fraction(float(np.mean(angles)) / (2 * math.pi)).limit_denominator(50)
    out.append(small("return angles constant", float(np.ptp(angles)), 1e-6))
    out.append(small(f"return angle = 2pi * {frac}", abs(np.mean(angles) - 2 * math.pi * float(frac)), 1e-6))
    # negative control: curvature formula with a1 + a2 replaced by a1 + a2 + 1
    K = _real(gauss_curvature_of_metric(geometry.chart_metric(w))([r, 0 * r])[()])
    wrong = 2 * (w.n + 1) / geometry.u_of_r(r, w) ** 3
    out.append(large("control: curvature formula with n + 1", float(np.max(np.abs(K / wrong - 1)))))
    return out


def suite_weyl(cfg: Config) -> list[Check]:
    rng = cfg.rng(3)
    out = []
    w = cfg.weights
    g = geometry.chart_metric(w)
    chart = spindle_chart(0.02)
    xs = chart.sample(cfg.samples, rng)
    th = one_form(2, lambda x: [0.1 * ad.sin(x[0]) * ad.cos(x[1]), 0.05 * ad.sin(x[0]) ** 2])
    p = weyl.WeylPair(g, th)
    out.append(small("metricity nabla g = 2 theta g", weyl.metricity_residual(p, xs), 1e-10))
    s1, k1 = weyl.ricci_weyl(p, xs)
    s2, k2 = weyl.ricci_direct(p, xs)
    err = max(max(float(np.max(np.abs(_real(s1[i][j]) - _real(s2[i][j])))) for i in range(2) for j in range(2)),
              float(np.max(np.abs(_real(k1) - _real(k2)))))
    out.append(small("Ricci closed form vs curvature tensor", err, 1e-9))
    u = lambda x: 0.2 * ad.cos(x[0]) + 0.1 * ad.sin(x[0]) ** 2 * ad.sin(x[1])
    q = weyl.gauge_transform(p, u)
    G1, G2 = weyl.weyl_connection(p)(xs), weyl.weyl_connection(q)(xs)
    out.append(small("connection gauge invariant", max_abs([[[_real(G1[k][i][j]) - _real(G2[k][i][j])
                                                              for j in range(2)] for i in range(2)] for k in range(2)]),
                     1e-10))
    ths = one_form(2, lambda x: [0.0 * x[0], 0.05 * ad.sin(x[0]) ** 2])
    ng = weyl.natural_gauge(weyl.WeylPair(g, ths), grid=chart.grid(cfg.grid), radial_fit=(0.01, math.pi - 0.01))
    pos = _real(ng.positivity()(xs)[()])
    out.append(small("natural gauge K - delta theta = 1", float(np.max(np.abs(pos - 1))), 1e-6))
    rep = weyl.besse_report(geometry.fubini_study(w).christoffel_array(), n=8)
    out.append(small("Besse spread (chart metric)", rep.spread if rep.closing else math.inf, cfg.tol_besse))
    neg = weyl.WeylPair(g, one_form(2, lambda x: [3.0 * ad.cos(x[0]), 0.0 * x[0]]))
    out.append(_errcheck("positivity violation rejected",
                         lambda: weyl.natural_gauge(neg, grid=chart.grid(cfg.grid)), weyl.PositivityError))
    # negative controls: metricity with a doubled theta; a non-Besse metric of revolution
    Dg = weyl.covariant_derivative_metric(weyl.weyl_connection(p), g, xs)
    gm, tc = g(xs), p.theta_components(xs)
    bad = max_abs([[[Dg[k][i][j] - 4.0 * tc[k] * gm[i][j] for j in range(2)] for i in range(2)] for k in range(2)])
    out.append(large("control: metricity with 2 theta replaced by 4 theta", bad))
    bump = MetricField(2, lambda x: [[0.25 * (1 + 0.3 * ad.sin(x[0]) ** 2) + 0 * x[1], 0 * x[0]],
                                     [0 * x[0], 0.25 * ad.sin(x[0]) ** 2]])
    rep2 = weyl.besse_report(weyl.tabulate_radial(levi_civita(bump)), n=6)
    out.append(large("control: Besse spread of a non-Besse metric", rep2.spread))
    return out


def suite_duality(cfg: Config) -> list[Check]:
    rng = cfg.rng(4)
    out = []
    w = cfg.weights
    n = cfg.samples
    x3 = [rng.uniform(0.05, math.pi - 0.05, n), rng.uniform(0, 2 * math.pi, n), rng.uniform(0, 2 * math.pi, n)]
    xb = [x3[0], x3[1]]
    sph = MetricField(2, lambda x: [[1.0 + 0 * x[0], 0 * x[0]], [0 * x[0], ad.sin(x[0]) ** 2]])
    rs = duality.riemannian_coframe(sph).structure_residuals(x3)
    out.append(small("round sphere coframe", max(rs.values()), 1e-10))
    g = geometry.chart_metric(w)
    rc = duality.riemannian_coframe(g).structure_residuals(x3)
    out.append(small("chart metric coframe (incl. d zeta = -K alpha^beta)", max(rc.values()), 1e-9))
    th = one_form(2, lambda x: [0.0 * x[0], 0.05 * ad.sin(x[0]) ** 2])
    ng = weyl.natural_gauge(weyl.WeylPair(g, th), radial_fit=(0.01, math.pi - 0.01))
    fc = duality.finsler_from_weyl(ng, check_grid=xb)
    vs = duality.verify_structure(fc, x3)
    for key in ("d chi + eta^nu", "d eta + nu^(chi - I eta)", "d nu + (K chi - J nu)^eta"):
        out.append(small(f"Finsler structure: {key}", vs[key], cfg.tol_structure))
    out.append(small("Finsler K = 1 (extracted)", vs["K extracted - 1"], 1e-6))
    out.append(small("I, J direct vs extracted", max(vs["I extracted - I"], vs["J extracted - J"]), 1e-7))
    out.append(small("Bianchi XI = J", vs["XI - J"], 1e-6))
    out.append(small("Bianchi XJ = -I", vs["XJ + I"], 1e-6))
    gr, tr = duality.weyl_from_finsler(fc, xb)
    g0, t0 = duality.pair_components(ng, xb)
    out.append(small("duality involution", max(float(np.max(np.abs(gr - g0))), float(np.max(np.abs(tr - t0)))), 1e-6))
    fs = duality.finsler_lengths(ng, w)
    out.append(small("regular fibers independent of base point", fs.fiber_spread, 1e-8))
    for role, delta in fs.deltas().items():
        out.append(small(f"Finsler length ({role}) vs formula", delta, 1e-6))
    # negative control: a coframe built with the connection form reversed
    bad = duality.riemannian_coframe(g, flip_zeta=True).structure_residuals(x3)
    out.append(large("control: flipped zeta", max(bad.values())))
    out.append(_errcheck("non-natural gauge rejected",
                         lambda: duality.finsler_from_weyl(weyl.WeylPair(g, th), check_grid=xb),
                         duality.NaturalGaugeError))
    return out


def suite_twistor(cfg: Config, include_pipeline: bool = True) -> list[Check]:
    rng = cfg.rng(5)
    out = []
    for wt in {(1, 1), (3, 1), (5, 3), cfg.weights.as_tuple()}:
        w = Weights(*wt)
        worst = 0.0
        for _ in range(cfg.samples):
            t = twistor.TwistorPoint.random(rng)
            worst = max(worst, t.distance(twistor.xi_inverse(twistor.xi_forward(t, w), w), w))
        out.append(small(f"xi round trip {w}", worst, cfg.tol_roundtrip))
    w = cfg.weights
    tf = twistor.TwistorForms(w)
    x5 = twistor.twistor_chart_sample(cfg.samples, rng)
    hr = tf.residuals(x5)
    out.append(small("holomorphicity Pi1", hr["xi1^xi2^Pi1"], 1e-9))
    out.append(small("holomorphicity Pi2", hr["xi1^xi2^Pi2"], 1e-9))
    cr = tf.coefficient_residuals(x5)
    out.append(small("closed-form pullback coefficients", max(cr.values()), 1e-9))
    x0 = list(x5)
    x0[3], x0[4] = 0 * x0[3], 0 * x0[4]
    out.append(small("holomorphicity on mu = 0", max(tf.residuals(x0).values()), 1e-10))
    jr = 0.0
    for _ in range(100):
        z, ww = complex(*rng.normal(size=2)), complex(*rng.normal(size=2))
        mu = 0.95 * math.sqrt(rng.uniform()) * cmath.exp(2j * math.pi * rng.uniform())
        jr = max(jr, abs(twistor.jacobian_det(z, ww, mu) / twistor.jacobian_det_formula(z, ww, mu) - 1))
    out.append(small("Jacobian determinant", jr, 1e-8))
    ap, so3 = 0.0, 0.0
    for _ in range(cfg.samples):
        t = twistor.TwistorPoint.random(rng, 0.9)
        a = twistor.appendix_sphere_map(t.z, t.w, t.mu)
        ap = max(ap, a.distance(twistor.WeightedPoint(twistor.xi_hat(t.z, t.w, t.mu), (1, 1, 1))))
        R = twistor.adjoint(t.z, t.w)
        so3 = max(so3, float(np.max(np.abs(R @ R.T - np.eye(3)))), abs(np.linalg.det(R) - 1))
    out.append(small("appendix map = xi (weights 1,1)", ap, 1e-10))
    out.append(small("adjoint lies in SO(3)", so3, 1e-12))
    Jm = twistor.beltrami_matrix(0.3 - 0.4j)
    out.append(small("J(mu)^2 = -1", float(np.max(np.abs(Jm @ Jm + np.eye(2)))), 1e-12))
    lam = complex(cfg.lam)
    zz = rng.normal(size=cfg.samples) + 1j * rng.normal(size=cfg.samples)
    wz = rng.normal(size=cfg.samples) + 1j * rng.normal(size=cfg.samples)
    nrm = np.sqrt(np.abs(zz) ** 2 + np.abs(wz) ** 2)
    zz, wz = zz / nrm, wz / nrm
    mu = twistor.deformed_section(lam, zz, wz)
    out.append(small("section curve residual", float(np.max(twistor.curve_residual(lam, zz, wz, mu))), 1e-10))
    y = twistor.rotate_y(twistor.xi_hat(zz, wz, mu), 0.83)
    out.append(small("rotation preserves the curve", float(np.max(np.abs(y[1] ** 2 - lam * y[0] * y[2]))), 1e-10))
    s = 1 / math.sqrt(2)
    out.append(small("section value at z = w", abs(twistor.deformed_section(1.1, s, s + 0j) - (1.05 - math.sqrt(1.1)) / 0.05),
                     1e-12))
    ver = twistor.xi_forward(twistor.TwistorPoint(0.6, 0.8, 0.0), w)
    out.append(small("Veronese image off the real locus", float(twistor.on_real_locus(ver, w)), 0))
    out.append(small("j(1,0) on the real locus", float(not twistor.on_real_locus(twistor.WeightedPoint.of((1, 0, 1), w), w)), 0))
    out.append(_errcheck("no preimage on the real locus",
                         lambda: twistor.xi_inverse(twistor.WeightedPoint.of((1, 0, 1), w), w), twistor.NoPreimageError))
    out.append(_errcheck("section error far from lambda = 1",
                         lambda: twistor.deformed_section(-1.0, s, s + 0j), twistor.SectionError))
    # negative control: conj(mu) in place of mu
    neg = twistor.TwistorForms(w, conjugate_mu=True).residuals(x5)
    out.append(large("control: holomorphicity with conj(mu)", max(neg.values())))
    if include_pipeline:
        res = deform.run(w, lam, n_besse=10, seed=cfg.seed)
        for st in res.stages:
            out.append(Check(f"pipeline lambda={lam}: {st.name}", st.residual, st.threshold))
        if res.aborted:
            out.append(small(f"pipeline lambda={lam} completed", 1.0, 0.0))
    return out


def suite_projective(cfg: Config) -> list[Check]:
    rng = cfg.rng(6)
    out = []
    w = cfg.weights
    g = geometry.chart_metric(w)
    c = levi_civita(g)
    chart = spindle_chart(0.02)
    xs = chart.sample(cfg.samples, rng)
    R = projective.r_coefficients(c, xs)
    e1 = np.max(np.abs(_real(R[1]) - projective.r1_formula(xs[0], w)))
    e3 = np.max(np.abs(_real(R[3]) - projective.r3_formula(xs[0], w)))
    out.append(small("R1 closed form", e1, 1e-8))
    out.append(small("R3 closed form", e3, 1e-8))
    res = projective.projective_pde_residual(c, projective.killing_phi, xs)
    out.append(small("d/dphi is projective", max(max_abs(r) for r in res), 1e-8))
    psi = lambda x: [0.3 * ad.sin(x[0]) * ad.cos(x[1]), 0.2 * ad.cos(x[0]) + 0.1 * ad.sin(x[1])]
    res = projective.projective_pde_residual(c.shift(psi), projective.killing_phi, xs)
    out.append(small("PDE invariant under psi-shift", max(max_abs(r) for r in res), 1e-8))
    eq = projective.projective_equivalence_residual(c, c.shift(psi), xs)
    out.append(small("shift detected as projectively equivalent", eq.max_residual, 1e-10))
    r = xs[0]
    out.append(small("tau generator", projective.tau_generator_residual(r), 1e-10))
    out.append(small("tau composition", projective.tau_composition_residual(1.3, 0.7, r), 1e-10))
    u = lambda x: 0.2 * ad.cos(x[0]) + 0.1 * ad.sin(x[0]) ** 2 * ad.cos(x[1])
    sol = projective.weyl_from_conformal_in_class(g.conformal(u), c, xs)
    du = d(scalar(2, u))(xs)
    err = max(float(np.max(np.abs(sol.theta[0] - _real(du[(0,)])))), float(np.max(np.abs(sol.theta[1] - _real(du[(1,)])))))
    out.append(small("theta = du recovered for e^{2u} g", err, 1e-9))
    # negative controls: the tau field is not projective; unrelated connections are not equivalent
    res = projective.projective_pde_residual(c, projective.tau_field, xs)
    out.append(large("control: (sin 2r)/2 d/dr residual", max(max_abs(r) for r in res), 0.1))
    sph = MetricField(2, lambda x: [[1.0 + 0 * x[0], 0 * x[0]], [0 * x[0], ad.sin(x[0]) ** 2 * (1 + 0.5 * ad.cos(x[0]))]])
    out.append(large("control: inequivalent connections",
                     projective.projective_equivalence_residual(c, levi_civita(sph), xs).max_residual))
    return out


SUITE_FUNCS: dict[str, Callable[[Config], list[Check]]] = {
    "arith": suite_arith,
    "forms": suite_forms,
    "geometry": suite_geometry,
    "weyl": suite_weyl,
    "duality": suite_duality,
    "twistor": suite_twistor,
    "projective": suite_projective,
}


def run_suite(name: str, cfg: Config) -> Report:
    if name not in SUITE_FUNCS:
        raise KeyError(f"unknown suite '{name}'")
    t0 = time.perf_counter()
    try:
        checks = SUITE_FUNCS[name](cfg)
    except Exception as exc:  # a crashing suite is a failed check, not a traceback
        checks = [Check(f"suite raised {type(exc).__name__}: {exc}", math.inf, 0.0)]
    rep = Report(name, checks, cfg.weights, complex(cfg.lam) if name == "twistor" else None, cfg.seed, cfg.grid)
    rep.elapsed = time.perf_counter() - t0
    return rep


def _run_named(args):
    name, cfg = args
    return run_suite(name, cfg)


def run_suites(names: list[str], cfg: Config) -> list[Report]:
    if cfg.threads > 1 and len(names) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            return list(pool.map(_run_named, [(n, cfg) for n in names]))
    return [run_suite(n, cfg) for n in names]
