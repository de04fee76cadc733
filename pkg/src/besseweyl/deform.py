"""The Veronese deformation pipeline.

For y2^2 = lam y1 y3 the Beltrami section over the spindle gives a conformal
class, the projective solver supplies theta, and the resulting Weyl pair is
gauged, tested for the Besse property and dualized to a Finsler structure.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
import numpy as np

from . import ad, cheb, duality, geometry, projective, twistor, weyl
from .arith import Weights, length_spectrum
from .forms import levi_civita, one_form, spindle_chart

LAMBDA_DISK = 0.5
FIT_LO, FIT_HI = 0.01, math.pi - 0.01


@dataclass
class Tolerances:
    section: float = 1e-10
    solver: float = 1e-6
    gauge: float = 1e-6
    besse: float = 1e-4
    length: float = 1e-5
    symmetry: float = 1e-9


@dataclass
class Stage:
    name: str
    residual: float
    threshold: float
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.threshold)

    def as_dict(self) -> dict:
        return {"name": self.name, "residual": self.residual, "threshold": self.threshold,
                "pass": self.passed, **self.detail}


class StageFailure(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(f"stage '{stage}' failed: {message}")
        self.stage = stage


@dataclass
class PipelineResult:
    weights: Weights
    lam: complex
    stages: list[Stage]
    pair: weyl.WeylPair | None = None
    besse: weyl.BesseReport | None = None
    lengths: duality.FinslerLengths | None = None
    aborted: str | None = None

    @property
    def passed(self) -> bool:
        return self.aborted is None and all(s.passed for s in self.stages)

    def stage(self, name: str) -> Stage:
        for s in self.stages:
            if s.name == name:
                return s
        raise KeyError(name)


def validate_lambda(lam: complex, disk: float = LAMBDA_DISK) -> complex:
    lam = complex(lam)
    if abs(lam - 1.0) > disk:
        raise ValueError(f"lambda = {lam} outside the validated disk |lambda - 1| <= {disk}")
    return lam


def section_to_weyl_input(weights: Weights, lam: complex):
    """Conformal representative of the deformed structure on the (r, phi) chart."""
    return twistor.section_metric(weights, lam)


def fit_theta(theta: np.ndarray, r: np.ndarray, lo: float = FIT_LO, hi: float = FIT_HI):
    f0 = cheb.fit_values(r, theta[0], lo, hi)
    f1 = cheb.fit_values(r, theta[1], lo, hi)
    return one_form(2, lambda x: [f0(x[0]) + 0.0 * x[1], f1(x[0]) + 0.0 * x[1]])


def run(weights: Weights, lam: complex, tol: Tolerances | None = None, grid: int = 64,
        n_besse: int = 20, degree: int = 96, seed: int = 0, raise_on_failure: bool = False) -> PipelineResult:
    """Run every stage; a failing stage stops the pipeline and is named."""
    tol = tol or Tolerances()
    lam = validate_lambda(lam)
    res = PipelineResult(weights, lam, [])

    def add(stage: Stage):
        res.stages.append(stage)
        if not stage.passed:
            raise StageFailure(stage.name, f"residual {stage.residual:.3e} > {stage.threshold:.1e}")

    try:
        chart = spindle_chart(0.02)
        x = chart.grid(grid)
        L = geometry.lift(weights)
        t0 = time.perf_counter()
        z, w = L([x[0], x[1], 0.0 * x[0]])
        try:
            mu = twistor.deformed_section(lam, z, w)
        except twistor.SectionError as exc:
            raise StageFailure("section", str(exc)) from exc
        curve = float(np.max(twistor.curve_residual(lam, z, w, mu)))
        add(Stage("section", curve, tol.section, {"max_abs_mu": float(np.max(np.abs(mu)))}))

        g = section_to_weyl_input(weights, lam)
        eig = float(np.min(g.min_eigenvalue(x)))
        ga = g(x)
        gb = g([x[0], x[1] + 0.7])
        spread = max(float(np.max(np.abs(np.asarray(ga[i][j]) - np.asarray(gb[i][j]))))
                     for i in range(2) for j in range(2))
        add(Stage("metric", spread, tol.symmetry, {"min_eigenvalue": eig, "positive": eig > 0}))
        if not eig > 0:
            raise StageFailure("metric", f"representative not positive definite (min eigenvalue {eig:.3e})")

        cref = levi_civita(geometry.chart_metric(weights))
        rn = cheb.nodes(FIT_LO, FIT_HI, degree)
        try:
            sol = projective.weyl_from_conformal_in_class(g, cref, [rn, 0.0 * rn])
            sol2 = projective.weyl_from_conformal_in_class(g, cref, [rn, 0.0 * rn + 2.1])
        except projective.RankDeficientError as exc:
            raise StageFailure("solver", str(exc)) from exc
        th_spread = float(np.max(np.abs(sol.theta - sol2.theta)))
        theta = fit_theta(sol.theta, rn)
        pair = weyl.WeylPair(g, theta)
        add(Stage("solver", max(sol.max_residual, sol2.max_residual), tol.solver,
                  {"theta_phi_spread": th_spread, "max_condition": float(np.max(sol.condition))}))

        xs = chart.sample(256, np.random.default_rng(seed))
        try:
            ng = weyl.natural_gauge(pair, grid=x, radial_fit=(FIT_LO, FIT_HI), degree=degree)
        except weyl.PositivityError as exc:
            raise StageFailure("natural-gauge", str(exc)) from exc
        pos = np.real(np.asarray(ad.value(ng.positivity()(xs)[()]), dtype=complex))
        add(Stage("natural-gauge", float(np.max(np.abs(pos - 1.0))), tol.gauge))
        res.pair = ng

        table = weyl.tabulate_radial(weyl.weyl_connection(ng))
        rep = weyl.besse_report(table, n=n_besse)
        res.besse = rep
        spread = rep.spread if rep.closing else math.inf
        add(Stage("besse", spread, tol.besse,
                  {"mean_return_angle": rep.mean, "ratio_to_2pi": None if rep.ratio is None else str(rep.ratio),
                   "failures": rep.failures}))

        lengths = duality.finsler_lengths(ng, weights)
        res.lengths = lengths
        expected = length_spectrum(weights)
        delta = max(lengths.deltas().values())
        add(Stage("finsler-lengths", delta, tol.length,
                  {"shortest": lengths.shortest, "expected_shortest": expected.shortest.radians,
                   "lengths": lengths.lengths}))
        res.stages[-1].detail["elapsed_s"] = time.perf_counter() - t0
    except StageFailure as exc:
        res.aborted = exc.stage
        if raise_on_failure:
            raise
    return res
