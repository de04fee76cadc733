"""Chebyshev compression of smooth radial profiles.

Rotationally symmetric fields depend on ``r`` alone. Replacing a deeply
nested AD evaluation by an interpolant keeps higher derivatives cheap; the
interpolant itself stays AD-evaluable through :func:`RadialFit.__call__`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

import numpy as np
from numpy.polynomial import chebyshev as C

from . import ad


@dataclass
class RadialFit:
    """Chebyshev series on ``[lo, hi]`` evaluated with derivative chaining."""

    coef: np.ndarray
    lo: float
    hi: float

    def _t(self, r):
        return (2.0 * r - (self.lo + self.hi)) / (self.hi - self.lo)

    def __call__(self, r: Any) -> Any:
        return self._eval(r, self.coef)

    def _eval(self, r, coef):
        if isinstance(r, ad.Dual):
            dcoef = C.chebder(coef) * (2.0 / (self.hi - self.lo)) if len(coef) > 1 else np.zeros(1)
            slope = self._eval(r.val, dcoef)
            return ad.Dual(self._eval(r.val, coef), [slope * a for a in r.der], r.tag)
        return C.chebval(self._t(np.asarray(r)), coef)

    def derivative(self, order: int = 1) -> "RadialFit":
        coef = self.coef
        for _ in range(order):
            coef = C.chebder(coef) * (2.0 / (self.hi - self.lo))
        return RadialFit(coef, self.lo, self.hi)


def nodes(lo: float, hi: float, n: int) -> np.ndarray:
    """Chebyshev points of the first kind mapped to ``[lo, hi]``."""
    t = np.cos(np.pi * (np.arange(n) + 0.5) / n)
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * t


def fit(f: Callable[[np.ndarray], np.ndarray], lo: float, hi: float, n: int = 96) -> RadialFit:
    """Interpolate a vectorized function at ``n`` Chebyshev nodes."""
    r = nodes(lo, hi, n)
    vals = np.asarray(f(r))
    t = (2.0 * r - (lo + hi)) / (hi - lo)
    coef = C.chebfit(t, vals, n - 1)
    return RadialFit(coef, lo, hi)


def fit_values(r: np.ndarray, vals: np.ndarray, lo: float, hi: float) -> RadialFit:
    """Interpolate values already sampled at :func:`nodes`."""
    t = (2.0 * r - (lo + hi)) / (hi - lo)
    return RadialFit(C.chebfit(t, vals, len(r) - 1), lo, hi)


def fit_error(fitted: RadialFit, f: Callable[[np.ndarray], np.ndarray], n_check: int = 257) -> float:
    """Max deviation on an offset uniform grid, relative to the field scale."""
    r = np.linspace(fitted.lo, fitted.hi, n_check + 2)[1:-1]
    exact = np.asarray(f(r))
    scale = max(1.0, float(np.max(np.abs(exact))))
    return float(np.max(np.abs(fitted(r) - exact))) / scale
