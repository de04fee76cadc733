"""Projective structure of 2D connections.

Covers the R-coefficients, the linear PDE system for projective vector
fields, the tau_lambda family and pointwise least-squares tests of
projective equivalence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from . import ad
from .arith import Weights
from .forms import AffineConnection, MetricField, levi_civita


def r_coefficients(c: AffineConnection, x) -> tuple[Any, Any, Any, Any]:
    """(R0, R1, R2, R3) in terms of Christoffels (indices 1, 2 -> 0, 1)."""
    G = c(x)
    return (
        -G[1][0][0],
        G[0][0][0] - 2.0 * G[1][0][1],
        2.0 * G[0][0][1] - G[1][1][1],
        G[0][1][1],
    )


def r1_formula(r, w: Weights):
    a1, a2 = w.a1, w.a2
    cr = np.cos(r)
    return ((a2 - a1) * (cr ** 2 + 1) - 2 * (a1 + a2) * cr) / (((a1 - a2) * cr + a1 + a2) * np.sin(r))


def r3_formula(r, w: Weights):
    a1, a2 = w.a1, w.a2
    return -2.0 * np.sin(2 * r) / ((a1 - a2) * np.cos(r) + a1 + a2) ** 2


VectorField = Callable[[Sequence[Any]], Sequence[Any]]


def projective_pde_residual(c: AffineConnection, W: VectorField, x) -> list[Any]:
    """The four residuals of the projective vector field system."""

    def second(f, xs):
        # value, first and second partials of a vector function via nesting
        v, d1 = ad.partials(f, xs)
        _, d2 = ad.partials(lambda ys: ad.partials(f, ys)[1], xs)
        return v, d1, d2

    (W1, W2), dW, ddW = second(lambda xs: list(W(xs)), list(x))
    # dW[j][a] = d_j W^a ; ddW[k][j][a] = d_k d_j W^a
    W1x, W2x = dW[0][0], dW[0][1]
    W1y, W2y = dW[1][0], dW[1][1]
    W1xx, W2xx = ddW[0][0][0], ddW[0][0][1]
    W1xy, W2xy = ddW[1][0][0], ddW[1][0][1]
    W1yy, W2yy = ddW[1][1][0], ddW[1][1][1]
    R, dR = ad.partials(lambda xs: list(r_coefficients(c, xs)), list(x))
    R0, R1, R2, R3 = R
    (R0x, R1x, R2x, R3x), (R0y, R1y, R2y, R3y) = dR[0], dR[1]
    e1 = W2xx - 2 * R0 * W1x - R1 * W2x + R0 * W2y - R0x * W1 - R0y * W2
    e2 = -W1xx + 2 * W2xy - R1 * W1x - 3 * R0 * W1y - 2 * R2 * W2x - R1x * W1 - R1y * W2
    e3 = -2 * W1xy + W2yy - 2 * R1 * W1y - 3 * R3 * W2x - R2 * W2y - R2x * W1 - R2y * W2
    e4 = -W1yy + R3 * W1x - R2 * W1y - 2 * R3 * W2y - R3x * W1 - R3y * W2
    return [e1, e2, e3, e4]


def killing_phi(x):
    return [0.0 * x[0], 1.0 + 0.0 * x[0]]


def tau_field(x):
    """d/dlambda of tau_lambda at lambda = 1: sin(2r)/2 d/dr."""
    return [0.5 * ad.sin(2.0 * x[0]), 0.0 * x[0]]


def tau_lambda(lam, r):
    """r~ with tan r~ = lam tan r, on the same side of pi/2 as r."""
    return ad.arccos(ad.cos(r) / ad.sqrt(1.0 + (lam * lam - 1.0) * ad.sin(r) ** 2))


def tau_generator_residual(r: np.ndarray) -> float:
    _, dl = ad.derivative(lambda lam: tau_lambda(lam, r), 1.0)
    return float(np.max(np.abs(dl - 0.5 * np.sin(2 * r))))


def tau_composition_residual(lam: float, mu: float, r: np.ndarray) -> float:
    return float(np.max(np.abs(tau_lambda(lam, tau_lambda(mu, r)) - tau_lambda(lam * mu, r))))


# ---------------------------------------------------------------------------
# pointwise linear solves

_SYM = [(k, i, j) for k in range(2) for (i, j) in ((0, 0), (0, 1), (1, 1))]


def _as_array(G, shape) -> np.ndarray:
    out = np.empty((2, 2, 2) + shape)
    for k in range(2):
        for i in range(2):
            for j in range(2):
                out[k, i, j] = np.broadcast_to(np.real(np.asarray(ad.value(G[k][i][j]), dtype=complex)), shape)
    return out


def _shape(x) -> tuple:
    return np.broadcast(*[np.asarray(xi) for xi in x]).shape


def _lstsq(A: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Batched least squares ``A[p] s[p] ~ b[p]``; returns (s, residual vectors)."""
    Q, R = np.linalg.qr(A)
    s = np.linalg.solve(R, np.einsum("pji,pj->pi", Q, b)[..., None])[..., 0]
    return s, np.einsum("pij,pj->pi", A, s) - b


def _psi_rows(k, i, j):
    # coefficients of (psi_0, psi_1) in delta^k_i psi_j + delta^k_j psi_i
    row = [0.0, 0.0]
    if k == i:
        row[j] += 1.0
    if k == j:
        row[i] += 1.0
    return row


@dataclass
class EquivalenceResult:
    psi: np.ndarray  # (2, npts)
    residual: np.ndarray  # max abs over the 6 equations, per point

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residual))


def projective_equivalence_residual(c1: AffineConnection, c2: AffineConnection, x) -> EquivalenceResult:
    """Least squares in psi of (G2 - G1) - psi (.) id, pointwise."""
    shape = _shape(x)
    D = _as_array(c2(x), shape) - _as_array(c1(x), shape)
    npts = int(np.prod(shape)) if shape else 1
    A = np.array([_psi_rows(k, i, j) for (k, i, j) in _SYM])
    A = np.broadcast_to(A, (npts, 6, 2)).copy()
    b = np.stack([D[k, i, j].reshape(npts) for (k, i, j) in _SYM], axis=1)
    s, res = _lstsq(A, b)
    return EquivalenceResult(s.T.reshape((2,) + shape), np.max(np.abs(res), axis=1).reshape(shape))


@dataclass
class WeylSolve:
    theta: np.ndarray  # (2, npts) covector components
    psi: np.ndarray
    residual: np.ndarray
    condition: np.ndarray

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residual))


class RankDeficientError(ValueError):
    pass


def weyl_from_conformal_in_class(g: MetricField, cref: AffineConnection, x) -> WeylSolve:
    """Solve LC(g) + D(g, theta) = cref + psi (.) id for (theta, psi).

    Six equations (k, i <= j) in four unknowns per point, by QR.
    """
    shape = _shape(x)
    npts = int(np.prod(shape)) if shape else 1
    Gg = _as_array(levi_civita(g)(x), shape).reshape(2, 2, 2, npts)
    Gr = _as_array(cref(x), shape).reshape(2, 2, 2, npts)
    gm = g(x)
    garr = np.empty((2, 2, npts))
    for i in range(2):
        for j in range(2):
            garr[i, j] = np.broadcast_to(np.real(np.asarray(ad.value(gm[i][j]), dtype=complex)), shape).reshape(npts)
    ginv = np.linalg.inv(np.moveaxis(garr, -1, 0))  # (npts, 2, 2)
    A = np.zeros((npts, 6, 4))
    b = np.zeros((npts, 6))
    for row, (k, i, j) in enumerate(_SYM):
        # g_ij theta^k = g_ij ginv[k, l] theta_l
        for l in range(2):
            A[:, row, l] += garr[i, j] * ginv[:, k, l]
        # - delta^k_i theta_j - delta^k_j theta_i
        pr = _psi_rows(k, i, j)
        A[:, row, 0] -= pr[0]
        A[:, row, 1] -= pr[1]
        A[:, row, 2] -= pr[0]
        A[:, row, 3] -= pr[1]
        b[:, row] = Gr[k, i, j] - Gg[k, i, j]
    sv = np.linalg.svd(A, compute_uv=False)
    cond = sv[:, 0] / np.maximum(sv[:, -1], 1e-300)
    bad = np.flatnonzero(sv[:, -1] < 1e-12 * sv[:, 0])
    if bad.size:
        p = bad[0]
        raise RankDeficientError(
            f"rank-deficient Weyl solve at r={np.ravel(np.broadcast_to(x[0], shape))[p]:.6f}"
        )
    s, res = _lstsq(A, b)
    theta = s[:, :2].T.reshape((2,) + shape)
    psi = s[:, 2:].T.reshape((2,) + shape)
    return WeylSolve(theta, psi, np.max(np.abs(res), axis=1).reshape(shape), cond.reshape(shape))
