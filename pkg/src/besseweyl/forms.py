"""Exterior calculus on coordinate charts, differentiated exactly by AD.

A :class:`Form` of degree ``k`` on an ``n``-dimensional :class:`Chart` is a
callable returning a dict that maps strictly increasing index tuples to
component values, e.g. ``{(0, 1): f}`` for ``f dx^0 ^ dx^1``. Missing keys
are zero. Components may be real or complex, scalars, numpy arrays, or
duals, so every operation composes with further differentiation.

The 2-dimensional Riemannian helpers (Hodge star, codifferential, Gauss
curvature) and the affine-connection machinery live here as well because
everything above builds on them.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from . import ad

Components = dict  # tuple[int, ...] -> value

EPS_POLE = 1e-3


@dataclass(frozen=True)
class Chart:
    """Coordinate box with optional periodic coordinates."""

    names: tuple[str, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    periods: tuple[float | None, ...] = ()

    def __post_init__(self):
        if len(self.lower) != len(self.names) or len(self.upper) != len(self.names):
            raise ValueError("box bounds must match the coordinate count")
        if any(lo >= hi for lo, hi in zip(self.lower, self.upper)):
            raise ValueError("empty chart domain")
        if not self.periods:
            object.__setattr__(self, "periods", (None,) * len(self.names))

    @property
    def dim(self) -> int:
        return len(self.names)

    def sample(self, n: int, rng: np.random.Generator) -> list[np.ndarray]:
        """Uniform random points in the box, one array per coordinate."""
        return [rng.uniform(lo, hi, n) for lo, hi in zip(self.lower, self.upper)]

    def grid(self, n: int) -> list[np.ndarray]:
        """Tensor grid with ``n`` interior nodes per axis, flattened."""
        axes = [np.linspace(lo, hi, n + 2)[1:-1] for lo, hi in zip(self.lower, self.upper)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return [m.ravel() for m in mesh]

    def wrap(self, x: Sequence[Any]) -> list[Any]:
        """Reduce periodic coordinates into their fundamental interval."""
        out = []
        for xi, lo, per in zip(x, self.lower, self.periods):
            if per is not None and not isinstance(xi, ad.Dual):
                xi = lo + np.mod(np.asarray(xi) - lo, per)
            out.append(xi)
        return out


def spindle_chart(eps: float = EPS_POLE) -> Chart:
    """The (r, phi) chart of a spindle with the poles clamped away."""
    return Chart(("r", "phi"), (eps, 0.0), (math.pi - eps, 2 * math.pi), (None, 2 * math.pi))


def _perm_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting ``seq``; 0 on a repeated index."""
    seq = list(seq)
    if len(set(seq)) < len(seq):
        return 0
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def _add(comp: Components, key: tuple, val: Any) -> None:
    if key in comp:
        comp[key] = comp[key] + val
    else:
        comp[key] = val


class Form:
    """A differential form of fixed degree on an ``dim``-dimensional chart."""

    def __init__(self, degree: int, dim: int, fn: Callable[[Sequence[Any]], Components]):
        if not 0 <= degree <= dim:
            raise ValueError(f"degree {degree} impossible in dimension {dim}")
        self.degree = degree
        self.dim = dim
        self._fn = fn

    def __call__(self, x: Sequence[Any]) -> Components:
        return self._fn(x)

    def component(self, x: Sequence[Any], idx: Sequence[int]) -> Any:
        """Coefficient of ``dx^idx`` with the sign of the reordering."""
        s = _perm_sign(idx)
        if s == 0:
            return 0.0
        val = self(x).get(tuple(sorted(idx)), 0.0)
        return val if s > 0 else -val

    def evaluate(self, x: Sequence[Any], vectors: Sequence[Sequence[Any]]) -> Any:
        """Evaluate on ``degree`` tangent vectors (determinant pairing)."""
        k = self.degree
        comps = self(x)
        total = 0.0
        for key, c in comps.items():
            # det of the k x k matrix vectors[a][key[b]]
            for perm in itertools.permutations(range(k)):
                term = c * _perm_sign(perm)
                for a in range(k):
                    term = term * vectors[a][key[perm[a]]]
                total = total + term
        return total

    # algebra -----------------------------------------------------------
    def _check(self, other: "Form") -> None:
        if other.dim != self.dim:
            raise ValueError("forms live on charts of different dimension")

    def __add__(self, other: "Form") -> "Form":
        self._check(other)
        if other.degree != self.degree:
            raise ValueError("cannot add forms of different degree")

        def fn(x):
            out = dict(self(x))
            for k, v in other(x).items():
                _add(out, k, v)
            return out

        return Form(self.degree, self.dim, fn)

    def __neg__(self) -> "Form":
        return Form(self.degree, self.dim, lambda x: {k: -v for k, v in self(x).items()})

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def __mul__(self, f: Any) -> "Form":
        """Multiply by a constant or by a scalar field ``f(x)``."""
        if callable(f) and not isinstance(f, Form):
            return Form(self.degree, self.dim, lambda x: {k: f(x) * v for k, v in self(x).items()})
        return Form(self.degree, self.dim, lambda x: {k: f * v for k, v in self(x).items()})

    __rmul__ = __mul__

    def __xor__(self, other: "Form") -> "Form":
        return wedge(self, other)

    def conj(self) -> "Form":
        return Form(self.degree, self.dim, lambda x: {k: ad.conj(v) for k, v in self(x).items()})

    def real(self) -> "Form":
        return Form(self.degree, self.dim, lambda x: {k: ad.real(v) for k, v in self(x).items()})

    def imag(self) -> "Form":
        return Form(self.degree, self.dim, lambda x: {k: ad.imag(v) for k, v in self(x).items()})


def scalar(dim: int, f: Callable[[Sequence[Any]], Any]) -> Form:
    """Wrap a function of the coordinates as a 0-form."""
    return Form(0, dim, lambda x: {(): f(x)})


def one_form(dim: int, fn: Callable[[Sequence[Any]], Sequence[Any]]) -> Form:
    """1-form from a callable returning all ``dim`` components."""
    return Form(1, dim, lambda x: {(i,): c for i, c in enumerate(fn(x))})


def two_form(dim: int, fn: Callable[[Sequence[Any]], Sequence[Any]]) -> Form:
    """2-form from components in lexicographic order of (i<j)."""
    keys = list(itertools.combinations(range(dim), 2))
    return Form(2, dim, lambda x: dict(zip(keys, fn(x))))


def coordinate_differential(dim: int, i: int) -> Form:
    return Form(1, dim, lambda x: {(i,): 1.0})


def volume_basis(dim: int, idx: Sequence[int]) -> Form:
    s = _perm_sign(idx)
    return Form(len(idx), dim, lambda x: {tuple(sorted(idx)): float(s)})


def zero(degree: int, dim: int) -> Form:
    return Form(degree, dim, lambda x: {})


def d(form: Form) -> Form:
    """Exterior derivative with exact AD partials."""
    if form.degree >= form.dim:
        raise ValueError("exterior derivative of a top-degree form")
    n = form.dim

    def fn(x):
        keys: list[tuple] = []

        def comps(xs):
            c = form(xs)
            keys[:] = list(c.keys())
            return [c[k] for k in keys]

        _, parts = ad.partials(comps, list(x))
        out: Components = {}
        for j in range(n):
            for key, dval in zip(keys, parts[j]):
                if j in key:
                    continue
                s = _perm_sign((j,) + key)
                _add(out, tuple(sorted((j,) + key)), dval if s > 0 else -dval)
        return out

    return Form(form.degree + 1, n, fn)


def wedge(a: Form, b: Form) -> Form:
    """Graded-antisymmetric product."""
    a._check(b)
    if a.degree + b.degree > a.dim:
        raise ValueError("wedge product exceeds chart dimension")

    def fn(x):
        ca, cb = a(x), b(x)
        out: Components = {}
        for ka, va in ca.items():
            for kb, vb in cb.items():
                s = _perm_sign(ka + kb)
                if s == 0:
                    continue
                p = va * vb
                _add(out, tuple(sorted(ka + kb)), p if s > 0 else -p)
        return out

    return Form(a.degree + b.degree, a.dim, fn)


def pullback(fmap: Callable[[Sequence[Any]], Sequence[Any]], src_dim: int, form: Form) -> Form:
    """Pull ``form`` back along ``fmap`` from a ``src_dim`` chart."""
    k = form.degree

    def fn(x):
        y, jac = ad.jacobian(fmap, list(x))
        comps = form(y)
        out: Components = {}
        for skey in itertools.combinations(range(src_dim), k):
            total = 0.0
            for tkey, c in comps.items():
                # minor det(jac[tkey, skey])
                m = 0.0
                for perm in itertools.permutations(range(k)):
                    term = float(_perm_sign(perm))
                    for a in range(k):
                        term = term * jac[tkey[a]][skey[perm[a]]]
                    m = m + term
                total = total + c * m
            out[skey] = total
        return out

    return Form(k, src_dim, fn)


# ---------------------------------------------------------------------------
# metrics

class MetricField:
    """Symmetric (pseudo-)metric components ``g[i][j]`` on a chart."""

    def __init__(self, dim: int, fn: Callable[[Sequence[Any]], Sequence[Sequence[Any]]]):
        self.dim = dim
        self._fn = fn

    def __call__(self, x: Sequence[Any]) -> list[list[Any]]:
        return [list(row) for row in self._fn(x)]

    def scaled(self, f: Callable[[Sequence[Any]], Any] | float) -> "MetricField":
        """Conformal multiple ``f * g`` (``f`` a constant or a scalar field)."""
        if callable(f):
            return MetricField(self.dim, lambda x: [[f(x) * gij for gij in row] for row in self(x)])
        return MetricField(self.dim, lambda x: [[f * gij for gij in row] for row in self(x)])

    def conformal(self, u: Callable[[Sequence[Any]], Any]) -> "MetricField":
        """``exp(2u) g``."""
        return self.scaled(lambda x: ad.exp(2.0 * u(x)))

    def min_eigenvalue(self, x: Sequence[np.ndarray]) -> np.ndarray:
        g = self(x)
        shape = np.broadcast(*[np.asarray(ad.value(c)) for row in g for c in row]).shape
        mat = np.empty(shape + (self.dim, self.dim))
        for i in range(self.dim):
            for j in range(self.dim):
                mat[..., i, j] = np.broadcast_to(np.real(ad.value(g[i][j])), shape)
        return np.linalg.eigvalsh(mat)[..., 0]


def euclidean(dim: int = 2) -> MetricField:
    return MetricField(dim, lambda x: [[1.0 if i == j else 0.0 for j in range(dim)] for i in range(dim)])


def det2(m):
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def inverse2(m):
    dt = det2(m)
    return [[m[1][1] / dt, -m[0][1] / dt], [-m[1][0] / dt, m[0][0] / dt]]


def inverse(m):
    """Inverse of a small symmetric matrix of AD-capable entries."""
    n = len(m)
    if n == 2:
        return inverse2(m)
    if n == 3:
        a, b, c = m[0]
        dd, e, f = m[1]
        g, h, i = m[2]
        A, B, C = e * i - f * h, -(dd * i - f * g), dd * h - e * g
        dt = a * A + b * B + c * C
        return [
            [A / dt, -(b * i - c * h) / dt, (b * f - c * e) / dt],
            [B / dt, (a * i - c * g) / dt, -(a * f - c * dd) / dt],
            [C / dt, -(a * h - b * g) / dt, (a * e - b * dd) / dt],
        ]
    raise ValueError("only 2x2 and 3x3 metrics are supported")


def _require_2d(g: MetricField) -> None:
    if g.dim != 2:
        raise ValueError("operation defined on 2-dimensional charts only")


def area_form(g: MetricField, orientation: int = 1) -> Form:
    """Riemannian area form ``orientation * sqrt(det g) dx^dy``."""
    _require_2d(g)
    return Form(2, 2, lambda x: {(0, 1): orientation * ad.sqrt(det2(g(x)))})


def hodge_star(g: MetricField, form: Form, orientation: int = 1) -> Form:
    """Hodge star on a 2-chart; rotation by +pi/2 on 1-forms."""
    _require_2d(g)
    if form.dim != 2:
        raise ValueError("form is not on a 2-chart")
    k = form.degree
    if k == 0:
        return Form(2, 2, lambda x: {(0, 1): orientation * ad.sqrt(det2(g(x))) * form(x).get((), 0.0)})
    if k == 2:
        return Form(0, 2, lambda x: {(): orientation * form(x).get((0, 1), 0.0) / ad.sqrt(det2(g(x)))})

    def fn(x):
        gm = g(x)
        gi = inverse2(gm)
        sq = orientation * ad.sqrt(det2(gm))
        c = form(x)
        t0, t1 = c.get((0,), 0.0), c.get((1,), 0.0)
        up0 = gi[0][0] * t0 + gi[0][1] * t1
        up1 = gi[1][0] * t0 + gi[1][1] * t1
        return {(0,): -sq * up1, (1,): sq * up0}

    return Form(1, 2, fn)


def codifferential(g: MetricField, theta: Form) -> Form:
    """``delta = -star d star`` on 1-forms of a 2-chart."""
    return -hodge_star(g, d(hodge_star(g, theta)))


def laplacian(g: MetricField, u: Form) -> Form:
    """``Delta u = -delta d u`` (nonpositive spectrum convention)."""
    return -codifferential(g, d(u))


# ---------------------------------------------------------------------------
# connections and curvature

class AffineConnection:
    """Christoffel symbols ``G[k][i][j]`` of a connection on an n-chart."""

    def __init__(self, dim: int, fn: Callable[[Sequence[Any]], list]):
        self.dim = dim
        self._fn = fn

    def __call__(self, x: Sequence[Any]) -> list:
        return self._fn(x)

    def __add__(self, other: "AffineConnection") -> "AffineConnection":
        n = self.dim

        def fn(x):
            a, b = self(x), other(x)
            return [[[a[k][i][j] + b[k][i][j] for j in range(n)] for i in range(n)] for k in range(n)]

        return AffineConnection(n, fn)

    def shift(self, psi: Callable[[Sequence[Any]], Sequence[Any]]) -> "AffineConnection":
        """Projective shift ``G^k_ij + delta^k_i psi_j + delta^k_j psi_i``."""
        n = self.dim

        def fn(x):
            a, p = self(x), psi(x)
            return [
                [
                    [a[k][i][j] + (p[j] if k == i else 0.0) + (p[i] if k == j else 0.0) for j in range(n)]
                    for i in range(n)
                ]
                for k in range(n)
            ]

        return AffineConnection(n, fn)

    def difference(self, other: "AffineConnection", x: Sequence[Any]) -> list:
        a, b = self(x), other(x)
        n = self.dim
        return [[[a[k][i][j] - b[k][i][j] for j in range(n)] for i in range(n)] for k in range(n)]


def flat_connection(dim: int = 2) -> AffineConnection:
    return AffineConnection(dim, lambda x: [[[0.0] * dim for _ in range(dim)] for _ in range(dim)])


def levi_civita(g: MetricField) -> AffineConnection:
    """Levi-Civita Christoffels from AD partials of ``g``."""
    n = g.dim

    def fn(x):
        gm, dg = ad.partials(lambda xs: g(xs), list(x))
        gi = inverse(gm)
        # lower[l][i][j] = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
        low = [
            [[0.5 * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]) for j in range(n)] for i in range(n)]
            for l in range(n)
        ]
        out = []
        for k in range(n):
            rows = []
            for i in range(n):
                row = []
                for j in range(i + 1):
                    s = 0.0
                    for l in range(n):
                        s = s + gi[k][l] * low[l][i][j]
                    row.append(s)
                rows.append(row)
            out.append([[rows[i][j] if j <= i else rows[j][i] for j in range(n)] for i in range(n)])
        return out

    return AffineConnection(n, fn)


def riemann(c: AffineConnection, x: Sequence[Any]) -> list:
    """``R[l][k][i][j] = d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik``."""
    n = c.dim
    G, dG = ad.partials(lambda xs: c(xs), list(x))
    R = [[[[0.0] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for l in range(n):
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    v = dG[i][l][j][k] - dG[j][l][i][k]
                    for m in range(n):
                        v = v + G[l][i][m] * G[m][j][k] - G[l][j][m] * G[m][i][k]
                    R[l][k][i][j] = v
    return R


def ricci(c: AffineConnection, x: Sequence[Any]) -> list:
    """``Ric[j][k] = R^i_{k i j}``."""
    R = riemann(c, x)
    n = c.dim
    return [[sum((R[i][k][i][j] for i in range(n)), 0.0) for k in range(n)] for j in range(n)]


def gauss_curvature_of_metric(g: MetricField) -> Form:
    """Gauss curvature ``R_1212 / det g`` as a 0-form."""
    _require_2d(g)
    lc = levi_civita(g)

    def fn(x):
        R = riemann(lc, x)
        gm = g(x)
        r1212 = gm[0][0] * R[0][1][0][1] + gm[0][1] * R[1][1][0][1]
        return {(): r1212 / det2(gm)}

    return Form(0, 2, fn)


def covariant_derivative_metric(c: AffineConnection, g: MetricField, x: Sequence[Any]) -> list:
    """``(nabla_k g)_ij = d_k g_ij - G^m_ki g_mj - G^m_kj g_im``."""
    n = g.dim
    gm, dg = ad.partials(lambda xs: g(xs), list(x))
    G = c(x)
    out = []
    for k in range(n):
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                v = dg[k][i][j]
                for m in range(n):
                    v = v - G[m][k][i] * gm[m][j] - G[m][k][j] * gm[i][m]
                row.append(v)
            rows.append(row)
        out.append(rows)
    return out


def max_abs(comps: Components | Any) -> float:
    """Largest absolute entry of a component dict, list tree or array."""
    if isinstance(comps, dict):
        vals = list(comps.values())
    elif isinstance(comps, (list, tuple)):
        vals = list(comps)
    else:
        return float(np.max(np.abs(ad.value(comps)))) if np.size(ad.value(comps)) else 0.0
    return max((max_abs(v) for v in vals), default=0.0)
