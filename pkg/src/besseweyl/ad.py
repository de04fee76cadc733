"""Forward-mode automatic differentiation by dual-number lifting.

A :class:`Dual` carries a value and one partial derivative per seeded
coordinate. Values and partials may be numpy arrays (real or complex) so a
whole grid is differentiated in one pass, or they may themselves be
:class:`Dual` instances, which gives exact higher derivatives by nesting.

Every seeding call creates a fresh tag. Arithmetic between duals of
different tags treats the older one as a constant, which keeps nested
differentiation free of perturbation confusion.
"""

from __future__ import annotations

import itertools
from typing import Any, Callable, Sequence

import numpy as np

_tags = itertools.count(1)


class Dual:
    """Value plus a tuple of partial derivatives sharing one tag."""

    __slots__ = ("val", "der", "tag")
    __array_ufunc__ = None  # make numpy defer to the reflected operators

    def __init__(self, val: Any, der: Sequence[Any], tag: int):
        self.val = val
        self.der = tuple(der)
        self.tag = tag

    def __repr__(self) -> str:
        return f"Dual({self.val!r}, {self.der!r}, tag={self.tag})"

    # binary arithmetic -------------------------------------------------
    def _split(self, other):
        """Return (self-like, other-like, tag) for a binary op, or None if
        ``other`` is the outer (newer-tag) operand."""
        if isinstance(other, Dual):
            if other.tag == self.tag:
                return other
            if other.tag > self.tag:
                return NotImplemented
        return None

    def __add__(self, other):
        o = self._split(other)
        if o is NotImplemented:
            return other.__radd__(self)
        if o is None:
            return Dual(self.val + other, self.der, self.tag)
        return Dual(self.val + o.val, [a + b for a, b in zip(self.der, o.der)], self.tag)

    def __radd__(self, other):
        return Dual(other + self.val, self.der, self.tag)

    def __sub__(self, other):
        o = self._split(other)
        if o is NotImplemented:
            return other.__rsub__(self)
        if o is None:
            return Dual(self.val - other, self.der, self.tag)
        return Dual(self.val - o.val, [a - b for a, b in zip(self.der, o.der)], self.tag)

    def __rsub__(self, other):
        return Dual(other - self.val, [-a for a in self.der], self.tag)

    def __mul__(self, other):
        o = self._split(other)
        if o is NotImplemented:
            return other.__rmul__(self)
        if o is None:
            return Dual(self.val * other, [a * other for a in self.der], self.tag)
        return Dual(
            self.val * o.val,
            [a * o.val + self.val * b for a, b in zip(self.der, o.der)],
            self.tag,
        )

    def __rmul__(self, other):
        return Dual(other * self.val, [other * a for a in self.der], self.tag)

    def __truediv__(self, other):
        o = self._split(other)
        if o is NotImplemented:
            return other.__rtruediv__(self)
        if o is None:
            return Dual(self.val / other, [a / other for a in self.der], self.tag)
        q = self.val / o.val
        return Dual(q, [(a - q * b) / o.val for a, b in zip(self.der, o.der)], self.tag)

    def __rtruediv__(self, other):
        q = other / self.val
        return Dual(q, [-q * a / self.val for a in self.der], self.tag)

    def __neg__(self):
        return Dual(-self.val, [-a for a in self.der], self.tag)

    def __pos__(self):
        return self

    def __pow__(self, p):
        if isinstance(p, Dual):
            return exp(p * log(self))
        if p == 2:
            return self * self
        v = self.val ** p
        dv = p * self.val ** (p - 1)
        return Dual(v, [dv * a for a in self.der], self.tag)

    def __rpow__(self, base):
        return exp(self * np.log(base))

    # comparisons act on the innermost value so branch logic is possible
    def __lt__(self, other):
        return value(self) < value(other)

    def __le__(self, other):
        return value(self) <= value(other)

    def __gt__(self, other):
        return value(self) > value(other)

    def __ge__(self, other):
        return value(self) >= value(other)

    def conjugate(self):
        return conj(self)

    @property
    def real(self):
        return real(self)

    @property
    def imag(self):
        return imag(self)


def value(x: Any) -> Any:
    """Strip every dual layer and return the underlying number or array."""
    while isinstance(x, Dual):
        x = x.val
    return x


def _lift(f: Callable, fprime: Callable) -> Callable:
    """Build a dual-aware elementwise function from f and its derivative."""

    def g(x):
        if isinstance(x, Dual):
            d = fprime(x.val)
            return Dual(g(x.val), [d * a for a in x.der], x.tag)
        return f(x)

    return g


sin = _lift(np.sin, lambda x: cos(x))
cos = _lift(np.cos, lambda x: -sin(x))
exp = _lift(np.exp, lambda x: exp(x))
log = _lift(np.log, lambda x: 1.0 / x)
sqrt = _lift(np.sqrt, lambda x: 0.5 / sqrt(x))
tan = _lift(np.tan, lambda x: 1.0 + tan(x) ** 2)
arcsin = _lift(np.arcsin, lambda x: 1.0 / sqrt(1.0 - x * x))
arccos = _lift(np.arccos, lambda x: -1.0 / sqrt(1.0 - x * x))
arctan = _lift(np.arctan, lambda x: 1.0 / (1.0 + x * x))
sinh = _lift(np.sinh, lambda x: cosh(x))
cosh = _lift(np.cosh, lambda x: sinh(x))


def conj(x):
    if isinstance(x, Dual):
        return Dual(conj(x.val), [conj(a) for a in x.der], x.tag)
    return np.conj(x)


def real(x):
    if isinstance(x, Dual):
        return Dual(real(x.val), [real(a) for a in x.der], x.tag)
    return np.real(x)


def imag(x):
    if isinstance(x, Dual):
        return Dual(imag(x.val), [imag(a) for a in x.der], x.tag)
    return np.imag(x)


def abs2(x):
    """|x|^2 as a real quantity; smooth everywhere."""
    return real(x * conj(x))


def absolute(x):
    """|x| for real or complex input (not differentiable at 0)."""
    return sqrt(abs2(x))


def where(cond, a, b):
    """Elementwise select between two dual trees of the same tag."""
    if isinstance(a, Dual) or isinstance(b, Dual):
        tag = max(t.tag for t in (a, b) if isinstance(t, Dual))
        da = a if isinstance(a, Dual) and a.tag == tag else None
        db = b if isinstance(b, Dual) and b.tag == tag else None
        n = len((da or db).der)
        av = da.val if da is not None else a
        bv = db.val if db is not None else b
        ader = da.der if da is not None else (0.0,) * n
        bder = db.der if db is not None else (0.0,) * n
        return Dual(where(cond, av, bv), [where(cond, x, y) for x, y in zip(ader, bder)], tag)
    return np.where(cond, a, b)


def seed(xs: Sequence[Any]) -> list[Dual]:
    """Lift coordinates to duals with identity partials under a new tag."""
    tag = next(_tags)
    n = len(xs)
    out = []
    for i, x in enumerate(xs):
        der = [0.0] * n
        der[i] = 1.0
        out.append(Dual(x, der, tag))
    return out


def _tree_map(fn, tree):
    if isinstance(tree, (list, tuple)):
        return [_tree_map(fn, t) for t in tree]
    return fn(tree)


def partials(f: Callable, xs: Sequence[Any]) -> tuple[Any, list[Any]]:
    """Evaluate ``f(xs)`` and its partial derivatives in every coordinate.

    ``f`` may return a scalar or any nested list/tuple of scalars; the
    partials share that structure. Works when ``xs`` are themselves duals.
    """
    sx = seed(list(xs))
    tag = sx[0].tag
    out = f(sx)
    n = len(sx)

    def val(t):
        return t.val if isinstance(t, Dual) and t.tag == tag else t

    def der(i):
        def pick(t):
            if isinstance(t, Dual) and t.tag == tag:
                return t.der[i]
            return 0.0 * value(t) if not isinstance(t, Dual) else 0.0 * t

        return pick

    return _tree_map(val, out), [_tree_map(der(i), out) for i in range(n)]


def jacobian(f: Callable, xs: Sequence[Any]) -> tuple[list[Any], list[list[Any]]]:
    """Value and Jacobian ``J[i][j] = d f_i / d x_j`` of a vector function."""
    v, ps = partials(f, xs)
    return v, [[ps[j][i] for j in range(len(xs))] for i in range(len(v))]


def derivative(f: Callable, x: Any) -> tuple[Any, Any]:
    """Value and derivative of a scalar function of one variable."""
    v, ps = partials(lambda s: f(s[0]), [x])
    return v, ps[0]
