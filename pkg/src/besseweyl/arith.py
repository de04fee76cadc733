"""Integer arithmetic of spindle orbifolds and their length spectra."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class Weights:
    """Cone orders ``a1 >= a2 >= 1`` of the spindle S^2(a1, a2)."""

    a1: int
    a2: int

    def __post_init__(self):
        if not (isinstance(self.a1, int) and isinstance(self.a2, int)):
            raise TypeError("weights must be integers")
        if not self.a1 >= self.a2 >= 1:
            raise ValueError(f"weights must satisfy a1 >= a2 >= 1, got ({self.a1}, {self.a2})")

    @classmethod
    def parse(cls, text: str) -> "Weights":
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 2:
            raise ValueError(f"expected 'a1,a2', got {text!r}")
        return cls(int(parts[0]), int(parts[1]))

    @property
    def n(self) -> int:
        """a1 + a2."""
        return self.a1 + self.a2

    @property
    def c(self) -> int:
        return math.gcd(self.a1, self.a2)

    @property
    def p(self) -> int:
        return self.n // 2

    def as_tuple(self) -> tuple[int, int]:
        return (self.a1, self.a2)

    def __str__(self) -> str:
        return f"{self.a1},{self.a2}"


def is_admissible(w: Weights) -> bool:
    c = w.c
    return c in (1, 2) and w.n % 2 == 0 and (w.a1 * w.a2) % (c ** 3) == 0


def seifert_quotient_order(k: int, w: Weights) -> int:
    if k < 1:
        raise ValueError("k must be positive")
    return k // math.gcd(k, w.a1 - w.a2)


def spindle_from_finsler(p: int, q: int) -> Weights:
    """Weights (q, 2p - q) of the spindle dual to the ratio p/q."""
    if p < 1 or q < 1 or math.gcd(p, q) != 1:
        raise ValueError("p, q must be coprime positive integers")
    if not (Fraction(1, 2) < Fraction(p, q) <= 1):
        raise ValueError(f"p/q = {p}/{q} outside (1/2, 1]")
    return Weights(q, 2 * p - q)


@dataclass(frozen=True)
class Length:
    """A closed-geodesic length stored as an exact multiple of pi."""

    pi_multiple: Fraction
    role: str  # shortest | second-exceptional | regular

    @property
    def radians(self) -> float:
        return float(self.pi_multiple) * math.pi

    def __str__(self) -> str:
        m = self.pi_multiple
        num = "" if m.numerator == 1 else str(m.numerator)
        return f"{num}pi" if m.denominator == 1 else f"{num}pi/{m.denominator}"


@dataclass(frozen=True)
class LengthSpectrum:
    p: int
    q: int
    lengths: tuple[Length, ...]

    def by_role(self, role: str) -> Length | None:
        for length in self.lengths:
            if length.role == role:
                return length
        return None

    @property
    def shortest(self) -> Length:
        return min(self.lengths, key=lambda l: l.pi_multiple)

    def distinct(self) -> list[Length]:
        """Lengths with duplicates (e.g. all equal for the round case) merged."""
        seen: dict[Fraction, Length] = {}
        for length in self.lengths:
            seen.setdefault(length.pi_multiple, length)
        return sorted(seen.values(), key=lambda l: l.pi_multiple)


def length_spectrum(w: Weights) -> LengthSpectrum:
    if not is_admissible(w):
        raise ValueError(f"weights ({w}) are not admissible")
    if w.c != 1:
        raise ValueError("length spectrum is only computed for coprime weights")
    p, q = w.p, w.a1
    lengths = [Length(Fraction(2 * p, q), "shortest")]
    if 2 * p - q > 1:
        lengths.append(Length(Fraction(2 * p, 2 * p - q), "second-exceptional"))
    lengths.append(Length(Fraction(2 * p), "regular"))
    return LengthSpectrum(p, q, tuple(lengths))


def rational_fit(x: float, max_den: int = 1000) -> Fraction:
    """Closest fraction with bounded denominator (continued fractions)."""
    return Fraction(x).limit_denominator(max_den)
