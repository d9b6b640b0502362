"""Exact arithmetic in Z[zeta_p] on integer coefficient vectors.

A vector c of length p stands for sum_r c[r] * zeta^r. Two vectors name the
same cyclotomic integer iff they differ by a multiple of the all-ones
vector, so reduction happens only when comparing or extracting a value.
Multiplication is cyclic convolution (the group ring Z[C_p] maps onto
Z[zeta_p]).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonRationalNorm
from .field import quadratic_character


@dataclass(frozen=True, eq=False)
class Cyclotomic:
    p: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.p:
            raise ValueError(f"need {self.p} coefficients, got {len(self.coeffs)}")

    @classmethod
    def of(cls, p: int, coeffs) -> Cyclotomic:
        return cls(p, tuple(int(c) for c in coeffs))

    @classmethod
    def integer(cls, p: int, value: int) -> Cyclotomic:
        return cls(p, (int(value),) + (0,) * (p - 1))

    @classmethod
    def zeta(cls, p: int, r: int = 1) -> Cyclotomic:
        c = [0] * p
        c[r % p] = 1
        return cls(p, tuple(c))

    def _coerce(self, other) -> Cyclotomic:
        if isinstance(other, Cyclotomic):
            if other.p != self.p:
                raise ValueError("mismatched cyclotomic orders")
            return other
        if isinstance(other, (int, np.integer)):
            return Cyclotomic.integer(self.p, int(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Cyclotomic(self.p, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.p, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.p
        out = [0] * p
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[(i + j) % p] += a * b
        return Cyclotomic(p, tuple(out))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers are not supported")
        result = Cyclotomic.integer(self.p, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def conj(self) -> Cyclotomic:
        """Complex conjugation, zeta -> zeta^-1."""
        c = self.coeffs
        return Cyclotomic(self.p, tuple(c[(-r) % self.p] for r in range(self.p)))

    def galois(self, t: int) -> Cyclotomic:
        """The automorphism zeta -> zeta^t for t prime to p."""
        out = [0] * self.p
        for r, c in enumerate(self.coeffs):
            out[(t * r) % self.p] += c
        return Cyclotomic(self.p, tuple(out))

    def canonical(self) -> tuple[int, ...]:
        """Coordinates in the basis 1, zeta, ..., zeta^(p-2)."""
        last = self.coeffs[-1]
        return tuple(c - last for c in self.coeffs[:-1])

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.canonical() == other.canonical()

    def __hash__(self):
        return hash((self.p, self.canonical()))

    def is_rational(self) -> bool:
        return not any(self.canonical()[1:])

    def to_int(self) -> int:
        if not self.is_rational():
            raise NonRationalNorm(f"{self.coeffs} is not a rational integer")
        return self.canonical()[0]

    def to_complex(self) -> complex:
        z = np.exp(2j * np.pi * np.arange(self.p) / self.p)
        return complex(np.dot(np.array(self.coeffs, dtype=float), z))

    def __repr__(self):
        return f"Cyclotomic({self.p}, {self.coeffs})"


def gauss_sum(p: int) -> Cyclotomic:
    """sum over r of eta(r) zeta^r."""
    return Cyclotomic.of(p, [quadratic_character(p, r) for r in range(p)])


def gauss_sum_square_check(p: int) -> int:
    """The square of the quadratic Gauss sum, as a rational integer."""
    g = gauss_sum(p)
    return (g * g).to_int()

