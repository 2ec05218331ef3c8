"""Exact U(1) phases and small unitary matrices.

A :class:`Phase` stores ``exp(2*pi*i*angle)`` through its rational angle,
reduced into ``[0, 1)``.  Equality of phases is therefore decidable, which
is what the rank-1 holonomy checks rely on.  Rank ``n > 1`` data are plain
``numpy`` complex arrays compared with a tolerance.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, Sequence, Union

import numpy as np

UNITARY_TOL = 1e-9


class Phase:
    """An element of U(1) given by a rational angle mod 1.

    The angle is kept as a reduced pair ``num / den`` with ``0 <= num < den``;
    plain integer arithmetic is much cheaper than going through ``Fraction``.
    """

    __slots__ = ("num", "den")

    def __init__(self, angle: Union[Fraction, int, str] = 0) -> None:
        if isinstance(angle, str):
            angle = Fraction(angle)
        a = Fraction(angle)
        object.__setattr__(self, "num", a.numerator % a.denominator)
        object.__setattr__(self, "den", a.denominator)

    @classmethod
    def _make(cls, n: int, d: int) -> "Phase":
        g = gcd(n, d)
        if g != 1:
            n //= g
            d //= g
        out = object.__new__(cls)
        object.__setattr__(out, "num", n % d)
        object.__setattr__(out, "den", d)
        return out

    def __setattr__(self, name, value):
        raise AttributeError("Phase is immutable")

    @property
    def angle(self) -> Fraction:
        return Fraction(self.num, self.den)

    @classmethod
    def one(cls) -> "Phase":
        return _ONE

    @classmethod
    def parse(cls, text: str) -> "Phase":
        p, _, q = text.partition("/")
        return cls(Fraction(int(p), int(q) if q else 1))

    def __mul__(self, other: "Phase") -> "Phase":
        if not isinstance(other, Phase):
            return NotImplemented
        if self.den == other.den:
            return Phase._make(self.num + other.num, self.den)
        return Phase._make(self.num * other.den + other.num * self.den, self.den * other.den)

    def __truediv__(self, other: "Phase") -> "Phase":
        if not isinstance(other, Phase):
            return NotImplemented
        if self.den == other.den:
            return Phase._make(self.num - other.num, self.den)
        return Phase._make(self.num * other.den - other.num * self.den, self.den * other.den)

    def __pow__(self, k: int) -> "Phase":
        return Phase._make(self.num * k, self.den)

    def inv(self) -> "Phase":
        return Phase._make(-self.num, self.den)

    # complex conjugation of a unit complex number is its inverse
    conj = inv

    def __eq__(self, other) -> bool:
        return isinstance(other, Phase) and self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash(("Phase", self.num, self.den))

    def __reduce__(self):
        return (Phase, (self.angle,))

    def is_one(self) -> bool:
        return self.num == 0

    def __complex__(self) -> complex:
        return complex(np.exp(2j * np.pi * self.num / self.den))

    def to_text(self) -> str:
        return f"{self.num}/{self.den}"

    def __repr__(self) -> str:
        return f"Phase({self.to_text()})"

    __str__ = to_text


_ONE = Phase(0)


def phase_mul(a: Phase, b: Phase) -> Phase:
    return a * b


def phase_pow(a: Phase, k: int) -> Phase:
    return a ** k


def phase_product(phases: Iterable[Phase]) -> Phase:
    out = _ONE
    for p in phases:
        out = out * p
    return out


# ---------------------------------------------------------------------------
# unitaries


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=complex)


def dagger(u: np.ndarray) -> np.ndarray:
    return u.conj().T


def unitarity_defect(u: np.ndarray) -> float:
    return float(np.max(np.abs(u @ dagger(u) - np.eye(u.shape[0]))))


def as_unitary(entries, tol: float = UNITARY_TOL) -> np.ndarray:
    u = np.asarray(entries, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1] or u.shape[0] < 1:
        raise ValueError(f"unitary must be a square matrix, got shape {u.shape}")
    if unitarity_defect(u) > tol:
        raise ValueError("matrix is not unitary within tolerance")
    return u


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random U(n) element (QR of a complex Ginibre matrix)."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def unitary_path_product(factors: Sequence[np.ndarray]) -> np.ndarray:
    """Left-to-right product ``factors[0] @ factors[1] @ ...``."""
    if not factors:
        raise ValueError("empty product has no defined rank")
    n = factors[0].shape[0]
    for f in factors:
        if f.shape != (n, n):
            raise ValueError(f"rank mismatch: {f.shape} vs {(n, n)}")
    return reduce(np.matmul, factors)


def phase_to_unitary(p: Phase, n: int = 1) -> np.ndarray:
    return complex(p) * np.eye(n, dtype=complex)


def unitary_to_json(u: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in u]


def unitary_from_json(rows) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)
