"""Twisted cohomology of finite groups with U(1) coefficients.

U(1) is modelled additively as Q/Z (angles mod 1), with ``gamma`` acting
by ``a -> eps(gamma) a``.  The coboundary maps of the bar complex are
integer matrices, and everything is decided exactly from their Smith
normal forms:  for ``S = U D V`` with invariant factors ``s_i`` and rank
``r``, ``H^n = (+) Z/s_i(D_n)  (+)  (Q/Z)^(N_n - r_n - r_(n-1))``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .group import OrientifoldGroup

MAX_ENTRIES = 4_000_000  # cap on matrix size for exact elimination


class CohomologyError(ValueError):
    pass


def _frac_mod1(x) -> Fraction:
    f = Fraction(x)
    return f - (f.numerator // f.denominator)


@dataclass(frozen=True)
class TwistedCochain:
    """Map ``G^k -> Q/Z``; values listed over ``itertools.product`` order."""

    group: OrientifoldGroup
    degree: int
    values: Tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.values) != self.group.order ** self.degree:
            raise CohomologyError("cochain must have a value for every tuple")
        object.__setattr__(self, "values", tuple(_frac_mod1(v) for v in self.values))

    @classmethod
    def from_values(cls, group: OrientifoldGroup, degree: int,
                    values: Union[Mapping, Sequence]) -> "TwistedCochain":
        if isinstance(values, Mapping):
            vals = []
            for tup in itertools.product(group.elements, repeat=degree):
                v = values.get(tup, 0)
                vals.append(Fraction(v.angle) if hasattr(v, "angle") else Fraction(v))
            return cls(group, degree, tuple(vals))
        return cls(group, degree, tuple(Fraction(v) for v in values))

    @classmethod
    def zero(cls, group: OrientifoldGroup, degree: int) -> "TwistedCochain":
        return cls(group, degree, (Fraction(0),) * group.order ** degree)

    def index(self, tup: Sequence[int]) -> int:
        i = 0
        for a in tup:
            i = i * self.group.order + a
        return i

    def value(self, tup: Sequence[int]) -> Fraction:
        return self.values[self.index(tup)]

    def tuples(self):
        return itertools.product(self.group.elements, repeat=self.degree)

    def is_normalized(self) -> bool:
        e = self.group.identity
        return all(v == 0 for tup, v in zip(self.tuples(), self.values) if e in tup)

    def __add__(self, other: "TwistedCochain") -> "TwistedCochain":
        return TwistedCochain(self.group, self.degree,
                              tuple(a + b for a, b in zip(self.values, other.values)))

    def __sub__(self, other: "TwistedCochain") -> "TwistedCochain":
        return TwistedCochain(self.group, self.degree,
                              tuple(a - b for a, b in zip(self.values, other.values)))

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values)

    def to_json(self) -> dict:
        return {"degree": self.degree,
                "values": [{"args": [self.group.names[a] for a in tup],
                            "value": f"{v.numerator}/{v.denominator}"}
                           for tup, v in zip(self.tuples(), self.values) if v != 0]}


def _coboundary_terms(group: OrientifoldGroup, tup: Sequence[int]):
    """Terms ``(sign, sub-tuple, twisted)`` of ``(delta c)(tup)``."""
    k = len(tup) - 1
    out = [(group.eps(tup[0]), tuple(tup[1:]))]
    for i in range(k):
        merged = tuple(tup[:i]) + (group.mul(tup[i], tup[i + 1]),) + tuple(tup[i + 2:])
        out.append(((-1) ** (i + 1), merged))
    out.append(((-1) ** (k + 1), tuple(tup[:k])))
    return out


def delta(c: TwistedCochain) -> TwistedCochain:
    g = c.group
    vals = []
    for tup in itertools.product(g.elements, repeat=c.degree + 1):
        vals.append(sum((s * c.value(sub) for s, sub in _coboundary_terms(g, tup)),
                        Fraction(0)))
    return TwistedCochain(g, c.degree + 1, tuple(vals))


def is_cocycle(c: TwistedCochain) -> bool:
    return delta(c).is_zero()


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass
class SmithForm:
    """``U @ D @ V = diag(s)`` with unimodular ``U``, ``V``; ``V_inv`` kept too."""

    diag: List[int]
    U: np.ndarray
    V: np.ndarray
    V_inv: np.ndarray

    @property
    def rank(self) -> int:
        return len(self.diag)


def smith_normal_form(D: np.ndarray) -> SmithForm:
    M = np.array(D, dtype=np.int64)
    m, n = M.shape
    U = np.eye(m, dtype=np.int64)
    V = np.eye(n, dtype=np.int64)
    Vi = np.eye(n, dtype=np.int64)
    diag: List[int] = []
    r = 0
    while r < min(m, n):
        sub = M[r:, r:]
        nz = np.nonzero(sub)
        if len(nz[0]) == 0:
            break
        absv = np.abs(sub[nz])
        p = int(np.argmin(absv))
        i, j = nz[0][p] + r, nz[1][p] + r
        _swap_rows(M, U, r, i)
        _swap_cols(M, V, Vi, r, j)
        while True:
            piv = M[r, r]
            q = M[r + 1:, r] // piv
            if q.any():
                M[r + 1:] -= np.outer(q, M[r])
                U[r + 1:] -= np.outer(q, U[r])
            q = M[r, r + 1:] // piv
            if q.any():
                M[:, r + 1:] -= np.outer(M[:, r], q)
                V[:, r + 1:] -= np.outer(V[:, r], q)
                Vi[r] += q @ Vi[r + 1:]
            col_nz = np.nonzero(M[r + 1:, r])[0]
            row_nz = np.nonzero(M[r, r + 1:])[0]
            if len(col_nz) or len(row_nz):
                cands = [(abs(M[r + 1 + a, r]), "r", r + 1 + a) for a in col_nz]
                cands += [(abs(M[r, r + 1 + b]), "c", r + 1 + b) for b in row_nz]
                _, kind, idx = min(cands)
                if kind == "r":
                    _swap_rows(M, U, r, idx)
                else:
                    _swap_cols(M, V, Vi, r, idx)
                continue
            rest = M[r + 1:, r + 1:]
            bad = np.nonzero(rest % piv)
            if len(bad[0]):
                i = bad[0][0] + r + 1
                M[r] += M[i]
                U[r] += U[i]
                continue
            break
        if M[r, r] < 0:
            M[r] *= -1
            U[r] *= -1
        if np.abs(M).max() > 2 ** 40:
            raise CohomologyError("coefficient growth in Smith normal form")
        diag.append(int(M[r, r]))
        r += 1
    return SmithForm(diag, U, V, Vi)


def _swap_rows(M, U, a, b):
    if a != b:
        M[[a, b]] = M[[b, a]]
        U[[a, b]] = U[[b, a]]


def _swap_cols(M, V, Vi, a, b):
    if a != b:
        M[:, [a, b]] = M[:, [b, a]]
        V[:, [a, b]] = V[:, [b, a]]
        Vi[[a, b]] = Vi[[b, a]]


# ---------------------------------------------------------------------------
# bar complex


def _basis(group: OrientifoldGroup, n: int, normalized: bool) -> List[Tuple[int, ...]]:
    elems = [a for a in group.elements if not (normalized and a == group.identity)]
    return list(itertools.product(elems, repeat=n))


def coboundary_matrix(group: OrientifoldGroup, n: int, normalized: bool = True) -> np.ndarray:
    """Integer matrix of ``delta: C^n -> C^(n+1)`` on the (normalized) bar basis."""
    src = _basis(group, n, normalized)
    dst = _basis(group, n + 1, normalized)
    if len(src) * len(dst) > MAX_ENTRIES:
        raise CohomologyError(f"complex too large: {len(dst)} x {len(src)}")
    col = {t: i for i, t in enumerate(src)}
    D = np.zeros((len(dst), len(src)), dtype=np.int64)
    e = group.identity
    for row, tup in enumerate(dst):
        for s, sub in _coboundary_terms(group, tup):
            if normalized and e in sub:
                continue
            D[row, col[sub]] += s
    return D


@lru_cache(maxsize=64)
def _smith_cached(group: OrientifoldGroup, n: int, normalized: bool) -> SmithForm:
    return smith_normal_form(coboundary_matrix(group, n, normalized))


@dataclass(frozen=True)
class CohomologyGroup:
    degree: int
    invariant_factors: Tuple[int, ...]  # finite cyclic summands Z/s
    divisible_rank: int  # number of Q/Z summands
    representatives: Tuple[TwistedCochain, ...]

    @property
    def order(self) -> Optional[int]:
        if self.divisible_rank:
            return None
        out = 1
        for s in self.invariant_factors:
            out *= s
        return out

    def describe(self) -> str:
        parts = [f"Z/{s}" for s in self.invariant_factors]
        parts += ["Q/Z"] * self.divisible_rank
        return " + ".join(parts) if parts else "0"


def _vector_to_cochain(group, n, basis, vec) -> TwistedCochain:
    vals = {tup: v for tup, v in zip(basis, vec)}
    return TwistedCochain.from_values(group, n, vals)


def _rank(group: OrientifoldGroup, n: int) -> int:
    if n < 0:
        return 0
    return _smith_cached(group, n, True).rank


def cohomology(group: OrientifoldGroup, n: int) -> CohomologyGroup:
    """``H^n(G, U(1)_eps)`` with normalized representative cocycles."""
    if n < 0 or n > 3:
        raise CohomologyError("degree must be 0..3")
    if group.order > OrientifoldGroup.MAX_ORDER:
        raise CohomologyError("group too large")
    basis = _basis(group, n, True)
    sf = _smith_cached(group, n, True)
    factors, reps = [], []
    for i, s in enumerate(sf.diag):
        if s > 1:
            factors.append(s)
            vec = [Fraction(int(sf.V[row, i]), s) for row in range(len(basis))]
            reps.append(_vector_to_cochain(group, n, basis, vec))
    free = len(basis) - sf.rank - _rank(group, n - 1)
    return CohomologyGroup(n, tuple(factors), free, tuple(reps))


def class_coordinates(c: TwistedCochain) -> Tuple[int, ...]:
    """Coordinates of the class of a normalized cocycle along the invariant factors."""
    if not c.is_normalized():
        raise CohomologyError("class coordinates need a normalized cocycle")
    if not is_cocycle(c):
        raise CohomologyError("not a cocycle")
    basis = _basis(c.group, c.degree, True)
    sf = _smith_cached(c.group, c.degree, True)
    x = [c.value(t) for t in basis]
    out = []
    for i, s in enumerate(sf.diag):
        if s > 1:
            y = sum((int(sf.V_inv[i, j]) * x[j] for j in range(len(x))), Fraction(0))
            coord = y * s
            assert coord.denominator == 1
            out.append(int(coord) % s)
    return tuple(out)


def is_coboundary(c: TwistedCochain) -> Optional[TwistedCochain]:
    """A cochain ``b`` with ``delta b = c``, or ``None`` if there is none."""
    g, n = c.group, c.degree
    if n == 0:
        return TwistedCochain.zero(g, 0) if c.is_zero() else None
    if c.is_zero():
        return TwistedCochain.zero(g, n - 1)
    sf = _smith_cached(g, n - 1, False)
    rows = _basis(g, n, False)
    cvec = [c.value(t) for t in rows]
    z = [sum((int(sf.U[i, j]) * cvec[j] for j in range(len(cvec)) if sf.U[i, j]),
             Fraction(0)) for i in range(len(rows))]
    r = sf.rank
    if any(zi.denominator != 1 for zi in z[r:]):
        return None
    y = [z[i] / sf.diag[i] for i in range(r)] + [Fraction(0)] * (sf.V.shape[0] - r)
    src = _basis(g, n - 1, False)
    b = [sum((int(sf.V[row, i]) * y[i] for i in range(r) if sf.V[row, i]), Fraction(0))
         for row in range(len(src))]
    witness = _vector_to_cochain(g, n - 1, src, b)
    assert delta(witness) == c
    return witness


@dataclass(frozen=True)
class ObstructionClass:
    zero: bool
    trivializer: Optional[TwistedCochain]
    coordinates: Tuple[int, ...]
    representative: TwistedCochain


def obstruction_o3(u: TwistedCochain) -> ObstructionClass:
    """Class of a 3-cocycle; when zero, a 2-cochain trivializing it."""
    if u.degree != 3:
        raise CohomologyError("obstruction lives in degree 3")
    if not is_cocycle(u):
        raise CohomologyError("obstruction cochain is not closed")
    b = is_coboundary(u)
    coords = class_coordinates(u) if u.is_normalized() else ()
    return ObstructionClass(b is not None, b, coords, u)


def random_cochain(group: OrientifoldGroup, degree: int, rng: np.random.Generator,
                   denominator: int = 12, normalized: bool = False) -> TwistedCochain:
    vals = []
    for tup in itertools.product(group.elements, repeat=degree):
        if normalized and group.identity in tup:
            vals.append(Fraction(0))
        else:
            vals.append(Fraction(int(rng.integers(denominator)), denominator))
    return TwistedCochain(group, degree, tuple(vals))


def twist_classes(group: OrientifoldGroup) -> List[TwistedCochain]:
    """One normalized representative per element of ``H^2`` (finite case)."""
    h2 = cohomology(group, 2)
    if h2.divisible_rank:
        raise CohomologyError("H^2 is not finite")
    out = []
    for coeffs in itertools.product(*(range(s) for s in h2.invariant_factors)):
        c = TwistedCochain.zero(group, 2)
        for a, rep in zip(coeffs, h2.representatives):
            for _ in range(a):
                c = c + rep
        out.append(c)
    return out


# ---------------------------------------------------------------------------
# independent finite-coefficient oracle


def _image_order_mod_prime_power(D: np.ndarray, p: int, e: int) -> int:
    """Order of the column span of ``D`` in ``(Z/p^e)^m``, by valuation pivoting."""
    N = p ** e
    M = [[int(x) % N for x in row] for row in D]
    m = len(M)
    n = len(M[0]) if m else 0
    order = 1
    rows, cols = list(range(m)), list(range(n))

    def val(x):
        if x == 0:
            return e
        k = 0
        while x % p == 0:
            x //= p
            k += 1
        return k

    while rows and cols:
        best = None
        for i in rows:
            for j in cols:
                if M[i][j]:
                    v = val(M[i][j])
                    if best is None or v < best[0]:
                        best = (v, i, j)
                        if v == 0:
                            break
            if best and best[0] == 0:
                break
        if best is None:
            break
        v, i, j = best
        unit = M[i][j] // p ** v
        inv = pow(unit, -1, N)
        for r in rows:
            if r != i and M[r][j]:
                f = (M[r][j] // p ** v) * inv % N
                M[r] = [(a - f * b) % N for a, b in zip(M[r], M[i])]
        for c in cols:
            if c != j and M[i][c]:
                f = (M[i][c] // p ** v) * inv % N
                for r in range(m):
                    M[r][c] = (M[r][c] - f * M[r][j]) % N
        order *= p ** (e - v)
        rows.remove(i)
        cols.remove(j)
    return order


def finite_cohomology_order(group: OrientifoldGroup, n: int, N: int) -> int:
    """``|H^n(G, (1/N)Z/Z)|`` for ``N`` a prime power, by modular elimination."""
    fac = _prime_power(N)
    if fac is None:
        raise CohomologyError("oracle needs a prime-power modulus")
    p, e = fac
    dim = len(_basis(group, n, True))
    img_n = _image_order_mod_prime_power(coboundary_matrix(group, n), p, e) if dim else 1
    ker = N ** dim // img_n
    if n == 0:
        return ker
    img_prev = _image_order_mod_prime_power(coboundary_matrix(group, n - 1), p, e)
    return ker // img_prev


def brute_force_cohomology_order(group: OrientifoldGroup, n: int, N: int) -> int:
    """``|H^n(G, (1/N)Z/Z)|`` by listing every normalized cochain."""
    e = group.identity
    src = _basis(group, n - 1, True) if n else []
    dst = _basis(group, n, True)
    if N ** len(dst) > 2_000_000:
        raise CohomologyError("brute force too large")

    def coboundary(vals: Dict[tuple, int], tup) -> int:
        tot = 0
        for s, sub in _coboundary_terms(group, tup):
            if e not in sub:
                tot += s * vals.get(sub, 0)
        return tot % N

    cocycles = 0
    nxt = _basis(group, n + 1, True)
    for vec in itertools.product(range(N), repeat=len(dst)):
        vals = dict(zip(dst, vec))
        if all(coboundary(vals, t) == 0 for t in nxt):
            cocycles += 1
    if n == 0:
        return cocycles
    image = set()
    for vec in itertools.product(range(N), repeat=len(src)):
        vals = dict(zip(src, vec))
        image.add(tuple(coboundary(vals, t) for t in dst))
    return cocycles // len(image)


def _prime_power(N: int) -> Optional[Tuple[int, int]]:
    for p in range(2, N + 1):
        if N % p == 0:
            e = 0
            while N % p == 0:
                N //= p
                e += 1
            return (p, e) if N == 1 else None
    return None


def orders_from_finite(group: OrientifoldGroup, max_degree: int, finite_orders: Sequence[int]) -> List[int]:
    """Recover ``|H^n(G, Q/Z)|`` from ``|H^n(G, Z/N)|`` when ``N`` kills every group.

    Uses ``|H^n(Z/N)| = |H^(n-1)(Q/Z) / N| * |H^n(Q/Z)[N]|``; the degree-0
    term is ``Q/Z`` (divisible) for trivial ``eps`` and ``Z/2`` otherwise.
    """
    h_prev = 2 if group.odd() else 1
    out = []
    for n in range(1, max_degree + 1):
        h = finite_orders[n] // h_prev
        out.append(h)
        h_prev = h
    return out
