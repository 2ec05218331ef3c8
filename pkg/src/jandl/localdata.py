"""Pulled-back local data of a gerbe with Jandl structure and brane module.

Conventions used throughout (one place, shared by generator and validator):

* Edge-valued entries (``edge_a``, ``edge_pi``, ``edge_t``) are stored for the
  canonical direction of a lifted edge; traversing it backwards inverts the
  value.  ``sigma`` maps canonical directions to canonical directions.
* Index tuples are stored sorted; permutations follow from antisymmetry
  and any tuple with a repeated index is the identity.
* Module transports act right-to-left: ``edge_t`` maps the fibre at the
  start of an edge to the fibre at its end, so a path ``e1 e2 ...`` is
  transported by ``... T(e2) T(e1)``.
* At rank 1 the module entries are stored as :class:`Phase` so everything is
  exact; at rank ``n > 1`` they are ``numpy`` arrays.

Relations (``s``/``e`` are the start/end vertex of an oriented edge,
``k`` is the index involution, ``sigma`` the sheet swap)::

    R1   prod_{dt} A(i,j)               = B_j / B_i
    R2   A_ij A_ik^-1 A_jk               = g_ijk(s) / g_ijk(e)
    R3   g_ijl g_jkl                     = g_ikl g_ijk
    R4   B(st,ki) B(t,i)^-1              = prod_{dt} Pi_i
    R5   A(se,ki,kj)^-1 A(e,i,j)^-1       = Pi_j Pi_i^-1 chi_ij(e) / chi_ij(s)
    R6   g(sv,ki,kj,kl)^-1 g(v,i,j,l)^-1  = chi_ij^-1 chi_il chi_jl^-1
    R7   Pi(se,ki)^-1 Pi(e,i)             = f_i(s) / f_i(e)
    R8   chi(sv,ki,kj)^-1 chi(v,i,j)      = f_i^-1 f_j
    R9   f(sv,ki) f(v,i)                  = 1
    R10  conj T(se,ki)                    = H_i(e)^-1 T(e,i) H_i(s) Pi(e,i)^-1
    R11  conj G(sv,ki,kj)                 = H_i^-1 G_ij H_j chi_ij^-1
    R12  H(v,i) conj H(sv,ki)             = f(v,i)
    R13  G_ij G_jk = g_ijk G_ik ;  T(e,j) = G_ij(e)^-1 T(e,i) G_ij(s) A(e,i,j)^-1
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .phase import Phase, UNITARY_TOL, dagger, phase_product, random_unitary
from .surface import Admissible, DoubleCover, OrientedEdge, bisect_edge

ModuleValue = Union[Phase, np.ndarray]
ONE = Phase.one()


class DatumError(ValueError):
    """Malformed datum: missing or unexpected entries."""


# ---------------------------------------------------------------------------
# module value arithmetic (Phase at rank 1, matrices otherwise)


def m_mul(*xs: ModuleValue) -> ModuleValue:
    out = xs[0]
    for x in xs[1:]:
        out = out * x if isinstance(out, Phase) else out @ x
    return out


def m_inv(x: ModuleValue) -> ModuleValue:
    return x.inv() if isinstance(x, Phase) else dagger(x)


def m_conj(x: ModuleValue) -> ModuleValue:
    return x.conj() if isinstance(x, Phase) else x.conj()


def m_scale(x: ModuleValue, p: Phase) -> ModuleValue:
    return x * p if isinstance(x, Phase) else complex(p) * x


def m_close(a: ModuleValue, b: ModuleValue, tol: float = UNITARY_TOL) -> bool:
    if isinstance(a, Phase):
        return a == b
    return bool(np.max(np.abs(a - b)) <= tol * max(1, a.shape[0]))


def m_identity(rank: int) -> ModuleValue:
    return ONE if rank == 1 else np.eye(rank, dtype=complex)


def _sort_sign(idx: Sequence[int]) -> Tuple[Optional[Tuple[int, ...]], int]:
    """Sorted tuple and permutation parity; ``None`` on repeated indices."""
    if len(set(idx)) != len(idx):
        return None, 1
    lst = list(idx)
    sign = 1
    for a in range(len(lst)):
        for b in range(len(lst) - 1 - a):
            if lst[b] > lst[b + 1]:
                lst[b], lst[b + 1] = lst[b + 1], lst[b]
                sign = -sign
    return tuple(lst), sign


# ---------------------------------------------------------------------------
# datum


@dataclass(frozen=True, eq=False)
class OrientifoldDatum:
    adm: Admissible
    face_b: Dict[Tuple[int, int], Phase]
    edge_a: Dict[Tuple[int, int, int], Phase]
    g_v: Dict[Tuple[int, int, int, int], Phase]
    edge_pi: Dict[Tuple[int, int], Phase]
    chi_v: Dict[Tuple[int, int, int], Phase]
    f_v: Dict[Tuple[int, int], Phase]
    rank: int = 1
    edge_t: Dict[Tuple[int, int], ModuleValue] = field(default_factory=dict)
    g_mod: Dict[Tuple[int, int, int], ModuleValue] = field(default_factory=dict)
    h_mod: Dict[Tuple[int, int], ModuleValue] = field(default_factory=dict)
    _clean: Dict[int, bool] = field(default_factory=dict, repr=False, compare=False)

    @property
    def kmap(self) -> Tuple[int, ...]:
        return self.adm.kmap

    # accessors implementing the storage conventions
    def B(self, f: int, i: int) -> Phase:
        return self.face_b[(f, i)]

    def A(self, oe: OrientedEdge, i: int, j: int) -> Phase:
        if i == j:
            return ONE
        x, o = oe
        if i < j:
            v = self.edge_a[(x, i, j)]
            return v if o > 0 else v.inv()
        v = self.edge_a[(x, j, i)]
        return v.inv() if o > 0 else v

    def g(self, v: int, i: int, j: int, k: int) -> Phase:
        key, sign = _sort_sign((i, j, k))
        if key is None:
            return ONE
        val = self.g_v[(v,) + key]
        return val if sign > 0 else val.inv()

    def Pi(self, oe: OrientedEdge, i: int) -> Phase:
        v = self.edge_pi[(oe[0], i)]
        return v if oe[1] > 0 else v.inv()

    def chi(self, v: int, i: int, j: int) -> Phase:
        if i == j:
            return ONE
        if i < j:
            return self.chi_v[(v, i, j)]
        return self.chi_v[(v, j, i)].inv()

    def f(self, v: int, i: int) -> Phase:
        return self.f_v[(v, i)]

    def T(self, oe: OrientedEdge, i: int) -> ModuleValue:
        val = self.edge_t[(oe[0], i)]
        return val if oe[1] > 0 else m_inv(val)

    def G(self, v: int, i: int, j: int) -> ModuleValue:
        if i == j:
            return m_identity(self.rank)
        if i < j:
            return self.g_mod[(v, i, j)]
        return m_inv(self.g_mod[(v, j, i)])

    def H(self, v: int, i: int) -> ModuleValue:
        return self.h_mod[(v, i)]

    def tables(self) -> Dict[str, dict]:
        return {"face_b": self.face_b, "edge_a": self.edge_a, "g_v": self.g_v,
                "edge_pi": self.edge_pi, "chi_v": self.chi_v, "f_v": self.f_v,
                "edge_t": self.edge_t, "g_mod": self.g_mod, "h_mod": self.h_mod}

    def with_tables(self, **tables) -> "OrientifoldDatum":
        return replace(self, _clean={}, **tables)


def required_keys(dc: DoubleCover, adm: Admissible) -> Dict[str, List[tuple]]:
    keys: Dict[str, List[tuple]] = {k: [] for k in (
        "face_b", "edge_a", "g_v", "edge_pi", "chi_v", "f_v", "edge_t", "g_mod", "h_mod")}
    bd_edges = set(dc.lifted_boundary_edges())
    bd_verts = set(dc.lifted_boundary_vertices())
    for f in range(dc.n_lifted_faces):
        keys["face_b"] += [(f, i) for i in sorted(adm.face[f])]
    for x in range(dc.n_lifted_edges):
        idx = sorted(adm.edge[x])
        keys["edge_a"] += [(x, i, j) for i, j in itertools.combinations(idx, 2)]
        keys["edge_pi"] += [(x, i) for i in idx]
        if x in bd_edges:
            keys["edge_t"] += [(x, i) for i in idx]
    for v in range(dc.n_lifted_vertices):
        idx = sorted(adm.vertex[v])
        keys["g_v"] += [(v,) + c for c in itertools.combinations(idx, 3)]
        keys["chi_v"] += [(v, i, j) for i, j in itertools.combinations(idx, 2)]
        keys["f_v"] += [(v, i) for i in idx]
        if v in bd_verts:
            keys["g_mod"] += [(v, i, j) for i, j in itertools.combinations(idx, 2)]
            keys["h_mod"] += [(v, i) for i in idx]
    return keys


def check_complete(d: OrientifoldDatum, dc: DoubleCover) -> None:
    probs = d.adm.check(dc)
    if probs:
        raise DatumError("admissible sets invalid: " + "; ".join(probs[:5]))
    for name, keys in required_keys(dc, d.adm).items():
        table = d.tables()[name]
        missing = [k for k in keys if k not in table]
        if missing:
            raise DatumError(f"{name}: missing entries for {missing[:5]}")
        extra = set(table) - set(keys)
        if extra:
            raise DatumError(f"{name}: unexpected entries {sorted(extra)[:5]}")
        for k in keys:
            val = table[k]
            if d.rank == 1 or name not in ("edge_t", "g_mod", "h_mod"):
                if not isinstance(val, Phase):
                    raise DatumError(f"{name}{k}: expected a phase")
            elif not (isinstance(val, np.ndarray) and val.shape == (d.rank, d.rank)):
                raise DatumError(f"{name}{k}: expected a {d.rank}x{d.rank} unitary")


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    relation: str
    cell: Tuple[str, int]
    indices: Tuple[int, ...]

    def to_json(self) -> dict:
        return {"relation": self.relation, "cell": list(self.cell),
                "indices": list(self.indices)}


def validate(d: OrientifoldDatum, dc: DoubleCover, tol: float = UNITARY_TOL) -> List[Violation]:
    """All violated relations, with their location.  Raises on malformed data."""
    check_complete(d, dc)
    out: List[Violation] = []
    k = d.kmap

    def bad(rel, kind, cell, idx):
        out.append(Violation(rel, (kind, cell), tuple(idx)))

    for f in range(dc.n_lifted_faces):
        bd = dc.face_boundary(f)
        idx = sorted(d.adm.face[f])
        for i, j in itertools.combinations(idx, 2):
            lhs = phase_product(d.A(oe, i, j) for oe in bd)
            if lhs != d.B(f, j) / d.B(f, i):
                bad("R1", "face", f, (i, j))
        for i in idx:
            lhs = d.B(f ^ 1, k[i]) / d.B(f, i)
            rhs = phase_product(d.Pi(oe, i) for oe in bd)
            if lhs != rhs:
                bad("R4", "face", f, (i,))

    bd_edges = set(dc.lifted_boundary_edges())
    for x in range(dc.n_lifted_edges):
        oe = (x, 1)
        s, e = dc.lifted_edge_ends[x]
        soe = (x ^ 1, 1)
        idx = sorted(d.adm.edge[x])
        for i, j, l in itertools.combinations(idx, 3):
            lhs = d.A(oe, i, j) / d.A(oe, i, l) * d.A(oe, j, l)
            if lhs != d.g(s, i, j, l) / d.g(e, i, j, l):
                bad("R2", "edge", x, (i, j, l))
        for i, j in itertools.combinations(idx, 2):
            lhs = (d.A(soe, k[i], k[j]) * d.A(oe, i, j)).inv()
            rhs = d.Pi(oe, j) / d.Pi(oe, i) * d.chi(e, i, j) / d.chi(s, i, j)
            if lhs != rhs:
                bad("R5", "edge", x, (i, j))
        for i in idx:
            if d.Pi(oe, i) / d.Pi(soe, k[i]) != d.f(s, i) / d.f(e, i):
                bad("R7", "edge", x, (i,))
        if x in bd_edges:
            for i in idx:
                lhs = m_conj(d.T(soe, k[i]))
                rhs = m_scale(m_mul(m_inv(d.H(e, i)), d.T(oe, i), d.H(s, i)), d.Pi(oe, i).inv())
                if not m_close(lhs, rhs, tol):
                    bad("R10", "edge", x, (i,))
            for i, j in itertools.permutations(idx, 2):
                rhs = m_scale(m_mul(m_inv(d.G(e, i, j)), d.T(oe, i), d.G(s, i, j)),
                              d.A(oe, i, j).inv())
                if not m_close(d.T(oe, j), rhs, tol):
                    bad("R13", "edge", x, (i, j))

    bd_verts = set(dc.lifted_boundary_vertices())
    for v in range(dc.n_lifted_vertices):
        sv = v ^ 1
        idx = sorted(d.adm.vertex[v])
        for i, j, kk, l in itertools.combinations(idx, 4):
            if d.g(v, i, j, l) * d.g(v, j, kk, l) != d.g(v, i, kk, l) * d.g(v, i, j, kk):
                bad("R3", "vertex", v, (i, j, kk, l))
        for i, j, l in itertools.combinations(idx, 3):
            lhs = (d.g(sv, k[i], k[j], k[l]) * d.g(v, i, j, l)).inv()
            rhs = d.chi(v, i, l) / d.chi(v, i, j) / d.chi(v, j, l)
            if lhs != rhs:
                bad("R6", "vertex", v, (i, j, l))
        for i, j in itertools.combinations(idx, 2):
            if d.chi(v, i, j) / d.chi(sv, k[i], k[j]) != d.f(v, j) / d.f(v, i):
                bad("R8", "vertex", v, (i, j))
        for i in idx:
            if not (d.f(sv, k[i]) * d.f(v, i)).is_one():
                bad("R9", "vertex", v, (i,))
        if v in bd_verts:
            for i, j in itertools.combinations(idx, 2):
                lhs = m_conj(d.G(sv, k[i], k[j]))
                rhs = m_scale(m_mul(m_inv(d.H(v, i)), d.G(v, i, j), d.H(v, j)),
                              d.chi(v, i, j).inv())
                if not m_close(lhs, rhs, tol):
                    bad("R11", "vertex", v, (i, j))
            for i in idx:
                lhs = m_mul(d.H(v, i), m_conj(d.H(sv, k[i])))
                if not m_close(lhs, m_scale(m_identity(d.rank), d.f(v, i)), tol):
                    bad("R12", "vertex", v, (i,))
            for i, j, l in itertools.permutations(idx, 3):
                lhs = m_mul(d.G(v, i, j), d.G(v, j, l))
                rhs = m_scale(d.G(v, i, l), d.g(v, i, j, l))
                if not m_close(lhs, rhs, tol):
                    bad("R13", "vertex", v, (i, j, l))
                    break
    return out


def is_clean(d: OrientifoldDatum, dc: DoubleCover) -> bool:
    key = id(dc)
    if key not in d._clean:
        d._clean[key] = not validate(d, dc)
    return d._clean[key]


# ---------------------------------------------------------------------------
# gauge transformations


@dataclass(frozen=True, eq=False)
class GaugeDatum:
    """Gauge parameters; absent entries are the identity.

    ``edge_w`` is stored for canonical edge directions and ``u_v`` for sorted
    index pairs, with the same conventions as the datum.
    """

    edge_w: Dict[Tuple[int, int], Phase] = field(default_factory=dict)
    u_v: Dict[Tuple[int, int, int], Phase] = field(default_factory=dict)
    h_v: Dict[Tuple[int, int], Phase] = field(default_factory=dict)
    module_u: Dict[Tuple[int, int], ModuleValue] = field(default_factory=dict)

    def W(self, oe: OrientedEdge, i: int) -> Phase:
        w = self.edge_w.get((oe[0], i), ONE)
        return w if oe[1] > 0 else w.inv()

    def u(self, v: int, i: int, j: int) -> Phase:
        if i == j:
            return ONE
        if i < j:
            return self.u_v.get((v, i, j), ONE)
        return self.u_v.get((v, j, i), ONE).inv()

    def h(self, v: int, i: int) -> Phase:
        return self.h_v.get((v, i), ONE)

    def U(self, v: int, i: int, rank: int) -> ModuleValue:
        val = self.module_u.get((v, i))
        return m_identity(rank) if val is None else val


def apply_gauge(d: OrientifoldDatum, gd: GaugeDatum, dc: DoubleCover) -> OrientifoldDatum:
    k = d.kmap
    face_b = {}
    for (f, i), val in d.face_b.items():
        w = phase_product(gd.W(oe, i) for oe in dc.face_boundary(f))
        face_b[(f, i)] = val * w
    edge_a = {}
    for (x, i, j), val in d.edge_a.items():
        s, e = dc.lifted_edge_ends[x]
        oe = (x, 1)
        edge_a[(x, i, j)] = (val * gd.W(oe, j) / gd.W(oe, i)
                             * gd.u(e, i, j) / gd.u(s, i, j))
    g_v = {}
    for (v, i, j, l), val in d.g_v.items():
        g_v[(v, i, j, l)] = val * gd.u(v, i, l) / gd.u(v, j, l) / gd.u(v, i, j)
    edge_pi = {}
    for (x, i), val in d.edge_pi.items():
        s, e = dc.lifted_edge_ends[x]
        edge_pi[(x, i)] = (val / gd.W((x ^ 1, 1), k[i]) / gd.W((x, 1), i)
                           * gd.h(e, i) / gd.h(s, i))
    chi_v = {}
    for (v, i, j), val in d.chi_v.items():
        chi_v[(v, i, j)] = (val / gd.u(v ^ 1, k[i], k[j]) / gd.u(v, i, j)
                            * gd.h(v, i) / gd.h(v, j))
    f_v = {}
    for (v, i), val in d.f_v.items():
        f_v[(v, i)] = val / gd.h(v, i) * gd.h(v ^ 1, k[i])
    n = d.rank
    edge_t = {}
    for (x, i), val in d.edge_t.items():
        s, e = dc.lifted_edge_ends[x]
        t = m_scale(val, gd.W((x, 1), i).inv())
        edge_t[(x, i)] = m_mul(gd.U(e, i, n), t, m_inv(gd.U(s, i, n)))
    g_mod = {}
    for (v, i, j), val in d.g_mod.items():
        t = m_scale(val, gd.u(v, i, j).inv())
        g_mod[(v, i, j)] = m_mul(gd.U(v, i, n), t, m_inv(gd.U(v, j, n)))
    h_mod = {}
    for (v, i), val in d.h_mod.items():
        t = m_scale(val, gd.h(v, i).inv())
        h_mod[(v, i)] = m_mul(gd.U(v, i, n), t, m_inv(m_conj(gd.U(v ^ 1, k[i], n))))
    return d.with_tables(face_b=face_b, edge_a=edge_a, g_v=g_v, edge_pi=edge_pi,
                         chi_v=chi_v, f_v=f_v, edge_t=edge_t, g_mod=g_mod, h_mod=h_mod)


def compose_gauge(first: GaugeDatum, second: GaugeDatum) -> GaugeDatum:
    """Gauge equal to applying ``first`` and then ``second``."""

    def merge(a, b):
        out = dict(a)
        for key, val in b.items():
            out[key] = out[key] * val if key in out else val
        return out

    mod = dict(first.module_u)
    for key, val in second.module_u.items():
        mod[key] = m_mul(val, mod[key]) if key in mod else val
    return GaugeDatum(merge(first.edge_w, second.edge_w), merge(first.u_v, second.u_v),
                      merge(first.h_v, second.h_v), mod)


# ---------------------------------------------------------------------------
# random generation


def random_phase(rng: np.random.Generator, denominator: int) -> Phase:
    return Phase(Fraction(int(rng.integers(denominator)), denominator))


def random_admissible(dc: DoubleCover, rng: np.random.Generator, n_labels: int = 3,
                      face_max: int = 2, edge_extra: int = 1,
                      vertex_extra: int = 2) -> Admissible:
    """Random monotone, sigma-equivariant index sets on ``I = labels x {0,1}``.

    Index ``2a + s`` is label ``a`` on sheet ``s``; ``k`` swaps the sheet.
    """
    n_idx = 2 * n_labels
    kmap = tuple(i ^ 1 for i in range(n_idx))

    def pick(lo, hi):
        size = int(rng.integers(lo, hi + 1))
        return set(int(i) for i in rng.choice(n_idx, size=min(size, n_idx), replace=False))

    face = [frozenset()] * dc.n_lifted_faces
    for t in range(dc.n_faces):
        a = pick(1, face_max)
        face[2 * t] = frozenset(a)
        face[2 * t + 1] = frozenset(kmap[i] for i in a)
    edge = [frozenset()] * dc.n_lifted_edges
    for e in range(dc.n_edges):
        x = 2 * e
        a = set().union(*(face[f] for f in dc.edge_faces_lifted(x)))
        a |= pick(0, edge_extra)
        edge[x] = frozenset(a)
        edge[x + 1] = frozenset(kmap[i] for i in a)
    inc: Dict[int, set] = {v: set() for v in range(dc.n_lifted_vertices)}
    for x, (s, e) in enumerate(dc.lifted_edge_ends):
        inc[s] |= edge[x]
        inc[e] |= edge[x]
    vertex = [frozenset()] * dc.n_lifted_vertices
    for v in range(dc.n_vertices):
        a = inc[2 * v] | pick(0, vertex_extra)
        vertex[2 * v] = frozenset(a)
        vertex[2 * v + 1] = frozenset(kmap[i] for i in a)
    return Admissible(tuple(face), tuple(edge), tuple(vertex), kmap)


def trivial_datum(dc: DoubleCover, adm: Admissible, rank: int = 1) -> OrientifoldDatum:
    keys = required_keys(dc, adm)
    one = m_identity(rank)
    tabs = {name: {k: ONE for k in ks} for name, ks in keys.items()
            if name not in ("edge_t", "g_mod", "h_mod")}
    for name in ("edge_t", "g_mod", "h_mod"):
        tabs[name] = {k: (one if rank == 1 else one.copy()) for k in keys[name]}
    return OrientifoldDatum(adm, rank=rank, **tabs)


def random_gauge(dc: DoubleCover, adm: Admissible, rng: np.random.Generator, rank: int = 1,
                 denominator: int = 12, edges: Optional[Sequence[int]] = None,
                 vertices: Optional[Sequence[int]] = None) -> GaugeDatum:
    """Random gauge, optionally supported on the given lifted edges/vertices only."""
    edges = range(dc.n_lifted_edges) if edges is None else edges
    vertices = range(dc.n_lifted_vertices) if vertices is None else vertices
    bd_verts = set(dc.lifted_boundary_vertices())
    w = {(x, i): random_phase(rng, denominator) for x in edges for i in sorted(adm.edge[x])}
    u, h, mod = {}, {}, {}
    for v in vertices:
        idx = sorted(adm.vertex[v])
        for i, j in itertools.combinations(idx, 2):
            u[(v, i, j)] = random_phase(rng, denominator)
        for i in idx:
            h[(v, i)] = random_phase(rng, denominator)
            if v in bd_verts:
                mod[(v, i)] = (random_phase(rng, denominator) if rank == 1
                               else random_unitary(rank, rng))
    return GaugeDatum(w, u, h, mod)


def twist_sign(twist) -> Phase:
    """The constant ``a_{k,k}`` of a 2-cocycle on the Jandl group (must be +-1)."""
    if twist is None:
        return ONE
    if isinstance(twist, Phase):
        c = twist
    else:
        from .cohomology import TwistedCochain, is_cocycle
        from .group import jandl_group
        coch = twist if isinstance(twist, TwistedCochain) else TwistedCochain.from_values(
            jandl_group(), 2, twist)
        if not is_cocycle(coch):
            raise ValueError("twist is not a 2-cocycle")
        if coch.group.order != 2 or coch.group.eps(1) != -1:
            raise ValueError("twist must be a cochain on the Jandl group")
        c = Phase(coch.value((1, 1)))
    if not (c * c).is_one():
        raise ValueError("twist constant must square to one")
    return c


def apply_twist(d: OrientifoldDatum, dc: DoubleCover, c: Phase) -> OrientifoldDatum:
    """Twist the Jandl structure by a constant ``c = +-1`` (``f -> c f``).

    The module follows along: ``H`` is multiplied by ``alpha(v)``, equal to 1
    on lift-0 vertices and ``c`` on lift-1 vertices (so that
    ``alpha(v) alpha(sigma v) = c``), and transports along lift-1 boundary
    edges absorb the resulting mismatch.
    """
    if not (c * c).is_one():
        raise ValueError("twist constant must square to one")

    def alpha(v: int) -> Phase:
        return c if v & 1 else ONE

    f_v = {key: val * c for key, val in d.f_v.items()}
    h_mod = {(v, i): m_scale(val, alpha(v)) for (v, i), val in d.h_mod.items()}
    edge_t = {}
    for (x, i), val in d.edge_t.items():
        s, e = dc.lifted_edge_ends[x]
        edge_t[(x, i)] = m_scale(val, alpha(e) / alpha(s)) if x & 1 else val
    return d.with_tables(f_v=f_v, h_mod=h_mod, edge_t=edge_t)


def generate_pure_gauge(dc: DoubleCover, seed: int, rank: int = 1, twist=None,
                        n_labels: int = 3, background: bool = False,
                        denominator: int = 12,
                        adm: Optional[Admissible] = None) -> OrientifoldDatum:
    """Random validate-clean datum gauge-equivalent to a simple base datum.

    The base datum is trivial, or with ``background`` carries a random
    curvature phase per face and a random boundary transport per edge.  A
    ``twist`` (a Jandl-group 2-cocycle, or its constant ``+-1``) multiplies
    ``f`` by ``a_kk`` before the gauge, see :func:`apply_twist`.
    """
    rng = np.random.default_rng(seed)
    if adm is None:
        adm = random_admissible(dc, rng, n_labels)
    d = trivial_datum(dc, adm, rank)
    c = twist_sign(twist)
    tabs = d.tables()
    if background:
        for t in range(dc.n_faces):
            beta = random_phase(rng, denominator)
            for f in (2 * t, 2 * t + 1):
                for i in adm.face[f]:
                    tabs["face_b"][(f, i)] = beta
        for e in dc.boundary_edges:
            tau = random_phase(rng, denominator) if rank == 1 else random_unitary(rank, rng)
            for i in adm.edge[2 * e]:
                tabs["edge_t"][(2 * e, i)] = tau
            for i in adm.edge[2 * e + 1]:
                tabs["edge_t"][(2 * e + 1, i)] = m_conj(tau)
    d = d.with_tables(**tabs)
    if not c.is_one():
        d = apply_twist(d, dc, c)
    return apply_gauge(d, random_gauge(dc, adm, rng, rank, denominator), dc)


# ---------------------------------------------------------------------------
# subdivision


def subdivide(d: OrientifoldDatum, dc: DoubleCover, e: int, seed: int = 0,
              denominator: int = 12) -> Tuple[OrientifoldDatum, DoubleCover]:
    """Bisect edge ``e`` and carry the datum to the refined complex.

    The new midpoint copies the vertex data of the tail of each lifted edge;
    the half next to the tail is neutral and the other half carries the old
    edge data.  The new interior edge copies the edge joining the tail to the
    opposite corner, and the sub-face containing the tail gets trivial
    curvature.  A random gauge supported on the new cells then mixes
    everything up.
    """
    sub = bisect_edge(dc, e)
    new = sub.new
    k = d.kmap
    old_ids = range(dc.n_faces)
    # vertices
    vmap: Dict[int, int] = {}
    for t in old_ids:
        for c in range(3):
            for s in (0, 1):
                vmap[dc.corner_lift(t, c, s)] = new.corner_lift(*sub.corner_map[(t, c)], s)
    # edge provenance: new lifted edge -> (old lifted edge, sign) or None (neutral)
    emap: Dict[int, Optional[Tuple[int, int]]] = {}
    mid_src: Dict[int, int] = {}  # new midpoint vertex -> old tail vertex
    mid_adm: Dict[int, frozenset] = {}
    src_face: Dict[int, int] = {}  # new face lift -> old face lift, -1 for trivial curvature
    eadm: Dict[int, frozenset] = {}
    for t in old_ids:
        for s in (0, 1):
            old_f = 2 * t + s
            if t not in sub.face_parts:
                src_face[2 * t + s] = old_f
            for kk in range(3):
                if (t, kk) in sub.side_map:
                    ox, oo = dc.side_lift(t, kk, s)
                    nx, no = new.side_lift(*sub.side_map[(t, kk)], s)
                    emap[nx] = (ox, oo * no)
                    eadm[nx] = d.adm.edge[ox]
    for t, kk in sub.halves:
        ta, tb = sub.face_parts[t]
        for s in (0, 1):
            x, o = dc.side_lift(t, kk, s)
            tail = dc.lifted_edge_ends[x][0]
            # induced direction runs p -> q on sheet 0; canonical agrees when o = +1
            tail_is_p = (s == 0) == (o > 0)
            h1, h2 = sub.halves[(t, kk)]
            y1, o1 = new.side_lift(*h1, s)
            y2, o2 = new.side_lift(*h2, s)
            (yn, _), (yf, of) = ((y1, o1), (y2, o2)) if tail_is_p else ((y2, o2), (y1, o1))
            emap[yn] = None
            emap[yf] = (x, o * of)
            eadm[yn] = eadm[yf] = d.adm.edge[x]
            m = new.corner_lift(*sub.new_corners[t], s)
            mid_src[m] = tail
            mid_adm[m] = d.adm.edge[x]
            ys, os_ = new.side_lift(*sub.spokes[t][0], s)
            if tail_is_p:
                z, oz = dc.side_lift(t, (kk + 2) % 3, s)
                emap[ys] = (z, -oz * os_)
            else:
                z, oz = dc.side_lift(t, (kk + 1) % 3, s)
                emap[ys] = (z, oz * os_)
            eadm[ys] = d.adm.face[2 * t + s]
            fa, fb = 2 * ta + s, 2 * tb + s
            src_face[fa] = -1 if tail_is_p else 2 * t + s
            src_face[fb] = 2 * t + s if tail_is_p else -1
    fadm: List[frozenset] = [frozenset()] * new.n_lifted_faces
    for t in old_ids:
        if t not in sub.face_parts:
            for s in (0, 1):
                fadm[2 * t + s] = d.adm.face[2 * t + s]
    for t in sub.face_parts:
        for s in (0, 1):
            for part in sub.face_parts[t]:
                fadm[2 * part + s] = d.adm.face[2 * t + s]
    vadm: List[frozenset] = [frozenset()] * new.n_lifted_vertices
    for ov, nv in vmap.items():
        vadm[nv] = d.adm.vertex[ov]
    for m, a in mid_adm.items():
        vadm[m] = a
    adm = Admissible(tuple(fadm), tuple(eadm[y] for y in range(new.n_lifted_edges)),
                     tuple(vadm), k)

    inv_v = {b: a for a, b in vmap.items()}
    inv_v.update(mid_src)
    keys = required_keys(new, adm)
    n = d.rank
    face_b = {}
    for (f, i) in keys["face_b"]:
        face_b[(f, i)] = d.B(src_face[f], i) if src_face[f] >= 0 else ONE
    edge_a, edge_pi, edge_t = {}, {}, {}
    for (y, i, j) in keys["edge_a"]:
        src = emap[y]
        edge_a[(y, i, j)] = ONE if src is None else d.A(src, i, j)
    for (y, i) in keys["edge_pi"]:
        src = emap[y]
        edge_pi[(y, i)] = ONE if src is None else d.Pi(src, i)
    for (y, i) in keys["edge_t"]:
        src = emap[y]
        edge_t[(y, i)] = m_identity(n) if src is None else d.T(src, i)
    g_v = {(v, i, j, l): d.g(inv_v[v], i, j, l) for (v, i, j, l) in keys["g_v"]}
    chi_v = {(v, i, j): d.chi(inv_v[v], i, j) for (v, i, j) in keys["chi_v"]}
    f_v = {(v, i): d.f(inv_v[v], i) for (v, i) in keys["f_v"]}
    g_mod = {(v, i, j): d.G(inv_v[v], i, j) for (v, i, j) in keys["g_mod"]}
    h_mod = {(v, i): d.H(inv_v[v], i) for (v, i) in keys["h_mod"]}
    nd = OrientifoldDatum(adm, face_b, edge_a, g_v, edge_pi, chi_v, f_v, n,
                          edge_t, g_mod, h_mod)
    rng = np.random.default_rng(seed)
    kept = {new.side_lift(*sub.side_map[sd], s)[0] for sd in sub.side_map for s in (0, 1)}
    new_edges = [y for y in emap if y not in kept]
    gd = random_gauge(new, adm, rng, n, denominator, edges=sorted(new_edges),
                      vertices=sorted(mid_src))
    return apply_gauge(nd, gd, new), new
