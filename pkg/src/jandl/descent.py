"""Descent of flat (Gamma, eps)-equivariant local data to the free quotient.

The base is a finite Gamma-set of points ``X`` on which the kernel
``Gamma_0 = ker(eps)`` acts freely; every index lives at a point and data
are only defined on tuples of indices living at the same point.  Gamma
acts on data by ``(gamma phi)_i = phi_{gamma^-1 i}^eps(gamma)`` (complex
conjugation for unitaries when ``eps = -1``).

Flat relations, with Cech coboundaries ``(df)_ij = f_j / f_i``,
``(dchi)_ijk = chi_jk chi_ik^-1 chi_ij``::

    F1  dg = 1
    F2  (gamma g) g^-1 dchi^gamma = 1
    F3  (g1 chi^g2) (chi^g1g2)^-1 chi^g1 = d f^{g1,g2}
    F4  (g1 f^{g2,g3}) (f^{g1g2,g3})^-1 f^{g1,g2g3} (f^{g1,g2})^-1 = 1
    N   chi^1 = 1,  f^{1,g} = f^{g,1} = 1,  H^1 = 1
    M1  G_ij G_jk = g_ijk G_ik
    M2  (gamma G)_ij = (H^gamma_i)^-1 G_ij H^gamma_j (chi^gamma_ij)^-1
    M3  H^g1_i (g1 H^g2)_i = f^{g1,g2}_i H^g1g2_i

For the Jandl group ``{1, k}`` these are the surface relations R3, R6,
R8, R9, R11, R12 and R13 at a single point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .cohomology import TwistedCochain, is_cocycle
from .group import IndexAction, OrientifoldGroup, quotient_group
from .localdata import (ModuleValue, Violation, m_close, m_conj, m_identity, m_inv, m_mul,
                        m_scale, random_phase, _sort_sign)
from .phase import Phase, UNITARY_TOL, random_unitary

ONE = Phase.one()


class DescentError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FlatSpace:
    """Points and indices with compatible Gamma actions."""

    group: OrientifoldGroup
    points: IndexAction
    indices: IndexAction
    location: Tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.location) != self.indices.size:
            raise DescentError("every index needs a location")
        for g in self.group.elements:
            for i in range(self.indices.size):
                if self.location[self.indices.act(g, i)] != self.points.act(g, self.location[i]):
                    raise DescentError("index action does not cover the point action")

    def at(self, x: int) -> List[int]:
        return [i for i in range(self.indices.size) if self.location[i] == x]

    def same_point_tuples(self, n: int):
        for x in range(self.points.size):
            yield from itertools.combinations(self.at(x), n)

    def kernel_is_free(self) -> bool:
        return self.points.is_free_on(self.group.kernel())


def act_phase(group: OrientifoldGroup, g: int, p: Phase) -> Phase:
    return p if group.eps(g) == 1 else p.inv()


def act_module(group: OrientifoldGroup, g: int, u: ModuleValue) -> ModuleValue:
    return u if group.eps(g) == 1 else m_conj(u)


@dataclass(frozen=True, eq=False)
class FlatEquivariantDatum:
    space: FlatSpace
    g_tab: Dict[Tuple[int, int, int], Phase]
    chi_tab: Dict[int, Dict[Tuple[int, int], Phase]]
    f_tab: Dict[Tuple[int, int], Dict[int, Phase]]
    rank: int = 0  # 0 means no module layer
    G_tab: Dict[Tuple[int, int], ModuleValue] = field(default_factory=dict)
    H_tab: Dict[int, Dict[int, ModuleValue]] = field(default_factory=dict)

    @property
    def group(self) -> OrientifoldGroup:
        return self.space.group

    def inv_act(self, g: int, i: int) -> int:
        return self.space.indices.act(self.group.inv(g), i)

    def g(self, i: int, j: int, k: int) -> Phase:
        key, sign = _sort_sign((i, j, k))
        if key is None:
            return ONE
        v = self.g_tab[key]
        return v if sign > 0 else v.inv()

    def chi(self, gam: int, i: int, j: int) -> Phase:
        if i == j:
            return ONE
        if i < j:
            return self.chi_tab[gam][(i, j)]
        return self.chi_tab[gam][(j, i)].inv()

    def f(self, g1: int, g2: int, i: int) -> Phase:
        return self.f_tab[(g1, g2)][i]

    def G(self, i: int, j: int) -> ModuleValue:
        if i == j:
            return m_identity(self.rank)
        if i < j:
            return self.G_tab[(i, j)]
        return m_inv(self.G_tab[(j, i)])

    def H(self, gam: int, i: int) -> ModuleValue:
        return self.H_tab[gam][i]

    def tables_equal(self, other: "FlatEquivariantDatum") -> bool:
        if self.g_tab != other.g_tab or self.chi_tab != other.chi_tab:
            return False
        if self.f_tab != other.f_tab or self.rank != other.rank:
            return False
        if set(self.G_tab) != set(other.G_tab):
            return False
        for k, v in self.G_tab.items():
            if not m_close(v, other.G_tab[k], 0.0 if self.rank == 1 else UNITARY_TOL):
                return False
        for gam, tab in self.H_tab.items():
            for i, v in tab.items():
                if not m_close(v, other.H_tab[gam][i], 0.0 if self.rank == 1 else UNITARY_TOL):
                    return False
        return True


def validate_flat(d: FlatEquivariantDatum, tol: float = UNITARY_TOL) -> List[Violation]:
    """Violated flat relations; an empty list means the datum is clean."""
    sp, grp = d.space, d.group
    e = grp.identity
    out: List[Violation] = []

    def bad(rel, cell, idx):
        out.append(Violation(rel, ("point", cell), tuple(idx)))

    for x in range(sp.points.size):
        here = sp.at(x)
        for i, j, k, l in itertools.combinations(here, 4):
            if d.g(j, k, l) / d.g(i, k, l) * d.g(i, j, l) / d.g(i, j, k) != ONE:
                bad("F1", x, (i, j, k, l))
        for gam in grp.elements:
            for i, j, k in itertools.combinations(here, 3):
                moved = act_phase(grp, gam, d.g(*(d.inv_act(gam, a) for a in (i, j, k))))
                dchi = d.chi(gam, j, k) / d.chi(gam, i, k) * d.chi(gam, i, j)
                if moved / d.g(i, j, k) * dchi != ONE:
                    bad("F2", x, (gam, i, j, k))
        for g1, g2 in itertools.product(grp.elements, repeat=2):
            g12 = grp.mul(g1, g2)
            for i, j in itertools.combinations(here, 2):
                moved = act_phase(grp, g1, d.chi(g2, d.inv_act(g1, i), d.inv_act(g1, j)))
                lhs = moved / d.chi(g12, i, j) * d.chi(g1, i, j)
                if lhs != d.f(g1, g2, j) / d.f(g1, g2, i):
                    bad("F3", x, (g1, g2, i, j))
        for g1, g2, g3 in itertools.product(grp.elements, repeat=3):
            for i in here:
                moved = act_phase(grp, g1, d.f(g2, g3, d.inv_act(g1, i)))
                val = (moved / d.f(grp.mul(g1, g2), g3, i) * d.f(g1, grp.mul(g2, g3), i)
                       / d.f(g1, g2, i))
                if val != ONE:
                    bad("F4", x, (g1, g2, g3, i))
        for i, j in itertools.combinations(here, 2):
            if d.chi(e, i, j) != ONE:
                bad("N", x, (e, i, j))
        for gam in grp.elements:
            for i in here:
                if d.f(e, gam, i) != ONE or d.f(gam, e, i) != ONE:
                    bad("N", x, (gam, i))
        if not d.rank:
            continue
        for i in here:
            if not m_close(d.H(e, i), m_identity(d.rank), tol):
                bad("N", x, ("H", i))
        for i, j, k in itertools.permutations(here, 3):
            if not m_close(m_mul(d.G(i, j), d.G(j, k)), m_scale(d.G(i, k), d.g(i, j, k)), tol):
                bad("M1", x, (i, j, k))
        for gam in grp.elements:
            for i, j in itertools.permutations(here, 2):
                lhs = act_module(grp, gam, d.G(d.inv_act(gam, i), d.inv_act(gam, j)))
                rhs = m_scale(m_mul(m_inv(d.H(gam, i)), d.G(i, j), d.H(gam, j)),
                              d.chi(gam, i, j).inv())
                if not m_close(lhs, rhs, tol):
                    bad("M2", x, (gam, i, j))
        for g1, g2 in itertools.product(grp.elements, repeat=2):
            for i in here:
                moved = act_module(grp, g1, d.H(g2, d.inv_act(g1, i)))
                lhs = m_mul(d.H(g1, i), moved)
                rhs = m_scale(d.H(grp.mul(g1, g2), i), d.f(g1, g2, i))
                if not m_close(lhs, rhs, tol):
                    bad("M3", x, (g1, g2, i))
    return out


# ---------------------------------------------------------------------------
# construction helpers


def trivial_flat_datum(space: FlatSpace, rank: int = 0) -> FlatEquivariantDatum:
    grp = space.group
    g_tab = {t: ONE for t in space.same_point_tuples(3)}
    pairs = list(space.same_point_tuples(2))
    chi = {gam: {p: ONE for p in pairs} for gam in grp.elements}
    f = {(a, b): {i: ONE for i in range(space.indices.size)}
         for a in grp.elements for b in grp.elements}
    G, H = {}, {}
    if rank:
        G = {p: m_identity(rank) for p in pairs}
        H = {gam: {i: m_identity(rank) for i in range(space.indices.size)}
             for gam in grp.elements}
    return FlatEquivariantDatum(space, g_tab, chi, f, rank, G, H)


@dataclass(frozen=True, eq=False)
class FlatGauge:
    u: Dict[Tuple[int, int], Phase]
    h: Dict[int, Dict[int, Phase]]  # h[gamma][i], identity for gamma = 1
    U: Dict[int, ModuleValue] = field(default_factory=dict)


def random_flat_gauge(space: FlatSpace, rng: np.random.Generator, rank: int = 0,
                      denominator: int = 12) -> FlatGauge:
    grp = space.group
    u = {p: random_phase(rng, denominator) for p in space.same_point_tuples(2)}
    h = {gam: {i: (ONE if gam == grp.identity else random_phase(rng, denominator))
               for i in range(space.indices.size)} for gam in grp.elements}
    U = {}
    if rank:
        U = {i: (random_phase(rng, denominator) if rank == 1 else random_unitary(rank, rng))
             for i in range(space.indices.size)}
    return FlatGauge(u, h, U)


def apply_flat_gauge(d: FlatEquivariantDatum, gauge: FlatGauge) -> FlatEquivariantDatum:
    grp = d.group

    def u(i, j):
        if i == j:
            return ONE
        return gauge.u[(i, j)] if i < j else gauge.u[(j, i)].inv()

    def moved_u(gam, i, j):
        return act_phase(grp, gam, u(d.inv_act(gam, i), d.inv_act(gam, j)))

    g_tab = {(i, j, k): v * u(i, k) / u(j, k) / u(i, j) for (i, j, k), v in d.g_tab.items()}
    chi = {}
    for gam, tab in d.chi_tab.items():
        h = gauge.h[gam]
        chi[gam] = {(i, j): v * moved_u(gam, i, j) / u(i, j) * h[i] / h[j]
                    for (i, j), v in tab.items()}
    f = {}
    for (g1, g2), tab in d.f_tab.items():
        h1, h12 = gauge.h[g1], gauge.h[grp.mul(g1, g2)]
        f[(g1, g2)] = {i: v * h12[i] / h1[i]
                       / act_phase(grp, g1, gauge.h[g2][d.inv_act(g1, i)])
                       for i, v in tab.items()}
    G, H = {}, {}
    if d.rank:
        def U(i):
            return gauge.U.get(i, m_identity(d.rank))

        G = {(i, j): m_mul(U(i), m_scale(v, u(i, j).inv()), m_inv(U(j)))
             for (i, j), v in d.G_tab.items()}
        for gam, tab in d.H_tab.items():
            H[gam] = {i: m_mul(U(i), m_scale(v, gauge.h[gam][i].inv()),
                               m_inv(act_module(grp, gam, U(d.inv_act(gam, i)))))
                      for i, v in tab.items()}
    return FlatEquivariantDatum(d.space, g_tab, chi, f, d.rank, G, H)


def twist_flat(d: FlatEquivariantDatum, omega: TwistedCochain) -> FlatEquivariantDatum:
    """Multiply ``f`` by a normalized group 2-cocycle (no module layer)."""
    if omega.group is not d.group and omega.group != d.group:
        raise DescentError("twist lives on a different group")
    if not is_cocycle(omega) or not omega.is_normalized():
        raise DescentError("twist must be a normalized 2-cocycle")
    if d.rank:
        raise DescentError("twisting a datum with module layer is not supported")
    f = {(g1, g2): {i: v * Phase(omega.value((g1, g2))) for i, v in tab.items()}
         for (g1, g2), tab in d.f_tab.items()}
    return FlatEquivariantDatum(d.space, d.g_tab, d.chi_tab, f, 0)


def random_flat_datum(space: FlatSpace, seed: int, rank: int = 0,
                      twist: Optional[TwistedCochain] = None) -> FlatEquivariantDatum:
    rng = np.random.default_rng(seed)
    d = trivial_flat_datum(space, rank)
    if twist is not None:
        d = twist_flat(d, twist)
    return apply_flat_gauge(d, random_flat_gauge(space, rng, rank))


# ---------------------------------------------------------------------------
# spaces


def orbit_space(group: OrientifoldGroup, stabilizers: Sequence[Sequence[int]],
                labels: Sequence[int]) -> FlatSpace:
    """Disjoint union of orbits ``Gamma / S_m``, with ``labels[m]`` indices per point.

    Indices are ``(point, label)`` with Gamma acting on the point only.
    """
    points: List[Tuple[int, frozenset]] = []
    for m, stab in enumerate(stabilizers):
        stab = frozenset(stab)
        seen = set()
        for a in group.elements:
            coset = frozenset(group.mul(a, s) for s in stab)
            if coset not in seen:
                seen.add(coset)
                points.append((m, coset))
    pos = {p: n for n, p in enumerate(points)}

    def act_point(g, n):
        m, coset = points[n]
        return pos[(m, frozenset(group.mul(g, c) for c in coset))]

    pt_action = tuple(tuple(act_point(g, n) for n in range(len(points))) for g in group.elements)
    idx = [(n, l) for n, (m, _) in enumerate(points) for l in range(labels[m])]
    ipos = {p: n for n, p in enumerate(idx)}
    ind_action = tuple(tuple(ipos[(act_point(g, n), l)] for n, l in idx) for g in group.elements)
    return FlatSpace(group, IndexAction(group, pt_action), IndexAction(group, ind_action),
                     tuple(n for n, _ in idx))


# ---------------------------------------------------------------------------
# quotient


@dataclass(frozen=True)
class QuotientMap:
    """Bookkeeping of a quotient: orbit numbering, lifts and odd transporters."""

    point_of: Tuple[int, ...]  # upstairs point -> quotient point
    index_of: Tuple[int, ...]
    point_lift: Tuple[int, ...]  # quotient point -> chosen upstairs point
    index_lift: Tuple[int, ...]  # quotient index -> upstairs index at the chosen point
    transporter: Tuple[Optional[int], ...]  # odd gamma with gamma x~(q) = x~(k q)


def _orbits(action: IndexAction, subgroup: Sequence[int]) -> Tuple[List[Tuple[int, ...]], List[int]]:
    orbits = action.orbits(subgroup)
    of = [0] * action.size
    for n, orb in enumerate(orbits):
        for i in orb:
            of[i] = n
    return orbits, of


def quotient(d: FlatEquivariantDatum) -> Tuple[FlatEquivariantDatum, QuotientMap]:
    sp, grp = d.space, d.group
    kernel = grp.kernel()
    if not sp.kernel_is_free() or not sp.indices.is_free_on(kernel):
        raise DescentError("the kernel of eps does not act freely")
    qgrp, proj = quotient_group(grp)
    porbs, pof = _orbits(sp.points, kernel)
    iorbs, iof = _orbits(sp.indices, kernel)
    plift = tuple(min(o) for o in porbs)
    ilift = []
    for orb in iorbs:
        q = pof[sp.location[orb[0]]]
        here = [i for i in orb if sp.location[i] == plift[q]]
        assert len(here) == 1
        ilift.append(here[0])
    odd = grp.odd()
    rep = {}
    for qg in qgrp.elements:
        rep[qg] = next(a for a in grp.elements if proj[a] == qg)
    pt_action = tuple(tuple(pof[sp.points.act(rep[qg], plift[q])] for q in range(len(porbs)))
                      for qg in qgrp.elements)
    ind_action = tuple(tuple(iof[sp.indices.act(rep[qg], ilift[a])] for a in range(len(iorbs)))
                       for qg in qgrp.elements)
    location = tuple(pof[sp.location[ilift[a]]] for a in range(len(iorbs)))
    qspace = FlatSpace(qgrp, IndexAction(qgrp, pt_action), IndexAction(qgrp, ind_action), location)
    trans: List[Optional[int]] = []
    for q in range(len(porbs)):
        if not odd:
            trans.append(None)
            continue
        kq = pt_action[1][q]
        cands = [a for a in odd if sp.points.act(a, plift[q]) == plift[kq]]
        assert len(cands) == 1
        trans.append(cands[0])
    qmap = QuotientMap(tuple(pof), tuple(iof), plift, tuple(ilift), tuple(trans))

    L = ilift
    g_tab = {(a, b, c): d.g(L[a], L[b], L[c]) for (a, b, c) in qspace.same_point_tuples(3)}
    pairs = list(qspace.same_point_tuples(2))
    e = qgrp.identity
    chi = {e: {p: ONE for p in pairs}}
    f = {(a, b): {i: ONE for i in range(len(iorbs))}
         for a in qgrp.elements for b in qgrp.elements}
    if odd:
        k = 1
        chi[k] = {}
        for a, b in pairs:
            gi = grp.inv(trans[location[a]])
            chi[k][(a, b)] = d.chi(gi, L[a], L[b])
        for a in range(len(iorbs)):
            t = trans[location[a]]
            f[(k, k)][a] = d.f(grp.inv(t), t, L[a])
    G, H = {}, {}
    if d.rank:
        G = {(a, b): d.G(L[a], L[b]) for (a, b) in pairs}
        H = {e: {a: m_identity(d.rank) for a in range(len(iorbs))}}
        if odd:
            H[1] = {a: d.H(grp.inv(trans[location[a]]), L[a]) for a in range(len(iorbs))}
    return FlatEquivariantDatum(qspace, g_tab, chi, f, d.rank, G, H), qmap


def quotient_module(d: FlatEquivariantDatum) -> Tuple[Dict, Dict]:
    """Module layer of the quotient (the ``G`` and ``H`` tables)."""
    if not d.rank:
        raise DescentError("datum has no module layer")
    q, _ = quotient(d)
    return q.G_tab, q.H_tab


def quotient_gauge(d: FlatEquivariantDatum, gauge: FlatGauge) -> FlatGauge:
    """The gauge induced on the quotient by an upstairs gauge."""
    q, qm = quotient(d)
    grp = d.group
    L = qm.index_lift
    u = {}
    for a, b in q.space.same_point_tuples(2):
        i, j = L[a], L[b]
        u[(a, b)] = gauge.u[(i, j)] if i < j else gauge.u[(j, i)].inv()
    h = {q.group.identity: {a: ONE for a in range(len(L))}}
    if q.group.order == 2:
        h[1] = {a: gauge.h[grp.inv(qm.transporter[q.space.location[a]])][L[a]]
                for a in range(len(L))}
    U = {a: gauge.U[L[a]] for a in range(len(L))} if gauge.U else {}
    return FlatGauge(u, h, U)


# ---------------------------------------------------------------------------
# canonical pullback


def _odd_involution_complement(grp: OrientifoldGroup) -> Optional[int]:
    for a in grp.odd():
        if grp.mul(a, a) == grp.identity:
            return a
    return None


def canonical_pullback(dq: FlatEquivariantDatum, grp: OrientifoldGroup) -> FlatEquivariantDatum:
    """Equivariant datum over ``grp`` whose quotient is ``dq`` on the nose."""
    qgrp, proj = quotient_group(grp)
    if qgrp.order != dq.group.order:
        raise DescentError("quotient group of the target does not match the datum's group")
    qsp = dq.space
    jandl = qgrp.order == 2
    s = _odd_involution_complement(grp) if jandl else None
    # upstairs points, grouped by the quotient point they sit over
    pts: List[Tuple[int, frozenset]] = []
    orbit_stab: Dict[int, frozenset] = {}
    for q in range(qsp.points.size):
        kq = qsp.points.act(1, q) if jandl else q
        if jandl and kq < q:
            continue
        if jandl and kq == q:
            if s is None:
                raise DescentError("a fixed quotient point needs an odd involution in the group")
            stab = frozenset((grp.identity, s))
        else:
            stab = frozenset((grp.identity,))
        orbit_stab[q] = stab
    for q in range(qsp.points.size):
        anchor = q if q in orbit_stab else qsp.points.act(1, q)
        stab = orbit_stab[anchor]
        cosets = sorted({frozenset(grp.mul(a, t) for t in stab)
                         for a in grp.elements
                         if (proj[a] == 0) == (q == anchor)}, key=sorted)
        pts += [(anchor, c) for c in cosets]
    pos = {p: n for n, p in enumerate(pts)}
    over = []
    for anchor, coset in pts:
        a = min(coset)
        over.append(anchor if proj[a] == 0 else qsp.points.act(1, anchor))

    def act_point(g, n):
        anchor, coset = pts[n]
        return pos[(anchor, frozenset(grp.mul(g, c) for c in coset))]

    pt_action = tuple(tuple(act_point(g, n) for n in range(len(pts))) for g in grp.elements)
    idx = sorted((a, n) for n in range(len(pts)) for a in qsp.at(over[n]))
    ipos = {p: m for m, p in enumerate(idx)}
    ind_action = tuple(tuple(ipos[(qsp.indices.act(proj[g], a), act_point(g, n))]
                             for a, n in idx) for g in grp.elements)
    space = FlatSpace(grp, IndexAction(grp, pt_action), IndexAction(grp, ind_action),
                      tuple(n for _, n in idx))
    lab = [a for a, _ in idx]
    g_tab = {(i, j, k): dq.g(lab[i], lab[j], lab[k]) for i, j, k in space.same_point_tuples(3)}
    pairs = list(space.same_point_tuples(2))
    chi = {gam: {(i, j): (dq.chi(1, lab[i], lab[j]) if grp.eps(gam) == -1 else ONE)
                 for i, j in pairs} for gam in grp.elements}
    f = {(g1, g2): {i: (dq.f(1, 1, lab[i]) if grp.eps(g1) == grp.eps(g2) == -1 else ONE)
                    for i in range(len(idx))}
         for g1 in grp.elements for g2 in grp.elements}
    G, H = {}, {}
    if dq.rank:
        G = {(i, j): dq.G(lab[i], lab[j]) for i, j in pairs}
        H = {gam: {i: (dq.H(1, lab[i]) if grp.eps(gam) == -1 else m_identity(dq.rank))
                   for i in range(len(idx))} for gam in grp.elements}
    return FlatEquivariantDatum(space, g_tab, chi, f, dq.rank, G, H)
