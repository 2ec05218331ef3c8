"""Surface holonomy from local data: the unoriented formula and its checks.

The unoriented amplitude is a product of three factors:

1. faces of the fundamental domain, with edge and vertex corrections,
2. the oriented 1-complex built from orientation-reversing edges and the
   boundary edges whose face lift is not in the chosen boundary lift,
3. traces of module transports around the chosen boundary lift.

At rank 1 the result is an exact :class:`Phase`; at rank ``n`` the traces
make it a complex number.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Union

import numpy as np

from .localdata import (ModuleValue, OrientifoldDatum, is_clean, m_identity, m_inv,
                        m_mul)
from .phase import Phase
from .surface import (ChoiceError, DomainChoice, DoubleCover, OrientedEdge,
                      boundary_sets, check_choice, chosen_edge_lift,
                      orientation_reversing_edges)

HolonomyValue = Union[Phase, complex]


class HolonomyError(ValueError):
    pass


def _trace(x: ModuleValue) -> Union[Phase, complex]:
    return x if isinstance(x, Phase) else complex(np.trace(x))


def _combine(phase: Phase, traces: Sequence[Union[Phase, complex]]) -> HolonomyValue:
    if all(isinstance(t, Phase) for t in traces):
        out = phase
        for t in traces:
            out = out * t
        return out
    val = complex(phase)
    for t in traces:
        val *= complex(t)
    return val


def _circle_transport(d: OrientifoldDatum, dc: DoubleCover, circle: Sequence[OrientedEdge],
                      eidx: Sequence[int], vidx: Sequence[int]) -> ModuleValue:
    out = m_identity(d.rank)
    for oe in circle:
        a = eidx[oe[0]]
        s, e = dc.start(oe), dc.end(oe)
        step = m_mul(m_inv(d.G(e, a, vidx[e])), d.T(oe, a), d.G(s, a, vidx[s]))
        out = m_mul(step, out)
    return out


def _prepare(d: OrientifoldDatum, dc: DoubleCover, check: bool) -> None:
    if check and not is_clean(d, dc):
        raise HolonomyError("datum does not satisfy the local relations; refusing to evaluate")


def holonomy(d: OrientifoldDatum, dc: DoubleCover, choice: DomainChoice,
             check: bool = True, f_reading: str = "incident") -> HolonomyValue:
    """Unoriented surface holonomy for one choice of auxiliary data.

    ``f_reading`` fixes how the ``f`` factors of the 1-complex are placed:
    ``"incident"`` multiplies ``f(v)^eps`` at an endpoint of the chosen edge
    lift only when that endpoint is the chosen vertex lift; ``"projected"``
    always evaluates at the chosen vertex lift with the sign of the projected
    edge orientation.
    """
    probs = check_choice(dc, choice, d.adm)
    if probs:
        raise ChoiceError("; ".join(probs[:5]))
    _prepare(d, dc, check)
    fidx, eidx, vidx = choice.face_index, choice.edge_index, choice.vertex_index
    amp = Phase.one()
    # faces of the fundamental domain
    for t in range(dc.n_faces):
        f = 2 * t + choice.sheet[t]
        a = fidx[f]
        amp = amp * d.B(f, a)
        for oe in dc.face_boundary(f):
            c = eidx[oe[0]]
            amp = amp * d.A(oe, a, c)
            s, e = dc.start(oe), dc.end(oe)
            amp = amp / d.g(s, a, c, vidx[s])
            amp = amp * d.g(e, a, c, vidx[e])
    # oriented 1-complex
    _, bbar = boundary_sets(dc, choice)
    for edge in sorted(set(orientation_reversing_edges(dc, choice)) | set(bbar)):
        oe = chosen_edge_lift(dc, choice, edge)
        c = eidx[oe[0]]
        amp = amp * d.Pi(oe, c)
        for v, eps in ((dc.start(oe), -1), (dc.end(oe), 1)):
            amp = amp / d.chi(v, c, vidx[v]) ** eps
            chosen = 2 * (v >> 1) + choice.vertex_lift[v >> 1]
            if f_reading == "incident":
                if v == chosen:
                    amp = amp * d.f(v, vidx[v]) ** eps
            elif f_reading == "projected":
                amp = amp * d.f(chosen, vidx[chosen]) ** eps
            else:
                raise ValueError(f"unknown f reading {f_reading!r}")
    # boundary traces
    traces = []
    for c, comp in enumerate(dc.boundary_components):
        circle = comp.lifts[choice.boundary_lift[c]]
        traces.append(_trace(_circle_transport(d, dc, circle, eidx, vidx)))
    return _combine(amp, traces)


# ---------------------------------------------------------------------------
# oriented formulas (independent of the choice machinery above)


def _boundary_cycles(dc: DoubleCover, faces: Iterable[int]) -> List[List[OrientedEdge]]:
    """Boundary of a union of lifted faces, as oriented cycles."""
    count: Dict[OrientedEdge, int] = {}
    for f in faces:
        for oe in dc.face_boundary(f):
            count[oe] = count.get(oe, 0) + 1
    free = [oe for oe in count if (oe[0], -oe[1]) not in count]
    by_start: Dict[int, List[OrientedEdge]] = {}
    for oe in free:
        by_start.setdefault(dc.start(oe), []).append(oe)
    cycles, used = [], set()
    for oe in sorted(free):
        if oe in used:
            continue
        cyc, cur = [], oe
        while cur not in used:
            used.add(cur)
            cyc.append(cur)
            nxt = [x for x in by_start[dc.end(cur)] if x not in used]
            if not nxt:
                break
            cur = nxt[0]
        cycles.append(cyc)
    return cycles


def _oriented_amplitude(d: OrientifoldDatum, dc: DoubleCover, faces: Sequence[int],
                        fidx: Sequence[int], eidx: Sequence[int],
                        vidx: Sequence[int]) -> HolonomyValue:
    amp = Phase.one()
    for f in faces:
        a = fidx[f]
        amp = amp * d.B(f, a)
        for oe in dc.face_boundary(f):
            c = eidx[oe[0]]
            amp = amp * d.A(oe, a, c)
            amp = amp * d.g(dc.end(oe), a, c, vidx[dc.end(oe)])
            amp = amp / d.g(dc.start(oe), a, c, vidx[dc.start(oe)])
    traces = [_trace(_circle_transport(d, dc, cyc, eidx, vidx))
              for cyc in _boundary_cycles(dc, faces)]
    return _combine(amp, traces)


def _default_indices(d: OrientifoldDatum, choice: Optional[DomainChoice]):
    if choice is not None:
        return choice.face_index, choice.edge_index, choice.vertex_index
    return tuple(tuple(min(a) for a in tab)
                 for tab in (d.adm.face, d.adm.edge, d.adm.vertex))


def holonomy_oriented(d: OrientifoldDatum, dc: DoubleCover, section: Sequence[int],
                      choice: Optional[DomainChoice] = None,
                      check: bool = True) -> HolonomyValue:
    """Oriented-surface holonomy on the image of a global section."""
    faces = [2 * t + s for t, s in enumerate(section)]
    # a section has no orientation-reversing edges
    for e in dc.interior_edges:
        (t1, k1), (t2, k2) = dc.edge_uses[e]
        if section[t1] ^ dc.side_flip[t1][k1] != section[t2] ^ dc.side_flip[t2][k2]:
            raise HolonomyError("not a global section (surface non-orientable?)")
    _prepare(d, dc, check)
    return _oriented_amplitude(d, dc, faces, *_default_indices(d, choice))


def holonomy_double(d: OrientifoldDatum, dc: DoubleCover,
                    choice: Optional[DomainChoice] = None,
                    check: bool = True) -> HolonomyValue:
    """Oriented holonomy of the whole double, both sheets."""
    _prepare(d, dc, check)
    return _oriented_amplitude(d, dc, range(dc.n_lifted_faces), *_default_indices(d, choice))


def values_agree(a: HolonomyValue, b: HolonomyValue, tol: float = 1e-9) -> bool:
    if isinstance(a, Phase) and isinstance(b, Phase):
        return a == b
    return abs(complex(a) - complex(b)) <= tol


def square(v: HolonomyValue) -> HolonomyValue:
    return v * v


# ---------------------------------------------------------------------------
# compiled rank-1 evaluator for choice sweeps


class CompiledHolonomy:
    """Rank-1 holonomy with all phases as integers modulo a common denominator.

    Produces the same value as :func:`holonomy` (checked in the test suite);
    only the arithmetic differs.
    """

    def __init__(self, d: OrientifoldDatum, dc: DoubleCover, check: bool = True) -> None:
        if d.rank != 1:
            raise HolonomyError("compiled evaluation is rank-1 only")
        _prepare(d, dc, check)
        self.d, self.dc = d, dc
        dens = [p.den for tab in d.tables().values() for p in tab.values()]
        self.L = L = math.lcm(1, *dens)

        def n(p: Phase) -> int:
            return p.num * (L // p.den)

        adm = d.adm
        self.B = {key: n(p) for key, p in d.face_b.items()}
        self.A = {(x, i, j): n(d.A((x, 1), i, j))
                  for x in range(dc.n_lifted_edges)
                  for i in adm.edge[x] for j in adm.edge[x]}
        self.g = {(v, i, j, l): n(d.g(v, i, j, l))
                  for v in range(dc.n_lifted_vertices)
                  for i in adm.vertex[v] for j in adm.vertex[v] for l in adm.vertex[v]}
        self.Pi = {key: n(p) for key, p in d.edge_pi.items()}
        self.chi = {(v, i, j): n(d.chi(v, i, j))
                    for v in range(dc.n_lifted_vertices)
                    for i in adm.vertex[v] for j in adm.vertex[v]}
        self.f = {key: n(p) for key, p in d.f_v.items()}
        self.T = {key: n(p) for key, p in d.edge_t.items()}
        self.G = {(v, i, j): n(d.G(v, i, j))
                  for v in dc.lifted_boundary_vertices()
                  for i in adm.vertex[v] for j in adm.vertex[v]}
        self.faces = {f: [(x, o, dc.start((x, o)), dc.end((x, o))) for x, o in dc.face_boundary(f)]
                      for f in range(dc.n_lifted_faces)}
        self.circles = [[[(x, o, dc.start((x, o)), dc.end((x, o))) for x, o in lift]
                         for lift in comp.lifts] for comp in dc.boundary_components]
        self._arcs: Dict[tuple, list] = {}

    def _arc_list(self, choice: DomainChoice) -> list:
        key = (choice.sheet, choice.boundary_lift,
               tuple(choice.edge_lift[e] for e in orientation_reversing_edges(self.dc, choice)))
        arcs = self._arcs.get(key)
        if arcs is None:
            dc = self.dc
            _, bbar = boundary_sets(dc, choice)
            arcs = []
            for edge in sorted(set(orientation_reversing_edges(dc, choice)) | set(bbar)):
                x, o = chosen_edge_lift(dc, choice, edge)
                arcs.append((x, o, dc.start((x, o)), dc.end((x, o))))
            self._arcs[key] = arcs
        return arcs

    def angle(self, choice: DomainChoice) -> int:
        """Holonomy angle times ``L``, reduced mod ``L``."""
        fidx, eidx, vidx = choice.face_index, choice.edge_index, choice.vertex_index
        A, g, B = self.A, self.g, self.B
        tot = 0
        for t, s in enumerate(choice.sheet):
            f = 2 * t + s
            a = fidx[f]
            tot += B[(f, a)]
            for x, o, sv, ev in self.faces[f]:
                c = eidx[x]
                tot += o * A[(x, a, c)] - g[(sv, a, c, vidx[sv])] + g[(ev, a, c, vidx[ev])]
        vl = choice.vertex_lift
        for x, o, sv, ev in self._arc_list(choice):
            c = eidx[x]
            tot += o * self.Pi[(x, c)]
            tot += self.chi[(sv, c, vidx[sv])] - self.chi[(ev, c, vidx[ev])]
            if sv == 2 * (sv >> 1) + vl[sv >> 1]:
                tot -= self.f[(sv, vidx[sv])]
            if ev == 2 * (ev >> 1) + vl[ev >> 1]:
                tot += self.f[(ev, vidx[ev])]
        G, T = self.G, self.T
        for comp, b in zip(self.circles, choice.boundary_lift):
            for x, o, sv, ev in comp[b]:
                a = eidx[x]
                tot += o * T[(x, a)] - G[(ev, a, vidx[ev])] + G[(sv, a, vidx[sv])]
        return tot % self.L

    def __call__(self, choice: DomainChoice) -> Phase:
        return Phase(Fraction(self.angle(choice), self.L))


class SweepResult:
    def __init__(self, value: HolonomyValue, count: int, invariant: bool,
                 square_law: bool) -> None:
        self.value, self.count = value, count
        self.invariant, self.square_law = invariant, square_law

    def __repr__(self) -> str:
        return (f"SweepResult(value={self.value!r}, count={self.count}, "
                f"invariant={self.invariant}, square_law={self.square_law})")


def sweep(d: OrientifoldDatum, dc: DoubleCover, cap: int = 2 ** 14, samples: int = 1000,
          seed: int = 0, tol: float = 1e-9, square_tol: float = 1e-7) -> SweepResult:
    """Evaluate over every choice (or seeded samples) and compare all values."""
    from .surface import enumerate_choices

    _prepare(d, dc, True)
    double = holonomy_double(d, dc, check=False)
    first = None
    count, invariant, sq = 0, True, True
    if d.rank == 1:
        comp = CompiledHolonomy(d, dc, check=False)
        L = comp.L
        target = double.angle * L
        if target.denominator != 1:
            sq = False
        ref = None
        for ch in enumerate_choices(dc, d.adm, cap, samples, seed):
            a = comp.angle(ch)
            if ref is None:
                ref = a
            elif a != ref:
                invariant = False
            if (2 * a - target) % L != 0:
                sq = False
            count += 1
        value = Phase(Fraction(ref, L)) if ref is not None else None
        return SweepResult(value, count, invariant, sq)
    for ch in enumerate_choices(dc, d.adm, cap, samples, seed):
        v = holonomy(d, dc, ch, check=False)
        if first is None:
            first = v
        elif not values_agree(v, first, tol):
            invariant = False
        if not values_agree(v * v, double, square_tol):
            sq = False
        count += 1
    return SweepResult(first, count, invariant, sq)
