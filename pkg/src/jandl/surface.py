"""Triangulated surfaces, their oriented doubles and the choice machinery.

A surface is described by polygon gluing: a list of triangles, each with
three corners listed in a reference cyclic order, plus pairwise
identifications of triangle sides and a list of free (boundary) sides.
Side ``k`` of a triangle runs from corner ``k`` to corner ``k+1``.  An
identification is *non-reversing* when the two listed orientations are
compatible, i.e. the start corner of one side is glued to the end corner
of the other; *reversing* glues start to start.

Numbering in the oriented double: the two lifts of face ``t`` are ``2t``
(listed orientation) and ``2t+1`` (reversed).  Edge and vertex lifts are
``2e + b`` and ``2v + b``; lift 0 is the one meeting the reference
side/corner in face lift ``2t_ref``.  The involution is ``x -> x ^ 1`` and
projection is ``x -> x >> 1`` on every cell type.  Lifted edge ``2e+b``
carries a canonical direction projecting onto the direction of edge ``e``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple


class SurfaceError(ValueError):
    pass


Side = Tuple[int, int]  # (face, side index)
OrientedEdge = Tuple[int, int]  # (lifted edge id, +1 / -1 relative to canonical)


class _UnionFind:
    def __init__(self) -> None:
        self.parent: Dict = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


@dataclass(frozen=True)
class Gluing:
    a: Side
    b: Side
    reversing: bool


@dataclass(frozen=True)
class SurfaceSpec:
    faces: Tuple[Tuple[str, str, str], ...]
    gluings: Tuple[Gluing, ...]
    boundary: Tuple[Side, ...]
    name: str = ""

    def to_json(self) -> dict:
        out = {
            "faces": [list(f) for f in self.faces],
            "identifications": [
                {"edges": [list(g.a), list(g.b)], "reversing": g.reversing}
                for g in self.gluings
            ],
            "boundary": [list(s) for s in self.boundary],
        }
        if self.name:
            out["name"] = self.name
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "SurfaceSpec":
        if "model" in obj:
            return named_model_spec(obj["model"])
        try:
            faces = tuple(tuple(str(c) for c in f) for f in obj["faces"])
            gl = tuple(
                Gluing(tuple(g["edges"][0]), tuple(g["edges"][1]), bool(g["reversing"]))
                for g in obj.get("identifications", [])
            )
            bd = tuple(tuple(s) for s in obj.get("boundary", []))
        except (KeyError, TypeError, IndexError) as exc:
            raise SurfaceError(f"malformed surface description: {exc}") from exc
        return cls(faces, gl, bd, obj.get("name", ""))


@dataclass(frozen=True)
class BoundaryComponent:
    edges: Tuple[int, ...]  # Sigma edges, in the order of lift 0
    lifts: Tuple[Tuple[OrientedEdge, ...], Tuple[OrientedEdge, ...]]


@dataclass(frozen=True, eq=False)
class DoubleCover:
    """A triangulated surface together with its oriented double."""

    spec: SurfaceSpec
    n_faces: int
    n_edges: int
    n_vertices: int
    side_edge: Tuple[Tuple[int, int, int], ...]
    side_flip: Tuple[Tuple[int, int, int], ...]
    side_sign: Tuple[Tuple[int, int, int], ...]
    corner_vertex: Tuple[Tuple[int, int, int], ...]
    corner_flip: Tuple[Tuple[int, int, int], ...]
    edge_uses: Tuple[Tuple[Side, ...], ...]
    edge_ends: Tuple[Tuple[int, int], ...]  # Sigma edge tail, head
    lifted_edge_ends: Tuple[Tuple[int, int], ...]  # canonical tail, head
    boundary_components: Tuple[BoundaryComponent, ...]
    edge_component: Tuple[int, ...]  # -1 for interior edges

    # -- basic incidence -------------------------------------------------
    @property
    def name(self) -> str:
        return self.spec.name

    @staticmethod
    def sigma(x: int) -> int:
        return x ^ 1

    @staticmethod
    def pr(x: int) -> int:
        return x >> 1

    def is_boundary_edge(self, e: int) -> bool:
        return len(self.edge_uses[e]) == 1

    @property
    def boundary_edges(self) -> Tuple[int, ...]:
        return tuple(e for e in range(self.n_edges) if self.is_boundary_edge(e))

    @property
    def interior_edges(self) -> Tuple[int, ...]:
        return tuple(e for e in range(self.n_edges) if not self.is_boundary_edge(e))

    @property
    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces

    def side_lift(self, t: int, k: int, s: int) -> OrientedEdge:
        """Lifted edge of side ``k`` in face lift ``2t+s`` with induced orientation."""
        e = self.side_edge[t][k]
        b = s ^ self.side_flip[t][k]
        o = self.side_sign[t][k] * (1 if s == 0 else -1)
        return 2 * e + b, o

    def corner_lift(self, t: int, c: int, s: int) -> int:
        return 2 * self.corner_vertex[t][c] + (s ^ self.corner_flip[t][c])

    def face_boundary(self, face_lift: int) -> List[OrientedEdge]:
        """Oriented boundary edges of a lifted face, in traversal order."""
        t, s = face_lift >> 1, face_lift & 1
        order = (0, 1, 2) if s == 0 else (2, 1, 0)
        return [self.side_lift(t, k, s) for k in order]

    def face_vertices(self, face_lift: int) -> List[int]:
        t, s = face_lift >> 1, face_lift & 1
        return [self.corner_lift(t, c, s) for c in range(3)]

    def start(self, oe: OrientedEdge) -> int:
        tail, head = self.lifted_edge_ends[oe[0]]
        return tail if oe[1] > 0 else head

    def end(self, oe: OrientedEdge) -> int:
        tail, head = self.lifted_edge_ends[oe[0]]
        return head if oe[1] > 0 else tail

    def sigma_oriented(self, oe: OrientedEdge) -> OrientedEdge:
        # canonical directions are sigma-equivariant
        return oe[0] ^ 1, oe[1]

    @property
    def n_lifted_faces(self) -> int:
        return 2 * self.n_faces

    @property
    def n_lifted_edges(self) -> int:
        return 2 * self.n_edges

    @property
    def n_lifted_vertices(self) -> int:
        return 2 * self.n_vertices

    def lifted_boundary_edges(self) -> List[int]:
        return [2 * e + b for e in self.boundary_edges for b in (0, 1)]

    def lifted_boundary_vertices(self) -> List[int]:
        out = set()
        for x in self.lifted_boundary_edges():
            out.update(self.lifted_edge_ends[x])
        return sorted(out)

    def edge_faces_lifted(self, x: int) -> List[int]:
        """Lifted faces whose boundary contains lifted edge ``x``."""
        out = []
        for t, k in self.edge_uses[x >> 1]:
            for s in (0, 1):
                if self.side_lift(t, k, s)[0] == x:
                    out.append(2 * t + s)
        return out

    def vertex_cells(self, v: int) -> Tuple[List[int], List[int]]:
        """Lifted faces and lifted edges incident to lifted vertex ``v``."""
        faces, edges = set(), set()
        for f in range(self.n_lifted_faces):
            if v in self.face_vertices(f):
                faces.add(f)
        for x, (a, b) in enumerate(self.lifted_edge_ends):
            if v in (a, b):
                edges.add(x)
        return sorted(faces), sorted(edges)

    # -- orientability -----------------------------------------------------
    def global_section(self) -> Optional[Tuple[int, ...]]:
        """Sheet choice with no orientation-reversing edge, if Sigma is orientable."""
        sheet: List[Optional[int]] = [None] * self.n_faces
        for root in range(self.n_faces):
            if sheet[root] is not None:
                continue
            sheet[root] = 0
            stack = [root]
            while stack:
                t = stack.pop()
                for k in range(3):
                    e = self.side_edge[t][k]
                    lift = sheet[t] ^ self.side_flip[t][k]
                    for t2, k2 in self.edge_uses[e]:
                        if (t2, k2) == (t, k):
                            continue
                        want = lift ^ self.side_flip[t2][k2]
                        if sheet[t2] is None:
                            sheet[t2] = want
                            stack.append(t2)
                        elif sheet[t2] != want:
                            return None
        return tuple(sheet)  # type: ignore[arg-type]

    @property
    def orientable(self) -> bool:
        return self.global_section() is not None

    def lifted_components(self) -> int:
        uf = _UnionFind()
        for f in range(self.n_lifted_faces):
            uf.find(("f", f))
            for x, _ in self.face_boundary(f):
                uf.union(("f", f), ("e", x))
        return len({uf.find(("f", f)) for f in range(self.n_lifted_faces)})

    def sigma_check(self) -> None:
        """Structural invariants of the involution and the incidence data."""
        for f in range(self.n_lifted_faces):
            bd = self.face_boundary(f)
            sbd = self.face_boundary(f ^ 1)
            # sigma reverses the induced boundary orientation
            rev = [(x ^ 1, -o) for x, o in reversed(bd)]
            if sorted(rev) != sorted(sbd):
                raise SurfaceError(f"sigma does not reverse orientation of face {f}")
            for a, b in zip(bd, bd[1:] + bd[:1]):
                if self.end(a) != self.start(b):
                    raise SurfaceError(f"boundary of face lift {f} is not a cycle")
        for x, (a, b) in enumerate(self.lifted_edge_ends):
            if self.lifted_edge_ends[x ^ 1] != (a ^ 1, b ^ 1):
                raise SurfaceError("sigma does not commute with incidence")
        for e in range(self.n_edges):
            if len(self.edge_uses[e]) not in (1, 2):
                raise SurfaceError(f"edge {e} has {len(self.edge_uses[e])} incident sides")


# ---------------------------------------------------------------------------
# construction


def build_surface(spec: SurfaceSpec) -> DoubleCover:
    nf = len(spec.faces)
    if nf == 0:
        raise SurfaceError("surface has no faces")
    if any(len(f) != 3 for f in spec.faces):
        raise SurfaceError("only triangles are supported")
    used: Dict[Side, int] = {}
    all_sides = [(t, k) for t in range(nf) for k in range(3)]
    for g in spec.gluings:
        for sd in (g.a, g.b):
            if sd not in all_sides:
                raise SurfaceError(f"identification refers to unknown side {sd}")
            used[sd] = used.get(sd, 0) + 1
        if g.a == g.b:
            raise SurfaceError(f"side {g.a} glued to itself")
    for sd in spec.boundary:
        if sd not in all_sides:
            raise SurfaceError(f"boundary refers to unknown side {sd}")
        used[sd] = used.get(sd, 0) + 1
    for sd in all_sides:
        n = used.get(sd, 0)
        if n == 0:
            raise SurfaceError(f"side {sd} is neither glued nor on the boundary")
        if n > 1:
            raise SurfaceError(f"non-manifold gluing: side {sd} used {n} times")

    side_uf, corner_uf = _UnionFind(), _UnionFind()
    for t, k in all_sides:
        for s in (0, 1):
            side_uf.find((t, k, s))
    for t in range(nf):
        for c in range(3):
            for s in (0, 1):
                corner_uf.find((t, c, s))
    for g in spec.gluings:
        (t1, k1), (t2, k2) = g.a, g.b
        r = 1 if g.reversing else 0
        for s in (0, 1):
            side_uf.union((t1, k1, s), (t2, k2, s ^ r))
            if g.reversing:
                corner_uf.union((t1, k1, s), (t2, k2, s ^ 1))
                corner_uf.union((t1, (k1 + 1) % 3, s), (t2, (k2 + 1) % 3, s ^ 1))
            else:
                corner_uf.union((t1, k1, s), (t2, (k2 + 1) % 3, s))
                corner_uf.union((t1, (k1 + 1) % 3, s), (t2, k2, s))

    # Sigma vertices = classes of corners ignoring the sheet
    vkey: Dict = {}
    corner_vertex = [[0] * 3 for _ in range(nf)]
    corner_flip = [[0] * 3 for _ in range(nf)]
    lift0: Dict[int, object] = {}
    for t in range(nf):
        for c in range(3):
            r0, r1 = corner_uf.find((t, c, 0)), corner_uf.find((t, c, 1))
            if r0 == r1:
                raise SurfaceError(f"corner {(t, c)} is identified with its own mirror; "
                                   "not a surface")
            key = frozenset((r0, r1))
            if key not in vkey:
                vkey[key] = len(vkey)
                lift0[vkey[key]] = r0
            v = vkey[key]
            corner_vertex[t][c] = v
            corner_flip[t][c] = 0 if r0 == lift0[v] else 1
    nv = len(vkey)

    ekey: Dict = {}
    side_edge = [[0] * 3 for _ in range(nf)]
    side_flip = [[0] * 3 for _ in range(nf)]
    side_sign = [[0] * 3 for _ in range(nf)]
    uses: Dict[int, List[Side]] = {}
    ref_root: Dict[int, object] = {}
    glue_of: Dict[Side, Gluing] = {}
    for g in spec.gluings:
        glue_of[g.a] = g
        glue_of[g.b] = g
    for t, k in all_sides:
        r0, r1 = side_uf.find((t, k, 0)), side_uf.find((t, k, 1))
        if r0 == r1:
            raise SurfaceError(f"side {(t, k)} is identified with its own mirror")
        key = frozenset((r0, r1))
        if key not in ekey:
            ekey[key] = len(ekey)
            ref_root[ekey[key]] = r0
            uses[ekey[key]] = []
        e = ekey[key]
        uses[e].append((t, k))
        side_edge[t][k] = e
        side_flip[t][k] = 0 if r0 == ref_root[e] else 1
    ne = len(ekey)
    for e in range(ne):
        ref = uses[e][0]
        side_sign[ref[0]][ref[1]] = 1
        if len(uses[e]) == 2:
            other = uses[e][1]
            side_sign[other[0]][other[1]] = 1 if glue_of[ref].reversing else -1
    edge_ends = []
    lifted_ends: List[Tuple[int, int]] = [(0, 0)] * (2 * ne)
    for e in range(ne):
        t, k = uses[e][0]
        edge_ends.append((corner_vertex[t][k], corner_vertex[t][(k + 1) % 3]))
        for b in (0, 1):
            tail = 2 * corner_vertex[t][k] + (b ^ corner_flip[t][k])
            head = 2 * corner_vertex[t][(k + 1) % 3] + (b ^ corner_flip[t][(k + 1) % 3])
            lifted_ends[2 * e + b] = (tail, head)

    partial = DoubleCover(
        spec, nf, ne, nv,
        tuple(map(tuple, side_edge)), tuple(map(tuple, side_flip)),
        tuple(map(tuple, side_sign)), tuple(map(tuple, corner_vertex)),
        tuple(map(tuple, corner_flip)), tuple(tuple(uses[e]) for e in range(ne)),
        tuple(edge_ends), tuple(lifted_ends), (), tuple([-1] * ne),
    )
    comps, edge_comp = _boundary_circles(partial)
    dc = DoubleCover(
        spec, nf, ne, nv, partial.side_edge, partial.side_flip, partial.side_sign,
        partial.corner_vertex, partial.corner_flip, partial.edge_uses,
        partial.edge_ends, partial.lifted_edge_ends, comps, edge_comp,
    )
    dc.sigma_check()
    return dc


def _boundary_circles(dc: DoubleCover):
    oriented: Dict[int, OrientedEdge] = {}
    for e in range(dc.n_edges):
        if dc.is_boundary_edge(e):
            t, k = dc.edge_uses[e][0]
            for s in (0, 1):
                x, o = dc.side_lift(t, k, s)
                oriented[x] = (x, o)
    by_start: Dict[int, List[OrientedEdge]] = {}
    for oe in oriented.values():
        by_start.setdefault(dc.start(oe), []).append(oe)
    if any(len(v) != 1 for v in by_start.values()):
        raise SurfaceError("boundary of the double is not a disjoint union of circles")
    seen: set = set()
    circles: List[Tuple[OrientedEdge, ...]] = []
    for x in sorted(oriented):
        if x in seen:
            continue
        cyc = []
        cur = oriented[x]
        while cur[0] not in seen:
            seen.add(cur[0])
            cyc.append(cur)
            nxt = by_start.get(dc.end(cur))
            if not nxt:
                raise SurfaceError("open boundary chain")
            cur = nxt[0]
        circles.append(tuple(cyc))
    circle_of = {oe[0]: i for i, c in enumerate(circles) for oe in c}
    comps: List[BoundaryComponent] = []
    edge_comp = [-1] * dc.n_edges
    done: set = set()
    for i, c in enumerate(circles):
        if i in done:
            continue
        j = circle_of[c[0][0] ^ 1]
        if j == i:
            raise SurfaceError("a boundary circle of the double is sigma-invariant")
        done.update((i, j))
        a, b = (c, circles[j])
        if min(oe[0] for oe in b) < min(oe[0] for oe in a):
            a, b = b, a
        # lift 0 is the circle containing the lift 0 of its least edge
        least = min(oe[0] >> 1 for oe in a)
        if 2 * least not in {oe[0] for oe in a}:
            a, b = b, a
        idx = len(comps)
        edges = tuple(oe[0] >> 1 for oe in a)
        for e in edges:
            edge_comp[e] = idx
        comps.append(BoundaryComponent(edges, (a, b)))
    return tuple(comps), tuple(edge_comp)


# ---------------------------------------------------------------------------
# named models


def _spec(name, faces, gluings, boundary) -> SurfaceSpec:
    return SurfaceSpec(
        tuple(tuple(f) for f in faces),
        tuple(Gluing(a, b, r) for a, b, r in gluings),
        tuple(boundary), name,
    )


def named_model_spec(model: str) -> SurfaceSpec:
    """Minimal triangulations; the square models use faces (A,B,C), (A,C,D)."""
    sq = [("A", "B", "C"), ("A", "C", "D")]
    diag = ((0, 2), (1, 0), False)  # C->A against A->C
    models = {
        "disk": _spec("disk", [("a", "b", "c")], [], [(0, 0), (0, 1), (0, 2)]),
        "sphere": _spec(
            "sphere", [("a", "b", "c"), ("a", "c", "b")],
            [((0, 0), (1, 2), False), ((0, 1), (1, 1), False), ((0, 2), (1, 0), False)],
            [],
        ),
        "torus": _spec("torus", sq, [((0, 0), (1, 1), False), ((0, 1), (1, 2), False), diag], []),
        "klein": _spec("klein", sq, [((0, 0), (1, 1), False), ((0, 1), (1, 2), True), diag], []),
        "rp2": _spec("rp2", sq, [((0, 0), (1, 1), True), ((0, 1), (1, 2), True), diag], []),
        "mobius": _spec("mobius", sq, [((0, 1), (1, 2), True), diag], [(0, 0), (1, 1)]),
        "annulus": _spec("annulus", sq, [((0, 1), (1, 2), False), diag], [(0, 0), (1, 1)]),
    }
    if model not in models:
        raise SurfaceError(f"unknown model {model!r}; choose from {sorted(models)}")
    return models[model]


MODELS = ("mobius", "klein", "rp2", "torus", "annulus", "disk", "sphere")


def named_surface(model: str) -> DoubleCover:
    return build_surface(named_model_spec(model))


# ---------------------------------------------------------------------------
# edge bisection


@dataclass(frozen=True)
class Subdivision:
    """Provenance of a bisection: how old sides/corners sit in the new surface."""

    old: DoubleCover
    new: DoubleCover
    edge: int
    side_map: Dict[Side, Side]  # persisting old sides
    halves: Dict[Side, Tuple[Side, Side]]  # split old side -> (first, second) half
    corner_map: Dict[Tuple[int, int], Tuple[int, int]]
    new_corners: Dict[int, Tuple[int, int]]  # old face -> new midpoint corner
    spokes: Dict[int, Tuple[Side, Side]]  # old face -> the new interior side in a/b
    face_parts: Dict[int, Tuple[int, int]]  # old face -> (a, b) new faces


def bisect_edge(dc: DoubleCover, e: int) -> Subdivision:
    if not 0 <= e < dc.n_edges:
        raise SurfaceError(f"{e} is not an edge")
    uses = dc.edge_uses[e]
    if len({t for t, _ in uses}) != len(uses):
        raise SurfaceError("cannot bisect an edge used twice by the same face")
    spec = dc.spec
    faces = [list(f) for f in spec.faces]
    side_map: Dict[Side, Side] = {}
    corner_map: Dict[Tuple[int, int], Tuple[int, int]] = {}
    halves: Dict[Side, Tuple[Side, Side]] = {}
    new_corners: Dict[int, Tuple[int, int]] = {}
    spokes: Dict[int, Tuple[Side, Side]] = {}
    parts: Dict[int, Tuple[int, int]] = {}
    for t in range(dc.n_faces):
        for k in range(3):
            side_map[(t, k)] = (t, k)
            corner_map[(t, k)] = (t, k)
    mid = f"m{e}_{len(faces)}"
    extra_gluings = []
    for t, k in uses:
        p, q, r = (spec.faces[t][(k + i) % 3] for i in range(3))
        ta, tb = t, len(faces)
        faces[ta] = [p, mid, r]
        faces.append([mid, q, r])
        parts[t] = (ta, tb)
        corner_map[(t, k)] = (ta, 0)
        corner_map[(t, (k + 1) % 3)] = (tb, 1)
        corner_map[(t, (k + 2) % 3)] = (ta, 2)
        new_corners[t] = (ta, 1)
        del side_map[(t, k)]
        side_map[(t, (k + 1) % 3)] = (tb, 1)
        side_map[(t, (k + 2) % 3)] = (ta, 2)
        halves[(t, k)] = ((ta, 0), (tb, 0))
        spokes[t] = ((ta, 1), (tb, 2))
        extra_gluings.append(Gluing((ta, 1), (tb, 2), False))
    gluings = []
    for g in spec.gluings:
        if g.a in halves:
            (a1, a2), (b1, b2) = halves[g.a], halves[g.b]
            if g.reversing:
                gluings += [Gluing(a1, b1, True), Gluing(a2, b2, True)]
            else:
                gluings += [Gluing(a1, b2, False), Gluing(a2, b1, False)]
        else:
            gluings.append(Gluing(side_map[g.a], side_map[g.b], g.reversing))
    boundary = []
    for sd in spec.boundary:
        if sd in halves:
            boundary += list(halves[sd])
        else:
            boundary.append(side_map[sd])
    new_spec = SurfaceSpec(tuple(tuple(f) for f in faces),
                           tuple(gluings + extra_gluings), tuple(boundary), spec.name)
    new = build_surface(new_spec)
    return Subdivision(dc, new, e, side_map, halves, corner_map, new_corners, spokes, parts)


# ---------------------------------------------------------------------------
# choices


@dataclass(frozen=True)
class DomainChoice:
    """All arbitrary choices entering the local holonomy formula.

    ``sheet[t]`` picks the face lift ``2t + sheet[t]`` of the fundamental
    domain; ``boundary_lift[c]`` picks lifted circle 0 or 1 of boundary
    component ``c``; ``edge_lift[e]`` picks ``2e + edge_lift[e]`` for
    orientation-reversing edges (ignored elsewhere); ``vertex_lift[v]``
    picks ``2v + vertex_lift[v]``.  ``face_index`` etc. map *lifted* cells
    to indices.
    """

    sheet: Tuple[int, ...]
    boundary_lift: Tuple[int, ...]
    edge_lift: Tuple[int, ...]
    vertex_lift: Tuple[int, ...]
    face_index: Tuple[int, ...]
    edge_index: Tuple[int, ...]
    vertex_index: Tuple[int, ...]

    def to_json(self) -> dict:
        return {k: list(getattr(self, k)) for k in self.__dataclass_fields__}

    @classmethod
    def from_json(cls, obj: dict) -> "DomainChoice":
        return cls(**{k: tuple(obj[k]) for k in cls.__dataclass_fields__})


class ChoiceError(ValueError):
    pass


@dataclass(frozen=True)
class Admissible:
    """Admissible index sets per lifted cell and the action of k on indices."""

    face: Tuple[FrozenSet[int], ...]
    edge: Tuple[FrozenSet[int], ...]
    vertex: Tuple[FrozenSet[int], ...]
    kmap: Tuple[int, ...]

    def check(self, dc: DoubleCover) -> List[str]:
        probs = []
        k = self.kmap
        if any(k[k[i]] != i for i in range(len(k))):
            probs.append("k does not act as an involution on indices")
        for name, tab in (("face", self.face), ("edge", self.edge), ("vertex", self.vertex)):
            for x, a in enumerate(tab):
                if not a:
                    probs.append(f"{name} {x}: empty admissible set")
                if frozenset(k[i] for i in a) != tab[x ^ 1]:
                    probs.append(f"{name} {x}: admissible set not sigma-equivariant")
        for f in range(dc.n_lifted_faces):
            for x, _ in dc.face_boundary(f):
                if not self.face[f] <= self.edge[x]:
                    probs.append(f"face {f} index set not contained in edge {x}")
            for v in dc.face_vertices(f):
                if not self.face[f] <= self.vertex[v]:
                    probs.append(f"face {f} index set not contained in vertex {v}")
        for x, (a, b) in enumerate(dc.lifted_edge_ends):
            for v in (a, b):
                if not self.edge[x] <= self.vertex[v]:
                    probs.append(f"edge {x} index set not contained in vertex {v}")
        return probs


def orientation_reversing_edges(dc: DoubleCover, choice: DomainChoice) -> Tuple[int, ...]:
    out = []
    for e in dc.interior_edges:
        (t1, k1), (t2, k2) = dc.edge_uses[e]
        l1 = choice.sheet[t1] ^ dc.side_flip[t1][k1]
        l2 = choice.sheet[t2] ^ dc.side_flip[t2][k2]
        if l1 != l2:
            out.append(e)
    return tuple(out)


def face_edge_lift(dc: DoubleCover, choice: DomainChoice, e: int) -> OrientedEdge:
    """Lift of a boundary edge lying in the boundary of its chosen face lift."""
    t, k = dc.edge_uses[e][0]
    return dc.side_lift(t, k, choice.sheet[t])


def boundary_lift_edge(dc: DoubleCover, choice: DomainChoice, e: int) -> OrientedEdge:
    """The lift of boundary edge ``e`` contained in the chosen boundary lift."""
    c = dc.edge_component[e]
    for oe in dc.boundary_components[c].lifts[choice.boundary_lift[c]]:
        if oe[0] >> 1 == e:
            return oe
    raise AssertionError("boundary edge missing from its component")


def boundary_sets(dc: DoubleCover, choice: DomainChoice) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    b = dc.boundary_edges
    bbar = tuple(e for e in b
                 if face_edge_lift(dc, choice, e)[0] != boundary_lift_edge(dc, choice, e)[0])
    return b, bbar


def chosen_edge_lift(dc: DoubleCover, choice: DomainChoice, e: int) -> OrientedEdge:
    """Lift of an edge of E or of B-bar, oriented as part of the boundary of F."""
    if dc.is_boundary_edge(e):
        return face_edge_lift(dc, choice, e)
    x = 2 * e + choice.edge_lift[e]
    for t, k in dc.edge_uses[e]:
        oe = dc.side_lift(t, k, choice.sheet[t])
        if oe[0] == x:
            return oe
    raise ChoiceError(f"edge {e} is not orientation-reversing for this choice")


def f_bar(dc: DoubleCover, choice: DomainChoice) -> Tuple[Tuple[int, int], ...]:
    """Arcs of the oriented 1-complex, as (Sigma edge, +1/-1 along edge direction)."""
    arcs = []
    _, bbar = boundary_sets(dc, choice)
    for e in sorted(set(orientation_reversing_edges(dc, choice)) | set(bbar)):
        x, o = chosen_edge_lift(dc, choice, e)
        arcs.append((e, o))
    return tuple(arcs)


def check_choice(dc: DoubleCover, choice: DomainChoice,
                 adm: Optional[Admissible] = None) -> List[str]:
    probs = []
    if len(choice.sheet) != dc.n_faces or any(s not in (0, 1) for s in choice.sheet):
        probs.append("sheet must pick 0/1 for every face")
    if len(choice.boundary_lift) != len(dc.boundary_components):
        probs.append("boundary_lift must pick a lift for every boundary component")
    if len(choice.edge_lift) != dc.n_edges or len(choice.vertex_lift) != dc.n_vertices:
        probs.append("edge_lift/vertex_lift have the wrong length")
    if (len(choice.face_index) != dc.n_lifted_faces
            or len(choice.edge_index) != dc.n_lifted_edges
            or len(choice.vertex_index) != dc.n_lifted_vertices):
        probs.append("index assignment must cover every lifted cell")
    if probs or adm is None:
        return probs
    for name, idx, tab in (("face", choice.face_index, adm.face),
                           ("edge", choice.edge_index, adm.edge),
                           ("vertex", choice.vertex_index, adm.vertex)):
        for x, i in enumerate(idx):
            if i not in tab[x]:
                probs.append(f"{name} {x}: index {i} not admissible")
            elif idx[x ^ 1] != adm.kmap[i]:
                probs.append(f"{name} {x}: index assignment not equivariant")
    return probs


def section_choice(dc: DoubleCover, adm: Admissible,
                   sheet: Optional[Sequence[int]] = None) -> DomainChoice:
    """Choice induced by a global section with the boundary lift inside it."""
    s = tuple(sheet) if sheet is not None else dc.global_section()
    if s is None:
        raise ChoiceError("surface is not orientable")
    blift = []
    for comp in dc.boundary_components:
        e = comp.edges[0]
        t, k = dc.edge_uses[e][0]
        x, _ = dc.side_lift(t, k, s[t])
        blift.append(0 if x in {oe[0] for oe in comp.lifts[0]} else 1)
    return _with_indices(dc, adm, s, tuple(blift), (0,) * dc.n_edges,
                         (0,) * dc.n_vertices, None)


def _with_indices(dc, adm, sheet, blift, elift, vlift, picks) -> DomainChoice:
    def lift_indices(tab, n, off):
        out = [0] * (2 * n)
        for c in range(n):
            opts = sorted(tab[2 * c])
            i = opts[picks[off + c]] if picks is not None else opts[0]
            out[2 * c] = i
            out[2 * c + 1] = adm.kmap[i]
        return tuple(out)

    nf, ne = dc.n_faces, dc.n_edges
    return DomainChoice(tuple(sheet), tuple(blift), tuple(elift), tuple(vlift),
                        lift_indices(adm.face, nf, 0),
                        lift_indices(adm.edge, ne, nf),
                        lift_indices(adm.vertex, dc.n_vertices, nf + ne))


def _index_radix(dc: DoubleCover, adm: Admissible) -> List[int]:
    return ([len(adm.face[2 * t]) for t in range(dc.n_faces)]
            + [len(adm.edge[2 * e]) for e in range(dc.n_edges)]
            + [len(adm.vertex[2 * v]) for v in range(dc.n_vertices)])


def count_choices(dc: DoubleCover, adm: Admissible, limit: Optional[int] = None) -> int:
    """Size of the choice space; returns ``limit + 1`` early once exceeded."""
    base = 2 ** (dc.n_vertices + len(dc.boundary_components))
    for r in _index_radix(dc, adm):
        base *= r
    if limit is not None and base * 2 ** dc.n_faces > limit:
        # every sheet choice contributes at least ``base``
        return limit + 1
    total = 0
    for sheet in itertools.product((0, 1), repeat=dc.n_faces):
        n_e = _count_reversing(dc, sheet)
        total += base * 2 ** n_e
        if limit is not None and total > limit:
            return limit + 1
    return total


def _count_reversing(dc: DoubleCover, sheet) -> int:
    n = 0
    for e in dc.interior_edges:
        (t1, k1), (t2, k2) = dc.edge_uses[e]
        if sheet[t1] ^ dc.side_flip[t1][k1] != sheet[t2] ^ dc.side_flip[t2][k2]:
            n += 1
    return n


def _reversing_for(dc: DoubleCover, sheet) -> List[int]:
    out = []
    for e in dc.interior_edges:
        (t1, k1), (t2, k2) = dc.edge_uses[e]
        if sheet[t1] ^ dc.side_flip[t1][k1] != sheet[t2] ^ dc.side_flip[t2][k2]:
            out.append(e)
    return out


def enumerate_choices(dc: DoubleCover, adm: Admissible, cap: int = 2 ** 14,
                      samples: int = 1000, seed: int = 0) -> Iterator[DomainChoice]:
    """All choices when there are at most ``cap`` of them, else seeded samples.

    Sampling draws every coordinate independently and uniformly: the sheet
    map, then lifts of the resulting orientation-reversing edges, vertex
    lifts, boundary lifts and indices.
    """
    if cap <= 0:
        return
    total = count_choices(dc, adm, limit=cap)
    radix = _index_radix(dc, adm)
    nb = len(dc.boundary_components)
    if total <= cap:
        for sheet in itertools.product((0, 1), repeat=dc.n_faces):
            rev = _reversing_for(dc, sheet)
            for ebits in itertools.product((0, 1), repeat=len(rev)):
                elift = [0] * dc.n_edges
                for e, b in zip(rev, ebits):
                    elift[e] = b
                for vlift in itertools.product((0, 1), repeat=dc.n_vertices):
                    for blift in itertools.product((0, 1), repeat=nb):
                        for picks in itertools.product(*(range(r) for r in radix)):
                            yield _with_indices(dc, adm, sheet, blift, elift, vlift, picks)
        return
    rng = random.Random(seed)
    for _ in range(samples):
        sheet = tuple(rng.randrange(2) for _ in range(dc.n_faces))
        elift = [0] * dc.n_edges
        for e in _reversing_for(dc, sheet):
            elift[e] = rng.randrange(2)
        vlift = tuple(rng.randrange(2) for _ in range(dc.n_vertices))
        blift = tuple(rng.randrange(2) for _ in range(nb))
        picks = [rng.randrange(r) for r in radix]
        yield _with_indices(dc, adm, sheet, blift, elift, vlift, picks)
