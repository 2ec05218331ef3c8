"""Finite orientifold groups ``(G, eps)`` and their actions on index sets."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .phase import Phase


class GroupError(ValueError):
    pass


@dataclass(frozen=True)
class OrientifoldGroup:
    """Group given by an explicit multiplication table plus a sign character.

    Elements are the integers ``0..n-1``; ``table[a][b]`` is ``a*b``.
    """

    names: Tuple[str, ...]
    table: Tuple[Tuple[int, ...], ...]
    epsilon: Tuple[int, ...]
    identity: int = 0
    _inverse: Tuple[int, ...] = field(default=(), compare=False, repr=False)

    MAX_ORDER = 32

    def __post_init__(self) -> None:
        n = len(self.names)
        if n == 0 or n > self.MAX_ORDER:
            raise GroupError(f"group order {n} outside 1..{self.MAX_ORDER}")
        if len(self.table) != n or any(len(r) != n for r in self.table):
            raise GroupError("multiplication table is not square")
        if any(not 0 <= x < n for r in self.table for x in r):
            raise GroupError("table entry out of range")
        e = self.identity
        if any(self.table[e][a] != a or self.table[a][e] != a for a in range(n)):
            raise GroupError("marked identity is not an identity")
        for a, b, c in itertools.product(range(n), repeat=3):
            if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]]:
                raise GroupError(f"not associative at {(a, b, c)}")
        inv = []
        for a in range(n):
            row = [b for b in range(n) if self.table[a][b] == e]
            if len(row) != 1:
                raise GroupError(f"element {a} has no unique inverse")
            inv.append(row[0])
        object.__setattr__(self, "_inverse", tuple(inv))
        if len(self.epsilon) != n or any(s not in (1, -1) for s in self.epsilon):
            raise GroupError("epsilon must assign +1/-1 to every element")
        if self.epsilon[e] != 1:
            raise GroupError("epsilon(1) must be +1")
        for a, b in itertools.product(range(n), repeat=2):
            if self.epsilon[self.table[a][b]] != self.epsilon[a] * self.epsilon[b]:
                raise GroupError("epsilon is not a homomorphism")

    @property
    def order(self) -> int:
        return len(self.names)

    @property
    def elements(self) -> range:
        return range(self.order)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self._inverse[a]

    def eps(self, a: int) -> int:
        return self.epsilon[a]

    def kernel(self) -> List[int]:
        return [a for a in self.elements if self.epsilon[a] == 1]

    def odd(self) -> List[int]:
        return [a for a in self.elements if self.epsilon[a] == -1]

    def element(self, name: str) -> int:
        return self.names.index(name)

    def twisted_action_on_phase(self, g: int, p: Phase) -> Phase:
        return p ** self.epsilon[g]

    def to_json(self) -> dict:
        return {
            "elements": list(self.names),
            "table": [list(r) for r in self.table],
            "epsilon": list(self.epsilon),
            "identity": self.identity,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "OrientifoldGroup":
        names = tuple(str(x) for x in obj["elements"])
        table = obj["table"]
        if table and isinstance(table[0][0], str):
            table = [[names.index(x) for x in row] for row in table]
        ident = obj.get("identity", 0)
        if isinstance(ident, str):
            ident = names.index(ident)
        return cls(names, tuple(tuple(r) for r in table), tuple(obj["epsilon"]), ident)


def cyclic_group(n: int, epsilon: Optional[Sequence[int]] = None) -> OrientifoldGroup:
    table = tuple(tuple((a + b) % n for b in range(n)) for a in range(n))
    eps = tuple(epsilon) if epsilon is not None else (1,) * n
    return OrientifoldGroup(tuple(str(a) for a in range(n)), table, eps)


def product_group(g: OrientifoldGroup, h: OrientifoldGroup,
                  epsilon: Optional[Sequence[int]] = None) -> OrientifoldGroup:
    """Direct product; elements ordered ``(a, b) -> a * |h| + b``."""
    m = h.order
    pairs = [(a, b) for a in g.elements for b in h.elements]
    table = tuple(
        tuple(g.mul(a, c) * m + h.mul(b, d) for (c, d) in pairs) for (a, b) in pairs
    )
    eps = (tuple(epsilon) if epsilon is not None
           else tuple(g.eps(a) * h.eps(b) for a, b in pairs))
    names = tuple(f"({g.names[a]},{h.names[b]})" for a, b in pairs)
    return OrientifoldGroup(names, table, eps, g.identity * m + h.identity)


def jandl_group() -> OrientifoldGroup:
    """Z2 = {1, k} with eps(k) = -1."""
    return OrientifoldGroup(("1", "k"), ((0, 1), (1, 0)), (1, -1))


def klein_four(eps: str = "second") -> OrientifoldGroup:
    """Z2 x Z2 with eps the projection onto the chosen factor (or trivial)."""
    z2 = cyclic_group(2)
    pairs = [(a, b) for a in range(2) for b in range(2)]
    if eps == "second":
        e = tuple(-1 if b else 1 for a, b in pairs)
    elif eps == "first":
        e = tuple(-1 if a else 1 for a, b in pairs)
    elif eps == "trivial":
        e = (1, 1, 1, 1)
    else:
        raise ValueError(eps)
    return product_group(z2, z2, e)


def z4_alternating() -> OrientifoldGroup:
    return cyclic_group(4, [1, -1, 1, -1])


def quotient_group(g: OrientifoldGroup) -> Tuple[OrientifoldGroup, List[int]]:
    """``G / ker(eps)`` with the induced sign, plus the projection map."""
    kernel = g.kernel()
    odd = g.odd()
    if not odd:
        q = OrientifoldGroup(("1",), ((0,),), (1,))
        return q, [0] * g.order
    proj = [0 if g.eps(a) == 1 else 1 for a in g.elements]
    assert len(kernel) == len(odd)
    return jandl_group(), proj


@dataclass(frozen=True)
class IndexAction:
    """Left action of a group on a finite index set ``0..size-1``."""

    group: OrientifoldGroup
    action: Tuple[Tuple[int, ...], ...]  # action[g][i] = g.i

    def __post_init__(self) -> None:
        g = self.group
        n = len(self.action[g.identity])
        if len(self.action) != g.order or any(len(r) != n for r in self.action):
            raise GroupError("action table has wrong shape")
        if any(self.action[g.identity][i] != i for i in range(n)):
            raise GroupError("identity does not act trivially")
        for a, b in itertools.product(g.elements, repeat=2):
            ab = g.mul(a, b)
            for i in range(n):
                if self.action[ab][i] != self.action[a][self.action[b][i]]:
                    raise GroupError("action law violated")

    @property
    def size(self) -> int:
        return len(self.action[0])

    def act(self, g: int, i: int) -> int:
        return self.action[g][i]

    def is_free_on(self, subgroup: Sequence[int]) -> bool:
        e = self.group.identity
        return all(self.action[g][i] != i
                   for g in subgroup if g != e for i in range(self.size))

    def orbits(self, subgroup: Sequence[int]) -> List[Tuple[int, ...]]:
        seen: Dict[int, int] = {}
        out = []
        for i in range(self.size):
            if i in seen:
                continue
            orb = tuple(sorted({self.action[g][i] for g in subgroup}))
            for j in orb:
                seen[j] = len(out)
            out.append(orb)
        return out

    def to_json(self) -> dict:
        return {"action": [list(r) for r in self.action]}


def regular_action(g: OrientifoldGroup) -> IndexAction:
    return IndexAction(g, tuple(tuple(g.mul(a, b) for b in g.elements) for a in g.elements))
