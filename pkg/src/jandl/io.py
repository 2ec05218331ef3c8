"""JSON serialization of surfaces, data, groups and scenes.

Files are canonical when written by :func:`dump_text`: sorted keys, two-space
indent, a trailing newline, phases as ``"p/q"`` strings and table entries
sorted by key.  Parsing a canonical file and writing it back reproduces it
byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Union

from .descent import FlatEquivariantDatum, FlatSpace
from .group import (GroupError, IndexAction, OrientifoldGroup, cyclic_group, jandl_group,
                    klein_four, z4_alternating)
from .localdata import ModuleValue, OrientifoldDatum
from .phase import Phase, unitary_from_json, unitary_to_json
from .surface import Admissible, DomainChoice, DoubleCover, SurfaceError, SurfaceSpec, build_surface

SCHEMA_VERSION = 1

PHASE_TABLES = ("face_b", "edge_a", "g_v", "edge_pi", "chi_v", "f_v")
MODULE_TABLES = ("edge_t", "g_mod", "h_mod")


class InputError(ValueError):
    """Unreadable or malformed input; maps to exit code 2."""


def dump_text(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def load_json(path: Union[str, Path]) -> Any:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"{path}: cannot read file ({exc.strerror})") from exc
    return parse_text(text, str(path))


def parse_text(text: str, source: str = "<string>") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def parse_phase(obj: Any) -> Phase:
    if not isinstance(obj, str):
        raise InputError(f"phase must be a 'p/q' string, got {obj!r}")
    try:
        return Phase.parse(obj)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad phase {obj!r}") from exc


def module_to_json(v: ModuleValue) -> Any:
    return v.to_text() if isinstance(v, Phase) else unitary_to_json(v)


def module_from_json(obj: Any, rank: int) -> ModuleValue:
    if rank == 1:
        return parse_phase(obj)
    u = unitary_from_json(obj)
    if u.shape != (rank, rank):
        raise InputError(f"expected a {rank}x{rank} unitary")
    return u


def _table_to_json(tab: Dict[tuple, Any], enc) -> list:
    return [[list(k), enc(v)] for k, v in sorted(tab.items())]


def _table_from_json(rows: Any, dec) -> Dict[tuple, Any]:
    if not isinstance(rows, list):
        raise InputError("table must be a list of [key, value] pairs")
    out = {}
    for row in rows:
        try:
            key, val = row
            out[tuple(int(x) for x in key)] = dec(val)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, InputError):
                raise
            raise InputError(f"bad table entry {row!r}") from exc
    return out


# ---------------------------------------------------------------------------
# surfaces, choices, groups


def surface_to_json(dc: DoubleCover) -> dict:
    return dc.spec.to_json()


def surface_from_json(obj: Any) -> DoubleCover:
    try:
        return build_surface(SurfaceSpec.from_json(obj))
    except (SurfaceError, KeyError, TypeError) as exc:
        raise InputError(f"bad surface: {exc}") from exc


def choice_from_json(obj: Any) -> DomainChoice:
    try:
        return DomainChoice.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad choice: {exc}") from exc


NAMED_GROUPS = {
    "z2+": lambda: cyclic_group(2),
    "z2-": jandl_group,
    "jandl": jandl_group,
    "v4": lambda: klein_four("second"),
    "v4-trivial": lambda: klein_four("trivial"),
    "z4alt": z4_alternating,
}


def group_from_json(obj: Any) -> OrientifoldGroup:
    if isinstance(obj, str):
        if obj not in NAMED_GROUPS:
            raise InputError(f"unknown group {obj!r}; known: {', '.join(NAMED_GROUPS)}")
        return NAMED_GROUPS[obj]()
    if isinstance(obj, dict) and "name" in obj and "table" not in obj:
        return group_from_json(obj["name"])
    try:
        return OrientifoldGroup.from_json(obj)
    except (GroupError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad group: {exc}") from exc


def resolve_group(text: str) -> OrientifoldGroup:
    """A group given by name or by the path of a JSON file."""
    if text in NAMED_GROUPS:
        return NAMED_GROUPS[text]()
    return group_from_json(load_json(text))


# ---------------------------------------------------------------------------
# orientifold data


def datum_to_json(d: OrientifoldDatum) -> dict:
    adm = d.adm
    tabs = d.tables()
    out = {
        "schema_version": SCHEMA_VERSION,
        "rank": d.rank,
        "admissible": {
            "face": [sorted(a) for a in adm.face],
            "edge": [sorted(a) for a in adm.edge],
            "vertex": [sorted(a) for a in adm.vertex],
            "k": list(adm.kmap),
        },
    }
    for name in PHASE_TABLES:
        out[name] = _table_to_json(tabs[name], Phase.to_text)
    for name in MODULE_TABLES:
        out[name] = _table_to_json(tabs[name], module_to_json)
    return out


def datum_from_json(obj: Any) -> OrientifoldDatum:
    if not isinstance(obj, dict):
        raise InputError("datum must be a JSON object")
    try:
        rank = int(obj.get("rank", 1))
        a = obj["admissible"]
        adm = Admissible(tuple(frozenset(int(i) for i in s) for s in a["face"]),
                         tuple(frozenset(int(i) for i in s) for s in a["edge"]),
                         tuple(frozenset(int(i) for i in s) for s in a["vertex"]),
                         tuple(int(i) for i in a["k"]))
        tabs = {name: _table_from_json(obj[name], parse_phase) for name in PHASE_TABLES}
        for name in MODULE_TABLES:
            tabs[name] = _table_from_json(obj.get(name, []),
                                          lambda v: module_from_json(v, rank))
    except KeyError as exc:
        raise InputError(f"datum is missing {exc.args[0]!r}") from exc
    if rank < 1:
        raise InputError("rank must be positive")
    return OrientifoldDatum(adm, rank=rank, **tabs)


# ---------------------------------------------------------------------------
# flat equivariant data


def flat_to_json(d: FlatEquivariantDatum) -> dict:
    sp = d.space
    return {
        "schema_version": SCHEMA_VERSION,
        "group": sp.group.to_json(),
        "points": [list(r) for r in sp.points.action],
        "indices": [list(r) for r in sp.indices.action],
        "location": list(sp.location),
        "rank": d.rank,
        "g": _table_to_json(d.g_tab, Phase.to_text),
        "chi": [[gam, _table_to_json(tab, Phase.to_text)] for gam, tab in sorted(d.chi_tab.items())],
        "f": [[list(k), _table_to_json({(i,): v for i, v in tab.items()}, Phase.to_text)]
              for k, tab in sorted(d.f_tab.items())],
        "G": _table_to_json(d.G_tab, module_to_json),
        "H": [[gam, _table_to_json({(i,): v for i, v in tab.items()}, module_to_json)]
              for gam, tab in sorted(d.H_tab.items())],
    }


def flat_from_json(obj: Any) -> FlatEquivariantDatum:
    try:
        grp = group_from_json(obj["group"])
        space = FlatSpace(grp, IndexAction(grp, tuple(tuple(r) for r in obj["points"])),
                          IndexAction(grp, tuple(tuple(r) for r in obj["indices"])),
                          tuple(int(x) for x in obj["location"]))
        rank = int(obj.get("rank", 0))
        g = _table_from_json(obj["g"], parse_phase)
        chi = {int(gam): _table_from_json(t, parse_phase) for gam, t in obj["chi"]}
        f = {tuple(k): {i[0]: v for i, v in _table_from_json(t, parse_phase).items()}
             for k, t in obj["f"]}
        dec = lambda v: module_from_json(v, rank)  # noqa: E731
        G = _table_from_json(obj.get("G", []), dec)
        H = {int(gam): {i[0]: v for i, v in _table_from_json(t, dec).items()}
             for gam, t in obj.get("H", [])}
    except KeyError as exc:
        raise InputError(f"flat datum is missing {exc.args[0]!r}") from exc
    except (GroupError, TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"bad flat datum: {exc}") from exc
    return FlatEquivariantDatum(space, g, chi, f, rank, G, H)


# ---------------------------------------------------------------------------
# scenes


@dataclass(frozen=True, eq=False)
class Scene:
    surface: DoubleCover
    datum: OrientifoldDatum
    seed: int = 0
    choice: Optional[DomainChoice] = None
    group: Optional[OrientifoldGroup] = None

    @property
    def rank(self) -> int:
        return self.datum.rank

    def to_json(self) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "surface": surface_to_json(self.surface),
            "datum": datum_to_json(self.datum),
            "seed": self.seed,
            "rank": self.rank,
        }
        if self.choice is not None:
            out["choice"] = self.choice.to_json()
        if self.group is not None:
            out["group"] = self.group.to_json()
        return out


def _resolve(ref: Any, base: Path) -> Any:
    """Inline objects pass through; strings are paths relative to the scene."""
    if isinstance(ref, str):
        return load_json(base / ref)
    return ref


def scene_from_json(obj: Any, base: Union[str, Path] = ".") -> Scene:
    if not isinstance(obj, dict):
        raise InputError("scene must be a JSON object")
    base = Path(base)
    for key in ("surface", "datum"):
        if key not in obj:
            raise InputError(f"scene is missing {key!r}")
    dc = surface_from_json(_resolve(obj["surface"], base))
    d = datum_from_json(_resolve(obj["datum"], base))
    if "rank" in obj and int(obj["rank"]) != d.rank:
        raise InputError(f"scene rank {obj['rank']} disagrees with datum rank {d.rank}")
    for name, tab, n in (("face", d.adm.face, dc.n_lifted_faces),
                         ("edge", d.adm.edge, dc.n_lifted_edges),
                         ("vertex", d.adm.vertex, dc.n_lifted_vertices)):
        if len(tab) != n:
            raise InputError(f"datum has {len(tab)} {name} index sets, surface has {n}")
    choice = choice_from_json(_resolve(obj["choice"], base)) if "choice" in obj else None
    grp = group_from_json(_resolve(obj["group"], base)) if "group" in obj else None
    return Scene(dc, d, int(obj.get("seed", 0)), choice, grp)


def load_scene(path: Union[str, Path]) -> Scene:
    return scene_from_json(load_json(path), Path(path).parent)


def write_text(path: Union[str, Path, None], text: str) -> None:
    if path is None or str(path) == "-":
        print(text, end="")
    else:
        Path(path).write_text(text)


def holonomy_to_json(value) -> Any:
    if isinstance(value, Phase):
        return value.to_text()
    z = complex(value)
    return [z.real, z.imag]
