"""Command line interface: ``jandl <command> [options]``.

Exit codes: 0 success, 1 semantic failure (unclean datum, choice
dependence), 2 unreadable or malformed input.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from . import io
from .cohomology import CohomologyError, cohomology, twist_classes
from .descent import DescentError, orbit_space, quotient, random_flat_datum, validate_flat
from .group import jandl_group
from .holonomy import holonomy, sweep
from .localdata import DatumError, check_complete, generate_pure_gauge, validate
from .phase import UNITARY_TOL
from .surface import (MODELS, ChoiceError, count_choices, enumerate_choices, named_surface)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
SWEEP_ALL_LIMIT = 2 ** 22


def _report(args, command: str, body: dict) -> None:
    out = {"schema_version": io.SCHEMA_VERSION, "command": command}
    out.update(body)
    io.write_text(getattr(args, "report", None), io.dump_text(out))


def _violations(scene, tol: float) -> list:
    try:
        check_complete(scene.datum, scene.surface)
    except DatumError as exc:
        raise io.InputError(str(exc)) from exc
    return validate(scene.datum, scene.surface, tol)


def cmd_validate(args) -> int:
    scene = io.load_scene(args.scene)
    bad = _violations(scene, args.tolerance)
    _report(args, "validate", {"clean": not bad, "violations": [v.to_json() for v in bad]})
    return EXIT_OK if not bad else EXIT_FAIL


def _parse_sweep(text: Optional[str], dc, adm):
    """Return ``(cap, samples)`` for :func:`enumerate_choices`."""
    if text is None:
        return None
    if text == "all":
        total = count_choices(dc, adm, limit=SWEEP_ALL_LIMIT)
        if total > SWEEP_ALL_LIMIT:
            raise io.InputError(f"choice space exceeds {SWEEP_ALL_LIMIT}; give a sample count")
        return total, 0
    try:
        n = int(text)
    except ValueError as exc:
        raise io.InputError(f"--sweep takes a count or 'all', got {text!r}") from exc
    if n <= 0:
        raise io.InputError("--sweep count must be positive")
    return n, n


def cmd_holonomy(args) -> int:
    scene = io.load_scene(args.scene)
    dc, d = scene.surface, scene.datum
    bad = _violations(scene, args.tolerance)
    if bad:
        _report(args, "holonomy", {"error": "datum is not clean",
                                   "violations": [v.to_json() for v in bad]})
        return EXIT_FAIL
    seed = args.seed if args.seed is not None else scene.seed
    plan = _parse_sweep(args.sweep, dc, d.adm)
    if plan is None:
        choice = scene.choice or next(enumerate_choices(dc, d.adm, 1, 1, seed))
        try:
            value = holonomy(d, dc, choice, check=False)
        except ChoiceError as exc:
            raise io.InputError(f"bad choice: {exc}") from exc
        _report(args, "holonomy", {"value": io.holonomy_to_json(value), "rank": d.rank})
        return EXIT_OK
    cap, samples = plan
    res = sweep(d, dc, cap=cap, samples=samples, seed=seed, tol=args.tolerance)
    _report(args, "holonomy", {
        "value": io.holonomy_to_json(res.value),
        "rank": d.rank,
        "choices": res.count,
        "exhaustive": res.count == count_choices(dc, d.adm, limit=cap),
        "invariant": res.invariant,
        "square_law": res.square_law,
    })
    return EXIT_OK if res.invariant else EXIT_FAIL


def _twist(index: Optional[int]):
    if index is None:
        return None
    classes = twist_classes(jandl_group())
    if not 0 <= index < len(classes):
        raise io.InputError(f"--twist must be in 0..{len(classes) - 1}")
    return classes[index]


def cmd_generate(args) -> int:
    seed = args.seed or 0
    if args.equivariant:
        grp = io.resolve_group(args.equivariant)
        space = orbit_space(grp, [[grp.identity]], [args.labels])
        try:
            d = random_flat_datum(space, seed, args.rank)
        except DescentError as exc:
            raise io.InputError(str(exc)) from exc
        io.write_text(args.out, io.dump_text(io.flat_to_json(d)))
        return EXIT_OK
    if args.surface in MODELS:
        dc = named_surface(args.surface)
    else:
        dc = io.surface_from_json(io.load_json(args.surface))
    if args.rank < 1:
        raise io.InputError("--rank must be positive for surface data")
    d = generate_pure_gauge(dc, seed, rank=args.rank, twist=_twist(args.twist),
                            n_labels=args.labels, background=args.background)
    scene = io.Scene(dc, d, seed)
    io.write_text(args.out, io.dump_text(scene.to_json()))
    return EXIT_OK


def cmd_cohomology(args) -> int:
    grp = io.resolve_group(args.group)
    degrees = [args.degree] if args.degree is not None else [0, 1, 2, 3]
    out = []
    for n in degrees:
        try:
            h = cohomology(grp, n)
        except CohomologyError as exc:
            raise io.InputError(str(exc)) from exc
        out.append({"degree": n, "group": h.describe(),
                    "invariant_factors": list(h.invariant_factors),
                    "divisible_rank": h.divisible_rank,
                    "representatives": [r.to_json() for r in h.representatives]})
    _report(args, "cohomology", {"group": list(grp.names), "epsilon": list(grp.epsilon),
                                 "cohomology": out})
    return EXIT_OK


def cmd_classify(args) -> int:
    grp = io.resolve_group(args.group)
    try:
        classes = twist_classes(grp)
    except CohomologyError as exc:
        raise io.InputError(str(exc)) from exc
    _report(args, "classify", {"group": list(grp.names), "epsilon": list(grp.epsilon),
                               "classes": len(classes),
                               "twists": [c.to_json() for c in classes]})
    return EXIT_OK


def cmd_descend(args) -> int:
    d = io.flat_from_json(io.load_json(args.datum))
    if args.group is not None:
        grp = io.resolve_group(args.group)
        if grp.table != d.group.table or grp.epsilon != d.group.epsilon:
            raise io.InputError("--group does not match the datum's group")
    bad = validate_flat(d, args.tolerance)
    if bad:
        _report(args, "descend", {"error": "equivariant datum is not clean",
                                  "violations": [v.to_json() for v in bad]})
        return EXIT_FAIL
    try:
        q, _ = quotient(d)
    except DescentError as exc:
        raise io.InputError(str(exc)) from exc
    qbad = validate_flat(q, args.tolerance)
    if args.out:
        io.write_text(args.out, io.dump_text(io.flat_to_json(q)))
    _report(args, "descend", {"quotient_indices": q.space.indices.size,
                              "quotient_group": list(q.group.names),
                              "clean": not qbad,
                              "violations": [v.to_json() for v in qbad]})
    return EXIT_OK if not qbad else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="jandl", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, scene=True):
        if scene:
            sp.add_argument("--scene", required=True, help="scene JSON file")
        sp.add_argument("--tolerance", type=float, default=UNITARY_TOL)
        sp.add_argument("--report", default=None, help="write the report here instead of stdout")

    sp = sub.add_parser("validate", help="check the local relations of a scene")
    common(sp)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("holonomy", help="evaluate the surface holonomy")
    common(sp)
    sp.add_argument("--sweep", default=None, help="number of sampled choices, or 'all'")
    sp.add_argument("--seed", type=int, default=None)
    sp.set_defaults(func=cmd_holonomy)

    sp = sub.add_parser("generate", help="write a random clean scene or equivariant datum")
    sp.add_argument("--surface", default="mobius", help=f"one of {', '.join(MODELS)} or a JSON file")
    sp.add_argument("--equivariant", default=None, metavar="GROUP",
                    help="write a flat equivariant datum over GROUP instead")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--rank", type=int, default=1)
    sp.add_argument("--twist", type=int, default=None, help="index of an H^2 twist class")
    sp.add_argument("--labels", type=int, default=3, help="index labels per sheet or point")
    sp.add_argument("--background", action="store_true",
                    help="add curvature and boundary transport before the gauge")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("cohomology", help="twisted group cohomology with U(1) coefficients")
    sp.add_argument("--group", required=True)
    sp.add_argument("--degree", type=int, default=None)
    sp.add_argument("--report", default=None)
    sp.set_defaults(func=cmd_cohomology)

    sp = sub.add_parser("classify", help="list the H^2 twist classes")
    sp.add_argument("--group", required=True)
    sp.add_argument("--report", default=None)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("descend", help="quotient a flat equivariant datum")
    common(sp, scene=False)
    sp.add_argument("--datum", required=True)
    sp.add_argument("--group", default=None)
    sp.add_argument("--out", default=None, help="write the quotient datum here")
    sp.set_defaults(func=cmd_descend)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except io.InputError as exc:
        print(f"jandl: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
