"""Holonomy of gerbes with Jandl structure on unoriented surfaces, from local data."""

from .phase import Phase
from .group import OrientifoldGroup, cyclic_group, jandl_group, klein_four
from .surface import DomainChoice, DoubleCover, build_surface, named_surface
from .localdata import OrientifoldDatum, apply_gauge, generate_pure_gauge, validate
from .holonomy import holonomy, holonomy_double, holonomy_oriented, sweep
from .cohomology import cohomology, twist_classes
from .descent import FlatEquivariantDatum, canonical_pullback, quotient

__all__ = [
    "Phase", "OrientifoldGroup", "cyclic_group", "jandl_group", "klein_four",
    "DomainChoice", "DoubleCover", "build_surface", "named_surface",
    "OrientifoldDatum", "apply_gauge", "generate_pure_gauge", "validate",
    "holonomy", "holonomy_double", "holonomy_oriented", "sweep",
    "cohomology", "twist_classes",
    "FlatEquivariantDatum", "canonical_pullback", "quotient",
]
