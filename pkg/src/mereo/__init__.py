"""Finite mereology of behavior systems: parts as partitions, constraints on
parts, and the allows/ensures modalities between them."""

from .core import (
    Behavior,
    MereologyError,
    Model,
    NotASubpartError,
    Part,
    SchemaError,
    System,
    SystemMismatchError,
    bottom,
    compatibility_table,
    compatible,
    compatible_family,
    connecting_map,
    determines,
    determines_part,
    disjoint,
    is_subpart,
    join,
    make_system,
    meet,
    part_from_assignment,
    part_from_observation,
    restrict,
    strongly_disjoint,
    top,
)
from .logic import (
    Constraint,
    ConstraintError,
    allows,
    and_,
    entails,
    ensures,
    eq_constraint,
    exists_along,
    forall_along,
    implies,
    kripke_box,
    kripke_diamond,
    necessary,
    not_,
    or_,
    possible,
    pullback,
)

__version__ = "0.1.0"

__all__ = [
    "Behavior",
    "MereologyError",
    "Model",
    "NotASubpartError",
    "Part",
    "SchemaError",
    "System",
    "SystemMismatchError",
    "bottom",
    "compatibility_table",
    "compatible",
    "compatible_family",
    "connecting_map",
    "determines",
    "determines_part",
    "disjoint",
    "is_subpart",
    "join",
    "make_system",
    "meet",
    "part_from_assignment",
    "part_from_observation",
    "restrict",
    "strongly_disjoint",
    "top",
    "Constraint",
    "ConstraintError",
    "allows",
    "and_",
    "entails",
    "ensures",
    "eq_constraint",
    "exists_along",
    "forall_along",
    "implies",
    "kripke_box",
    "kripke_diamond",
    "necessary",
    "not_",
    "or_",
    "possible",
    "pullback",
]
