"""Finite behavior types and their parts.

A :class:`System` is a finite, ordered set of behaviors. A :class:`Part` is a
surjection out of those behaviors, stored as the partition (kernel) it induces:
``assignment[s]`` is the block of behavior ``s``. Block ids are renumbered by
first occurrence, so two parts with the same kernel have identical arrays and
the part order reduces to array comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Iterable, Iterator, Mapping, NamedTuple, Sequence

import numpy as np

__all__ = [
    "MereologyError",
    "SchemaError",
    "SystemMismatchError",
    "NotASubpartError",
    "Behavior",
    "System",
    "Part",
    "Model",
    "UnionFind",
    "canonicalize",
    "make_system",
    "part_from_assignment",
    "part_from_observation",
    "restrict",
    "is_subpart",
    "connecting_map",
    "meet",
    "join",
    "top",
    "bottom",
    "compatible",
    "compatible_family",
    "compatibility_table",
    "determines",
    "determines_part",
    "strongly_disjoint",
    "disjoint",
]


class MereologyError(ValueError):
    """Base class for domain errors raised by the engine."""


class SchemaError(MereologyError):
    pass


class SystemMismatchError(MereologyError):
    pass


class NotASubpartError(MereologyError):
    pass


Scalar = Any  # int | float | str


class Behavior(NamedTuple):
    index: int
    label: dict


class System:
    """A named finite behavior type.

    Labels are stored as tuples following ``schema``; use :meth:`behavior` or
    :meth:`label` for the dict view. Instances are immutable.
    """

    __slots__ = ("_name", "_schema", "_rows", "_hash")

    def __init__(self, name: str, schema: Sequence[str], rows: Iterable[Sequence[Scalar]]):
        self._name = str(name)
        self._schema = tuple(schema)
        self._rows = tuple(tuple(r) for r in rows)
        for i, row in enumerate(self._rows):
            if len(row) != len(self._schema):
                raise SchemaError(
                    f"behavior {i} has {len(row)} fields, schema has {len(self._schema)}"
                )
        self._hash = hash((self._name, self._schema, self._rows))

    @property
    def name(self) -> str:
        return self._name

    @property
    def schema(self) -> tuple[str, ...]:
        return self._schema

    @property
    def rows(self) -> tuple[tuple, ...]:
        return self._rows

    @property
    def size(self) -> int:
        return len(self._rows)

    def __len__(self) -> int:
        return len(self._rows)

    def label(self, s: int) -> dict:
        return dict(zip(self._schema, self._rows[s]))

    def behavior(self, s: int) -> Behavior:
        return Behavior(s, self.label(s))

    @property
    def behaviors(self) -> list[Behavior]:
        return [self.behavior(s) for s in range(self.size)]

    def column(self, field: str) -> list:
        try:
            j = self._schema.index(field)
        except ValueError:
            raise SchemaError(f"unknown field {field!r}") from None
        return [row[j] for row in self._rows]

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, System):
            return NotImplemented
        return (
            self._hash == other._hash
            and self._name == other._name
            and self._schema == other._schema
            and self._rows == other._rows
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"System({self._name!r}, n={self.size}, schema={list(self._schema)})"


def canonicalize(assignment: Sequence[int] | np.ndarray) -> np.ndarray:
    """Renumber block ids so that blocks appear in first-occurrence order."""
    a = np.asarray(assignment)
    if a.size == 0:
        return np.zeros(0, dtype=np.intp)
    _, first, inverse = np.unique(a, return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.intp)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first))
    return rank[inverse.reshape(-1)]


class Part:
    """A part of a system, i.e. a partition of its behaviors.

    Equality ignores the name: two parts of the same system with the same
    kernel are the same part.
    """

    __slots__ = ("_system", "_name", "_assignment", "_k", "_hash")

    def __init__(self, system: System, name: str, assignment: Sequence[int] | np.ndarray):
        a = np.asarray(assignment)
        if a.ndim != 1 or len(a) != system.size:
            raise SchemaError(
                f"assignment of length {a.size} does not match {system.size} behaviors"
            )
        if a.size and not np.issubdtype(a.dtype, np.integer):
            raise SchemaError("assignment entries must be integers")
        canon = canonicalize(a)
        canon.setflags(write=False)
        self._system = system
        self._name = str(name)
        self._assignment = canon
        self._k = int(canon.max()) + 1 if canon.size else 0
        self._hash = hash((system, canon.tobytes()))

    @property
    def system(self) -> System:
        return self._system

    @property
    def name(self) -> str:
        return self._name

    @property
    def assignment(self) -> np.ndarray:
        return self._assignment

    @property
    def block_count(self) -> int:
        return self._k

    def renamed(self, name: str) -> Part:
        return Part(self._system, name, self._assignment)

    def blocks(self) -> list[list[int]]:
        """Members of each block, in block order."""
        out: list[list[int]] = [[] for _ in range(self._k)]
        for s, b in enumerate(self._assignment):
            out[b].append(s)
        return out

    def representatives(self) -> np.ndarray:
        """First behavior index of each block."""
        _, first = np.unique(self._assignment, return_index=True)
        return first

    def kernel(self) -> np.ndarray:
        """Boolean matrix ``K[s, s']`` of observational equivalence."""
        a = self._assignment
        return a[:, None] == a[None, :]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Part):
            return NotImplemented
        return (
            self._hash == other._hash
            and _same_system(self._system, other._system)
            and np.array_equal(self._assignment, other._assignment)
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Part({self._name!r}, k={self._k}, assignment={self._assignment.tolist()})"


@dataclass(frozen=True)
class Model:
    """A system together with the named parts under consideration."""

    system: System
    parts: Mapping[str, Part]
    config: Any = None  # GeneratorConfig when produced by a generator

    def __getitem__(self, name: str) -> Part:
        try:
            return self.parts[name]
        except KeyError:
            raise MereologyError(f"unknown part {name!r}") from None

    def __iter__(self) -> Iterator[str]:
        return iter(self.parts)

    def with_part(self, part: Part) -> Model:
        parts = dict(self.parts)
        parts[part.name] = part
        return Model(self.system, parts, self.config)


def _same_system(a: System, b: System) -> bool:
    return a is b or a == b


def _check_same(p: Part, q: Part) -> None:
    if not _same_system(p.system, q.system):
        raise SystemMismatchError(
            f"parts {p.name!r} and {q.name!r} belong to different systems"
        )


def _check_block(part: Part, b: int) -> int:
    if not 0 <= int(b) < part.block_count:
        raise MereologyError(
            f"block {b} out of range for part {part.name!r} with {part.block_count} blocks"
        )
    return int(b)


class UnionFind:
    """Disjoint-set forest over ``0..n-1`` with path compression and union by size."""

    def __init__(self, n: int):
        self._parent = list(range(n))
        self._size = [1] * n

    def find(self, x: int) -> int:
        root = x
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[x] != root:
            self._parent[x], x = root, self._parent[x]
        return root

    def union(self, a: int, b: int) -> int:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        if self._size[ra] < self._size[rb]:
            ra, rb = rb, ra
        self._parent[rb] = ra
        self._size[ra] += self._size[rb]
        return ra

    def labels(self) -> list[int]:
        return [self.find(x) for x in range(len(self._parent))]


# -- construction ------------------------------------------------------------


def make_system(name: str, behaviors: Sequence[Mapping[str, Scalar]]) -> System:
    """Build a system from a list of label dicts sharing one schema."""
    if not behaviors:
        return System(name, (), ())
    schema = tuple(behaviors[0].keys())
    keys = set(schema)
    rows = []
    for i, label in enumerate(behaviors):
        if set(label.keys()) != keys:
            raise SchemaError(
                f"behavior {i} has fields {sorted(label)}, expected {sorted(keys)}"
            )
        rows.append(tuple(label[f] for f in schema))
    return System(name, schema, rows)


def part_from_assignment(system: System, name: str, assignment: Sequence[int]) -> Part:
    return Part(system, name, assignment)


def part_from_observation(
    system: System, name: str, f: Callable[[Behavior], Any] | Mapping[int, Any]
) -> Part:
    """Part whose blocks are the fibers of the observation ``f``.

    ``f`` is either a callable on behaviors or a mapping from behavior index
    to observed value. Observed values must be hashable.
    """
    values = []
    for s in range(system.size):
        if callable(f):
            v = f(system.behavior(s))
        else:
            if s not in f:
                raise MereologyError(f"observation undefined on behavior {s}")
            v = f[s]
        values.append(v)
    ids: dict[Any, int] = {}
    assignment = [ids.setdefault(v, len(ids)) for v in values]
    return Part(system, name, np.asarray(assignment, dtype=np.intp))


def top(system: System, name: str = "top") -> Part:
    return Part(system, name, np.arange(system.size, dtype=np.intp))


def bottom(system: System, name: str = "bottom") -> Part:
    return Part(system, name, np.zeros(system.size, dtype=np.intp))


# -- order -------------------------------------------------------------------


def restrict(part: Part, s: int) -> int:
    if not 0 <= int(s) < part.system.size:
        raise MereologyError(f"behavior index {s} out of range")
    return int(part.assignment[s])


def _pair_codes(p: Part, q: Part) -> np.ndarray:
    return p.assignment * max(q.block_count, 1) + q.assignment


def is_subpart(p: Part, q: Part) -> bool:
    """True iff ``P >= Q``, i.e. ``Q`` is a part of ``P``."""
    _check_same(p, q)
    if p.system.size == 0:
        return True
    # P >= Q iff every P-block sees exactly one Q-block.
    return len(np.unique(_pair_codes(p, q))) == p.block_count


def connecting_map(p: Part, q: Part) -> np.ndarray:
    """The unique surjection from P-blocks to Q-blocks commuting with restriction."""
    if not is_subpart(p, q):
        raise NotASubpartError(f"{q.name!r} is not a part of {p.name!r}")
    out = np.empty(p.block_count, dtype=np.intp)
    out[p.assignment] = q.assignment
    return out


# -- lattice -----------------------------------------------------------------


def meet(p: Part, q: Part, name: str | None = None) -> Part:
    """Equivalence closure of the union of both kernels."""
    _check_same(p, q)
    n = p.system.size
    uf = UnionFind(n)
    for a in (p.assignment, q.assignment):
        first: dict[int, int] = {}
        for s, b in enumerate(a.tolist()):
            if b in first:
                uf.union(first[b], s)
            else:
                first[b] = s
    label = name if name is not None else f"({p.name} meet {q.name})"
    return Part(p.system, label, np.asarray(uf.labels(), dtype=np.intp))


def join(p: Part, q: Part, name: str | None = None) -> Part:
    """Intersection of both kernels; blocks are the realized compatible pairs."""
    _check_same(p, q)
    label = name if name is not None else f"({p.name} join {q.name})"
    return Part(p.system, label, _pair_codes(p, q))


# -- compatibility and determination -----------------------------------------


def compatibility_table(p: Part, q: Part) -> np.ndarray:
    """Boolean matrix ``C[a, b]`` that is true iff blocks ``a`` and ``b`` are compatible."""
    _check_same(p, q)
    table = np.zeros((p.block_count, q.block_count), dtype=bool)
    table[p.assignment, q.assignment] = True
    return table


def compatible(p: Part, q: Part, a: int, b: int) -> bool:
    _check_same(p, q)
    a, b = _check_block(p, a), _check_block(q, b)
    return bool(np.any((p.assignment == a) & (q.assignment == b)))


def compatible_family(parts: Sequence[Part], blocks: Sequence[int]) -> bool:
    if len(parts) != len(blocks):
        raise MereologyError(f"{len(parts)} parts but {len(blocks)} blocks")
    if not parts:
        raise MereologyError("empty family")
    for p in parts[1:]:
        _check_same(parts[0], p)
    mask = np.ones(parts[0].system.size, dtype=bool)
    for p, b in zip(parts, blocks):
        mask &= p.assignment == _check_block(p, b)
    return bool(mask.any())


def determines(p: Part, q: Part, a: int, b: int) -> bool:
    _check_same(p, q)
    a, b = _check_block(p, a), _check_block(q, b)
    return bool(np.all(q.assignment[p.assignment == a] == b))


def determines_part(p: Part, q: Part) -> bool:
    """True iff every P-block determines some Q-block."""
    _check_same(p, q)
    return all(
        any(determines(p, q, a, b) for b in range(q.block_count))
        for a in range(p.block_count)
    )


def strongly_disjoint(p: Part, q: Part) -> bool:
    return bool(compatibility_table(p, q).all())


def disjoint(p: Part, q: Part) -> bool:
    return meet(p, q).block_count <= 1
