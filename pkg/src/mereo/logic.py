"""Constraints on parts and the operators that pass them between parts.

A :class:`Constraint` is a predicate on the blocks of one part, stored as a
boolean vector. The ``*_bits`` functions are the array-level kernels; they
accept a stack of constraints (shape ``(..., k)``) so law checks can sweep
whole constraint spaces at once. The constraint-level functions wrap them.

Logic is two-valued throughout.
"""

from __future__ import annotations

from typing import Callable, Iterable, Sequence

import numpy as np

from .core import (
    MereologyError,
    NotASubpartError,
    Part,
    _check_block,
    _check_same,
    bottom,
    connecting_map,
    is_subpart,
    top,
)

__all__ = [
    "ConstraintError",
    "Constraint",
    "eq_constraint",
    "entails",
    "and_",
    "or_",
    "not_",
    "implies",
    "pullback",
    "exists_along",
    "forall_along",
    "allows",
    "ensures",
    "possible",
    "necessary",
    "kripke_diamond",
    "kripke_box",
    "allows_bits",
    "ensures_bits",
    "pullback_bits",
    "exists_bits",
    "forall_bits",
    "one_hot",
]


class ConstraintError(MereologyError):
    pass


class Constraint:
    """A predicate on the blocks of ``part``."""

    __slots__ = ("_part", "_bits")

    def __init__(self, part: Part, bits: Sequence[bool] | np.ndarray):
        b = np.array(bits, dtype=bool).reshape(-1)
        if len(b) != part.block_count:
            raise ConstraintError(
                f"constraint has {len(b)} bits, part {part.name!r} has {part.block_count} blocks"
            )
        b.setflags(write=False)
        self._part = part
        self._bits = b

    @classmethod
    def true(cls, part: Part) -> Constraint:
        return cls(part, np.ones(part.block_count, dtype=bool))

    @classmethod
    def false(cls, part: Part) -> Constraint:
        return cls(part, np.zeros(part.block_count, dtype=bool))

    @classmethod
    def from_blocks(cls, part: Part, blocks: Iterable[int]) -> Constraint:
        bits = np.zeros(part.block_count, dtype=bool)
        for b in blocks:
            bits[_check_block(part, b)] = True
        return cls(part, bits)

    @classmethod
    def from_label_predicate(cls, part: Part, pred: Callable[[dict], bool]) -> Constraint:
        """Evaluate ``pred`` on the label of each block's first behavior."""
        reps = part.representatives()
        return cls(part, [bool(pred(part.system.label(int(s)))) for s in reps])

    @property
    def part(self) -> Part:
        return self._part

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    def blocks(self) -> list[int]:
        return np.flatnonzero(self._bits).tolist()

    def __len__(self) -> int:
        return len(self._bits)

    def __getitem__(self, b: int) -> bool:
        return bool(self._bits[b])

    def __and__(self, other: Constraint) -> Constraint:
        return and_(self, other)

    def __or__(self, other: Constraint) -> Constraint:
        return or_(self, other)

    def __invert__(self) -> Constraint:
        return not_(self)

    def __le__(self, other: Constraint) -> bool:
        return entails(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Constraint):
            return NotImplemented
        return self._part == other._part and np.array_equal(self._bits, other._bits)

    def __hash__(self) -> int:
        return hash((self._part, self._bits.tobytes()))

    def __repr__(self) -> str:
        s = "".join("1" if x else "0" for x in self._bits)
        return f"Constraint({self._part.name!r}, {s or '-'})"


def _same_part(phi: Constraint, psi: Constraint) -> None:
    if phi.part != psi.part:
        raise ConstraintError(
            f"constraints live on different parts ({phi.part.name!r}, {psi.part.name!r})"
        )


def eq_constraint(part: Part, b: int) -> Constraint:
    """The constraint ``(= b)``."""
    return Constraint.from_blocks(part, [b])


def entails(phi: Constraint, psi: Constraint) -> bool:
    _same_part(phi, psi)
    return not np.any(phi.bits & ~psi.bits)


def and_(phi: Constraint, psi: Constraint) -> Constraint:
    _same_part(phi, psi)
    return Constraint(phi.part, phi.bits & psi.bits)


def or_(phi: Constraint, psi: Constraint) -> Constraint:
    _same_part(phi, psi)
    return Constraint(phi.part, phi.bits | psi.bits)


def not_(phi: Constraint) -> Constraint:
    return Constraint(phi.part, ~phi.bits)


def implies(phi: Constraint, psi: Constraint) -> Constraint:
    _same_part(phi, psi)
    return Constraint(phi.part, ~phi.bits | psi.bits)


# -- array kernels -----------------------------------------------------------


def one_hot(index: np.ndarray, k: int) -> np.ndarray:
    """``len(index) x k`` integer matrix with a single 1 per row."""
    m = np.zeros((len(index), k), dtype=np.int64)
    m[np.arange(len(index)), index] = 1
    return m


def _as_bits(bits: np.ndarray, k: int) -> np.ndarray:
    b = np.asarray(bits, dtype=bool)
    if b.shape[-1:] != (k,):
        raise ConstraintError(f"expected trailing dimension {k}, got shape {b.shape}")
    return b


def allows_bits(bits: np.ndarray, p: Part, q: Part) -> np.ndarray:
    """Block ``b`` of Q is set iff some behavior in ``b`` restricts into ``bits`` on P."""
    _check_same(p, q)
    on_s = _as_bits(bits, p.block_count)[..., p.assignment]
    return (on_s.astype(np.int64) @ one_hot(q.assignment, q.block_count)) > 0


def ensures_bits(bits: np.ndarray, p: Part, q: Part) -> np.ndarray:
    """Block ``b`` of Q is set iff every behavior in ``b`` restricts into ``bits`` on P."""
    _check_same(p, q)
    off_s = ~_as_bits(bits, p.block_count)[..., p.assignment]
    return (off_s.astype(np.int64) @ one_hot(q.assignment, q.block_count)) == 0


def pullback_bits(bits: np.ndarray, p: Part, q: Part) -> np.ndarray:
    """Pull constraints on Q back along the connecting map of ``P >= Q``."""
    m = connecting_map(p, q)
    return _as_bits(bits, q.block_count)[..., m]


def exists_bits(bits: np.ndarray, p: Part, q: Part) -> np.ndarray:
    m = connecting_map(p, q)
    b = _as_bits(bits, p.block_count).astype(np.int64)
    return (b @ one_hot(m, q.block_count)) > 0


def forall_bits(bits: np.ndarray, p: Part, q: Part) -> np.ndarray:
    m = connecting_map(p, q)
    b = (~_as_bits(bits, p.block_count)).astype(np.int64)
    return (b @ one_hot(m, q.block_count)) == 0


# -- constraint-level operators ----------------------------------------------


def _require_subpart(p: Part, q: Part) -> None:
    if not is_subpart(p, q):
        raise NotASubpartError(f"{q.name!r} is not a part of {p.name!r}")


def pullback(psi: Constraint, p: Part) -> Constraint:
    """Reindex a constraint on Q to the finer part P (requires ``P >= Q``)."""
    _require_subpart(p, psi.part)
    return Constraint(p, pullback_bits(psi.bits, p, psi.part))


def exists_along(phi: Constraint, q: Part) -> Constraint:
    _require_subpart(phi.part, q)
    return Constraint(q, exists_bits(phi.bits, phi.part, q))


def forall_along(phi: Constraint, q: Part) -> Constraint:
    _require_subpart(phi.part, q)
    return Constraint(q, forall_bits(phi.bits, phi.part, q))


def allows(phi: Constraint, q: Part) -> Constraint:
    """Behaviors of Q that can occur while ``phi`` holds on its part."""
    return Constraint(q, allows_bits(phi.bits, phi.part, q))


def ensures(phi: Constraint, q: Part) -> Constraint:
    """Behaviors of Q under which ``phi`` must hold on its part."""
    return Constraint(q, ensures_bits(phi.bits, phi.part, q))


def _require_inhabited(phi: Constraint) -> None:
    if phi.part.system.size == 0:
        raise MereologyError("possibility and necessity need an inhabited system")


def possible(phi: Constraint) -> Constraint:
    _require_inhabited(phi)
    bot = bottom(phi.part.system)
    return allows(allows(phi, bot), phi.part)


def necessary(phi: Constraint) -> Constraint:
    _require_inhabited(phi)
    bot = bottom(phi.part.system)
    return ensures(ensures(phi, bot), phi.part)


def _kripke_args(system, accessibility: Part, phi: Constraint) -> Part:
    if accessibility.system != system:
        raise MereologyError(f"part {accessibility.name!r} is not over {system.name!r}")
    worlds = top(system)
    if phi.part != worlds:
        raise ConstraintError("Kripke modalities act on constraints over all worlds")
    return worlds


def kripke_diamond(system, accessibility: Part, phi: Constraint) -> Constraint:
    """Possibility for the equivalence frame whose classes are the blocks of ``accessibility``."""
    worlds = _kripke_args(system, accessibility, phi)
    return allows(allows(phi, accessibility), worlds)


def kripke_box(system, accessibility: Part, phi: Constraint) -> Constraint:
    worlds = _kripke_args(system, accessibility, phi)
    return ensures(ensures(phi, accessibility), worlds)
