"""Executable checks of the mereology and inter-modal laws on finite systems.

Each law is a function of a system and a list of its parts. The part list is
extended with top and bottom, and the law is checked for every pair (or
triple) drawn from it and for every constraint on the relevant parts. When a
part has more than ``exhaustive_threshold`` constraints, a seeded sample is
used instead: empty, full, all singletons and co-singletons, plus
``sample_count`` random bit vectors.

``allows`` and ``ensures`` are routed through an :class:`Operators` value so
that a deliberately broken implementation can be injected to confirm the
suite notices.
"""

from __future__ import annotations

import zlib
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from itertools import product
from typing import Callable, Iterable, Sequence

import numpy as np

from . import logic
from .core import (
    MereologyError,
    Model,
    Part,
    System,
    bottom,
    compatible,
    connecting_map,
    determines,
    determines_part,
    disjoint,
    is_subpart,
    join,
    meet,
    part_from_assignment,
    strongly_disjoint,
    top,
)
from .logic import Constraint, exists_bits, forall_bits, pullback_bits

__all__ = [
    "LAW_IDS",
    "STATEMENTS",
    "LawSuiteConfig",
    "Operators",
    "LawResult",
    "LawReport",
    "check_law",
    "run_suite",
    "replay",
    "oracle_allows",
    "oracle_ensures",
    "oracle_allows_bits",
    "oracle_ensures_bits",
    "oracle_mismatches",
    "set_partitions",
    "random_partition_system",
    "SUITE_CHECKS",
    "EXTRA_CHECKS",
    "arity",
]

REPORT_VERSION = 1


@dataclass(frozen=True)
class LawSuiteConfig:
    max_system_size: int = 6
    max_parts: int = 3
    exhaustive_threshold: int = 2**8
    sample_count: int = 64
    seed: int = 1
    num_systems: int = 300
    include_bundled: bool = True


@dataclass(frozen=True)
class Operators:
    """The inter-modality kernels under test (array level, see :mod:`mereo.logic`)."""

    allows: Callable = logic.allows_bits
    ensures: Callable = logic.ensures_bits


@dataclass
class LawResult:
    law_id: str
    statement: str
    instance: str
    checked: int
    passed: bool
    counterexample: dict | None = None

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class LawReport:
    config: LawSuiteConfig
    results: list[LawResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> list[LawResult]:
        return [r for r in self.results if not r.passed]

    def summary(self) -> dict[str, dict]:
        out: dict[str, dict] = {}
        for r in self.results:
            s = out.setdefault(r.law_id, {"instances": 0, "checked": 0, "failed": 0})
            s["instances"] += 1
            s["checked"] += r.checked
            s["failed"] += not r.passed
        return dict(sorted(out.items()))

    def to_dict(self) -> dict:
        return {
            "format_version": REPORT_VERSION,
            "kind": "law-report",
            "config": asdict(self.config),
            "passed": self.passed,
            "summary": self.summary(),
            "results": [r.to_dict() for r in self.results],
        }

    def to_json(self) -> str:
        from .dsl.document import to_json_text

        return to_json_text(_jsonable(self.to_dict())) + "\n"

    def to_text(self) -> str:
        lines = []
        for law_id, s in self.summary().items():
            status = "PASS" if s["failed"] == 0 else "FAIL"
            lines.append(
                f"{status} {law_id:<34} instances={s['instances']:<4} checked={s['checked']}"
                + (f" failed={s['failed']}" if s["failed"] else "")
            )
        shown = 20
        for r in self.failures[:shown]:
            cx = r.counterexample or {}
            lines.append(f"  counterexample {r.law_id} @ {r.instance}: {cx.get('detail', '')}")
        if len(self.failures) > shown:
            lines.append(f"  ... {len(self.failures) - shown} more")
        total = sum(s["checked"] for s in self.summary().values())
        verdict = "all laws hold" if self.passed else f"{len(self.failures)} failing instance(s)"
        lines.append(f"{len(self.results)} law instances, {total} checks: {verdict}")
        return "\n".join(lines) + "\n"


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    return x


# -- oracles -------------------------------------------------------------------


def _compat_by_scan(p: Part, q: Part) -> np.ndarray:
    table = np.zeros((p.block_count, q.block_count), dtype=bool)
    for a, b in zip(p.assignment.tolist(), q.assignment.tolist()):
        table[a, b] = True
    return table


def oracle_allows_bits(bits: np.ndarray, p: Part, q: Part) -> np.ndarray:
    """Allows via the block compatibility table: some compatible ``a`` satisfies phi."""
    c = _compat_by_scan(p, q)
    b = np.asarray(bits, dtype=bool)
    return np.any(b[..., :, None] & c, axis=-2)


def oracle_ensures_bits(bits: np.ndarray, p: Part, q: Part) -> np.ndarray:
    """Ensures via the block compatibility table: every compatible ``a`` satisfies phi."""
    c = _compat_by_scan(p, q)
    b = np.asarray(bits, dtype=bool)
    return np.all(b[..., :, None] | ~c, axis=-2)


def oracle_allows(phi: Constraint, q: Part) -> Constraint:
    return Constraint(q, oracle_allows_bits(phi.bits, phi.part, q))


def oracle_ensures(phi: Constraint, q: Part) -> Constraint:
    return Constraint(q, oracle_ensures_bits(phi.bits, phi.part, q))


def oracle_mismatches(bits: np.ndarray, p: Part, q: Part, ops: Operators | None = None) -> int:
    """Number of constraints in the stack where scan and table disagree."""
    ops = ops or Operators()
    bits = np.atleast_2d(bits)
    bad = np.any(ops.allows(bits, p, q) != oracle_allows_bits(bits, p, q), axis=-1)
    bad |= np.any(ops.ensures(bits, p, q) != oracle_ensures_bits(bits, p, q), axis=-1)
    return int(bad.sum())


# -- enumeration helpers -------------------------------------------------------


@lru_cache(maxsize=None)
def _set_partitions(n: int) -> np.ndarray:
    out: list[list[int]] = []

    def grow(prefix: list[int], k: int) -> None:
        if len(prefix) == n:
            out.append(list(prefix))
            return
        for b in range(k + 1):
            prefix.append(b)
            grow(prefix, max(k, b + 1))
            prefix.pop()

    grow([], 0)
    arr = np.asarray(out, dtype=np.intp).reshape(len(out), n)
    arr.setflags(write=False)
    return arr


def set_partitions(n: int) -> np.ndarray:
    """All partitions of ``n`` elements as canonical (restricted growth) rows."""
    return _set_partitions(n)


def _bell(n: int) -> int:
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


@lru_cache(maxsize=None)
def _all_bits(k: int) -> np.ndarray:
    codes = np.arange(2**k, dtype=np.int64)[:, None]
    arr = ((codes >> np.arange(k)) & 1).astype(bool)
    arr.setflags(write=False)
    return arr


def _space(k: int, cfg: LawSuiteConfig, rng: np.random.Generator) -> np.ndarray:
    """Constraints on a ``k``-block part to check against."""
    if k < 63 and 2**k <= cfg.exhaustive_threshold:
        return _all_bits(k)
    eye = np.eye(k, dtype=bool)
    rows = [np.zeros((1, k), bool), np.ones((1, k), bool), eye, ~eye]
    rows.append(rng.random((cfg.sample_count, k)) < 0.5)
    return np.unique(np.concatenate(rows), axis=0)


def _entails_rows(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise entailment of two equally shaped stacks."""
    return ~np.any(a & ~b, axis=-1)


def _entails_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``M[i, j]`` iff ``a[i]`` entails ``b[j]``."""
    return (a.astype(np.int64) @ (~b).astype(np.int64).T) == 0


def _kernel_flat(a: np.ndarray) -> np.ndarray:
    return (a[:, None] == a[None, :]).reshape(-1)


# -- checking machinery --------------------------------------------------------


class _Tally:
    def __init__(self):
        self.checked = 0
        self.failure: dict | None = None

    def check(self, ok, describe: Callable[[int], dict]) -> None:
        ok = np.asarray(ok, dtype=bool).reshape(-1)
        self.checked += ok.size
        if self.failure is None and not ok.all():
            self.failure = describe(int(np.flatnonzero(~ok)[0]))

    def check_where(self, ok, mask, describe: Callable[[int], dict]) -> None:
        """Like :meth:`check` but only the entries selected by ``mask`` count."""
        ok = np.asarray(ok, dtype=bool).reshape(-1)
        mask = np.asarray(mask, dtype=bool).reshape(-1)
        self.checked += int(mask.sum())
        bad = mask & ~ok
        if self.failure is None and bad.any():
            self.failure = describe(int(np.flatnonzero(bad)[0]))


def _bitlist(x) -> list[int]:
    return np.asarray(x, dtype=bool).astype(int).tolist()


def _desc(detail: str, parts: Sequence[Part] = (), **inputs) -> Callable[[int], dict]:
    def describe(i: int) -> dict:
        out = {"detail": detail, "involved": [p.name for p in parts]}
        for key, val in inputs.items():
            if isinstance(val, np.ndarray) and val.ndim >= 2:
                idx = np.unravel_index(i, val.shape[:-1]) if val.ndim > 2 else i
                out[key] = _bitlist(val[idx])
            elif callable(val):
                out[key] = val(i)
            else:
                out[key] = val
        return out

    return describe


def _pair_inputs(phis: np.ndarray, psis: np.ndarray):
    n2 = len(psis)
    return {
        "phi": lambda i: _bitlist(phis[i // n2]),
        "psi": lambda i: _bitlist(psis[i % n2]),
    }


class _Ctx:
    def __init__(self, system: System, parts: Sequence[Part], cfg: LawSuiteConfig, ops: Operators, rng):
        self.system = system
        self.parts = list(parts)
        self.cfg = cfg
        self.ops = ops
        self.rng = rng
        self._spaces: dict[Part, np.ndarray] = {}
        self._universe: np.ndarray | None = None

    def space(self, p: Part) -> np.ndarray:
        if p not in self._spaces:
            self._spaces[p] = _space(p.block_count, self.cfg, self.rng)
        return self._spaces[p]

    def universe(self) -> np.ndarray:
        if self._universe is None:
            self._universe = _universe(self)
        return self._universe

    def A(self, bits, p, q):
        return np.asarray(self.ops.allows(bits, p, q), dtype=bool)

    def E(self, bits, p, q):
        return np.asarray(self.ops.ensures(bits, p, q), dtype=bool)


# -- laws ----------------------------------------------------------------------


def _law_order_soundness(ctx: _Ctx, t: _Tally, p: Part, q: Part) -> None:
    sub = is_subpart(p, q)
    kernel_incl = not np.any(p.kernel() & ~q.kernel())
    witness: dict[int, int] = {}
    consistent = True
    for a, b in zip(p.assignment.tolist(), q.assignment.tolist()):
        if witness.setdefault(a, b) != b:
            consistent = False
            break
    ok = sub == kernel_incl == consistent
    if ok and sub:
        m = connecting_map(p, q)
        ok = np.array_equal(m[p.assignment], q.assignment) and len(set(m.tolist())) == q.block_count
    t.check(ok, _desc("subpart test, kernel inclusion and connecting-map existence disagree", [p, q]))


def _universe(ctx: _Ctx) -> np.ndarray:
    n = ctx.system.size
    if _bell(n) <= ctx.cfg.exhaustive_threshold:
        rows = set_partitions(n)
    else:
        extra = [p.assignment for p in ctx.parts]
        for p, q in product(ctx.parts, repeat=2):
            extra += [meet(p, q).assignment, join(p, q).assignment]
        for _ in range(ctx.cfg.sample_count):
            labels = ctx.rng.integers(0, n, size=n)
            extra.append(part_from_assignment(ctx.system, "r", labels).assignment)
        rows = np.unique(np.asarray(extra, dtype=np.intp).reshape(len(extra), n), axis=0)
    return np.asarray([_kernel_flat(r) for r in rows], dtype=bool).reshape(len(rows), n * n)


def _below(kernels: np.ndarray, p: Part) -> np.ndarray:
    """For each candidate R: ``R <= P`` (P's kernel inside R's)."""
    return ~np.any(_kernel_flat(p.assignment)[None, :] & ~kernels, axis=1)


def _above(kernels: np.ndarray, p: Part) -> np.ndarray:
    """For each candidate R: ``R >= P``."""
    return ~np.any(kernels & ~_kernel_flat(p.assignment)[None, :], axis=1)


def _law_meet_universal(ctx: _Ctx, t: _Tally, p: Part, q: Part) -> None:
    ks = ctx.universe()
    m = meet(p, q)
    t.check(is_subpart(p, m) and is_subpart(q, m), _desc("meet is not below both arguments", [p, q, m]))
    lhs = _below(ks, p) & _below(ks, q)
    t.check(lhs == _below(ks, m), _desc("R <= P and R <= Q does not match R <= meet", [p, q, m]))


def _law_join_universal(ctx: _Ctx, t: _Tally, p: Part, q: Part) -> None:
    ks = ctx.universe()
    j = join(p, q)
    t.check(is_subpart(j, p) and is_subpart(j, q), _desc("join is not above both arguments", [p, q, j]))
    lhs = _above(ks, p) & _above(ks, q)
    t.check(lhs == _above(ks, j), _desc("R >= P and R >= Q does not match R >= join", [p, q, j]))
    # blocks of the join are exactly the compatible pairs
    c = compatibility_pairs(p, q)
    jp, jq = connecting_map(j, p), connecting_map(j, q)
    realized = set(zip(jp.tolist(), jq.tolist()))
    t.check(realized == c and len(realized) == j.block_count,
            _desc("join blocks are not the compatible pairs", [p, q, j]))


def compatibility_pairs(p: Part, q: Part) -> set[tuple[int, int]]:
    return {
        (a, b)
        for a in range(p.block_count)
        for b in range(q.block_count)
        if compatible(p, q, a, b)
    }


def _law_lattice(ctx: _Ctx, t: _Tally, p: Part, q: Part, r: Part) -> None:
    system = ctx.system
    T, B = top(system), bottom(system)
    t.check(B.block_count == (1 if system.size else 0), _desc("bottom has the wrong number of blocks", [B]))
    for x in (p, q, r):
        d = _desc("idempotence, units or extremal bounds fail", [x])
        t.check(meet(x, x) == x and join(x, x) == x, d)
        t.check(meet(x, T) == x and join(x, B) == x, d)
        t.check(meet(x, B) == B and join(x, T) == T, d)
        t.check(is_subpart(T, x) and is_subpart(x, B), d)
    d = _desc("commutativity or absorption fails", [p, q])
    t.check(meet(p, q) == meet(q, p) and join(p, q) == join(q, p), d)
    t.check(meet(p, join(p, q)) == p and join(p, meet(p, q)) == p, d)
    d = _desc("associativity fails", [p, q, r])
    t.check(meet(meet(p, q), r) == meet(p, meet(q, r)), d)
    t.check(join(join(p, q), r) == join(p, join(q, r)), d)


def _law_strong_disjoint(ctx: _Ctx, t: _Tally, p: Part, q: Part) -> None:
    t.check((not strongly_disjoint(p, q)) or disjoint(p, q),
            _desc("strongly disjoint parts with a nontrivial meet", [p, q]))


def _determination_table(p: Part, q: Part) -> np.ndarray:
    return np.array(
        [[determines(p, q, a, b) for b in range(q.block_count)] for a in range(p.block_count)],
        dtype=bool,
    ).reshape(p.block_count, q.block_count)


def _compat_table(p: Part, q: Part) -> np.ndarray:
    return np.array(
        [[compatible(p, q, a, b) for b in range(q.block_count)] for a in range(p.block_count)],
        dtype=bool,
    ).reshape(p.block_count, q.block_count)


def _law_determines_unique(ctx: _Ctx, t: _Tally, p: Part, q: Part) -> None:
    d = _determination_table(p, q)
    t.check(d.sum(axis=1) <= 1,
            _desc("a block determines two different blocks", [p, q], block=lambda i: i))


def _law_subpart_equivalences(ctx: _Ctx, t: _Tally, p: Part, q: Part) -> None:
    c = _compat_table(p, q)
    d = _determination_table(p, q)
    c1 = is_subpart(p, q)
    c2 = bool(np.all(c.sum(axis=1) == 1))
    c3 = determines_part(p, q)
    c4 = bool(np.all(~c | d))
    t.check(c1 == c2 == c3 == c4,
            _desc(f"conditions disagree: subpart={c1} unique-compatible={c2} "
                  f"determines={c3} compatible-implies-determines={c4}", [p, q]))


def _law_relational_quantifiers(ctx: _Ctx, t: _Tally, p: Part) -> None:
    T = top(ctx.system)
    phis = ctx.space(T)
    k = p.kernel().astype(np.int64)
    ex = pullback_bits(exists_bits(phis, T, p), T, p)
    fa = pullback_bits(forall_bits(phis, T, p), T, p)
    direct_ex = (phis.astype(np.int64) @ k.T) > 0
    direct_fa = ((~phis).astype(np.int64) @ k.T) == 0
    t.check(np.all(ex == direct_ex, axis=-1), _desc("pullback of exists differs from the relational form", [p], phi=phis))
    t.check(np.all(fa == direct_fa, axis=-1), _desc("pullback of forall differs from the relational form", [p], phi=phis))
    t.check(_entails_rows(phis, ex), _desc("phi does not entail its pulled-back existential", [p], phi=phis))
    t.check(_entails_rows(fa, phis), _desc("pulled-back universal does not entail phi", [p], phi=phis))


def _law_adjoint_triple(ctx: _Ctx, t: _Tally, p: Part, q: Part) -> None:
    if not is_subpart(p, q):
        return
    phis, psis = ctx.space(p), ctx.space(q)
    ex, fa = exists_bits(phis, p, q), forall_bits(phis, p, q)
    de = pullback_bits(psis, p, q)
    inputs = _pair_inputs(phis, psis)
    lhs = _entails_matrix(ex, psis)
    rhs = _entails_matrix(phis, de)
    t.check(lhs == rhs, _desc("exists is not left adjoint to pullback", [p, q], **inputs))
    lhs = _entails_matrix(de, phis)
    rhs = _entails_matrix(psis, fa)
    t.check(lhs == rhs, _desc("pullback is not left adjoint to forall", [p, q],
                              psi=lambda i: _bitlist(psis[i // len(phis)]),
                              phi=lambda i: _bitlist(phis[i % len(phis)])))
    if p == q:
        same = np.all(ex == phis, -1) & np.all(fa == phis, -1) & np.all(de == psis, -1)
        t.check(same, _desc("quantifiers along the identity are not the identity", [p], phi=phis))


def _law_monotone(ctx: _Ctx, t: _Tally, p: Part, q: Part) -> None:
    phis = ctx.space(p)
    ent = _entails_matrix(phis, phis)
    a, e = ctx.A(phis, p, q), ctx.E(phis, p, q)
    inputs = _pair_inputs(phis, phis)
    t.check_where(_entails_matrix(a, a), ent, _desc("allows is not monotone", [p, q], **inputs))
    t.check_where(_entails_matrix(e, e), ent, _desc("ensures is not monotone", [p, q], **inputs))


def _law_box_diamond(ctx: _Ctx, t: _Tally, p: Part, q: Part) -> None:
    phis = ctx.space(p)
    t.check(_entails_rows(ctx.E(phis, p, q), ctx.A(phis, p, q)),
            _desc("ensures does not entail allows", [p, q], phi=phis))


def _law_adjunction(ctx: _Ctx, t: _Tally, p: Part, q: Part) -> None:
    phis, psis = ctx.space(p), ctx.space(q)
    lhs = _entails_matrix(ctx.A(phis, p, q), psis)
    rhs = _entails_matrix(phis, ctx.E(psis, q, p))
    t.check(lhs == rhs, _desc("allows is not left adjoint to ensures", [p, q], **_pair_inputs(phis, psis)))


def _law_unit_counit(ctx: _Ctx, t: _Tally, p: Part, q: Part) -> None:
    phis, psis = ctx.space(p), ctx.space(q)
    unit = ctx.E(ctx.A(phis, p, q), q, p)
    t.check(_entails_rows(phis, unit), _desc("unit fails: phi does not entail ensures(allows(phi))", [p, q], phi=phis))
    counit = ctx.A(ctx.E(psis, q, p), p, q)
    t.check(_entails_rows(counit, psis), _desc("counit fails: allows(ensures(psi)) does not entail psi", [p, q], psi=psis))


def _law_distribution(ctx: _Ctx, t: _Tally, p: Part, q: Part) -> None:
    phis = ctx.space(p)
    a, e = ctx.A(phis, p, q), ctx.E(phis, p, q)
    n = len(phis)
    ors = phis[:, None, :] | phis[None, :, :]
    ands = phis[:, None, :] & phis[None, :, :]
    a_or = ctx.A(ors.reshape(n * n, -1), p, q).reshape(n, n, -1)
    e_and = ctx.E(ands.reshape(n * n, -1), p, q).reshape(n, n, -1)
    inputs = _pair_inputs(phis, phis)
    t.check(np.all(a_or == (a[:, None] | a[None, :]), -1),
            _desc("allows does not preserve binary joins", [p, q], **inputs))
    t.check(np.all(e_and == (e[:, None] & e[None, :]), -1),
            _desc("ensures does not preserve binary meets", [p, q], **inputs))
    empty = np.zeros((1, p.block_count), bool)
    full = np.ones((1, p.block_count), bool)
    t.check(~np.any(ctx.A(empty, p, q)) and np.all(ctx.E(full, p, q)),
            _desc("allows(false) or ensures(true) is not a unit", [p, q]))
    t.check(np.array_equal(ctx.A(phis.any(0, keepdims=True), p, q)[0], a.any(0))
            and np.array_equal(ctx.E(phis.all(0, keepdims=True), p, q)[0], e.all(0)),
            _desc("failure to preserve the join/meet of the whole family", [p, q]))


def _law_demorgan(ctx: _Ctx, t: _Tally, p: Part, q: Part) -> None:
    phis = ctx.space(p)
    t.check(np.all(~ctx.A(~phis, p, q) == ctx.E(phis, p, q), -1),
            _desc("not-allows-not differs from ensures", [p, q], phi=phis))


def _law_composition(ctx: _Ctx, t: _Tally, p: Part, q: Part, r: Part) -> None:
    phis = ctx.space(p)
    direct_a = ctx.A(phis, p, r)
    via_a = ctx.A(ctx.A(phis, p, q), q, r)
    t.check(_entails_rows(direct_a, via_a),
            _desc("allows P->R does not entail allows Q->R after allows P->Q", [p, q, r], phi=phis))
    via_e = ctx.E(ctx.E(phis, p, q), q, r)
    t.check(_entails_rows(via_e, ctx.E(phis, p, r)),
            _desc("ensures Q->R after ensures P->Q does not entail ensures P->R", [p, q, r], phi=phis))


def _law_meet_join(ctx: _Ctx, t: _Tally, p: Part, q: Part, r: Part) -> None:
    m, j = meet(q, r), join(q, r)
    phis = ctx.space(p)
    jq, jr = connecting_map(j, q), connecting_map(j, r)
    d = lambda msg: _desc(msg, [p, q, r], phi=phis)  # noqa: E731
    realized = set(zip(jq.tolist(), jr.tolist()))
    t.check(realized == compatibility_pairs(q, r) and len(realized) == j.block_count,
            _desc("join blocks are not the compatible pairs", [q, r]))
    a_j, e_j = ctx.A(phis, p, j), ctx.E(phis, p, j)
    t.check(np.all(ctx.A(phis, p, m) == exists_bits(a_j, j, m), -1),
            d("allows onto the meet is not the compatible-pair existential of allows onto the join"))
    both = pullback_bits(ctx.A(phis, p, q), j, q) & pullback_bits(ctx.A(phis, p, r), j, r)
    t.check(_entails_rows(a_j, both), d("allows onto the join does not entail both components"))
    t.check(np.all(ctx.E(phis, p, m) == forall_bits(e_j, j, m), -1),
            d("ensures onto the meet is not the compatible-pair universal of ensures onto the join"))
    either = pullback_bits(ctx.E(phis, p, q), j, q) | pullback_bits(ctx.E(phis, p, r), j, r)
    t.check(_entails_rows(either, e_j), d("either component's ensures does not entail ensures onto the join"))


def _law_part_specialization(ctx: _Ctx, t: _Tally, p: Part, q: Part) -> None:
    phis, psis = ctx.space(p), ctx.space(q)
    sub = is_subpart(p, q)
    a_back, e_back = ctx.A(psis, q, p), ctx.E(psis, q, p)
    if sub:
        t.check(np.all(ctx.A(phis, p, q) == exists_bits(phis, p, q), -1),
                _desc("allows onto a subpart is not exists", [p, q], phi=phis))
        t.check(np.all(ctx.E(phis, p, q) == forall_bits(phis, p, q), -1),
                _desc("ensures onto a subpart is not forall", [p, q], phi=phis))
        de = pullback_bits(psis, p, q)
        t.check(np.all(a_back == de, -1) & np.all(e_back == de, -1),
                _desc("allows/ensures from a subpart is not pullback", [p, q], psi=psis))
    # converse: allows Q->P entailing ensures Q->P on every constraint forces P >= Q
    always = bool(np.all(_entails_rows(a_back, e_back)))
    t.check(always == sub, _desc(f"allows-entails-ensures is {always} but subpart is {sub}", [p, q]))
    if p == q:
        t.check(np.all(ctx.A(phis, p, p) == phis, -1) & np.all(ctx.E(phis, p, p) == phis, -1),
                _desc("allows/ensures of a part onto itself is not the identity", [p], phi=phis))


def _law_functoriality(ctx: _Ctx, t: _Tally, x: Part, y: Part, z: Part) -> None:
    xy, yz = is_subpart(x, y), is_subpart(y, z)
    if xy and yz:
        phis, psis = ctx.space(x), ctx.space(z)
        d = _desc("quantifier chain does not compose", [x, y, z], phi=phis)
        t.check(np.all(exists_bits(exists_bits(phis, x, y), y, z) == exists_bits(phis, x, z), -1), d)
        t.check(np.all(forall_bits(forall_bits(phis, x, y), y, z) == forall_bits(phis, x, z), -1), d)
        t.check(np.all(pullback_bits(pullback_bits(psis, y, z), x, y) == pullback_bits(psis, x, z), -1),
                _desc("pullback chain does not compose", [x, y, z], psi=psis))
    psis = ctx.space(z)
    if is_subpart(y, x):
        # x is a part of y: passing z -> y -> x equals z -> x
        d = _desc("modalities into a part and then its subpart do not compose", [x, y, z], psi=psis)
        t.check(np.all(ctx.A(ctx.A(psis, z, y), y, x) == ctx.A(psis, z, x), -1), d)
        t.check(np.all(ctx.E(ctx.E(psis, z, y), y, x) == ctx.E(psis, z, x), -1), d)
    if yz:
        # z is a part of y: a constraint on z pulled back to y passes to x as it would from z
        pulled = pullback_bits(psis, y, z)
        d = _desc("modalities do not absorb pullback along a subpart", [x, y, z], psi=psis)
        t.check(np.all(ctx.A(pulled, y, x) == ctx.A(psis, z, x), -1), d)
        t.check(np.all(ctx.E(pulled, y, x) == ctx.E(psis, z, x), -1), d)


def _law_modality_identity(ctx: _Ctx, t: _Tally, p: Part, q: Part) -> None:
    phis = ctx.space(p)
    dia = ctx.A(ctx.A(phis, p, q), q, p)
    box = ctx.E(ctx.E(phis, p, q), q, p)
    below = is_subpart(q, p)
    t.check(bool(np.all(dia == phis)) == below,
            _desc(f"diamond composite identity={bool(np.all(dia == phis))} but P<=Q is {below}", [p, q]))
    t.check(bool(np.all(box == phis)) == below,
            _desc(f"box composite identity={bool(np.all(box == phis))} but P<=Q is {below}", [p, q]))
    lhs = _entails_matrix(dia, phis)
    rhs = _entails_matrix(phis, box)
    t.check(lhs == rhs, _desc("diamond composite is not left adjoint to box composite", [p, q],
                              **_pair_inputs(phis, phis)))


def _law_kripke(ctx: _Ctx, t: _Tally, a: Part) -> None:
    W = top(ctx.system)
    phis = ctx.space(W)
    rel = a.kernel().astype(np.int64)
    dia = ctx.A(ctx.A(phis, W, a), a, W)
    box = ctx.E(ctx.E(phis, W, a), a, W)
    t.check(np.all(dia == ((phis.astype(np.int64) @ rel.T) > 0), -1),
            _desc("quotient diamond differs from relational diamond", [a], phi=phis))
    t.check(np.all(box == (((~phis).astype(np.int64) @ rel.T) == 0), -1),
            _desc("quotient box differs from relational box", [a], phi=phis))
    if a == W:
        t.check(np.all(dia == phis, -1) & np.all(box == phis, -1),
                _desc("discrete frame modalities are not the identity", [a], phi=phis))
    if a.block_count == 1:
        some = phis.any(-1, keepdims=True)
        every = phis.all(-1, keepdims=True)
        t.check(np.all(dia == some, -1) & np.all(box == every, -1),
                _desc("codiscrete frame modalities are not possibility/necessity", [a], phi=phis))


_LAWS: dict[str, tuple[Callable[[_Ctx, _Tally], None], str]] = {
    "order-soundness": (_law_order_soundness, "P >= Q iff a connecting map exists iff the P-kernel lies in the Q-kernel"),
    "meet-universal": (_law_meet_universal, "meet is the greatest lower bound (equivalence closure of both kernels)"),
    "join-universal": (_law_join_universal, "join is the least upper bound; its blocks are the compatible pairs"),
    "lattice-laws": (_law_lattice, "meet/join are commutative, associative, idempotent, absorptive, with top/bottom units"),
    "strong-disjoint-implies-disjoint": (_law_strong_disjoint, "all blocks pairwise compatible implies a trivial meet"),
    "determines-unique": (_law_determines_unique, "a block determines at most one block"),
    "prop-2-10": (_law_subpart_equivalences, "subpart, unique compatibility, determination, compatible-implies-determines coincide"),
    "lemma-3-2": (_law_relational_quantifiers, "pulled-back quantifiers are the relational ones; unit and counit"),
    "adjoint-triple": (_law_adjoint_triple, "exists -| pullback -| forall along a subpart, identity along identity"),
    "monotone": (_law_monotone, "allows and ensures are monotone"),
    "box-entails-diamond": (_law_box_diamond, "ensures entails allows"),
    "adjunction": (_law_adjunction, "allows P->Q is left adjoint to ensures Q->P"),
    "unit-counit": (_law_unit_counit, "unit and counit of the allows/ensures adjunction"),
    "distribution": (_law_distribution, "allows preserves joins, ensures preserves meets"),
    "demorgan": (_law_demorgan, "not . allows . not = ensures"),
    "composition": (_law_composition, "allows and ensures compose like a triangle inequality"),
    "meet-join-interaction": (_law_meet_join, "modalities onto meets and joins of parts"),
    "part-specialization": (_law_part_specialization, "between part and subpart the modalities are quantifiers and pullback, and conversely"),
    "functoriality": (_law_functoriality, "quantifier chains compose; modalities compose along subparts"),
    "modality-identity-iff-subpart": (_law_modality_identity, "round-trip modalities are adjoint, and identity iff P <= Q"),
    "kripke-equivalence": (_law_kripke, "quotient composites recover relational possibility and necessity"),
}

LAW_IDS: tuple[str, ...] = tuple(_LAWS)
STATEMENTS: dict[str, str] = {k: v[1] for k, v in _LAWS.items()}


def _rng_for(seed: int, instance: str, law_id: str) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32(instance.encode()), zlib.crc32(law_id.encode())])


def _system_doc(system: System) -> dict:
    return {
        "format_version": 1,
        "name": system.name,
        "schema": list(system.schema),
        "behaviors": [list(r) for r in system.rows],
    }


def _oracle_agreement(ctx: _Ctx, t: _Tally, p: Part, q: Part) -> None:
    phis = ctx.space(p)
    ok_a = np.all(ctx.A(phis, p, q) == oracle_allows_bits(phis, p, q), -1)
    ok_e = np.all(ctx.E(phis, p, q) == oracle_ensures_bits(phis, p, q), -1)
    t.check(ok_a & ok_e, _desc("behavior scan and compatibility table disagree", [p, q], phi=phis))


EXTRA_CHECKS: dict[str, tuple[Callable, str]] = {
    "oracle-agreement": (_oracle_agreement, "behavior-scan and block-table modalities agree"),
}
SUITE_CHECKS: tuple[str, ...] = LAW_IDS + tuple(EXTRA_CHECKS)


def _lookup(law_id: str):
    if law_id in _LAWS:
        return _LAWS[law_id]
    if law_id in EXTRA_CHECKS:
        return EXTRA_CHECKS[law_id]
    raise MereologyError(f"unknown law {law_id!r}; known: {', '.join(SUITE_CHECKS)}")


def arity(law_id: str) -> int:
    """Number of part arguments the law takes."""
    return _lookup(law_id)[0].__code__.co_argcount - 2


def _run(law_id: str, system: System, pool: list[Part], tuples, cfg: LawSuiteConfig, ops: Operators, instance: str) -> LawResult:
    fn, statement = _lookup(law_id)
    ctx = _Ctx(system, pool, cfg, ops, _rng_for(cfg.seed, instance, law_id))
    tally = _Tally()
    for args in tuples:
        fn(ctx, tally, *args)
        if tally.failure is not None:
            cx = {
                "law_id": law_id,
                "system": _system_doc(system),
                "parts": [{"name": p.name, "assignment": p.assignment.tolist()} for p in args],
                **tally.failure,
            }
            return LawResult(law_id, statement, instance, tally.checked, False, cx)
    return LawResult(law_id, statement, instance, tally.checked, True, None)


def check_law(
    law_id: str,
    system: System | Model,
    parts: Iterable[Part] = (),
    *,
    config: LawSuiteConfig | None = None,
    ops: Operators | None = None,
    instance: str = "adhoc",
) -> LawResult:
    """Check one law on ``system``.

    When exactly as many parts are given as the law takes, the law is checked
    on that argument tuple. Otherwise it is checked on every tuple drawn (with
    repetition) from the parts; with no parts, from top and bottom.
    """
    n = arity(law_id)
    if isinstance(system, Model):
        parts = list(parts) or list(system.parts.values())
        system = system.system
    parts = list(parts)
    for p in parts:
        if p.system != system:
            raise MereologyError(f"part {p.name!r} does not belong to {system.name!r}")
    if not parts:
        parts = [top(system), bottom(system)]
    tuples = [tuple(parts)] if len(parts) == n else list(product(parts, repeat=n))
    return _run(law_id, system, parts, tuples, config or LawSuiteConfig(), ops or Operators(), instance)


def replay(counterexample: dict, *, config: LawSuiteConfig | None = None, ops: Operators | None = None) -> LawResult:
    """Rebuild the system and parts of a counterexample and re-check its law."""
    doc = counterexample["system"]
    system = System(doc["name"], doc["schema"], doc["behaviors"])
    parts = [part_from_assignment(system, p["name"], p["assignment"]) for p in counterexample["parts"]]
    return check_law(counterexample["law_id"], system, parts, config=config, ops=ops, instance="replay")


def random_partition_system(rng: np.random.Generator, size: int, num_parts: int, name: str) -> Model:
    """A system of ``size`` bare behaviors with parts drawn uniformly from all set partitions."""
    system = System(name, ("id",), [(i,) for i in range(size)])
    rows = set_partitions(size)
    picks = rng.integers(0, len(rows), size=num_parts)
    return Model(system, {f"P{j}": part_from_assignment(system, f"P{j}", rows[k]) for j, k in enumerate(picks)})


def _instances(cfg: LawSuiteConfig, systems: Iterable[Model] | None):
    from .fixtures import FIXTURE_NAMES, LAW_PARTS, load_fixture

    out: list[tuple[str, System, list[Part]]] = []
    rng = np.random.default_rng(cfg.seed)
    width = len(str(max(cfg.num_systems - 1, 0)))
    for i in range(cfg.num_systems):
        size = int(rng.integers(0, cfg.max_system_size + 1))
        count = int(rng.integers(1, cfg.max_parts + 1)) if cfg.max_parts > 0 else 0
        m = random_partition_system(rng, size, count, f"random-{i:0{width}d}")
        out.append((m.system.name, m.system, list(m.parts.values())))
    if cfg.include_bundled:
        for name in FIXTURE_NAMES:
            m = load_fixture(name)
            out.append((f"bundled:{name}", m.system, [m[p] for p in LAW_PARTS[name]]))
    for j, m in enumerate(systems or ()):
        out.append((f"explicit-{j}:{m.system.name}", m.system, list(m.parts.values())))
    return out


def _pool(system: System, parts: Sequence[Part]) -> list[Part]:
    seen: dict[Part, Part] = {}
    for p in [*parts, top(system, "top"), bottom(system, "bottom")]:
        seen.setdefault(p, p)
    return list(seen.values())


def run_suite(
    config: LawSuiteConfig | None = None,
    systems: Iterable[Model] | None = None,
    *,
    ops: Operators | None = None,
    laws: Sequence[str] | None = None,
) -> LawReport:
    """Run every law on every random, bundled and explicitly given system.

    Each system's parts are extended with top and bottom, and every law is
    checked on all argument tuples drawn from that pool.
    """
    cfg = config or LawSuiteConfig()
    ops = ops or Operators()
    law_ids = list(laws or SUITE_CHECKS)
    for law_id in law_ids:
        _lookup(law_id)
    results = []
    for instance, system, parts in _instances(cfg, systems):
        pool = _pool(system, parts)
        for law_id in law_ids:
            tuples = product(pool, repeat=arity(law_id))
            results.append(_run(law_id, system, pool, tuples, cfg, ops, instance))
    results.sort(key=lambda r: (r.law_id, r.instance))
    return LawReport(cfg, results)
