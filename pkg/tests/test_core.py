import itertools

import numpy as np
import pytest
from hypothesis import given

from conftest import bare_system, systems_with_parts
from mereo.core import (
    MereologyError,
    NotASubpartError,
    SchemaError,
    SystemMismatchError,
    UnionFind,
    bottom,
    canonicalize,
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
from mereo.laws import set_partitions
from mereo.systems import gen_bicycle


# -- brute-force oracles on sets of behavior pairs --------------------------------


def pairs(assignment):
    n = len(assignment)
    return {(s, t) for s in range(n) for t in range(n) if assignment[s] == assignment[t]}


def closure(rel, n):
    """Smallest equivalence relation containing ``rel`` (Warshall)."""
    m = np.zeros((n, n), dtype=bool)
    for s, t in rel:
        m[s, t] = m[t, s] = True
    np.fill_diagonal(m, True)
    for k in range(n):
        m |= m[:, [k]] & m[[k], :]
    return {(s, t) for s in range(n) for t in range(n) if m[s, t]}


# -- construction ------------------------------------------------------------------


def test_make_system():
    s = make_system("S3", [{"name": "s0"}, {"name": "s1"}, {"name": "s2"}])
    assert s.size == 3
    assert s.label(1) == {"name": "s1"}
    assert make_system("empty", []).size == 0


def test_make_system_schema_mismatch():
    with pytest.raises(SchemaError):
        make_system("bad", [{"a": 1}, {"b": 2}])


def test_bicycle_counts():
    m = gen_bicycle(2, range(4), range(7))
    expected = sum(1 for p in range(4) for w in range(7) if w >= 2 * p)
    assert m.system.size == expected == 16
    assert m["Pedal"].block_count == 4
    assert m["Wheel"].block_count == 7


def test_part_from_assignment(S3):
    p = part_from_assignment(S3.system, "P", [0, 0, 1])
    assert p.block_count == 2
    assert p.blocks() == [[0, 1], [2]]
    assert part_from_assignment(S3.system, "X", [5, 9, 9]).assignment.tolist() == [0, 1, 1]
    with pytest.raises(SchemaError):
        part_from_assignment(S3.system, "bad", [0, 0])


def test_assignment_is_read_only(S3):
    with pytest.raises(ValueError):
        S3["P"].assignment[0] = 3


def test_part_equality_ignores_name(S3):
    a = part_from_assignment(S3.system, "a", [1, 1, 0])
    assert a == S3["P"]
    assert hash(a) == hash(S3["P"])


@given(systems_with_parts(num_parts=1))
def test_canonical_form(sp):
    system, (p,) = sp
    a = p.assignment.tolist()
    assert canonicalize(a).tolist() == a
    seen = []
    for x in a:
        if x not in seen:
            seen.append(x)
    assert seen == list(range(p.block_count))


def test_part_from_observation(bicycle):
    system = bicycle.system
    pedal = part_from_observation(system, "Pedal", lambda b: b.label["p"])
    wheel = part_from_observation(system, "Wheel", lambda b: b.label["w"])
    assert pedal.block_count == 4 and wheel.block_count == 7
    assert pedal == bicycle["Pedal"] and wheel == bicycle["Wheel"]
    assert part_from_observation(system, "c", lambda b: 0) == bottom(system)


def test_part_from_observation_partial(S3):
    with pytest.raises(MereologyError):
        part_from_observation(S3.system, "f", {0: "a", 1: "b"})


def test_restrict(S3):
    assert restrict(S3["P"], 1) == 0
    assert [restrict(top(S3.system), s) for s in range(3)] == [0, 1, 2]
    assert [restrict(bottom(S3.system), s) for s in range(3)] == [0, 0, 0]
    with pytest.raises(MereologyError):
        restrict(S3["P"], 3)


def test_top_bottom(S3, E):
    assert top(S3.system).assignment.tolist() == [0, 1, 2]
    assert bottom(S3.system).assignment.tolist() == [0, 0, 0]
    b = bottom(E.system)
    assert b.block_count == 0 and b.assignment.size == 0


# -- order -------------------------------------------------------------------------


def test_subpart_examples(S3, thermal):
    assert is_subpart(top(S3.system), S3["Q"])
    assert not is_subpart(S3["P"], S3["Q"])
    assert is_subpart(thermal["Water_0"], thermal["Water_1"])


def test_connecting_map(S3, thermal):
    q = S3["Q"]
    assert connecting_map(top(S3.system), q).tolist() == q.assignment.tolist()
    assert connecting_map(S3["P"], S3["P"]).tolist() == [0, 1]
    with pytest.raises(NotASubpartError):
        connecting_map(S3["P"], S3["Q"])
    w0, w1 = thermal["Water_0"], thermal["Water_1"]
    m = connecting_map(w0, w1)
    system = thermal.system
    for a, s in enumerate(w0.representatives()):
        t0 = system.label(int(s))["T_0"]
        t1 = system.label(int(w1.representatives()[m[a]]))["T_1"]
        assert t1 == t0 + 0.5 * (20 - t0)


def test_different_systems_rejected(S3, bicycle):
    with pytest.raises(SystemMismatchError):
        meet(S3["P"], bicycle["Pedal"])
    with pytest.raises(SystemMismatchError):
        is_subpart(S3["P"], bicycle["Pedal"])


def test_order_soundness_exhaustive():
    # every pair of partitions of every set with at most 5 elements
    for n in range(6):
        system = bare_system(n)
        rows = set_partitions(n)
        parts = [part_from_assignment(system, str(i), r) for i, r in enumerate(rows)]
        kernels = [pairs(r.tolist()) for r in rows]
        for (p, kp), (q, kq) in itertools.product(zip(parts, kernels), repeat=2):
            sub = kp <= kq
            assert is_subpart(p, q) == sub
            if sub:
                m = connecting_map(p, q)
                assert np.array_equal(m[p.assignment], q.assignment)


def test_poset_on_canonical_partitions():
    system = bare_system(4)
    parts = [part_from_assignment(system, "x", r) for r in set_partitions(4)]
    for p, q in itertools.product(parts, repeat=2):
        if is_subpart(p, q) and is_subpart(q, p):
            assert p == q


# -- lattice -----------------------------------------------------------------------


def test_lattice_examples(S3, bicycle):
    P, Q = S3["P"], S3["Q"]
    assert meet(P, Q) == bottom(S3.system)
    assert meet(P, top(S3.system)) == P
    assert join(P, Q) == top(S3.system)
    assert join(P, bottom(S3.system)) == P
    assert meet(bicycle["Pedal"], bicycle["Wheel"]) == bottom(bicycle.system)
    j = join(bicycle["Pedal"], bicycle["Wheel"])
    assert j == top(bicycle.system) and j.block_count == 16


def test_meet_join_against_relation_oracle():
    for n in range(6):
        system = bare_system(n)
        rows = set_partitions(n)
        parts = [part_from_assignment(system, "x", r) for r in rows]
        kernels = [pairs(r.tolist()) for r in rows]
        for i, j in itertools.product(range(len(rows)), repeat=2):
            m, jn = meet(parts[i], parts[j]), join(parts[i], parts[j])
            assert pairs(m.assignment.tolist()) == closure(kernels[i] | kernels[j], n)
            assert pairs(jn.assignment.tolist()) == kernels[i] & kernels[j]


def test_universal_properties_exhaustive():
    for n in range(6):
        system = bare_system(n)
        parts = [part_from_assignment(system, "x", r) for r in set_partitions(n)]
        for p, q in itertools.product(parts, repeat=2):
            m, j = meet(p, q), join(p, q)
            for r in parts:
                assert (is_subpart(p, r) and is_subpart(q, r)) == is_subpart(m, r)
                assert (is_subpart(r, p) and is_subpart(r, q)) == is_subpart(r, j)


def test_lattice_laws_exhaustive():
    # meet/join tabulated on partition indices, then every law checked on the tables
    for n in range(6):
        system = bare_system(n)
        rows = set_partitions(n)
        index = {tuple(r): i for i, r in enumerate(rows.tolist())}
        parts = [part_from_assignment(system, "x", r) for r in rows]
        k = len(parts)
        M = np.empty((k, k), dtype=int)
        J = np.empty((k, k), dtype=int)
        for i, j in itertools.product(range(k), repeat=2):
            M[i, j] = index[tuple(meet(parts[i], parts[j]).assignment.tolist())]
            J[i, j] = index[tuple(join(parts[i], parts[j]).assignment.tolist())]
        ids = np.arange(k)
        t = index[tuple(top(system).assignment.tolist())]
        b = index[tuple(bottom(system).assignment.tolist())]
        assert (M == M.T).all() and (J == J.T).all()
        assert (M[ids, ids] == ids).all() and (J[ids, ids] == ids).all()
        assert (M[:, t] == ids).all() and (J[:, b] == ids).all()
        assert (M[:, b] == b).all() and (J[:, t] == t).all()
        assert (M[ids[:, None], J] == ids[:, None]).all()
        assert (J[ids[:, None], M] == ids[:, None]).all()
        assert (M[M[:, :, None], ids[None, None, :]] == M[ids[:, None, None], M[None, :, :]]).all()
        assert (J[J[:, :, None], ids[None, None, :]] == J[ids[:, None, None], J[None, :, :]]).all()


def test_union_find():
    uf = UnionFind(5)
    uf.union(0, 3)
    uf.union(3, 4)
    assert uf.find(4) == uf.find(0)
    assert canonicalize(uf.labels()).tolist() == [0, 1, 2, 0, 0]


# -- compatibility and determination -------------------------------------------------


def test_compatible_examples(S3, bicycle):
    assert compatible(bicycle["Pedal"], bicycle["Wheel"], 1, 3)
    T = top(S3.system)
    for s, t in itertools.product(range(3), repeat=2):
        assert compatible(T, T, s, t) == (s == t)
    assert not compatible(S3["P"], S3["Q"], 1, 0)
    with pytest.raises(MereologyError):
        compatible(S3["P"], S3["Q"], 2, 0)


def test_bicycle_compatibility_is_w_ge_rp(bicycle):
    pedal, wheel = bicycle["Pedal"], bicycle["Wheel"]
    system = bicycle.system
    for a, s in enumerate(pedal.representatives()):
        p = system.label(int(s))["p"]
        for b, t in enumerate(wheel.representatives()):
            w = system.label(int(t))["w"]
            assert compatible(pedal, wheel, a, b) == (w >= 2 * p)


def test_compatible_family(bicycle):
    pedal, wheel = bicycle["Pedal"], bicycle["Wheel"]
    assert compatible_family([pedal], [2])
    assert compatible_family([pedal, wheel], [3, 6])
    assert not compatible_family([pedal, wheel], [3, 5])
    with pytest.raises(MereologyError):
        compatible_family([pedal, wheel], [0])


def test_pairwise_compatible_not_family_compatible():
    # search small 3-part systems for three pairwise compatible blocks with no common behavior
    rng = np.random.default_rng(0)
    witness = None
    for _ in range(2000):
        n = int(rng.integers(3, 6))
        system = bare_system(n)
        ps = [part_from_assignment(system, "x", rng.integers(0, n, n)) for _ in range(3)]
        for blocks in itertools.product(*[range(p.block_count) for p in ps]):
            pairwise = all(
                compatible(ps[i], ps[j], blocks[i], blocks[j]) for i, j in [(0, 1), (0, 2), (1, 2)]
            )
            common = any(all(p.assignment[s] == b for p, b in zip(ps, blocks)) for s in range(n))
            assert compatible_family(ps, list(blocks)) == common
            if pairwise and not common:
                witness = (ps, blocks)
        if witness:
            break
    assert witness is not None


def test_determines_examples(S3):
    P, Q = S3["P"], S3["Q"]
    assert determines(P, Q, 1, 1)
    assert not determines(P, Q, 0, 0)
    B = bottom(S3.system)
    for b in range(Q.block_count):
        assert not determines(B, Q, 0, b)
    assert determines(B, B, 0, 0)


def test_determines_part_examples(thermal, bicycle, S3):
    assert determines_part(thermal["Water_0"], thermal["Water_1"])
    assert not determines_part(bicycle["Pedal"], bicycle["Wheel"])
    assert not determines_part(bicycle["Wheel"], bicycle["Pedal"])
    assert determines_part(S3["P"], bottom(S3.system))


def test_disjointness_examples(S3, lv, bicycle):
    assert strongly_disjoint(S3["P"], bottom(S3.system))
    assert strongly_disjoint(lv["Fox_0"], lv["Rabbit_0"])
    assert disjoint(lv["Fox_0"], lv["Rabbit_0"])
    assert not strongly_disjoint(bicycle["Pedal"], bicycle["Wheel"])
    assert not compatible(bicycle["Pedal"], bicycle["Wheel"], 3, 0)
    assert disjoint(bicycle["Pedal"], bicycle["Wheel"])


@given(systems_with_parts(num_parts=2))
def test_determination_unique_and_subpart_equivalences(sp):
    _, (p, q) = sp
    n = p.system.size
    c = {(int(p.assignment[s]), int(q.assignment[s])) for s in range(n)}
    det = {
        (a, b)
        for a in range(p.block_count)
        for b in range(q.block_count)
        if all(q.assignment[s] == b for s in range(n) if p.assignment[s] == a)
    }
    for a in range(p.block_count):
        assert sum(determines(p, q, a, b) for b in range(q.block_count)) <= 1
        for b in range(q.block_count):
            assert compatible(p, q, a, b) == ((a, b) in c)
            assert determines(p, q, a, b) == ((a, b) in det)
    c2 = all(sum((a, b) in c for b in range(q.block_count)) == 1 for a in range(p.block_count))
    c4 = c <= det
    assert is_subpart(p, q) == c2 == determines_part(p, q) == c4


@given(systems_with_parts(num_parts=2))
def test_strong_disjoint_implies_disjoint(sp):
    _, (p, q) = sp
    if strongly_disjoint(p, q):
        assert disjoint(p, q)


def test_empty_system_is_total(E):
    system = E.system
    T, B = top(system), bottom(system)
    assert T == B
    assert is_subpart(T, B) and is_subpart(B, T)
    assert meet(T, B) == B and join(T, B) == T
    assert strongly_disjoint(T, B) and disjoint(T, B)
    assert determines_part(T, B)
    assert connecting_map(T, B).size == 0
