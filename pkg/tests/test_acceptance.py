"""Acceptance criteria, one test each.

Every test records a ``PASS``/``FAIL`` line with its runtime and budget;
the lines are printed in the terminal summary (see ``conftest.py``), or
directly when this file is run as a script.
"""

import itertools
import time

import numpy as np

from fuzzing import fuzz_inputs
from conftest import bare_system
from mereo.core import bottom, determines_part, is_subpart, part_from_assignment, top
from mereo.dsl import DslError, parse_constraint, parse_system, serialize_system
from mereo.fixtures import FIXTURE_NAMES, fixture_text
from mereo.laws import LawSuiteConfig, oracle_allows_bits, oracle_ensures_bits, random_partition_system, run_suite
from mereo.logic import Constraint, allows, allows_bits, eq_constraint, ensures_bits, kripke_box, kripke_diamond
from mereo.systems import LOTKA_VOLTERRA_DESK, THERMAL_DESK, build, deadline_scenario, time_fields

LINES = []


def accept(name, budget):
    """Run the decorated body, time it, record one line, then assert."""

    def wrap(body):
        def test():
            start = time.perf_counter()
            detail = ""
            ok = False
            try:
                detail = body() or ""
                ok = True
            finally:
                elapsed = time.perf_counter() - start
                ok = ok and elapsed < budget
                LINES.append(f"{'PASS' if ok else 'FAIL'} {name}: {elapsed:.2f}s (< {budget:g}s) {detail}".rstrip())
            assert elapsed < budget, f"{name} took {elapsed:.2f}s, budget {budget}s"

        test.__name__ = body.__name__
        test.__doc__ = body.__doc__
        return test

    return wrap


def _values(model, part, field):
    return [model.system.label(int(s))[field] for s in part.representatives()]


@accept("bicycle allows", 1)
def test_bicycle_allows():
    from mereo.systems import gen_bicycle

    m = gen_bicycle(2, range(4), range(7))
    got = allows(parse_constraint("w <= 2", m["Wheel"]), m["Pedal"])
    ps = [p for p, b in zip(_values(m, m["Pedal"], "p"), got.bits) if b]
    assert ps == [0, 1]
    return f"Pedal blocks p in {ps}"


@accept("law suite", 60)
def test_law_suite():
    cfg = LawSuiteConfig()
    assert cfg.num_systems >= 300 and cfg.max_system_size <= 6 and cfg.max_parts <= 3
    report = run_suite(cfg)
    summary = report.summary()
    assert report.passed, report.to_text()
    assert len({r.law_id for r in report.results} - {"oracle-agreement"}) == 21
    checks = sum(v["checked"] for v in summary.values())
    return f"{len(summary)} checks over {len(report.results)} instances, {checks} assertions, 0 counterexamples"


@accept("oracle equivalence", 10)
def test_oracle_equivalence():
    rng = np.random.default_rng(2024)
    mismatches = 0
    for i in range(1000):
        m = random_partition_system(rng, int(rng.integers(0, 9)), 2, f"o{i}")
        p, q = m["P0"], m["P1"]
        bits = rng.random((1, p.block_count)) < 0.5
        mismatches += int((allows_bits(bits, p, q) != oracle_allows_bits(bits, p, q)).sum())
        mismatches += int((ensures_bits(bits, p, q) != oracle_ensures_bits(bits, p, q)).sum())
    assert mismatches == 0
    return "1000 triples, 0 mismatches"


@accept("determinism as parthood", 1)
def test_determinism_as_parthood():
    for cfg, state in ((THERMAL_DESK, "Water"), (LOTKA_VOLTERRA_DESK, "State")):
        m = build(cfg)
        s0 = m[f"{state}_0"]
        for t in time_fields(m.system):
            st = m[f"{state}_{t}"]
            assert is_subpart(s0, st)
            assert determines_part(s0, st)
    return "thermal and Lotka-Volterra, every t"


@accept("thermal contraction", 1)
def test_thermal_contraction():
    m = build(THERMAL_DESK)
    R = THERMAL_DESK.params["R"]
    w0 = m["Water_0"]
    t0 = _values(m, w0, "T_0")
    checked = 0
    for t in time_fields(m.system):
        wt = m[f"Water_{t}"]
        tt = _values(m, wt, f"T_{t}")
        for a in range(w0.block_count):
            allowed = allows(eq_constraint(w0, a), wt)
            for b in range(wt.block_count):
                if abs(R - tt[b]) > abs(R - t0[a]):
                    assert not allowed[b]
                    checked += 1
    return f"{checked} far-from-R blocks excluded"


@accept("deadline decomposition", 5)
def test_deadline_decomposition():
    r = deadline_scenario(d=4, k1=1, k2=60)
    conj = r["per_t"][0]
    for c in r["per_t"][1:]:
        conj = conj & c
    assert r["whole"].bits.tolist() == conj.bits.tolist()
    return f"Fox_0 bits {[int(b) for b in conj.bits]} at t in {list(r['times'])}"


def _relational(bits, labels):
    n = len(labels)
    dia = [any(bits[v] for v in range(n) if labels[v] == labels[w]) for w in range(n)]
    box = [all(bits[v] for v in range(n) if labels[v] == labels[w]) for w in range(n)]
    return dia, box


@accept("Kripke recovery", 10)
def test_kripke_recovery():
    rng = np.random.default_rng(99)
    mismatches = checked = 0
    for _ in range(100):
        n = int(rng.integers(1, 9))
        labels = rng.integers(0, n, size=n).tolist()
        W = bare_system(n, "W")
        A = part_from_assignment(W, "A", labels)
        T = top(W)
        if n <= 6:
            phis = itertools.product([False, True], repeat=n)
        else:
            phis = (rng.random(n) < 0.5 for _ in range(64))
        for bits in phis:
            phi = Constraint(T, bits)
            dia, box = _relational(list(bits), labels)
            mismatches += kripke_diamond(W, A, phi).bits.tolist() != dia
            mismatches += kripke_box(W, A, phi).bits.tolist() != box
            mismatches += kripke_diamond(W, T, phi) != phi
            mismatches += kripke_box(W, T, phi) != phi
            checked += 1
    assert mismatches == 0
    assert bottom(bare_system(0, "W")).block_count == 0
    return f"100 frames, {checked} constraints, 0 mismatches"


@accept("round trip and fuzz", 30)
def test_round_trip_and_fuzz():
    for name in FIXTURE_NAMES:
        text = fixture_text(name)
        assert serialize_system(parse_system(text)) == text
    m = build(LOTKA_VOLTERRA_DESK)
    part = m["Rabbit_2"]
    diagnostics = 0
    for text in fuzz_inputs(10_000, seed=1):
        try:
            parse_constraint(text, part, {"t": 2, "k1": 1, "k2": 60})
        except DslError as exc:
            assert exc.line >= 1 and exc.column >= 1
            diagnostics += 1
    return f"{len(FIXTURE_NAMES)} fixtures byte-stable, 10000 inputs, {diagnostics} positioned diagnostics, 0 crashes"


if __name__ == "__main__":
    for fn in list(globals().values()):
        if callable(fn) and getattr(fn, "__name__", "").startswith("test_"):
            try:
                fn()
            except AssertionError:
                pass
    print("\n".join(LINES))
