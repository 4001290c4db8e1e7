import io
import json

import pytest

from mereo.cli import main
from mereo.core import compatibility_table, determines_part, join, meet, top
from mereo.dsl import load_model, parse_constraint, parse_system
from mereo.fixtures import FIXTURE_NAMES, fixture_text, load_fixture
from mereo.logic import allows, ensures, kripke_box, kripke_diamond, necessary, possible
from mereo.systems import BICYCLE_DESK, build


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def structured(*argv):
    code, out, err = run(*argv, "--format", "structured")
    assert code == 0, err
    return json.loads(out)


def test_bicycle_allows_text():
    code, out, _ = run("allows", "--system", "bicycle.mere", "--from", "Wheel", "--to", "Pedal", "--phi", "w <= 2")
    assert code == 0
    assert "p=0" in out and "p=1" in out and "p=2" not in out


def test_meet_reports_bottom():
    code, out, _ = run("meet", "--system", "s3.mere", "P", "Q")
    assert code == 0
    assert "1 block(s)" in out and "bottom" in out


def test_laws_small_run(monkeypatch):
    code, out, _ = run("laws", "--seed", "1", "--max-size", "4", "--num-systems", "10")
    assert code == 0
    assert "all laws hold" in out


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("MEREO_SEED", "5")
    data = structured("laws", "--max-size", "3", "--num-systems", "3", "--law", "demorgan")
    assert data["config"]["seed"] == 5
    data = structured("laws", "--seed", "2", "--max-size", "3", "--num-systems", "3", "--law", "demorgan")
    assert data["config"]["seed"] == 2


@pytest.mark.parametrize("argv", [
    (),
    ("frobnicate",),
    ("meet", "--system", "s3"),
    ("allows", "--system", "s3", "--from", "P"),
    ("laws", "--seed", "x"),
    ("show", "--format", "xml", "--system", "s3"),
])
def test_usage_errors_exit_2(argv):
    assert run(*argv)[0] == 2


@pytest.mark.parametrize("argv", [
    ("show", "--system", "/nonexistent/x.mere"),
    ("meet", "--system", "s3", "P", "Nope"),
    ("allows", "--system", "bicycle", "--from", "Pedal", "--to", "Wheel", "--phi", "w <= 2"),
    ("allows", "--system", "bicycle", "--from", "Wheel", "--to", "Pedal", "--phi", "w <= "),
    ("possible", "--system", "s3", "--part", "P", "--phi", "1 + true"),
])
def test_domain_errors_exit_1(argv):
    code, out, err = run(*argv)
    assert code == 1 and out == ""
    assert "error" in err


def test_diagnostic_is_positioned():
    _, _, err = run("allows", "-s", "bicycle", "--from", "Pedal", "--to", "Wheel", "--phi", "p >= 0 and w <= 2")
    assert "line 1, column 12" in err


def test_broken_document_exit_1(tmp_path):
    bad = tmp_path / "bad.mere"
    bad.write_text('{"format_version": 1,\n "name": }')
    code, _, err = run("show", "--system", str(bad))
    assert code == 1 and "line 2" in err


def test_cli_matches_library_modalities():
    m = build(BICYCLE_DESK)
    for kind, fn in (("allows", allows), ("ensures", ensures)):
        for src, dst, text in (("Wheel", "Pedal", "w <= 2"), ("Pedal", "Wheel", "p > 1")):
            data = structured(kind, "-s", "bicycle", "--from", src, "--to", dst, "--phi", text)
            want = fn(parse_constraint(text, m[src]), m[dst])
            assert data["result"]["bits"] == [int(b) for b in want.bits]
            assert data["result"]["blocks"] == want.blocks()


def test_cli_matches_library_lattice_and_tables():
    m = load_fixture("thermal")
    a, b = "Water_0", "Water_2"
    assert structured("meet", "-s", "thermal", a, b)["result"]["assignment"] == meet(m[a], m[b]).assignment.tolist()
    assert structured("join", "-s", "thermal", a, b)["result"]["assignment"] == join(m[a], m[b]).assignment.tolist()
    assert structured("compatible", "-s", "thermal", a, b)["table"] == compatibility_table(m[a], m[b]).tolist()
    det = structured("determines", "-s", "thermal", a, b)
    assert det["holds"] == determines_part(m[a], m[b])


def test_pointwise_queries():
    assert structured("compatible", "-s", "s3", "P", "Q", "1", "0")["value"] is False
    assert structured("determines", "-s", "s3", "P", "Q", "1", "1")["value"] is True
    assert structured("restrict", "-s", "s3", "Q", "2")["block"] == 1


def test_alethic_and_kripke():
    m = load_fixture("lotka_volterra")
    fox = m["Fox_0"]
    for text in ("f_0 > 4", "f_0 >= 0", "f_0 > 100"):
        phi = parse_constraint(text, fox)
        got = structured("possible", "-s", "lotka_volterra", "--part", "Fox_0", "--phi", text)["value"]
        assert got == bool(possible(phi).bits[0])
        got = structured("necessary", "-s", "lotka_volterra", "--part", "Fox_0", "--phi", text)["value"]
        assert got == bool(necessary(phi).bits[0])
    for text in ("r_1 > 30", "f_0 > 4 and r_0 > 1"):
        world = parse_constraint(text, top(m.system))
        data = structured("kripke", "-s", "lotka_volterra", "--access", "Fox_0", "--phi", text)
        assert data["phi_worlds"] == world.blocks()
        assert data["diamond"] == kripke_diamond(m.system, fox, world).blocks()
        assert data["box"] == kripke_box(m.system, fox, world).blocks()


def test_let_binding():
    data = structured("ensures", "-s", "lotka_volterra", "--from", "Rabbit_3", "--to", "Fox_0",
                      "--phi", "r_t > k", "--let", "t=3", "--let", "k=5")
    m = load_fixture("lotka_volterra")
    want = ensures(parse_constraint("r_3 > 5", m["Rabbit_3"]), m["Fox_0"])
    assert data["result"]["bits"] == [int(x) for x in want.bits]


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_show_structured_round_trips(name):
    code, out, _ = run("show", "-s", name, "--format", "structured")
    assert code == 0
    assert out == fixture_text(name)
    parse_system(out)


def test_parts_listing():
    data = structured("parts", "-s", "s3")
    assert [p["name"] for p in data["parts"]] == ["P", "Q"]
    code, out, _ = run("parts", "-s", "bicycle", "Pedal")
    assert code == 0 and "Pedal" in out and "Wheel" not in out


def test_gen_writes_document(tmp_path):
    path = tmp_path / "b.mere"
    code, _, _ = run("gen", "bicycle", "--desk", "-o", str(path))
    assert code == 0
    m = load_model(path)
    ref = build(BICYCLE_DESK)
    assert m.system == ref.system and m.parts == ref.parts
    code, out, _ = run("allows", "-s", str(path), "--from", "Wheel", "--to", "Pedal", "--phi", "w <= 2")
    assert code == 0 and "p=1" in out


def test_gen_overrides_and_generator_form(tmp_path):
    path = tmp_path / "t.mere"
    code, _, _ = run("gen", "thermal", "--desk", "--set", "horizon=3", "--as-generator", "-o", str(path))
    assert code == 0
    m = load_model(path)
    assert "Water_2" in m.parts and "Water_3" not in m.parts
    assert run("gen", "thermal", "--desk", "--set", "colour=1")[0] == 1


def test_gen_random_is_deterministic():
    a = run("gen", "random", "--set", "seed=4", "--set", "size=5", "--set", "num_parts=2")
    b = run("gen", "random", "--set", "seed=4", "--set", "size=5", "--set", "num_parts=2")
    assert a[0] == 0 and a == b


def test_output_deterministic():
    argv = ("allows", "-s", "thermal", "--from", "Water_0", "--to", "Water_3", "--phi", "T_0 >= 10")
    assert run(*argv) == run(*argv)
