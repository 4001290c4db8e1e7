"""Command-line front end.

Every subcommand takes ``--system`` (a ``.mere`` path or the name of a
bundled fixture) and ``--format text|structured``. Structured output is a
JSON object carrying ``format_version`` and ``kind``; for ``show`` it is the
system document itself, so it parses back with :func:`mereo.dsl.parse_system`.

Exit status: 0 on success, 1 on domain errors (bad file, unknown part,
ill-typed expression, failing law suite), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .core import (
    MereologyError,
    Model,
    Part,
    System,
    bottom,
    compatibility_table,
    compatible,
    determines,
    determines_part,
    join,
    meet,
    part_from_assignment,
    restrict,
    top,
)
from .dsl import dump_model, load_model, parse_constraint, to_json_text
from .fixtures import FIXTURE_NAMES, load_fixture
from .laws import SUITE_CHECKS, LawSuiteConfig, run_suite
from .logic import Constraint, allows, ensures, kripke_box, kripke_diamond, necessary, possible
from .systems import BICYCLE_DESK, KINDS, LOTKA_VOLTERRA_DESK, THERMAL_DESK, GeneratorConfig, build

OUTPUT_VERSION = 1
SEED_ENV = "MEREO_SEED"
_DESKS = {"bicycle": BICYCLE_DESK, "thermal": THERMAL_DESK, "lotka_volterra": LOTKA_VOLTERRA_DESK}


class UsageError(Exception):
    pass


# -- loading -------------------------------------------------------------------


def load_system(spec: str) -> Model:
    """A ``.mere`` file, or a bundled fixture by name (``s3`` or ``s3.mere``)."""
    path = Path(spec)
    if path.exists():
        return load_model(path)
    stem = path.name.removesuffix(".mere")
    if stem in FIXTURE_NAMES:
        return load_fixture(stem)
    raise MereologyError(f"no such file or bundled system: {spec!r} (bundled: {', '.join(FIXTURE_NAMES)})")


def get_part(model: Model, name: str) -> Part:
    if name in model.parts:
        return model.parts[name]
    if name in ("top", "⊤"):
        return top(model.system)
    if name in ("bottom", "⊥"):
        return bottom(model.system)
    known = ", ".join([*model.parts, "top", "bottom"])
    raise MereologyError(f"unknown part {name!r}; known: {known}")


def _scalar(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _bindings(pairs: Sequence[str] | None) -> dict[str, Any]:
    out = {}
    for item in pairs or ():
        name, sep, value = item.partition("=")
        if not sep or not name:
            raise UsageError(f"binding {item!r} is not NAME=VALUE")
        out[name.strip()] = _scalar(value.strip())
    return out


# -- presentation --------------------------------------------------------------


def block_label(part: Part, b: int) -> dict:
    """Fields that are constant on block ``b``, with their values."""
    system = part.system
    members = [s for s, x in enumerate(part.assignment.tolist()) if x == b]
    out = {}
    for j, f in enumerate(system.schema):
        values = {system.rows[s][j] for s in members}
        if len(values) == 1:
            out[f] = next(iter(values))
    return out


def _fmt_label(label: dict) -> str:
    return ", ".join(f"{k}={v}" for k, v in label.items()) or "(no field fixed)"


def _part_json(part: Part) -> dict:
    return {
        "name": part.name,
        "block_count": part.block_count,
        "assignment": part.assignment.tolist(),
        "labels": [block_label(part, b) for b in range(part.block_count)],
    }


def _part_text(part: Part) -> list[str]:
    lines = [f"{part.name}: {part.block_count} block(s)"]
    for b, members in enumerate(part.blocks()):
        lines.append(f"  [{b}] {_fmt_label(block_label(part, b))}  ({len(members)} behavior(s))")
    return lines


def _constraint_json(c: Constraint) -> dict:
    return {
        "part": c.part.name,
        "bits": c.bits.astype(int).tolist(),
        "blocks": c.blocks(),
        "labels": [block_label(c.part, b) for b in c.blocks()],
    }


def _constraint_text(title: str, c: Constraint) -> list[str]:
    blocks = c.blocks()
    lines = [f"{title}: {len(blocks)} of {len(c)} block(s) of {c.part.name}"]
    lines += [f"  [{b}] {_fmt_label(block_label(c.part, b))}" for b in blocks]
    return lines


class Output:
    def __init__(self, fmt: str, stream):
        self.structured = fmt == "structured"
        self.stream = stream

    def emit(self, kind: str, data: dict, text: list[str]) -> None:
        if self.structured:
            payload = {"format_version": OUTPUT_VERSION, "kind": kind, **data}
            self.stream.write(to_json_text(payload) + "\n")
        else:
            self.stream.write("\n".join(text) + "\n")


# -- subcommands ---------------------------------------------------------------


def cmd_show(args, out: Output) -> int:
    model = load_system(args.system)
    system = model.system
    if out.structured:
        out.stream.write(dump_model(model))
        return 0
    lines = [f"system {system.name}: {system.size} behavior(s), schema ({', '.join(system.schema)})"]
    limit = args.limit if args.limit >= 0 else system.size
    for s in range(min(system.size, limit)):
        lines.append(f"  #{s} {_fmt_label(system.label(s))}")
    if system.size > limit:
        lines.append(f"  ... {system.size - limit} more")
    lines.append(f"parts: {', '.join(f'{n} ({p.block_count})' for n, p in model.parts.items()) or 'none'}")
    out.emit("system", {}, lines)
    return 0


def cmd_parts(args, out: Output) -> int:
    model = load_system(args.system)
    parts = [get_part(model, n) for n in args.names] if args.names else list(model.parts.values())
    lines = []
    for p in parts:
        lines += _part_text(p)
    out.emit("parts", {"system": model.system.name, "parts": [_part_json(p) for p in parts]}, lines or ["no parts"])
    return 0


def cmd_restrict(args, out: Output) -> int:
    model = load_system(args.system)
    part = get_part(model, args.part)
    b = restrict(part, args.behavior)
    label = block_label(part, b)
    out.emit(
        "restrict",
        {"part": part.name, "behavior": args.behavior, "block": b, "label": label},
        [f"behavior #{args.behavior} lies in block [{b}] of {part.name}: {_fmt_label(label)}"],
    )
    return 0


def _relation(args, out: Output, name: str, single, whole, table) -> int:
    model = load_system(args.system)
    p, q = get_part(model, args.p), get_part(model, args.q)
    if (args.a is None) != (args.b is None):
        raise UsageError("give both block ids or neither")
    if args.a is not None:
        value = single(p, q, args.a, args.b)
        out.emit(name, {"p": p.name, "q": q.name, "a": args.a, "b": args.b, "value": value},
                 [f"{name}({p.name}[{args.a}], {q.name}[{args.b}]) = {str(value).lower()}"])
        return 0
    tbl = table(p, q)
    lines = [f"{name} table {p.name} x {q.name} ({p.block_count} x {q.block_count})"]
    for a in range(p.block_count):
        related = [b for b in range(q.block_count) if tbl[a][b]]
        lines.append(f"  [{a}] {_fmt_label(block_label(p, a))} -> {related}")
    data = {"p": p.name, "q": q.name, "table": [[bool(x) for x in row] for row in tbl]}
    if whole is not None:
        value = whole(p, q)
        data["holds"] = value
        lines.append(f"{p.name} determines {q.name}: {str(value).lower()}")
    out.emit(name, data, lines)
    return 0


def cmd_compatible(args, out: Output) -> int:
    return _relation(args, out, "compatible", compatible, None, lambda p, q: compatibility_table(p, q).tolist())


def cmd_determines(args, out: Output) -> int:
    def table(p, q):
        return [[determines(p, q, a, b) for b in range(q.block_count)] for a in range(p.block_count)]

    return _relation(args, out, "determines", determines, determines_part, table)


def _lattice(args, out: Output, name: str, op) -> int:
    model = load_system(args.system)
    p, q = get_part(model, args.p), get_part(model, args.q)
    r = op(p, q, f"{p.name} {name} {q.name}")
    extra = []
    if r == bottom(model.system):
        extra.append("(this is bottom)")
    if r == top(model.system):
        extra.append("(this is top)")
    data = {"p": p.name, "q": q.name, "result": _part_json(r), "is_bottom": r == bottom(model.system),
            "is_top": r == top(model.system)}
    out.emit(name, data, _part_text(r) + extra)
    return 0


def cmd_meet(args, out: Output) -> int:
    return _lattice(args, out, "meet", meet)


def cmd_join(args, out: Output) -> int:
    return _lattice(args, out, "join", join)


def _modality(args, out: Output, name: str, op) -> int:
    model = load_system(args.system)
    p, q = get_part(model, args.source), get_part(model, args.target)
    phi = parse_constraint(args.phi, p, _bindings(args.let))
    result = op(phi, q)
    data = {"from": p.name, "to": q.name, "phi": args.phi, "input": _constraint_json(phi),
            "result": _constraint_json(result)}
    out.emit(name, data, _constraint_text(f"{name} {p.name} -> {q.name} of {args.phi!r}", result))
    return 0


def cmd_allows(args, out: Output) -> int:
    return _modality(args, out, "allows", allows)


def cmd_ensures(args, out: Output) -> int:
    return _modality(args, out, "ensures", ensures)


def _global(args, out: Output, name: str, op) -> int:
    model = load_system(args.system)
    p = get_part(model, args.part)
    phi = parse_constraint(args.phi, p, _bindings(args.let))
    value = bool(op(phi).bits[0])
    out.emit(name, {"part": p.name, "phi": args.phi, "value": value},
             [f"{name}({args.phi!r} on {p.name}) = {str(value).lower()}"])
    return 0


def cmd_possible(args, out: Output) -> int:
    return _global(args, out, "possible", possible)


def cmd_necessary(args, out: Output) -> int:
    return _global(args, out, "necessary", necessary)


def cmd_kripke(args, out: Output) -> int:
    model = load_system(args.system)
    access = get_part(model, args.access)
    world = top(model.system, "worlds")
    phi = parse_constraint(args.phi, world, _bindings(args.let))
    dia = kripke_diamond(model.system, access, phi)
    box = kripke_box(model.system, access, phi)

    def worlds(c: Constraint) -> list[int]:
        return c.blocks()

    data = {"access": access.name, "phi": args.phi, "phi_worlds": worlds(phi),
            "diamond": worlds(dia), "box": worlds(box)}
    lines = [
        f"frame: {model.system.size} world(s), accessibility = kernel of {access.name}",
        f"phi holds at: {worlds(phi)}",
        f"diamond phi holds at: {worlds(dia)}",
        f"box phi holds at: {worlds(box)}",
    ]
    out.emit("kripke", data, lines)
    return 0


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return LawSuiteConfig().seed
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def cmd_laws(args, out: Output) -> int:
    defaults = LawSuiteConfig()
    cfg = LawSuiteConfig(
        max_system_size=args.max_size,
        max_parts=args.max_parts,
        exhaustive_threshold=args.threshold,
        sample_count=args.samples,
        seed=args.seed if args.seed is not None else _default_seed(),
        num_systems=args.num_systems,
        include_bundled=not args.no_bundled,
    )
    for law in args.law or ():
        if law not in SUITE_CHECKS:
            raise UsageError(f"unknown law {law!r}; known: {', '.join(SUITE_CHECKS)}")
    systems = [load_system(s) for s in args.system or ()]
    report = run_suite(cfg, systems, laws=args.law)
    if out.structured:
        out.stream.write(report.to_json())
    else:
        changed = {k: v for k, v in vars(cfg).items() if getattr(defaults, k) != v}
        out.stream.write(f"law suite, seed {cfg.seed}" + (f", overrides {changed}" if changed else "") + "\n")
        out.stream.write(report.to_text())
    return 0 if report.passed else 1


def cmd_gen(args, out: Output) -> int:
    params: dict[str, Any] = {}
    if args.desk:
        if args.kind not in _DESKS:
            raise UsageError(f"no desk preset for {args.kind!r}")
        params.update(_DESKS[args.kind].params)
    params.update(_bindings(args.set))
    model = build(GeneratorConfig(args.kind, params))
    if args.name:
        system = System(args.name, model.system.schema, model.system.rows)
        parts = {n: part_from_assignment(system, n, p.assignment) for n, p in model.parts.items()}
        model = Model(system, parts, model.config)
    text = dump_model(model, as_generator=args.as_generator)
    if args.output in (None, "-"):
        out.stream.write(text)
    else:
        Path(args.output).write_text(text, encoding="utf-8")
        msg = f"wrote {args.output}: {model.system.size} behavior(s), {len(model.parts)} part(s)"
        if out.structured:
            out.emit("gen", {"path": args.output, "behaviors": model.system.size,
                             "parts": list(model.parts)}, [])
        else:
            out.stream.write(msg + "\n")
    return 0


# -- parser --------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "structured"), default="text",
                        help="text for people, structured for a versioned JSON object")

    sys_arg = argparse.ArgumentParser(add_help=False)
    sys_arg.add_argument("--system", "-s", required=True,
                         help=f"a .mere file or a bundled system ({', '.join(FIXTURE_NAMES)})")

    let = argparse.ArgumentParser(add_help=False)
    let.add_argument("--let", action="append", metavar="NAME=VALUE",
                     help="bind a name in the expression, e.g. t=3 makes r_t read r_3")

    parser = _Parser(
        prog="mereo",
        description="Parts, constraints and inter-modalities on finite behavior systems.",
        epilog=f"The {SEED_ENV} environment variable sets the default law-suite seed.",
    )
    parser.add_argument("--version", action="version", version=f"mereo {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("show", parents=[common, sys_arg], help="summarize a system")
    p.add_argument("--limit", type=int, default=20, help="behaviors to list (-1 for all)")
    p.set_defaults(func=cmd_show)

    p = sub.add_parser("parts", parents=[common, sys_arg], help="list parts and their blocks")
    p.add_argument("names", nargs="*", help="parts to show (default: all named parts)")
    p.set_defaults(func=cmd_parts)

    p = sub.add_parser("restrict", parents=[common, sys_arg], help="block of a behavior in a part")
    p.add_argument("part")
    p.add_argument("behavior", type=int, help="behavior index")
    p.set_defaults(func=cmd_restrict)

    for name, func, what in (("compatible", cmd_compatible, "compatibility"),
                             ("determines", cmd_determines, "determination")):
        p = sub.add_parser(name, parents=[common, sys_arg], help=f"block {what} between two parts")
        p.add_argument("p")
        p.add_argument("q")
        p.add_argument("a", type=int, nargs="?", help="block of P")
        p.add_argument("b", type=int, nargs="?", help="block of Q")
        p.set_defaults(func=func)

    for name, func in (("meet", cmd_meet), ("join", cmd_join)):
        p = sub.add_parser(name, parents=[common, sys_arg], help=f"{name} of two parts")
        p.add_argument("p")
        p.add_argument("q")
        p.set_defaults(func=func)

    for name, func in (("allows", cmd_allows), ("ensures", cmd_ensures)):
        p = sub.add_parser(name, parents=[common, sys_arg, let], help=f"{name} a constraint from one part onto another")
        p.add_argument("--from", dest="source", required=True, help="part the constraint lives on")
        p.add_argument("--to", dest="target", required=True, help="part to pass it to")
        p.add_argument("--phi", required=True, help='constraint expression, e.g. "w <= 2"')
        p.set_defaults(func=func)

    for name, func in (("possible", cmd_possible), ("necessary", cmd_necessary)):
        p = sub.add_parser(name, parents=[common, sys_arg, let], help=f"is a constraint {name} in the system")
        p.add_argument("--part", required=True)
        p.add_argument("--phi", required=True)
        p.set_defaults(func=func)

    p = sub.add_parser("kripke", parents=[common, sys_arg, let],
                       help="diamond and box on behaviors, accessibility given by a part")
    p.add_argument("--access", required=True, help="part whose kernel is the accessibility relation")
    p.add_argument("--phi", required=True, help="constraint on behaviors")
    p.set_defaults(func=cmd_kripke)

    d = LawSuiteConfig()
    p = sub.add_parser("laws", parents=[common], help="run the law suite")
    p.add_argument("--seed", type=int, help=f"random seed (default: ${SEED_ENV} or {d.seed})")
    p.add_argument("--max-size", type=int, default=d.max_system_size, help="largest random system")
    p.add_argument("--max-parts", type=int, default=d.max_parts, help="most parts per random system")
    p.add_argument("--num-systems", type=int, default=d.num_systems, help="random systems to draw")
    p.add_argument("--threshold", type=int, default=d.exhaustive_threshold,
                   help="enumerate constraint spaces up to this size, sample above")
    p.add_argument("--samples", type=int, default=d.sample_count, help="random constraints when sampling")
    p.add_argument("--no-bundled", action="store_true", help="skip the bundled systems")
    p.add_argument("--law", action="append", metavar="LAW_ID", help="check only these laws")
    p.add_argument("--system", "-s", action="append", help="also check this system (repeatable)")
    p.set_defaults(func=cmd_laws)

    p = sub.add_parser("gen", parents=[common], help="generate a system document")
    p.add_argument("kind", choices=KINDS)
    p.add_argument("--desk", action="store_true", help="start from the desk-scale preset")
    p.add_argument("--set", action="append", metavar="KEY=JSON", help="generator parameter, e.g. r=2")
    p.add_argument("--name", help="system name")
    p.add_argument("--as-generator", action="store_true", help="store the generator instead of the behaviors")
    p.add_argument("-o", "--output", help="output path (default: stdout)")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = Output(args.format, stdout)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            status = args.func(args, out)
        except UsageError as exc:
            print(f"mereo {args.command}: usage error: {exc}", file=stderr)
            status = 2
        except (MereologyError, OSError) as exc:
            print(f"mereo {args.command}: error: {exc}", file=stderr)
            status = 1
    for w in caught:
        print(f"mereo {args.command}: warning: {w.message}", file=stderr)
    return status


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
