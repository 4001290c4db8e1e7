"""The ``.mere`` system document: a system, its named parts, and optionally
the generator that produced it.

The on-disk form is UTF-8 JSON with a fixed key order and fixed layout, so
``serialize_system(parse_system(text)) == text`` for any text this module
wrote. Layout: two-space indentation, one behavior per line, every array of
scalars on a single line, trailing newline. Floats are written with the
shortest repr that round-trips through binary64.

Top-level keys, in order: ``format_version`` (must be 1), ``name``,
``schema`` (field names), ``behaviors`` (rows of scalars), ``parts``
(name -> block assignment), ``generator`` (``{"kind": ..., params...}``).
A document carries either ``schema``/``behaviors`` or ``generator``; with a
generator, the behaviors and default parts come from running it and
``parts`` may add more.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from ..core import MereologyError, Model, System, canonicalize, part_from_assignment
from ..systems import GeneratorConfig, build
from .expr import DslError

__all__ = [
    "FORMAT_VERSION",
    "FILE_EXTENSION",
    "MEDIA_TYPE",
    "DocumentError",
    "CanonicalizationWarning",
    "SystemDocument",
    "parse_system",
    "serialize_system",
    "load_model",
    "dump_model",
    "to_json_text",
]

FORMAT_VERSION = 1
FILE_EXTENSION = ".mere"
MEDIA_TYPE = "application/vnd.mereo.system+json"

_KEYS = ("format_version", "name", "schema", "behaviors", "parts", "generator")


class DocumentError(DslError):
    pass


class CanonicalizationWarning(UserWarning):
    pass


@dataclass
class SystemDocument:
    name: str
    schema: list[str] = field(default_factory=list)
    behaviors: list[list] = field(default_factory=list)
    parts: dict[str, list[int]] = field(default_factory=dict)
    generator: dict | None = None
    format_version: int = FORMAT_VERSION

    def to_model(self) -> Model:
        if self.generator is not None:
            base = build(GeneratorConfig.from_dict(self.generator))
            system = System(self.name, base.system.schema, base.system.rows)
            parts = {n: part_from_assignment(system, n, p.assignment) for n, p in base.parts.items()}
            config = base.config
        else:
            system = System(self.name, self.schema, self.behaviors)
            parts, config = {}, None
        for n, a in self.parts.items():
            parts[n] = part_from_assignment(system, n, np.asarray(a, dtype=np.intp))
        return Model(system, parts, config)

    @classmethod
    def from_model(cls, model: Model, as_generator: bool = False) -> SystemDocument:
        system = model.system
        if as_generator:
            if model.config is None:
                raise MereologyError("model was not produced by a generator")
            generated = build(model.config)
            extra = {
                n: p.assignment.tolist()
                for n, p in model.parts.items()
                if n not in generated.parts
                or not np.array_equal(generated.parts[n].assignment, p.assignment)
            }
            return cls(system.name, parts=extra, generator=_plain(model.config.to_dict()))
        return cls(
            system.name,
            schema=list(system.schema),
            behaviors=[list(r) for r in system.rows],
            parts={n: p.assignment.tolist() for n, p in model.parts.items()},
        )


def _plain(x: Any) -> Any:
    """Convert tuples and numpy scalars to JSON-native values."""
    if isinstance(x, Mapping):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_plain(v) for v in x]
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    return x


# -- serialization -------------------------------------------------------------


def _scalar(v: Any) -> str:
    try:
        return json.dumps(v, ensure_ascii=False, allow_nan=False)
    except ValueError:
        raise MereologyError(f"cannot serialize non-finite value {v!r}") from None


def _inline(v: Any) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_inline(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{_scalar(k)}: {_inline(x)}" for k, x in v.items()) + "}"
    return _scalar(v)


def _block(items: list[str], indent: str, open_: str, close: str) -> str:
    if not items:
        return open_ + close
    inner = ",\n".join(indent + "  " + it for it in items)
    return f"{open_}\n{inner}\n{indent}{close}"


def to_json_text(obj: Any, indent: str = "") -> str:
    """Deterministic JSON layout: objects and arrays of arrays break across
    lines, arrays of scalars stay on one line."""
    if isinstance(obj, dict):
        items = [f"{_scalar(k)}: {to_json_text(v, indent + '  ')}" for k, v in obj.items()]
        return _block(items, indent, "{", "}")
    if isinstance(obj, list) and any(isinstance(x, (list, dict)) for x in obj):
        if all(isinstance(x, list) and not any(isinstance(y, (list, dict)) for y in x) for x in obj):
            return _block([_inline(x) for x in obj], indent, "[", "]")
        return _block([to_json_text(x, indent + "  ") for x in obj], indent, "[", "]")
    return _inline(obj)


def _as_json(doc: SystemDocument) -> dict:
    out: dict[str, Any] = {"format_version": doc.format_version, "name": doc.name}
    if doc.generator is None:
        out["schema"] = list(doc.schema)
        out["behaviors"] = [list(r) for r in doc.behaviors]
        out["parts"] = {n: list(a) for n, a in doc.parts.items()}
    else:
        if doc.parts:
            out["parts"] = {n: list(a) for n, a in doc.parts.items()}
        out["generator"] = dict(doc.generator)
    return _plain(out)


def serialize_system(doc: SystemDocument) -> str:
    return to_json_text(_as_json(doc)) + "\n"


# -- parsing -------------------------------------------------------------------


def _locate(text: str, path: list[str]) -> tuple[int, int]:
    """Best-effort line/column of the key at ``path``."""
    pos = 0
    for key in path:
        found = text.find(json.dumps(key), pos)
        if found < 0:
            break
        pos = found
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


def _fail(text: str, path: list[str], message: str) -> DocumentError:
    line, col = _locate(text, path)
    where = ".".join(path)
    return DocumentError(f"{where}: {message}" if where else message, line, col)


def _is_scalar(v: Any) -> bool:
    return isinstance(v, (int, float, str)) and not isinstance(v, bool)


def _reject_constant(name: str):
    raise ValueError(f"non-finite number {name}")


def parse_system(text: str, strict: bool = True) -> SystemDocument:
    """Parse and validate a ``.mere`` document.

    Unknown top-level keys are errors when ``strict``, warnings otherwise.
    Non-canonical part assignments are renumbered with a
    :class:`CanonicalizationWarning`.
    """
    try:
        data = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise DocumentError(exc.msg, exc.lineno, exc.colno) from None
    except ValueError as exc:
        raise DocumentError(str(exc)) from None
    except RecursionError:
        raise DocumentError("document nested too deeply") from None
    if not isinstance(data, dict):
        raise DocumentError("top level must be an object")

    unknown = [k for k in data if k not in _KEYS]
    if unknown:
        if strict:
            raise _fail(text, [unknown[0]], "unknown field")
        warnings.warn(f"ignoring unknown fields {unknown}", stacklevel=2)

    version = data.get("format_version")
    if version is None:
        raise DocumentError("missing format_version")
    if version != FORMAT_VERSION or isinstance(version, bool):
        raise _fail(text, ["format_version"], f"unsupported version {version!r}")
    name = data.get("name")
    if not isinstance(name, str):
        raise _fail(text, ["name"], "name must be a string")

    generator = data.get("generator")
    if generator is not None:
        if "schema" in data or "behaviors" in data:
            raise _fail(text, ["generator"], "generator replaces schema and behaviors; give one or the other")
        if not isinstance(generator, dict) or not isinstance(generator.get("kind"), str):
            raise _fail(text, ["generator"], "generator must be an object with a string 'kind'")
        doc = SystemDocument(name, generator=generator)
        try:
            n = doc.to_model().system.size
        except (MereologyError, TypeError, ValueError) as exc:
            raise _fail(text, ["generator"], str(exc)) from None
    else:
        schema = data.get("schema")
        behaviors = data.get("behaviors")
        if not isinstance(schema, list) or not all(isinstance(f, str) for f in schema):
            raise _fail(text, ["schema"], "schema must be a list of field names")
        if len(set(schema)) != len(schema):
            raise _fail(text, ["schema"], "duplicate field names")
        if not isinstance(behaviors, list):
            raise _fail(text, ["behaviors"], "behaviors must be a list of rows")
        for i, row in enumerate(behaviors):
            if not isinstance(row, list) or len(row) != len(schema):
                raise _fail(text, ["behaviors"], f"row {i} does not match schema of {len(schema)} fields")
            if not all(_is_scalar(v) for v in row):
                raise _fail(text, ["behaviors"], f"row {i} has a non-scalar value")
        doc = SystemDocument(name, schema=schema, behaviors=behaviors)
        n = len(behaviors)

    parts = data.get("parts", {})
    if not isinstance(parts, dict):
        raise _fail(text, ["parts"], "parts must be an object")
    for pname, a in parts.items():
        path = ["parts", pname]
        if not isinstance(a, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in a):
            raise _fail(text, path, "assignment must be a list of integers")
        if len(a) != n:
            raise _fail(text, path, f"assignment has length {len(a)}, expected {n}")
        canon = canonicalize(a).tolist()
        if canon != a:
            warnings.warn(
                f"part {pname!r}: assignment {a} renumbered to {canon}",
                CanonicalizationWarning,
                stacklevel=2,
            )
        doc.parts[pname] = canon
    return doc


def load_model(path, strict: bool = True) -> Model:
    with open(path, encoding="utf-8") as fh:
        return parse_system(fh.read(), strict=strict).to_model()


def dump_model(model: Model, path=None, as_generator: bool = False) -> str:
    text = serialize_system(SystemDocument.from_model(model, as_generator=as_generator))
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text
