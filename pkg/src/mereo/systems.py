"""Finite generators for the running example systems.

Every generator returns a :class:`~mereo.core.Model`: the system plus its
named parts. Trajectory systems store one behavior per initial condition
(the dynamics are deterministic) with fields named ``<var>_<t>``; the
per-time parts are the kernels of those fields. Values are compared exactly
as computed in binary64 unless a ``tol`` is given, in which case they are
snapped to multiples of ``tol`` first. Near-equal trajectories can merge or
split depending on that choice.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .core import (
    MereologyError,
    Model,
    Part,
    System,
    is_subpart,
    part_from_assignment,
)
from .logic import Constraint, allows, ensures, eq_constraint, entails

__all__ = [
    "GeneratorWarning",
    "GeneratorConfig",
    "build",
    "gen_bicycle",
    "gen_thermal",
    "gen_lotka_volterra",
    "gen_random",
    "product_grid",
    "temporal_part",
    "time_fields",
    "thermal_contraction_violations",
    "symbiosis_scenario",
    "deadline_scenario",
    "is_deterministic",
    "BICYCLE_DESK",
    "THERMAL_DESK",
    "LOTKA_VOLTERRA_DESK",
]

KINDS = ("bicycle", "thermal", "lotka_volterra", "random")


class GeneratorWarning(UserWarning):
    pass


@dataclass(frozen=True)
class GeneratorConfig:
    kind: str
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise MereologyError(f"unknown generator kind {self.kind!r}")

    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.params}

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> GeneratorConfig:
        d = dict(d)
        try:
            kind = d.pop("kind")
        except KeyError:
            raise MereologyError("generator section needs a 'kind'") from None
        return cls(kind, d)


_SIGNATURES = {
    "bicycle": ({"r", "p_grid", "w_grid"}, set()),
    "thermal": ({"k", "R", "t0_grid", "horizon"}, {"windows", "tol"}),
    "lotka_volterra": (
        {"d_f", "b_r", "c_f", "c_r", "init_grid", "horizon"},
        {"tol"},
    ),
    "random": ({"seed", "size", "num_parts"}, set()),
}


def build(config: GeneratorConfig) -> Model:
    """Run the generator described by ``config``."""
    required, optional = _SIGNATURES[config.kind]
    given = set(config.params)
    missing = required - given
    if missing:
        raise MereologyError(f"{config.kind} generator missing {sorted(missing)}")
    extra = given - required - optional
    if extra:
        raise MereologyError(f"{config.kind} generator got unknown {sorted(extra)}")
    fn = {
        "bicycle": gen_bicycle,
        "thermal": gen_thermal,
        "lotka_volterra": gen_lotka_volterra,
        "random": gen_random,
    }[config.kind]
    model = fn(**config.params)
    return Model(model.system, model.parts, config)


def _grid(values: Iterable, what: str) -> list:
    out = list(dict.fromkeys(values))
    if not out:
        raise MereologyError(f"{what} must be nonempty")
    for v in out:
        if isinstance(v, float) and not math.isfinite(v):
            raise MereologyError(f"{what} contains non-finite value {v}")
    return out


def _horizon(h: int) -> int:
    if int(h) != h or h < 1:
        raise MereologyError(f"horizon must be a positive integer, got {h}")
    return int(h)


def _kernel(system: System, name: str, fields: Sequence[str], tol: float | None = None) -> Part:
    cols = [system.column(f) for f in fields]
    if tol is not None:
        cols = [[round(v / tol) for v in col] for col in cols]
    ids: dict[tuple, int] = {}
    assignment = [ids.setdefault(key, len(ids)) for key in zip(*cols)]
    return part_from_assignment(system, name, np.asarray(assignment, dtype=np.intp))


def gen_bicycle(r: float, p_grid: Sequence[float], w_grid: Sequence[float], name: str = "bicycle") -> Model:
    """Pedal/wheel speed pairs with ``w >= r * p``."""
    ps, ws = _grid(p_grid, "p_grid"), _grid(w_grid, "w_grid")
    rows = [(p, w) for p in ps for w in ws if w >= r * p]
    if not rows:
        raise MereologyError("no grid pair satisfies w >= r*p")
    dropped = [("p", p) for p in ps if all(row[0] != p for row in rows)]
    dropped += [("w", w) for w in ws if all(row[1] != w for row in rows)]
    if dropped:
        warnings.warn(
            f"grid values with no behavior dropped from parts: {dropped}",
            GeneratorWarning,
            stacklevel=2,
        )
    system = System(name, ("p", "w"), rows)
    parts = {
        "Pedal": _kernel(system, "Pedal", ["p"]),
        "Wheel": _kernel(system, "Wheel", ["w"]),
    }
    return Model(system, parts)


def gen_thermal(
    k: float,
    R: float,
    t0_grid: Sequence[float],
    horizon: int,
    windows: Iterable[Iterable[int]] = (),
    tol: float | None = None,
    name: str = "thermal",
) -> Model:
    """Cup of water relaxing toward room temperature ``R`` at rate ``k``."""
    h = _horizon(horizon)
    rows = []
    for t0 in _grid(t0_grid, "t0_grid"):
        traj = [t0]
        for _ in range(h - 1):
            T = traj[-1]
            traj.append(T + k * (R - T))
        rows.append(tuple(traj))
    system = System(name, tuple(f"T_{t}" for t in range(h)), rows)
    parts = {f"Water_{t}": _kernel(system, f"Water_{t}", [f"T_{t}"], tol) for t in range(h)}
    for window in windows:
        p = temporal_part(system, window, tol=tol, name=_window_name("Water", window))
        parts[p.name] = p
    return Model(system, parts)


def product_grid(f_grid: Iterable[float], r_grid: Iterable[float]) -> list[tuple[float, float]]:
    return [(f, r) for f in f_grid for r in r_grid]


def _is_product(pairs: Sequence[tuple]) -> bool:
    fs = dict.fromkeys(p[0] for p in pairs)
    rs = dict.fromkeys(p[1] for p in pairs)
    return len(set(pairs)) == len(fs) * len(rs)


def gen_lotka_volterra(
    d_f: float,
    b_r: float,
    c_f: float,
    c_r: float,
    init_grid: Sequence[Sequence[float]],
    horizon: int,
    tol: float | None = None,
    name: str = "lotka_volterra",
) -> Model:
    """Fox/rabbit populations under the discrete predator-prey recurrences.

    Parts: ``Fox_t``, ``Rabbit_t``, ``State_t`` (their join) for each time,
    and ``Fox``/``Rabbit`` for whole trajectories.
    """
    h = _horizon(horizon)
    inits = _grid((tuple(pair) for pair in init_grid), "init_grid")
    if any(len(pair) != 2 for pair in inits):
        raise MereologyError("init_grid entries must be (f0, r0) pairs")
    if not _is_product(inits):
        warnings.warn(
            "init_grid is not a full product; time-0 populations need not be compatible",
            GeneratorWarning,
            stacklevel=2,
        )
    rows = []
    for f, r in inits:
        row = [f, r]
        for _ in range(h - 1):
            f, r = (1 - d_f) * f + c_f * r * f, (1 + b_r) * r - c_r * r * f
            row += [f, r]
        rows.append(tuple(row))
    schema = tuple(x for t in range(h) for x in (f"f_{t}", f"r_{t}"))
    system = System(name, schema, rows)
    parts: dict[str, Part] = {}
    for t in range(h):
        parts[f"Fox_{t}"] = _kernel(system, f"Fox_{t}", [f"f_{t}"], tol)
        parts[f"Rabbit_{t}"] = _kernel(system, f"Rabbit_{t}", [f"r_{t}"], tol)
        parts[f"State_{t}"] = _kernel(system, f"State_{t}", [f"f_{t}", f"r_{t}"], tol)
    parts["Fox"] = _kernel(system, "Fox", [f"f_{t}" for t in range(h)], tol)
    parts["Rabbit"] = _kernel(system, "Rabbit", [f"r_{t}" for t in range(h)], tol)
    return Model(system, parts)


def gen_random(seed: int, size: int, num_parts: int, name: str | None = None) -> Model:
    """Random system of ``size`` bare behaviors with ``num_parts`` random parts.

    Each behavior draws an independent uniform block label; this is not
    uniform over set partitions.
    """
    if size < 0 or num_parts < 0:
        raise MereologyError("size and num_parts must be nonnegative")
    rng = np.random.default_rng(seed)
    system = System(name or f"random-{seed}", ("id",), [(i,) for i in range(size)])
    parts = {}
    for j in range(num_parts):
        labels = rng.integers(0, max(size, 1), size=size)
        parts[f"P{j}"] = part_from_assignment(system, f"P{j}", labels)
    return Model(system, parts)


# -- temporal parts ----------------------------------------------------------

_TIME_FIELD = re.compile(r"^(.+)_(\d+)$")


def time_fields(system: System) -> dict[int, list[str]]:
    """Fields grouped by the time index in their ``<var>_<t>`` suffix."""
    out: dict[int, list[str]] = {}
    for f in system.schema:
        m = _TIME_FIELD.match(f)
        if m:
            out.setdefault(int(m.group(2)), []).append(f)
    return out


def _window_name(prefix: str, window: Iterable[int]) -> str:
    return f"{prefix}_{{{','.join(str(t) for t in sorted(set(window)))}}}"


def temporal_part(
    system: System | Model,
    window: Iterable[int],
    tol: float | None = None,
    name: str | None = None,
) -> Part:
    """Kernel of clipping each trajectory to the times in ``window``."""
    if isinstance(system, Model):
        system = system.system
    times = time_fields(system)
    if not times:
        raise MereologyError(f"{system.name!r} has no time-indexed fields")
    w = sorted(set(int(t) for t in window))
    if not w:
        raise MereologyError("window must be nonempty")
    bad = [t for t in w if t not in times]
    if bad:
        raise MereologyError(f"times {bad} out of range 0..{max(times)}")
    fields = [f for t in w for f in times[t]]
    return _kernel(system, name or _window_name("Clip", w), fields, tol)


# -- scripted checks ---------------------------------------------------------


def thermal_contraction_violations(model: Model, R: float) -> list[tuple[int, int, int]]:
    """Triples ``(t, a, b)`` where Water_t block ``b`` lies farther from ``R``
    than Water_0 block ``a`` yet is allowed by ``(= a)``.

    Empty for every ``0 <= k <= 1``.
    """
    system = model.system
    w0 = model["Water_0"]
    T0 = system.column("T_0")
    out = []
    for t in sorted(time_fields(system)):
        wt = model[f"Water_{t}"]
        Tt = system.column(f"T_{t}")
        rep0, rept = w0.representatives(), wt.representatives()
        for a in range(w0.block_count):
            allowed = allows(eq_constraint(w0, a), wt)
            for b in range(wt.block_count):
                farther = abs(R - Tt[rept[b]]) > abs(R - T0[rep0[a]])
                if farther and allowed[b]:
                    out.append((t, a, b))
    return out


# Desk-scale instances used throughout the tests and notebooks.
BICYCLE_DESK = GeneratorConfig(
    "bicycle", {"r": 2, "p_grid": [0, 1, 2, 3], "w_grid": [0, 1, 2, 3, 4, 5, 6]}
)
THERMAL_DESK = GeneratorConfig(
    "thermal", {"k": 0.5, "R": 20, "t0_grid": [0, 10, 20, 30, 40], "horizon": 4}
)
LOTKA_VOLTERRA_DESK = GeneratorConfig(
    "lotka_volterra",
    {
        "d_f": 0.2,
        "b_r": 0.3,
        "c_f": 0.01,
        "c_r": 0.05,
        "init_grid": product_grid([0, 2, 4, 6, 8], [10, 20, 40]),
        "horizon": 8,
    },
)


def symbiosis_scenario(bound: float = 60.0) -> dict:
    """Fixed-parameter instance of the fox/rabbit mutual-ensurance claim.

    On whole trajectories, "rabbits present at time 0 and bounded by
    ``bound``" should entail ensuring, of the foxes, that they are always
    present and in turn ensure rabbits are always present. Only checked at
    these parameters; with ``r_0 >= 0`` in place of ``r_0 > 0`` it fails
    (the all-zero history is bounded but has no foxes).
    """
    config = GeneratorConfig(
        "lotka_volterra",
        {**LOTKA_VOLTERRA_DESK.params, "init_grid": product_grid([0, 2, 4, 6, 8], [0, 10, 20, 40])},
    )
    model = build(config)
    system, fox, rabbit = model.system, model["Fox"], model["Rabbit"]
    h = len(time_fields(system))

    def on_blocks(part, pred):
        return Constraint.from_label_predicate(part, pred)

    premise = on_blocks(
        rabbit, lambda L: L["r_0"] > 0 and all(L[f"r_{t}"] < bound for t in range(h))
    )
    rabbits_alive = on_blocks(rabbit, lambda L: all(L[f"r_{t}"] > 0 for t in range(h)))
    foxes_alive = on_blocks(fox, lambda L: all(L[f"f_{t}"] > 0 for t in range(h)))
    inner = foxes_alive & ensures(rabbits_alive, fox)
    conclusion = ensures(inner, rabbit)

    # brute force over whole-system behaviors
    brute = True
    for s in range(system.size):
        L = system.label(s)
        if not (L["r_0"] > 0 and all(L[f"r_{t}"] < bound for t in range(h))):
            continue
        for s2 in range(system.size):
            if rabbit.assignment[s2] != rabbit.assignment[s]:
                continue
            L2 = system.label(s2)
            if not all(L2[f"f_{t}"] > 0 for t in range(h)):
                brute = False
            for s3 in range(system.size):
                if fox.assignment[s3] == fox.assignment[s2]:
                    if not all(system.label(s3)[f"r_{t}"] > 0 for t in range(h)):
                        brute = False
    return {
        "model": model,
        "premise": premise,
        "conclusion": conclusion,
        "holds": entails(premise, conclusion),
        "brute_force": brute,
    }


def deadline_scenario(model: Model | None = None, d: int = 4, k1: float = 1, k2: float = 60) -> dict:
    """Ensurance onto Fox_0 of "rabbits in check at every t >= d", computed
    once on the joint part and once time by time.

    ``in_check(t)`` is ``k1 < r_t < k2``. The joint part is the join of the
    Rabbit_t for t >= d.
    """
    from .core import join
    from .dsl import parse_constraint

    model = model or build(LOTKA_VOLTERRA_DESK)
    times = [t for t in sorted(time_fields(model.system)) if t >= d]
    if not times:
        raise MereologyError(f"deadline {d} is past the horizon")
    bind = {"k1": k1, "k2": k2}
    joint = model[f"Rabbit_{times[0]}"]
    for t in times[1:]:
        joint = join(joint, model[f"Rabbit_{t}"])
    joint = joint.renamed(f"Rabbit_{{t>={d}}}")
    text = " and ".join(f"k1 < r_{t} and r_{t} < k2" for t in times)
    fox0 = model["Fox_0"]
    whole = ensures(parse_constraint(text, joint, bind), fox0)
    per_t = [
        ensures(parse_constraint("k1 < r_t and r_t < k2", model[f"Rabbit_{t}"], {**bind, "t": t}), fox0)
        for t in times
    ]
    conj = Constraint.true(fox0)
    for c in per_t:
        conj = conj & c
    return {"model": model, "times": times, "joint": joint, "whole": whole, "per_t": per_t,
            "conjunction": conj, "equal": whole == conj}


def is_deterministic(model: Model, state: str = "State") -> bool:
    """``State_0 >= State_t`` for every time ``t``."""
    times = sorted(time_fields(model.system))
    return all(is_subpart(model[f"{state}_0"], model[f"{state}_{t}"]) for t in times)

