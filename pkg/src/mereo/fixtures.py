"""Bundled desk-scale systems, shipped as ``.mere`` files under ``mereo/data``."""

from __future__ import annotations

from importlib import resources

from .core import Model, System, part_from_assignment
from .systems import BICYCLE_DESK, LOTKA_VOLTERRA_DESK, THERMAL_DESK, build

__all__ = ["FIXTURE_NAMES", "LAW_PARTS", "s3", "empty", "fixture_text", "load_fixture", "regenerate"]

FIXTURE_NAMES = ("s3", "bicycle", "thermal", "lotka_volterra", "empty")

# Parts fed to the law suite for each fixture; the full part list of the
# trajectory systems would make the triple-wise laws needlessly slow.
LAW_PARTS = {
    "s3": ["P", "Q"],
    "bicycle": ["Pedal", "Wheel"],
    "thermal": ["Water_0", "Water_1", "Water_3"],
    "lotka_volterra": ["Fox_0", "Rabbit_0", "State_1"],
    "empty": ["E"],
}


def s3() -> Model:
    system = System("s3", ("name",), [("s0",), ("s1",), ("s2",)])
    return Model(
        system,
        {
            "P": part_from_assignment(system, "P", [0, 0, 1]),
            "Q": part_from_assignment(system, "Q", [0, 1, 1]),
        },
    )


def empty() -> Model:
    system = System("empty", (), ())
    return Model(system, {"E": part_from_assignment(system, "E", [])})


def _build(name: str) -> Model:
    if name == "s3":
        return s3()
    if name == "empty":
        return empty()
    return build({"bicycle": BICYCLE_DESK, "thermal": THERMAL_DESK, "lotka_volterra": LOTKA_VOLTERRA_DESK}[name])


def fixture_text(name: str) -> str:
    if name not in FIXTURE_NAMES:
        raise KeyError(name)
    return resources.files("mereo.data").joinpath(f"{name}.mere").read_text(encoding="utf-8")


def load_fixture(name: str) -> Model:
    from .dsl import parse_system

    return parse_system(fixture_text(name)).to_model()


def regenerate(directory) -> None:
    """Rewrite the fixture files from their generators (maintenance helper)."""
    from pathlib import Path

    from .dsl import dump_model

    for name in FIXTURE_NAMES:
        dump_model(_build(name), Path(directory) / f"{name}.mere")
