"""Built-in scenes and scene validation."""
from __future__ import annotations

from importlib import resources

from ..errors import UnknownScene
from .fileformat import Constraint, Document, dump_document, parse_document
from .model import Scene, build_scene, loads
from .validate import FULL, Options, run_checks, validate

BUILTINS = ("s1_r3", "s1_r6", "so3_r3r3", "so3_split_counterexample", "nonintegrable_demo")

_cache: dict = {}


def builtin_text(name: str) -> str:
    if name not in BUILTINS:
        raise UnknownScene(f"unknown scene {name!r}; built-in scenes are {', '.join(BUILTINS)}")
    return resources.files(__package__).joinpath("data", f"{name}.scene").read_text(encoding="utf-8")


def builtin(name: str) -> Scene:
    # scenes are immutable, so one instance per name is shared
    if name not in _cache:
        _cache[name] = loads(builtin_text(name))
    return _cache[name]


def dumps(scene: Scene) -> str:
    return scene.dumps()


__all__ = [
    "BUILTINS",
    "FULL",
    "Constraint",
    "Document",
    "Options",
    "Scene",
    "build_scene",
    "builtin",
    "builtin_text",
    "dump_document",
    "dumps",
    "loads",
    "parse_document",
    "run_checks",
    "validate",
]
