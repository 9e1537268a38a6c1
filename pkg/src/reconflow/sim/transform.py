"""Architecture rewrites: grouping modules into one SW task and moving a
module between partitions.  Reconfiguration calls are never inserted; they
are part of the hand-written SW."""

from __future__ import annotations

import dataclasses

from ..errors import TransformError, UnknownContext, UnknownModule
from ..model import ast
from ..model.ast import Placement
from ..model.validate import validate

TO_HW = ("hw", None)
TO_SW = ("sw", None)


def to_fpga(ctx: str) -> tuple:
    return ("fpga", ctx)


def internal_channels(model: ast.SystemModel) -> list[str]:
    """Channels whose endpoints share the SW partition (no bus traffic)."""
    return [c.name for c in model.channels
            if model.placements.get(c.src[0]) is Placement.SW
            and model.placements.get(c.dst[0]) is Placement.SW]


def transform_group_sw(model: ast.SystemModel, module_names, bus: ast.BusDef | None = None) -> ast.SystemModel:
    names = set(module_names)
    for n in sorted(names):
        if not model.has_module(n):
            raise UnknownModule(n)
    placements = {
        m.name: (Placement.SW if m.name in names else Placement.HW) for m in model.modules
    }
    new_bus = model.bus or bus or ast.BusDef("main_bus", 1)
    return dataclasses.replace(model, placements=placements, bus=new_bus)


def transform_move_module(model: ast.SystemModel, name: str, direction: tuple,
                          level: int | None = None) -> ast.SystemModel:
    if not model.has_module(name):
        raise UnknownModule(name)
    kind, ctx = direction
    if kind == "fpga":
        cmap = model.config_map
        if cmap is None or cmap.get(ctx) is None:
            raise UnknownContext(ctx)
        if model.module(name).kernel is None or name not in cmap.functions(ctx):
            raise TransformError(f"{name} has no kernel registered in context {ctx}")
    placements = dict(model.placements)
    placements[name] = Placement(kind)
    new = dataclasses.replace(model, placements=placements)
    if kind != "hw" and new.bus is None:
        new = dataclasses.replace(new, bus=ast.BusDef("main_bus", 1))
    if level is None:
        level = 3 if Placement.FPGA in placements.values() else (2 if len(placements) == len(model.modules) else 1)
    diags = validate(new, level)
    if diags:
        raise TransformError("; ".join(d.message for d in diags))
    return new
