"""The bundled reconfigurable face-recognition example and its assets."""

from __future__ import annotations

from importlib import resources

from ..model import parse_model
from ..sim.stimulus import Stimulus
from ..sim.transform import to_fpga, transform_group_sw, transform_move_module
from .template import ENTRIES, KERNELS, PIXELS, SW_MODULES, face_pixels, face_source

__all__ = [
    "ENTRIES", "KERNELS", "PIXELS", "SW_MODULES", "face_pixels", "face_source",
    "face_model", "face_stimulus", "level2", "level3", "asset_path", "asset_text",
]


def face_model(frames: int = 10):
    return parse_model(face_source(frames))


def face_stimulus(frames: int = 10) -> Stimulus:
    return Stimulus({"CAMERA.sensor": tuple(face_pixels(frames))}, seed=0)


def level2(model):
    """Transformation 1: the eight non-kernel modules become one SW task."""
    return transform_group_sw(model, SW_MODULES)


def level3(model):
    for name, ctx in KERNELS:
        model = transform_move_module(model, name, to_fpga(ctx))
    return model


def asset_path(name: str):
    return resources.files(__package__).joinpath(name)


def asset_text(name: str) -> str:
    return asset_path(name).read_text(encoding="utf-8")
