"""Test stimuli: explicit value sequences plus a seed for everything else."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

GEN_LOW, GEN_HIGH = -(1 << 15), (1 << 15) - 1


@dataclass(frozen=True)
class Stimulus:
    """Values for unbound input ports and behavior parameters.

    Keys are ``MODULE.port`` or ``MODULE.param``.  Reads past the end of a
    supplied sequence, and keys with no sequence, draw from a generator
    seeded by ``(seed, key)`` so every run is reproducible.
    """

    inputs: dict = field(default_factory=dict)
    seed: int = 0

    def source(self, key: str) -> "InputSource":
        return InputSource(list(self.inputs.get(key, ())), random.Random(f"{self.seed}:{key}"))

    def to_dict(self) -> dict:
        return {"seed": self.seed, "inputs": {k: list(v) for k, v in sorted(self.inputs.items())}}

    @classmethod
    def from_dict(cls, data: dict) -> "Stimulus":
        inputs = {k: tuple(int(v) for v in vals) for k, vals in data.get("inputs", {}).items()}
        return cls(inputs, int(data.get("seed", 0)))

    def __hash__(self):
        return hash((self.seed, tuple(sorted((k, tuple(v)) for k, v in self.inputs.items()))))


class InputSource:
    __slots__ = ("values", "pos", "rng")

    def __init__(self, values, rng):
        self.values, self.pos, self.rng = values, 0, rng

    def next(self) -> int:
        if self.pos < len(self.values):
            v = self.values[self.pos]
        else:
            v = self.rng.randint(GEN_LOW, GEN_HIGH)
        self.pos += 1
        return v


def load_stimuli(path) -> list[Stimulus]:
    """Read one stimulus object, a list of them, or ``{"stimuli": [...]}``."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if isinstance(data, dict) and "stimuli" in data:
        data = data["stimuli"]
    if isinstance(data, dict):
        data = [data]
    return [Stimulus.from_dict(d) for d in data]
