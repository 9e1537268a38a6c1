"""Property coverage: which bit faults does a property set notice?

Once every property holds on the fault-free model, each fault site is
injected in turn and the testbench re-run.  A fault counts as covered when
at least one property fails on some stimulus.  The undetected list says
where the property set is too weak.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from ..errors import PropertyFailsOnGoldenModel, RuntimeTrap
from ..model import ast
from ..sim.interp import Fault
from ..sim.timed import simulate_timed
from ..sim.untimed import simulate_untimed
from .measure import _fault_name, fault_sites
from .properties import DEADLINE, FAIL, check_properties


@dataclass
class PropertyCoverageReport:
    detected_by: dict = field(default_factory=dict)  # fault key -> sorted property ids
    total: int = 0
    undetected: list = field(default_factory=list)  # fault names
    faults: list = field(default_factory=list, repr=False)

    @property
    def covered(self) -> int:
        return sum(1 for ids in self.detected_by.values() if ids)

    @property
    def property_coverage_pct(self) -> float:
        return self.covered / self.total if self.total else 0.0

    def to_dict(self) -> dict:
        return {
            "property_coverage_pct": self.property_coverage_pct,
            "covered": self.covered,
            "total": self.total,
            "detected_by": {_fault_name(f): self.detected_by[f.key()] for f in self.faults
                            if self.detected_by[f.key()]},
            "undetected": self.undetected,
        }

    def text(self) -> str:
        lines = [f"property coverage {self.covered}/{self.total} "
                 f"({100 * self.property_coverage_pct:.1f}%)"]
        if self.undetected:
            lines.append("undetected faults:")
            lines += [f"  {x}" for x in self.undetected]
        return "\n".join(lines) + "\n"


class _Runner:
    """One simulation flavour for the whole campaign: timed when deadlines matter."""

    def __init__(self, model, props, level):
        self.model, self.props = model, list(props)
        deadlines = [p for p in self.props if p.kind == DEADLINE]
        self.level = level if level is not None else (2 if deadlines else 1)
        self.deadlines = deadlines
        self.channels = model.observable_channels()
        self.cache: dict = {}

    def failing(self, stim, fault: Fault | None) -> set:
        if self.level == 1:
            trace = simulate_untimed(self.model, stim, fault=fault, cache=self.cache,
                                     catch_traps=fault is not None)
            stats = None
        else:
            trace, stats = simulate_timed(self.model, stim, self.level, deadlines=self.deadlines,
                                          fault=fault, cache=self.cache, catch_aborts=fault is not None)
        return {r.id for r in check_properties(trace, stats, self.props, self.channels)
                if r.status == FAIL}


def _campaign(runner: _Runner, faults, testbench) -> dict:
    out = {}
    all_ids = {p.id for p in runner.props}
    for f in faults:
        ids: set = set()
        for stim in testbench:
            ids |= runner.failing(stim, f)
            if ids == all_ids:
                break
        out[f.key()] = sorted(ids)
    return out


def pcc(model: ast.SystemModel, props, testbench, *, level: int | None = None,
        workers: int = 1) -> PropertyCoverageReport:
    """Property coverage of ``props`` over ``testbench``.

    Runs are untimed unless a deadline property (or an explicit ``level``)
    asks for timing.  Raises :class:`PropertyFailsOnGoldenModel` when a
    property already fails without any fault.
    """
    testbench = list(testbench)
    runner = _Runner(model, props, level)
    for stim in testbench:
        try:
            bad = runner.failing(stim, None)
        except RuntimeTrap as e:
            e.stimulus = stim
            raise
        if bad:
            raise PropertyFailsOnGoldenModel(sorted(bad)[0])
    faults = fault_sites(model)
    if not runner.props:
        detected = {f.key(): [] for f in faults}
    elif workers <= 1:
        detected = _campaign(runner, faults, testbench)
    else:
        chunks = [faults[i::workers] for i in range(workers)]
        detected = {}
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_campaign, [runner] * workers, chunks, [testbench] * workers):
                detected.update(part)
    return PropertyCoverageReport(
        detected_by=detected, total=len(faults),
        undetected=[_fault_name(f) for f in faults if not detected[f.key()]], faults=faults)
