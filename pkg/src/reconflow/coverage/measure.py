"""Coverage of testbenches: structural metrics and bit-fault detectability."""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from ..errors import RuntimeTrap
from ..model import ast
from ..model.printer import format_expr
from ..sim.interp import CoverageRecorder, Fault
from ..sim.stimulus import Stimulus
from ..sim.trace import EQUAL, compare_traces
from ..sim.untimed import simulate_untimed

STATEMENT = "STATEMENT"
BRANCH = "BRANCH"
CONDITION = "CONDITION"
BIT = "BIT"
METRICS = (STATEMENT, BRANCH, CONDITION, BIT)


def fault_sites(model: ast.SystemModel) -> list[Fault]:
    """All stuck-at sites: 64 per variable, in (module, variable, bit, polarity) order."""
    return [Fault(m.name, v, bit, one)
            for m in model.modules for v in m.variables()
            for bit in range(32) for one in (False, True)]


def _number(stmts, start: int, out: list):
    """Pre-order statement ids, matching the interpreter's numbering."""
    sid = start
    for s in stmts:
        out.append((sid, s))
        sid += 1
        if isinstance(s, ast.If):
            sid = _number(s.then, sid, out)
            sid = _number(s.orelse, sid, out)
        elif isinstance(s, ast.Repeat):
            sid = _number(s.body, sid, out)
    return sid


@dataclass
class Universe:
    statements: list = field(default_factory=list)  # (key, description)
    branches: list = field(default_factory=list)
    conditions: list = field(default_factory=list)


def coverage_universe(model: ast.SystemModel) -> Universe:
    u = Universe()
    for m in model.modules:
        numbered: list = []
        nxt = _number(m.behavior.body, 0, numbered)
        if m.kernel is not None:
            _number(m.kernel.body, nxt, numbered)
        for sid, s in numbered:
            where = f"{m.name} {s.loc[0]}:{s.loc[1]}"
            u.statements.append(((m.name, sid), f"{where} {type(s).__name__.lower()}"))
            if isinstance(s, ast.If):
                cond = format_expr(s.cond)
                for outcome in (True, False):
                    arm = "then" if outcome else "else"
                    u.branches.append(((m.name, sid, outcome), f"{where} if {cond} -> {arm}"))
                for i, a in enumerate(ast.atoms(s.cond)):
                    for outcome in (True, False):
                        u.conditions.append(((m.name, sid, i, outcome),
                                             f"{where} {format_expr(a)} {str(outcome).lower()}"))
    return u


def _pct(hit: int, total: int) -> float:
    return hit / total if total else 1.0


@dataclass
class CoverageReport:
    statement_pct: float
    branch_pct: float
    condition_pct: float
    bit_pct: float | None  # None when bit coverage was not measured
    counts: dict = field(default_factory=dict)  # metric -> (covered, total)
    uncovered: dict = field(default_factory=dict)  # metric -> [descriptions]
    detected: frozenset = frozenset()  # fault keys
    stimuli: int = 0

    def value(self, metric: str) -> float:
        return {STATEMENT: self.statement_pct, BRANCH: self.branch_pct,
                CONDITION: self.condition_pct, BIT: self.bit_pct}[metric]

    def to_dict(self) -> dict:
        return {
            "stimuli": self.stimuli,
            "statement_pct": self.statement_pct,
            "branch_pct": self.branch_pct,
            "condition_pct": self.condition_pct,
            "bit_pct": self.bit_pct,
            "counts": {k: list(v) for k, v in self.counts.items()},
            "uncovered": self.uncovered,
        }

    def text(self) -> str:
        lines = [f"stimuli     {self.stimuli}"]
        for metric in METRICS:
            if metric not in self.counts:
                continue
            hit, total = self.counts[metric]
            lines.append(f"{metric.lower():11s} {hit}/{total} ({100 * _pct(hit, total):.1f}%)")
        for metric, items in self.uncovered.items():
            if items:
                lines.append(f"uncovered {metric.lower()}:")
                lines += [f"  {x}" for x in items]
        return "\n".join(lines) + "\n"


def _fault_name(f: Fault) -> str:
    return f"{f.module}.{f.var}[{f.bit}] {f.polarity}"


class Campaign:
    """Golden runs over a testbench plus incremental fault detection."""

    def __init__(self, model: ast.SystemModel):
        self.model = model
        self.universe = coverage_universe(model)
        self.faults = fault_sites(model)
        self.cov = CoverageRecorder()
        self.stimuli: list = []
        self.goldens: list = []
        self.detected: set = set()
        self.cache: dict = {}

    def golden(self, stim: Stimulus, cov: CoverageRecorder | None = None):
        try:
            return simulate_untimed(self.model, stim, cov=cov, cache=None if cov else self.cache)
        except RuntimeTrap as e:
            e.stimulus = stim
            raise

    def structural(self, cov: CoverageRecorder) -> dict:
        u = self.universe
        return {
            STATEMENT: {k for k, _ in u.statements if k in cov.statements},
            BRANCH: {k for k, _ in u.branches if k in cov.branches},
            CONDITION: {k for k, _ in u.conditions if k in cov.conditions},
        }

    def detects(self, faults, stims, goldens) -> set:
        return _detect(self.model, faults, stims, goldens, self.cache)

    def add(self, stim: Stimulus, *, bits: bool = True, workers: int = 1):
        golden = self.golden(stim, self.cov)
        self.stimuli.append(stim)
        self.goldens.append(golden)
        if bits:
            todo = [f for f in self.faults if f.key() not in self.detected]
            self.detected |= run_detection(self.model, todo, [stim], [golden], workers, self.cache)

    def report(self, bits: bool = True) -> CoverageReport:
        u = self.universe
        hit = self.structural(self.cov)
        counts = {
            STATEMENT: (len(hit[STATEMENT]), len(u.statements)),
            BRANCH: (len(hit[BRANCH]), len(u.branches)),
            CONDITION: (len(hit[CONDITION]), len(u.conditions)),
        }
        uncovered = {
            STATEMENT: [d for k, d in u.statements if k not in hit[STATEMENT]],
            BRANCH: [d for k, d in u.branches if k not in hit[BRANCH]],
            CONDITION: [d for k, d in u.conditions if k not in hit[CONDITION]],
        }
        bit_pct = None
        if bits:
            counts[BIT] = (len(self.detected), len(self.faults))
            uncovered[BIT] = [_fault_name(f) for f in self.faults if f.key() not in self.detected]
            bit_pct = _pct(len(self.detected), len(self.faults))
        return CoverageReport(
            _pct(*counts[STATEMENT]), _pct(*counts[BRANCH]), _pct(*counts[CONDITION]), bit_pct,
            counts, uncovered, frozenset(self.detected), len(self.stimuli))


def _detect(model, faults, stims, goldens, cache=None) -> set:
    """Keys of faults whose injection changes the trace on some stimulus."""
    cache = cache if cache is not None else {}
    found = set()
    for f in faults:
        for stim, golden in zip(stims, goldens):
            faulty = simulate_untimed(model, stim, fault=f, cache=cache, catch_traps=True)
            if compare_traces(golden, faulty) != EQUAL:
                found.add(f.key())
                break
    return found


def run_detection(model, faults, stims, goldens, workers: int = 1, cache=None) -> set:
    """Fault campaign, optionally spread over worker processes."""
    if workers <= 1 or len(faults) < 2:
        return _detect(model, faults, stims, goldens, cache)
    chunks = [faults[i::workers] for i in range(workers)]
    found = set()
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_detect, [model] * workers, chunks, [stims] * workers, [goldens] * workers):
            found |= part
    return found


def measure_coverage(model: ast.SystemModel, testbench, *, bits: bool = True,
                     workers: int = 1) -> CoverageReport:
    """Statement, branch, condition and (optionally) bit coverage of a testbench."""
    camp = Campaign(model)
    for stim in testbench:
        camp.add(stim, bits=False)
    if bits:
        camp.detected = run_detection(model, camp.faults, camp.stimuli, camp.goldens, workers, camp.cache)
    return camp.report(bits)


def generate_tests(model: ast.SystemModel, metric: str = STATEMENT, budget: int = 100,
                   seed: int = 0, *, workers: int = 1):
    """Greedy random generation: keep a stimulus only if it raises ``metric``.

    Candidates are ``Stimulus(seed=s)`` with ``s`` drawn from ``seed``, so the
    retained set replays to the same coverage.  Returns the retained stimuli
    and the final coverage report.
    """
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric}")
    if budget < 1:
        raise ValueError("budget must be at least 1")
    bits = metric == BIT
    rng = random.Random(seed)
    camp = Campaign(model)
    kept: list = []
    best = camp.report(bits).value(metric)  # the empty testbench
    for _ in range(budget):
        stim = Stimulus(seed=rng.randrange(2**31))
        probe = CoverageRecorder(set(camp.cov.statements), set(camp.cov.branches), set(camp.cov.conditions))
        golden = camp.golden(stim, probe)
        if bits:
            todo = [f for f in camp.faults if f.key() not in camp.detected]
            new = run_detection(model, todo, [stim], [golden], workers, camp.cache)
            value = _pct(len(camp.detected | new), len(camp.faults))
        else:
            hit = camp.structural(probe)[metric]
            u = camp.universe
            total = {STATEMENT: u.statements, BRANCH: u.branches, CONDITION: u.conditions}[metric]
            value = _pct(len(hit), len(total))
        if value > best:
            kept.append(stim)
            camp.cov = probe
            camp.stimuli.append(stim)
            camp.goldens.append(golden)
            if bits:
                camp.detected |= new
            best = value
        if best >= 1.0:
            break
    return kept, camp.report(bits)
