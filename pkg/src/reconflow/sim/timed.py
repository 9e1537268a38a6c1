"""Level-2/3 discrete-event simulation with integer cycle timestamps.

HW and FPGA modules each own an executor and progress concurrently.  SW
modules share one CPU, visited in cyclic declaration order; the CPU stays
with a module while it computes or waits on a bus transfer and moves on
when the module blocks on a channel or finishes.

Every channel write whose endpoints sit in different partitions is a
one-word DATA transaction on the bus; the item lands in the FIFO when the
transfer completes and the matching read costs nothing.  The bus grants
requests in order of request cycle, ties broken by module declaration
index.  At level 3 ``reconfigure`` downloads a bitstream over the bus and
``callfpga`` checks the loaded context.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field

from ..errors import LivelockGuard, ReconfigViolation, RuntimeTrap, UnannotatedCompute
from ..model import ast
from ..model.ast import Placement
from .interp import E_CALL, E_COMPUTE, E_READ, E_RECONF, E_WRITE, Fault, compile_model
from .stimulus import Stimulus
from .trace import Trace

DEFAULT_CYCLE_CAP = 10 ** 8

READY, RUNNING, WAIT, BLOCKED, DONE = range(5)


@dataclass(frozen=True)
class Transaction:
    kind: str  # 'DATA' | 'BITSTREAM'
    initiator: str
    words: int
    start_cycle: int
    end_cycle: int


@dataclass
class DeadlineResult:
    property_id: str
    observed: int | None
    bound: int
    passed: bool
    src: str = ""
    dst: str = ""

    def to_dict(self) -> dict:
        return {"property_id": self.property_id, "src": self.src, "dst": self.dst,
                "observed": self.observed, "bound": self.bound, "pass": self.passed}


@dataclass
class StatsReport:
    total_cycles: int = 0
    bus_busy_cycles: int = 0
    bus_utilization: float = 0.0
    reconfig_count: int = 0
    bitstream_words_total: int = 0
    max_occupancy: dict = field(default_factory=dict)
    busy_cycles: dict = field(default_factory=dict)
    deadline_results: list = field(default_factory=list)
    transactions: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "total_cycles": self.total_cycles,
            "bus_busy_cycles": self.bus_busy_cycles,
            "bus_utilization": self.bus_utilization,
            "reconfig_count": self.reconfig_count,
            "bitstream_words_total": self.bitstream_words_total,
            "max_occupancy": dict(sorted(self.max_occupancy.items())),
            "busy_cycles": dict(self.busy_cycles),
            "deadline_results": [d.to_dict() for d in self.deadline_results],
        }

    def text(self) -> str:
        lines = [
            f"total_cycles          {self.total_cycles}",
            f"bus_busy_cycles       {self.bus_busy_cycles}",
            f"bus_utilization       {self.bus_utilization:.6f}",
            f"reconfig_count        {self.reconfig_count}",
            f"bitstream_words_total {self.bitstream_words_total}",
            "max_occupancy:",
        ]
        lines += [f"  {k:20s} {v}" for k, v in sorted(self.max_occupancy.items())]
        lines.append("busy_cycles:")
        lines += [f"  {k:20s} {v}" for k, v in self.busy_cycles.items()]
        if self.deadline_results:
            lines.append("deadlines:")
            for d in self.deadline_results:
                verdict = "PASS" if d.passed else "FAIL"
                lines.append(f"  {d.property_id:20s} observed={d.observed} bound={d.bound} {verdict}")
        return "\n".join(lines) + "\n"


def deadline_latency(trace: Trace, src: str, dst: str) -> int | None:
    """Worst source-to-sink latency, pairing output ``j`` with the first
    input of its rate-proportional block.  ``None`` when nothing pairs."""
    ts, td = trace.commit_times(src), trace.commit_times(dst)
    if not ts or not td:
        return None
    worst = None
    for j, t in enumerate(td):
        i = j * len(ts) // len(td)
        lat = t - ts[i]
        worst = lat if worst is None else max(worst, lat)
    return worst


class _Proc:
    __slots__ = ("name", "idx", "gen", "part", "routes", "inputs", "state", "reply",
                 "blocked", "sw")

    def __init__(self, name, idx, gen, part, routes, inputs):
        self.name, self.idx, self.gen, self.part = name, idx, gen, part
        self.routes, self.inputs = routes, inputs
        self.state = READY
        self.reply = None
        self.blocked = None  # ('r', ch) | ('w', ch, value, stmt)
        self.sw = part is Placement.SW


class TimedSimulator:
    def __init__(self, model: ast.SystemModel, stim: Stimulus | None, level: int,
                 fault: Fault | None = None, cycle_cap: int = DEFAULT_CYCLE_CAP,
                 cache: dict | None = None):
        if level not in (2, 3):
            raise ValueError("timed simulation runs at level 2 or 3")
        self.model, self.level, self.cap = model, level, cycle_cap
        stim = stim or Stimulus()
        self.compiled = compile_model(model, fault, None, cache)
        self.cpw = model.bus.cycles_per_word if model.bus is not None else 1
        self.cmap = model.config_map
        self.now = 0
        self.heap: list = []
        self.seq = 0
        self.stats = StatsReport()
        self.trace = Trace(channels=tuple(model.observable_channels()), times=[])
        self.counts: dict = {}
        self.fifos = {c.name: deque() for c in model.channels}
        self.caps = {c.name: c.capacity for c in model.channels}
        self.inflight = {c.name: 0 for c in model.channels}
        self.readers: dict = {}
        self.writers: dict = {}
        self.crossing: dict = {}
        for c in model.channels:
            self.stats.max_occupancy[c.name] = 0
            self.readers[c.name] = c.dst[0]
            self.writers[c.name] = c.src[0]
            self.crossing[c.name] = self._crosses(c.src[0], c.dst[0])
        self.loaded = model.initial_context
        self.bus_free_at = 0
        self.bus_queue: list = []
        self.kernel_free_at: dict = {}
        self.busy = {m.name: 0 for m in model.modules}

        bindings = model.port_bindings()
        self.procs: dict = {}
        for idx, m in enumerate(model.modules):
            if not m.behavior.body:
                continue
            env = {p: stim.source(f"{m.name}.{p}").next() for p in m.behavior.params}
            routes, inputs = {}, {}
            for p in m.in_ports:
                ch = bindings.get((m.name, p))
                routes[p] = ch.name if ch is not None else None
                if ch is None:
                    inputs[p] = stim.source(f"{m.name}.{p}")
            for p in m.out_ports:
                ch = bindings.get((m.name, p))
                routes[p] = ch.name if ch is not None else f"{m.name}.{p}"
            part = model.partition(m.name, level) or Placement.HW
            self.procs[m.name] = _Proc(m.name, idx, self.compiled[m.name].run(env), part, routes, inputs)
        self.sw_order = [p for p in self.procs.values() if p.sw]
        self.cpu = None
        self.cpu_last = -1

    # -- infrastructure --------------------------------------------------------
    def _crosses(self, a: str, b: str) -> bool:
        pa = self.model.partition(a, self.level)
        pb = self.model.partition(b, self.level)
        return pa is not None and pb is not None and pa != pb

    def schedule(self, t: int, phase: int, fn, *args):
        self.seq += 1
        heapq.heappush(self.heap, (t, phase, self.seq, fn, args))

    def request_bus(self, proc: _Proc, kind: str, words: int, on_done, on_grant=None):
        self.seq += 1
        self.bus_queue.append((self.now, proc.idx, self.seq, proc.name, kind, words, on_done, on_grant))
        self.schedule(max(self.now, self.bus_free_at), 1, self._arbitrate)

    def _arbitrate(self):
        if self.bus_free_at > self.now or not self.bus_queue:
            return
        self.bus_queue.sort(key=lambda r: r[:3])
        _, _, _, who, kind, words, on_done, on_grant = self.bus_queue.pop(0)
        end = self.now + words * self.cpw
        tx = Transaction(kind, who, words, self.now, end)
        self.stats.transactions.append(tx)
        self.stats.bus_busy_cycles += end - self.now
        self.busy[who] += end - self.now
        self.bus_free_at = end
        if on_grant is not None:
            on_grant()
        self.schedule(end, 0, on_done)
        self.schedule(end, 1, self._arbitrate)

    def wake(self, proc: _Proc):
        proc.state = READY
        if proc.sw:
            if self.cpu is None:
                self.schedule(self.now, 0, self._dispatch)
        else:
            self.schedule(self.now, 0, self.advance, proc)

    def _dispatch(self):
        if self.cpu is not None or not self.sw_order:
            return
        n = len(self.sw_order)
        for k in range(1, n + 1):
            p = self.sw_order[(self.cpu_last + k) % n]
            if p.state == READY:
                self.cpu = p
                self.cpu_last = (self.cpu_last + k) % n
                self.advance(p)
                return

    def _release(self, proc: _Proc):
        if proc.sw and self.cpu is proc:
            self.cpu = None
            self.schedule(self.now, 0, self._dispatch)

    def resume(self, proc: _Proc, value=None):
        proc.reply = value
        proc.state = READY
        self.advance(proc)

    # -- channels --------------------------------------------------------------
    def _push(self, ch: str, value: int):
        q = self.fifos[ch]
        q.append(value)
        if len(q) > self.stats.max_occupancy[ch]:
            self.stats.max_occupancy[ch] = len(q)
        self._record(ch, value)
        reader = self.procs.get(self.readers[ch])
        if reader is not None and reader.state == BLOCKED and reader.blocked[0] == "r" and reader.blocked[1] == ch:
            self.wake(reader)

    def _record(self, ch: str, value: int):
        n = self.counts.get(ch, 0)
        self.counts[ch] = n + 1
        self.trace.records.append((ch, n, value))
        self.trace.times.append(self.now)

    def _slot_freed(self, ch: str):
        writer = self.procs.get(self.writers[ch])
        if writer is not None and writer.state == BLOCKED and writer.blocked[0] == "w" and writer.blocked[1] == ch:
            self.wake(writer)

    def _arrive(self, proc: _Proc, ch: str, value: int):
        self.inflight[ch] -= 1
        self._push(ch, value)
        self.resume(proc)

    # -- process execution -----------------------------------------------------
    def advance(self, proc: _Proc):
        """Run ``proc`` through zero-time statements until it waits, blocks or ends."""
        if proc.state in (DONE, WAIT):
            return
        if proc.sw and self.cpu is not proc:
            return
        if proc.state == BLOCKED:
            return
        proc.state = RUNNING
        if proc.blocked is not None:
            blk = proc.blocked
            proc.blocked = None
            if blk[0] == "r":
                if not self._try_read(proc, blk[1]):
                    return
            elif not self._try_write(proc, blk[1], blk[2]):
                return
            if proc.state == WAIT:
                return
        while True:
            try:
                eff = proc.gen.send(proc.reply)
            except StopIteration:
                proc.state = DONE
                self._release(proc)
                return
            proc.reply = None
            tag = eff[0]
            if tag == E_READ:
                ch = proc.routes[eff[1]]
                if ch is None:
                    proc.reply = proc.inputs[eff[1]].next()
                elif not self._try_read(proc, ch):
                    return
            elif tag == E_WRITE:
                ch = proc.routes[eff[1]]
                if ch not in self.fifos:
                    self._record(ch, eff[2])
                elif not self._try_write(proc, ch, eff[2]):
                    return
                if proc.state == WAIT:
                    return
            elif tag == E_COMPUTE:
                cycles = eff[2]
                if cycles is None:
                    raise UnannotatedCompute(f"{proc.name}: compute {eff[1]} has no cycle annotation")
                if cycles > 0:
                    self.busy[proc.name] += cycles
                    proc.state = WAIT
                    self._at(self.now + cycles, self.resume, proc)
                    return
            elif tag == E_RECONF:
                if self.level >= 3 and eff[1] != self.loaded:
                    self._reconfigure(proc, eff[1])
                    return
            elif tag == E_CALL:
                self._call(proc, eff[1], eff[2], eff[3])
                return

    def _at(self, t: int, fn, *args):
        if t > self.cap:
            raise LivelockGuard(f"simulation exceeded {self.cap} cycles")
        self.schedule(t, 0, fn, *args)

    def _try_read(self, proc: _Proc, ch: str) -> bool:
        q = self.fifos[ch]
        if not q:
            proc.state = BLOCKED
            proc.blocked = ("r", ch)
            self._release(proc)
            return False
        proc.reply = q.popleft()
        self._slot_freed(ch)
        return True

    def _try_write(self, proc: _Proc, ch: str, value: int) -> bool:
        cap = self.caps[ch]
        if cap is not None and len(self.fifos[ch]) + self.inflight[ch] >= cap:
            proc.state = BLOCKED
            proc.blocked = ("w", ch, value)
            self._release(proc)
            return False
        if self.crossing[ch]:
            self.inflight[ch] += 1
            proc.state = WAIT
            self.request_bus(proc, "DATA", 1, lambda: self._arrive(proc, ch, value))
        else:
            self._push(ch, value)
        return True

    def _reconfigure(self, proc: _Proc, ctx: str):
        words = self.cmap.bitstream_words(ctx)
        proc.state = WAIT

        def granted():
            self.loaded = None

        def done():
            self.loaded = ctx
            self.stats.reconfig_count += 1
            self.stats.bitstream_words_total += words
            self.resume(proc)
        self.request_bus(proc, "BITSTREAM", words, done, granted)

    def _call(self, proc: _Proc, fn: str, args: tuple, stmt):
        if self.level >= 3 and fn not in self.cmap.functions(self.loaded):
            line, col = stmt.loc
            raise ReconfigViolation(fn, self.loaded, self.now, proc.name, line, col)
        value = self.compiled[fn].call_kernel(args)
        latency = self.cmap.latency(fn) if self.cmap is not None and fn in self.cmap.universe() else 0
        crossing = self._crosses(proc.name, fn)
        proc.state = WAIT

        def run_kernel():
            start = max(self.now, self.kernel_free_at.get(fn, 0))
            end = start + latency
            self.kernel_free_at[fn] = end
            self.busy[fn] += latency
            self._at(end, finish)

        def finish():
            if crossing:
                self.request_bus(proc, "DATA", 1, lambda: self.resume(proc, value))
            else:
                self.resume(proc, value)

        if crossing and args:
            self.request_bus(proc, "DATA", len(args), run_kernel)
        else:
            run_kernel()

    # -- main loop -------------------------------------------------------------
    def run(self) -> tuple[Trace, StatsReport]:
        for p in self.procs.values():
            if not p.sw:
                self.schedule(0, 0, self.advance, p)
        self.schedule(0, 0, self._dispatch)
        heap = self.heap
        while heap:
            t, _, _, fn, args = heapq.heappop(heap)
            if t > self.cap:
                raise LivelockGuard(f"simulation exceeded {self.cap} cycles")
            self.now = t
            fn(*args)
        return self.finish()

    def finish(self) -> tuple[Trace, StatsReport]:
        s = self.stats
        s.total_cycles = self.now
        s.bus_utilization = s.bus_busy_cycles / s.total_cycles if s.total_cycles else 0.0
        s.busy_cycles = dict(self.busy)
        self.trace.deadlocked = any(p.state != DONE for p in self.procs.values())
        return self.trace, s


def simulate_timed(model: ast.SystemModel, stim: Stimulus | None = None, level: int = 2, *,
                   deadlines=(), fault: Fault | None = None, cycle_cap: int = DEFAULT_CYCLE_CAP,
                   cache: dict | None = None, catch_aborts: bool = False) -> tuple[Trace, StatsReport]:
    """Timed simulation at level 2 or 3.

    ``deadlines`` are DEADLINE properties evaluated into
    ``StatsReport.deadline_results``.  With ``catch_aborts`` a trap or
    reconfiguration violation ends the run and the partial trace is returned
    with ``aborted`` set instead of raising.
    """
    sim = TimedSimulator(model, stim, level, fault, cycle_cap, cache)
    try:
        trace, stats = sim.run()
    except (RuntimeTrap, ReconfigViolation) as exc:
        if not catch_aborts:
            raise
        trace, stats = sim.finish()
        trace.aborted = str(exc)
        trace.deadlocked = False
    for prop in deadlines:
        observed = deadline_latency(trace, prop.src, prop.dst)
        passed = observed is not None and observed <= prop.bound
        stats.deadline_results.append(DeadlineResult(prop.id, observed, prop.bound, passed, prop.src, prop.dst))
    return trace, stats
