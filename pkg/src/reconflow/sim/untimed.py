"""Level-1 functional simulation.

Modules run cooperatively in declaration order; each runs until it blocks on
an empty channel or finishes.  Channels are unbounded, so writes never block.
Reconfiguration statements have no functional effect here and FPGA calls
evaluate their kernel directly.
"""

from __future__ import annotations

from collections import deque

from ..errors import RuntimeTrap
from ..model import ast
from .interp import E_CALL, E_READ, E_WRITE, CoverageRecorder, Fault, compile_model
from .stimulus import Stimulus
from .trace import Trace


def simulate_untimed(model: ast.SystemModel, stim: Stimulus | None = None, *,
                     fault: Fault | None = None, cov: CoverageRecorder | None = None,
                     cache: dict | None = None, catch_traps: bool = False) -> Trace:
    """Run the model to quiescence and return its trace.

    With ``catch_traps`` a :class:`RuntimeTrap` ends the run early and the
    partial trace is returned with ``aborted`` set; otherwise it propagates.
    """
    stim = stim or Stimulus()
    compiled = compile_model(model, fault, cov, cache)
    bindings = model.port_bindings()
    fifos = {c.name: deque() for c in model.channels}
    counts: dict = {}
    trace = Trace(channels=tuple(model.observable_channels()))
    records = trace.records

    procs = []
    for m in model.modules:
        if not m.behavior.body:
            continue
        cm = compiled[m.name]
        env = {p: stim.source(f"{m.name}.{p}").next() for p in m.behavior.params}
        inputs = {}
        routes = {}
        for p in m.in_ports:
            ch = bindings.get((m.name, p))
            routes[p] = ch.name if ch is not None else None
            if ch is None:
                inputs[p] = stim.source(f"{m.name}.{p}")
        for p in m.out_ports:
            ch = bindings.get((m.name, p))
            routes[p] = ch.name if ch is not None else f"{m.name}.{p}"
        procs.append([m.name, cm.run(env), None, routes, inputs, False])  # ..., pending, done

    def step(proc) -> bool:
        """Advance one process as far as possible; True if it made progress."""
        _, gen, pending, routes, inputs, _ = proc
        reply = None
        if pending is not None:
            q = fifos[pending]
            if not q:
                return False
            reply = q.popleft()
            proc[2] = None
        while True:
            try:
                eff = gen.send(reply)
            except StopIteration:
                proc[5] = True
                return True
            reply = None
            tag = eff[0]
            if tag == E_READ:
                ch = routes[eff[1]]
                if ch is None:
                    reply = inputs[eff[1]].next()
                else:
                    q = fifos[ch]
                    if not q:
                        proc[2] = ch
                        return True
                    reply = q.popleft()
            elif tag == E_WRITE:
                ch = routes[eff[1]]
                if ch in fifos:
                    fifos[ch].append(eff[2])
                n = counts.get(ch, 0)
                counts[ch] = n + 1
                records.append((ch, n, eff[2]))
            elif tag == E_CALL:
                reply = compiled[eff[1]].call_kernel(eff[2])
            # compute / reconfigure: no functional effect

    live = procs
    try:
        while live:
            progress = False
            for proc in live:
                if not proc[5] and step(proc):
                    progress = True
            live = [p for p in live if not p[5]]
            if not progress:
                trace.deadlocked = True
                break
    except RuntimeTrap as trap:
        if not catch_traps:
            raise
        trace.aborted = str(trap)
    return trace
