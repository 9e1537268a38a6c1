"""Static worst-case latency over literal-bounded CFGs."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import UnannotatedCompute
from ..model import ast
from ..model.cfg import CFG

PASS = "PASS"
FAIL = "FAIL"


@dataclass
class DeadlineVerdict:
    wcet: int | None  # None: sink unreachable from source
    bound: int
    status: str

    def to_dict(self) -> dict:
        return {"wcet": self.wcet, "bound": self.bound, "status": self.status}


def node_costs(model: ast.SystemModel, module: str, cfg: CFG, level: int = 2) -> dict:
    """Per-node cycle cost of one module's statements at a refinement level.

    Channel accesses crossing partitions cost one bus word each way;
    reconfigurations cost the full bitstream; FPGA calls cost the kernel
    latency plus argument and result transfers when they cross the bus.
    """
    mod = model.module(module)
    cpw = model.bus.cycles_per_word if model.bus is not None else 1
    bind = model.port_bindings()

    def crosses(other: str) -> bool:
        if level < 2:
            return False
        a, b = model.partition(module, level), model.partition(other, level)
        return a is not None and b is not None and a != b

    costs = {}
    for n, s in enumerate(cfg.nodes):
        c = 0
        if isinstance(s, ast.Compute):
            cyc = mod.hw_annotation.get(s.label, s.cycles)
            if cyc is None:
                raise UnannotatedCompute(f"{module}: compute {s.label} has no cycle annotation")
            c = cyc
        elif isinstance(s, (ast.Read, ast.Write)) and (module, s.port) in bind:
            ch = bind[(module, s.port)]
            other = ch.dst[0] if ch.src[0] == module else ch.src[0]
            if crosses(other):
                c = cpw
        elif isinstance(s, ast.Reconfigure) and level >= 3 and model.config_map is not None:
            c = model.config_map.bitstream_words(s.context) * cpw
        elif isinstance(s, ast.CallFpga):
            cmap = model.config_map
            if level >= 2 and cmap is not None and s.fn in cmap.universe():
                c = cmap.latency(s.fn)
            if crosses(s.fn):
                c += (len(s.args) + 1) * cpw
        costs[n] = c
    return costs


def deadline_check(cfg: CFG, source: int, sink: int, bound: int, costs: dict) -> DeadlineVerdict:
    """Longest source-to-sink path in the loop-unrolled CFG.

    Unrolling is implicit: a state is a node plus the iteration index of
    every enclosing loop, so the state graph is a DAG whose paths are exactly
    the executions permitted by the literal loop bounds.  Both endpoint
    costs are included.
    """
    entry_state = (cfg.entry, ())
    # explicit topological order by DFS (the unrolled graph can be deep)
    order, seen = [], {entry_state}
    stack = [(entry_state, iter(_succ_states(cfg, entry_state)))]
    while stack:
        st, it = stack[-1]
        nxt = next(it, None)
        if nxt is None:
            stack.pop()
            order.append(st)
        elif nxt not in seen:
            seen.add(nxt)
            stack.append((nxt, iter(_succ_states(cfg, nxt))))
    best: dict = {}  # longest cost from state to any sink occurrence, inclusive
    for st in order:  # reverse topological
        node = st[0]
        tail = max((best[s] for s in _succ_states(cfg, st) if best.get(s) is not None), default=None)
        here = costs.get(node, 0)
        vals = [here] if node == sink else []
        if tail is not None:
            vals.append(here + tail)
        best[st] = max(vals) if vals else None
    cands = [best[s] for s in order if s[0] == source and best[s] is not None]
    wcet = max(cands) if cands else None
    ok = wcet is not None and wcet <= bound
    return DeadlineVerdict(wcet, bound, PASS if ok else FAIL)


def _succ_states(cfg: CFG, st):
    node, iters = st
    for e in cfg.succ(node):
        it = list(iters)
        ok = True
        for kind, h in e.events:
            if kind == "enter":
                it.append((h, 1))
            elif kind == "back":
                hh, k = it[-1]
                if k >= cfg.loop_counts[h]:
                    ok = False
                    break
                it[-1] = (hh, k + 1)
            else:
                hh, k = it[-1]
                if k != cfg.loop_counts[h]:
                    ok = False
                    break
                it.pop()
        if ok:
            yield (e.dst, tuple(it))
