"""Petri-net abstraction of a system's communication structure.

Each behavior module contributes one control place per CFG node and one
transition per CFG edge.  Bound channels contribute an item place, and
bounded channels also a slot place holding the free capacity.  Data is
abstracted away, so both arms of every branch are always enabled.

Literal loops of two or more iterations get a pair of counter places
(``cnt`` / ``done``): entering the loop deposits ``n-1`` tokens in ``cnt``,
each back edge moves one token to ``done``, and the exit edge consumes
``n-1`` tokens from ``done``.  The net then runs every loop exactly ``n``
times instead of an arbitrary number, which is what makes deadlock and
buffer-bound proofs on pipelines go through.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..model import ast
from ..model.cfg import CFG, ENTRY, EXIT, Edge, build_cfg


@dataclass(frozen=True)
class Transition:
    name: str
    pre: dict  # place index -> weight
    post: dict
    module: str | None = None


@dataclass
class PetriNet:
    places: list = field(default_factory=list)
    transitions: list = field(default_factory=list)
    m0: list = field(default_factory=list)
    bounds: list = field(default_factory=list)  # per transition: int or None
    control: dict = field(default_factory=dict)  # module -> [place indices]
    terminal: dict = field(default_factory=dict)  # module -> exit place
    item: dict = field(default_factory=dict)  # channel -> place
    slot: dict = field(default_factory=dict)  # channel -> place
    # control place -> places that must be empty for it to be blocked
    blocking: dict = field(default_factory=dict)

    def add_place(self, name: str, tokens: int = 0) -> int:
        self.places.append(name)
        self.m0.append(tokens)
        return len(self.places) - 1

    def add_transition(self, name, pre, post, bound=None, module=None) -> int:
        self.transitions.append(Transition(name, dict(pre), dict(post), module))
        self.bounds.append(bound)
        return len(self.transitions) - 1

    def place_index(self, name: str) -> int:
        return self.places.index(name)

    def incidence(self) -> list[list[int]]:
        """C[p][t] = post - pre."""
        c = [[0] * len(self.transitions) for _ in self.places]
        for t, tr in enumerate(self.transitions):
            for p, w in tr.pre.items():
                c[p][t] -= w
            for p, w in tr.post.items():
                c[p][t] += w
        return c

    def enabled(self, marking, t: int) -> bool:
        return all(marking[p] >= w for p, w in self.transitions[t].pre.items())

    def fire(self, marking, t: int) -> tuple:
        m = list(marking)
        tr = self.transitions[t]
        for p, w in tr.pre.items():
            m[p] -= w
        for p, w in tr.post.items():
            m[p] += w
        return tuple(m)

    def export(self) -> str:
        """Plain-text place/transition listing."""
        def bag(d):
            return " ".join(f"{self.places[p]}*{w}" if w != 1 else self.places[p]
                            for p, w in sorted(d.items()))
        lines = [f"place {n} {k}" for n, k in zip(self.places, self.m0)]
        lines += [f"trans {t.name} | {bag(t.pre)} | {bag(t.post)}" for t in self.transitions]
        return "\n".join(lines) + "\n"


def net_modules(model: ast.SystemModel) -> list[ast.ModuleDef]:
    """Modules with a behavior of their own; pure kernels have none."""
    return [m for m in model.modules if not (m.kernel is not None and not m.behavior.body)]


def _skeleton_edges(g: CFG, keep: set) -> list[Edge]:
    """Edges between kept nodes, contracting paths through dropped nodes.

    Loop events of dropped heads are discarded; events of kept heads are
    accumulated along the contracted path.
    """
    out = set()
    for u in sorted(keep):
        seen = set()
        stack = [(e, ()) for e in g.succ(u)]
        while stack:
            e, ev = stack.pop()
            ev = ev + tuple(x for x in e.events if x[1] in keep)
            if e.dst in keep:
                out.add(Edge(u, e.dst, None, ev))
                continue
            if (e.dst, ev) in seen:
                continue
            seen.add((e.dst, ev))
            stack.extend((f, ev) for f in g.succ(e.dst))
    return sorted(out, key=lambda e: (e.src, e.dst, e.events))


def _comm_nodes(model: ast.SystemModel, mod: ast.ModuleDef, g: CFG) -> dict:
    """node -> (kind, channel) for reads and writes on bound channels."""
    bind = model.port_bindings()
    out = {}
    for n, s in enumerate(g.nodes):
        if isinstance(s, ast.Read) and (mod.name, s.port) in bind:
            out[n] = ("read", bind[(mod.name, s.port)])
        elif isinstance(s, ast.Write) and (mod.name, s.port) in bind:
            out[n] = ("write", bind[(mod.name, s.port)])
    return out


def extract_net(model: ast.SystemModel, *, reduce: bool = False) -> PetriNet:
    """Build the communication net.

    With ``reduce`` only entry, exit, channel accesses and heads of loops
    containing them get control places; the rest of the CFG is contracted.
    Reachability of channel markings and of blocking configurations is the
    same in both nets, but the reduced one gives much smaller LPs.
    """
    net = PetriNet()
    for ch in model.channels:
        net.item[ch.name] = net.add_place(f"{ch.name}.items")
        if ch.capacity is not None:
            net.slot[ch.name] = net.add_place(f"{ch.name}.slots", ch.capacity)

    for mod in net_modules(model):
        g = build_cfg(mod.behavior)
        comm = _comm_nodes(model, mod, g)
        heads = {h for h, n in g.loop_counts.items() if n >= 2}
        if reduce:
            keep = {g.entry, g.exit} | set(comm)
            for n in list(comm):
                h = g.loop_parent.get(n)
                while h is not None:
                    if h in heads:
                        keep.add(h)
                    h = g.loop_parent.get(h)
            edges = _skeleton_edges(g, keep)
            nodes = sorted(keep)
        else:
            edges = g.edges
            nodes = range(len(g.nodes))
        place = {}
        for n in nodes:
            label = g.nodes[n] if g.nodes[n] in (ENTRY, EXIT) else f"n{n}"
            place[n] = net.add_place(f"{mod.name}.{label}", 1 if n == g.entry else 0)
        net.control[mod.name] = [place[n] for n in nodes]
        net.terminal[mod.name] = place[g.exit]
        counters = {}
        for h in sorted(heads):
            if h in place:
                counters[h] = (net.add_place(f"{mod.name}.n{h}.cnt"), net.add_place(f"{mod.name}.n{h}.done"))

        for n, (kind, ch) in comm.items():
            if kind == "read":
                net.blocking[place[n]] = [net.item[ch.name]]
            elif ch.capacity is not None:
                net.blocking[place[n]] = [net.slot[ch.name]]

        for e in edges:
            pre = {place[e.src]: 1}
            post = {place[e.dst]: 1}

            def add(d, p, w):
                d[p] = d.get(p, 0) + w

            if e.src in comm:
                kind, ch = comm[e.src]
                if kind == "read":
                    add(pre, net.item[ch.name], 1)
                    if ch.name in net.slot:
                        add(post, net.slot[ch.name], 1)
                else:
                    if ch.name in net.slot:
                        add(pre, net.slot[ch.name], 1)
                    add(post, net.item[ch.name], 1)
            for kind, h in e.events:
                if h not in counters:
                    continue
                cnt, done = counters[h]
                k = g.loop_counts[h] - 1
                if kind == "enter":
                    add(post, cnt, k)
                elif kind == "back":
                    add(pre, cnt, 1)
                    add(post, done, 1)
                else:
                    add(pre, done, k)
            name = f"{mod.name}.t{e.src}_{e.dst}"
            dup = sum(1 for t in net.transitions if t.name.split("#")[0] == name)
            if dup:
                name += f"#{dup}"
            net.add_transition(name, pre, post, g.multiplicity(e.src), mod.name)
    return net
