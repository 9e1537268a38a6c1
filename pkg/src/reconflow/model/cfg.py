"""Statement-level control-flow graphs for module behaviors.

Loops are laid out do-while style: ``repeat n`` becomes a head node, the
body, and from every body exit both a back edge to the head and a loop-exit
edge.  The exit edge therefore never bypasses the body, which matches the
``n >= 1`` guarantee.  A ``repeat 1`` gets no back edge at all.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import ast

ENTRY = "entry"
EXIT = "exit"


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    label: str | None = None  # 'then' | 'else' | None
    # loop events in traversal order: ('enter'|'back'|'exit', head_node)
    events: tuple = ()

    @property
    def is_back(self) -> bool:
        return any(kind == "back" for kind, _ in self.events)


@dataclass
class CFG:
    nodes: list = field(default_factory=list)  # index -> Stmt | ENTRY | EXIT
    edges: list = field(default_factory=list)
    entry: int = 0
    exit: int = 1
    loop_counts: dict = field(default_factory=dict)  # head node -> repeat count
    loop_parent: dict = field(default_factory=dict)  # node -> innermost enclosing head or None

    def succ(self, n: int) -> list[Edge]:
        return self._succ.get(n, [])

    def pred(self, n: int) -> list[Edge]:
        return self._pred.get(n, [])

    def finalize(self):
        self._succ: dict = {}
        self._pred: dict = {}
        for e in self.edges:
            self._succ.setdefault(e.src, []).append(e)
            self._pred.setdefault(e.dst, []).append(e)
        return self

    @property
    def back_edges(self) -> list[Edge]:
        return [e for e in self.edges if e.is_back]

    def stmt(self, n: int):
        return self.nodes[n]

    def loc(self, n: int):
        node = self.nodes[n]
        return getattr(node, "loc", (0, 0))

    def describe(self, n: int) -> str:
        node = self.nodes[n]
        if node in (ENTRY, EXIT):
            return node
        name = type(node).__name__.lower()
        if isinstance(node, ast.Reconfigure):
            return f"reconfigure {node.context}"
        if isinstance(node, ast.CallFpga):
            return f"callfpga {node.fn}"
        if isinstance(node, ast.Repeat):
            return f"repeat {node.count}"
        if isinstance(node, ast.If):
            from .printer import format_expr
            return f"if {format_expr(node.cond)}"
        return name

    def multiplicity(self, n: int) -> int:
        """Upper bound on how often node ``n`` executes in one run."""
        # a do-while head is passed once per iteration
        k = self.loop_counts.get(n, 1)
        h = self.loop_parent.get(n)
        while h is not None:
            k *= self.loop_counts[h]
            h = self.loop_parent.get(h)
        return k


def build_cfg(program: ast.Program | tuple) -> CFG:
    body = program.body if isinstance(program, ast.Program) else tuple(program)
    g = CFG(nodes=[ENTRY, EXIT])
    # pending edges: (src, label, events)

    def connect(pending, dst, extra=()):
        for src, label, events in pending:
            g.edges.append(Edge(src, dst, label, events + extra))

    def add(node, parent) -> int:
        g.nodes.append(node)
        idx = len(g.nodes) - 1
        g.loop_parent[idx] = parent
        return idx

    def build(stmts, pending, parent):
        for s in stmts:
            n = add(s, parent)
            if isinstance(s, ast.Repeat):
                connect(pending, n, (("enter", n),))
                g.loop_counts[n] = s.count
                ends = build(s.body, [(n, None, ())], n)
                if s.count >= 2:
                    connect(ends, n, (("back", n),))
                pending = [(src, label, events + (("exit", n),)) for src, label, events in ends]
            elif isinstance(s, ast.If):
                connect(pending, n)
                pending = build(s.then, [(n, "then", ())], parent) + build(s.orelse, [(n, "else", ())], parent)
            else:
                connect(pending, n)
                pending = [(n, None, ())]
        return pending

    g.loop_parent[0] = None
    g.loop_parent[1] = None
    connect(build(body, [(0, None, ())], None), 1)
    return g.finalize()


def dominators(g: CFG) -> dict:
    """Iterative dominator sets; small graphs only."""
    nodes = range(len(g.nodes))
    dom = {n: set(nodes) for n in nodes}
    dom[g.entry] = {g.entry}
    changed = True
    while changed:
        changed = False
        for n in nodes:
            if n == g.entry:
                continue
            preds = [e.src for e in g.pred(n)]
            new = set.intersection(*(dom[p] for p in preds)) if preds else set()
            new = new | {n}
            if new != dom[n]:
                dom[n] = new
                changed = True
    return dom
