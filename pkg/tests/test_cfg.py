from hypothesis import given, settings, strategies as st

from reconflow.model import ast, build_cfg, parse_model
from reconflow.model.cfg import ENTRY, EXIT, dominators


def cfg_of(body: str):
    m = parse_model("system s module M { port in i port out o behavior { %s } }" % body)
    return build_cfg(m.module("M").behavior)


def test_straight_line():
    g = cfg_of("read i -> x compute c 1 write o <- x")
    assert len(g.nodes) == 5
    assert len(g.edges) == 4
    assert g.nodes[0] == ENTRY and g.nodes[1] == EXIT


def test_if_else_without_join_node():
    # branch arms run straight to the successor; there is no separate join node
    g = cfg_of("read i -> x if x > 0 { compute a 1 } else { compute b 2 }")
    assert len(g.nodes) == 6
    assert len(g.edges) == 6
    labels = sorted(e.label for e in g.edges if e.label)
    assert labels == ["else", "then"]


def test_if_without_else_falls_through():
    g = cfg_of("read i -> x if x { compute a 1 }")
    cond = next(n for n, s in enumerate(g.nodes) if isinstance(s, ast.If))
    assert sorted(e.label for e in g.succ(cond)) == ["else", "then"]
    assert any(e.dst == g.exit and e.label == "else" for e in g.succ(cond))


def test_repeat_has_one_back_edge():
    g = cfg_of("repeat 3 { compute a 1 compute b 1 }")
    assert len(g.back_edges) == 1
    head = next(n for n, s in enumerate(g.nodes) if isinstance(s, ast.Repeat))
    assert g.back_edges[0].dst == head
    assert g.multiplicity(head) == 3


def test_repeat_one_has_no_back_edge():
    assert cfg_of("repeat 1 { compute a 1 }").back_edges == []


def test_nested_multiplicity():
    g = cfg_of("repeat 2 { repeat 3 { compute a 1 } compute b 1 }")
    mult = {g.nodes[n].label: g.multiplicity(n) for n, s in enumerate(g.nodes) if isinstance(s, ast.Compute)}
    assert mult == {"a": 6, "b": 2}


# -- random programs ------------------------------------------------------------

def programs(depth=3):
    leaf = st.builds(ast.Compute, st.sampled_from("abc"), st.integers(0, 3))
    if depth == 0:
        return st.lists(leaf, min_size=1, max_size=3).map(tuple)
    sub = programs(depth - 1)
    stmt = st.one_of(
        leaf,
        st.builds(ast.If, st.just(ast.Var("x")), sub, st.one_of(st.just(()), sub)),
        st.builds(ast.Repeat, st.integers(1, 3), sub),
    )
    return st.lists(stmt, min_size=1, max_size=3).map(tuple)


def _count_runs(stmts) -> int:
    """Dynamic statement-instance count along the all-'then' path, from the AST."""
    n = 0
    for s in stmts:
        n += 1
        if isinstance(s, ast.If):
            n += _count_runs(s.then)
        elif isinstance(s, ast.Repeat):
            n += s.count * (_count_runs(s.body) + 1) - 1
    return n


@settings(max_examples=200, deadline=None)
@given(programs())
def test_structure_invariants(body):
    g = build_cfg(body)
    assert len(g.nodes) == 2 + sum(1 for _ in ast.walk(body))
    dom = dominators(g)
    for e in g.back_edges:
        assert e.dst in dom[e.src]
    # one back edge per body exit, all aimed at loops that iterate more than once
    heads = {n for n, s in enumerate(g.nodes) if isinstance(s, ast.Repeat) and s.count >= 2}
    assert {e.dst for e in g.back_edges} == heads
    # every node is reachable from entry and reaches exit
    fwd, todo = {g.entry}, [g.entry]
    while todo:
        for e in g.succ(todo.pop()):
            if e.dst not in fwd:
                fwd.add(e.dst)
                todo.append(e.dst)
    assert fwd == set(range(len(g.nodes)))
    for n in range(len(g.nodes)):
        if n != g.exit:
            assert g.succ(n)


@settings(max_examples=200, deadline=None)
@given(programs())
def test_multiplicity_bounds_a_walk(body):
    # walk the graph choosing 'then' and honouring loop counters; every node's
    # visit count stays within its static multiplicity
    g = build_cfg(body)
    counters: dict = {}
    visits = [0] * len(g.nodes)
    n, steps = g.entry, 0
    while n != g.exit:
        visits[n] += 1
        steps += 1
        out = g.succ(n)
        if isinstance(g.nodes[n], ast.If):
            out = [e for e in out if e.label == "then"]
        chosen = None
        for e in out:
            back = [h for k, h in e.events if k == "back"]
            if back:
                if counters.get(back[0], 0) + 1 < g.loop_counts[back[0]]:
                    chosen = e
                    break
            elif chosen is None:
                chosen = e
        for kind, h in chosen.events:
            if kind == "enter":
                counters[h] = 0
            elif kind == "back":
                counters[h] += 1
        n = chosen.dst
    assert steps - 1 == _count_runs(body)
    for i in range(2, len(g.nodes)):
        assert visits[i] <= g.multiplicity(i)
