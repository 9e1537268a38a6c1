import pytest
from hypothesis import given, settings, strategies as st

from reconflow.bundled import face_model, face_stimulus, level2, level3
from reconflow.errors import UnannotatedCompute
from reconflow.model import ast, build_cfg, parse_model
from reconflow.reach import FAIL, PASS, deadline_check, node_costs
from reconflow.sim import Stimulus, simulate_timed

from conftest import SW_TO_HW, corpus_models, model_level


def wcet_of(body: str, level: int = 2, bound: int = 10**9):
    m = parse_model("system s module M { port in i port out o behavior { read i -> x %s } }" % body)
    g = build_cfg(m.module("M").behavior)
    return deadline_check(g, g.entry, g.exit, bound, node_costs(m, "M", g, level))


@pytest.mark.parametrize("body, expect", [
    ("compute a 3 compute b 5", 8),
    ("if x { compute a 4 } else { compute b 9 }", 9),
    ("repeat 3 { compute a 2 }", 6),
    ("repeat 2 { repeat 3 { if x { compute a 1 } } compute b 10 }", 26),
])
def test_hand_computed(body, expect):
    assert wcet_of(body).wcet == expect


def test_bound_decides_status():
    assert wcet_of("compute a 3", bound=3).status == PASS
    assert wcet_of("compute a 3", bound=2).status == FAIL


def test_unannotated_compute_is_rejected():
    with pytest.raises(UnannotatedCompute):
        wcet_of("compute a")


def test_annotation_overrides_inline_cycles():
    m = parse_model("system s module M { annotate a 7 behavior { compute a 2 } }")
    g = build_cfg(m.module("M").behavior)
    assert deadline_check(g, g.entry, g.exit, 100, node_costs(m, "M", g)).wcet == 7


def test_bus_crossings_cost_a_word():
    m = parse_model(SW_TO_HW)
    # level 2: P's write and C's read cross the bus; level 1 has no partitions
    for name, l2, l1 in (("P", 6, 5), ("C", 4, 3)):
        g = build_cfg(m.module(name).behavior)
        assert deadline_check(g, g.entry, g.exit, 100, node_costs(m, name, g, 2)).wcet == l2
        assert deadline_check(g, g.entry, g.exit, 100, node_costs(m, name, g, 1)).wcet == l1


def test_unreachable_sink():
    m = parse_model("system s module M { behavior { compute a 1 compute b 2 } }")
    g = build_cfg(m.module("M").behavior)
    v = deadline_check(g, 3, 2, 10, node_costs(m, "M", g))
    assert v.wcet is None and v.status == FAIL


# -- exhaustive oracle ---------------------------------------------------------------

def programs(depth=3):
    leaf = st.builds(ast.Compute, st.just("w"), st.integers(0, 9))
    if depth == 0:
        return st.lists(leaf, min_size=1, max_size=3).map(tuple)
    sub = programs(depth - 1)
    stmt = st.one_of(
        leaf,
        st.builds(ast.If, st.just(ast.Var("x")), sub, st.one_of(st.just(()), sub)),
        st.builds(ast.Repeat, st.integers(1, 3), sub),
    )
    return st.lists(stmt, min_size=1, max_size=3).map(tuple)


def worst(stmts) -> int:
    total = 0
    for s in stmts:
        if isinstance(s, ast.Compute):
            total += s.cycles
        elif isinstance(s, ast.If):
            total += max(worst(s.then), worst(s.orelse))
        elif isinstance(s, ast.Repeat):
            total += s.count * worst(s.body)
    return total


@settings(max_examples=200, deadline=None)
@given(programs())
def test_matches_structural_worst_case(body):
    mod = ast.ModuleDef("M", behavior=ast.Program((), body))
    m = ast.SystemModel("s", (mod,))
    g = build_cfg(mod.behavior)
    assert deadline_check(g, g.entry, g.exit, 0, node_costs(m, "M", g)).wcet == worst(body)


# -- against simulation --------------------------------------------------------------

def _kernels_called_only_by(model, name):
    callers: dict = {}
    for m in model.modules:
        for s in ast.walk(m.behavior.body):
            if isinstance(s, ast.CallFpga):
                callers.setdefault(s.fn, set()).add(m.name)
    return [k for k, who in callers.items() if who == {name}]


CORPUS = corpus_models()


@pytest.mark.parametrize("name, model", CORPUS, ids=[n for n, _ in CORPUS])
def test_wcet_covers_simulated_busy_time(name, model):
    level = model_level(model)
    if level == 1:
        pytest.skip("no timing without placements")
    for seed in range(4):
        _, stats = simulate_timed(model, Stimulus(seed=seed), level)
        for m in model.modules:
            if not m.behavior.body:
                continue
            g = build_cfg(m.behavior)
            w = deadline_check(g, g.entry, g.exit, 0, node_costs(model, m.name, g, level)).wcet
            kernels = sum(stats.busy_cycles.get(k, 0) for k in _kernels_called_only_by(model, m.name))
            assert w >= stats.busy_cycles.get(m.name, 0) + kernels


def test_single_module_wcet_bounds_total_cycles():
    model = dict(CORPUS)["single"]
    g = build_cfg(model.module("SOLO").behavior)
    w = deadline_check(g, g.entry, g.exit, 0, node_costs(model, "SOLO", g, 2)).wcet
    for seed in range(10):
        _, stats = simulate_timed(model, Stimulus(seed=seed), 2)
        assert w >= stats.total_cycles


def test_bundled_match_is_tight_at_level2():
    model = level2(face_model(10))
    _, stats = simulate_timed(model, face_stimulus(10), 2)
    g = build_cfg(model.module("MATCH").behavior)
    w = deadline_check(g, g.entry, g.exit, 0, node_costs(model, "MATCH", g, 2)).wcet
    # per entry: DISTANCE 50 + 5 words + collect 3, ROOT 20 + 2 words + rank 2
    assert w == 10 * 20 * ((50 + 5 + 3) + (20 + 2 + 2)) == 16400
    assert w == stats.busy_cycles["MATCH"] + stats.busy_cycles["DISTANCE"] + stats.busy_cycles["ROOT"]


def test_bundled_level3_adds_bitstreams():
    model = level3(level2(face_model(10)))
    g = build_cfg(model.module("MATCH").behavior)
    w3 = deadline_check(g, g.entry, g.exit, 0, node_costs(model, "MATCH", g, 3)).wcet
    assert w3 == 16400 + 10 * (100 + 80)
