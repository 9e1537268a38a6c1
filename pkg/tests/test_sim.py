import math

import pytest
from hypothesis import given, settings, strategies as st

from reconflow.bundled import (ENTRIES, PIXELS, SW_MODULES, asset_text, face_model, face_pixels,
                               face_stimulus, level2, level3)
from reconflow.errors import LivelockGuard, ReconfigViolation, RuntimeTrap
from reconflow.model import parse_model
from reconflow.sim import (EQUAL, Divergence, Stimulus, Trace, compare_traces, simulate_timed,
                           simulate_untimed, transform_group_sw)

from conftest import LEVEL3, PRODUCER_CONSUMER, SW_TO_HW, corpus_models, model_level


def test_producer_consumer_untimed():
    t = simulate_untimed(parse_model(PRODUCER_CONSUMER))
    assert t.sequences() == {"ch": [1, 2, 3], "C.y": [1, 2, 3]}
    assert not t.deadlocked


def test_sw_to_hw_timing():
    # compute 5 on the CPU, a one-word transfer at 5..6, then 3 cycles of HW work
    trace, stats = simulate_timed(parse_model(SW_TO_HW), level=2)
    assert stats.total_cycles == 9
    assert stats.bus_busy_cycles == 1
    assert stats.bus_utilization == pytest.approx(1 / 9)
    assert [(t.kind, t.start_cycle, t.end_cycle) for t in stats.transactions] == [("DATA", 5, 6)]
    assert trace.times == [6, 9]


def test_level3_reconfiguration_timing():
    # 100-word bitstream, 50-cycle call, result word, 80-word bitstream,
    # 20-cycle call, result word: 100 + 50 + 1 + 80 + 20 + 1
    trace, stats = simulate_timed(parse_model(LEVEL3), level=3)
    assert trace.sequences()["SWT.o"] == [7]
    assert stats.total_cycles == 252
    assert stats.reconfig_count == 2
    assert stats.bitstream_words_total == 180
    assert stats.bus_busy_cycles == 182


def test_missing_reconfigure_raises_violation():
    m = parse_model(LEVEL3.replace("    reconfigure config2\n", ""))
    with pytest.raises(ReconfigViolation) as ei:
        simulate_timed(m, level=3)
    v = ei.value
    assert (v.fn, v.loaded, v.cycle, v.module) == ("ROOT", "config1", 151, "SWT")
    trace, _ = simulate_timed(m, level=3, catch_aborts=True)
    assert trace.aborted


def test_reconfigure_to_loaded_context_is_free():
    src = LEVEL3.replace("    reconfigure config2\n", "    reconfigure config1\n    reconfigure config2\n")
    _, stats = simulate_timed(parse_model(src), level=3)
    assert stats.reconfig_count == 2


def test_division_by_zero_traps():
    m = parse_model("system s module M { port in i port out o behavior { read i -> x write o <- 1 / x } }")
    with pytest.raises(RuntimeTrap):
        simulate_untimed(m, Stimulus({"M.i": (0,)}))
    t = simulate_untimed(m, Stimulus({"M.i": (0,)}), catch_traps=True)
    assert t.aborted and t.records == []


def test_deadlock_is_reported():
    from conftest import CROSS_BLOCKING
    t = simulate_untimed(parse_model(CROSS_BLOCKING))
    assert t.deadlocked and t.records == []


def test_cycle_cap():
    with pytest.raises(LivelockGuard):
        simulate_timed(parse_model(SW_TO_HW), level=2, cycle_cap=3)


def test_compare_traces_reports_first_divergence():
    a = Trace([("x", 0, 1), ("x", 1, 2), ("y", 0, 5)], ("x", "y"))
    b = Trace([("y", 0, 5), ("x", 0, 1), ("x", 1, 3)], ("x", "y"))
    assert compare_traces(a, a) == EQUAL
    assert compare_traces(a, b) == Divergence("x", 1, 2, 3)
    c = Trace([("x", 0, 1)], ("x",))
    assert compare_traces(a, c) == Divergence("x", 1, 2, None)
    assert compare_traces(c, a) == Divergence("x", 1, None, 2)


def test_trace_text_round_trip():
    t = simulate_untimed(parse_model(PRODUCER_CONSUMER))
    assert Trace.loads(t.dumps()).records == t.records


def test_stimulus_determinism_and_dict_round_trip():
    s = Stimulus({"A.x": (1, 2)}, seed=4)
    a, b = s.source("A.x"), s.source("A.x")
    assert [a.next() for _ in range(5)] == [b.next() for _ in range(5)]
    assert Stimulus.from_dict(s.to_dict()) == s


# -- corpus-wide properties -----------------------------------------------------

CORPUS = corpus_models()


@pytest.mark.parametrize("name, model", CORPUS, ids=[n for n, _ in CORPUS])
def test_timed_matches_untimed(name, model):
    level = model_level(model)
    for seed in range(5):
        stim = Stimulus(seed=seed)
        ref = simulate_untimed(model, stim)
        trace, stats = simulate_timed(model, stim, level)
        assert compare_traces(ref, trace) == EQUAL
        assert not trace.deadlocked
        assert stats.bus_busy_cycles == sum(t.end_cycle - t.start_cycle for t in stats.transactions)
        spans = sorted((t.start_cycle, t.end_cycle) for t in stats.transactions)
        assert all(e0 <= s1 for (_, e0), (s1, _) in zip(spans, spans[1:]))
        for t in stats.transactions:
            per_word = model.bus.cycles_per_word
            assert t.end_cycle - t.start_cycle == t.words * per_word
        assert trace.times == sorted(trace.times)
        assert 0 <= stats.bus_utilization <= 1


@pytest.mark.parametrize("name, model", CORPUS, ids=[n for n, _ in CORPUS])
def test_simulation_is_deterministic(name, model):
    level = model_level(model)
    stim = Stimulus(seed=11)
    t1, s1 = simulate_timed(model, stim, level)
    t2, s2 = simulate_timed(model, stim, level)
    assert t1.records == t2.records and t1.times == t2.times
    assert s1.to_dict() == s2.to_dict()


@pytest.mark.parametrize("name, model", CORPUS, ids=[n for n, _ in CORPUS])
def test_grouping_everything_removes_data_traffic(name, model):
    if model.config_map is not None and model.config_map.contexts:
        pytest.skip("FPGA placements stay where they are")
    grouped = transform_group_sw(model, [m.name for m in model.modules])
    _, stats = simulate_timed(grouped, Stimulus(seed=1), 2)
    assert not [t for t in stats.transactions if t.kind == "DATA"]


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-1000, 1000), min_size=3, max_size=3), st.integers(1, 4))
def test_pipeline_capacity_does_not_change_data(values, cap):
    src = """system p
    bus main_bus cycles_per_word 2
    module A { port in i port out o behavior { repeat 3 { read i -> x compute a 2 write o <- x * 3 } } }
    module B { port in i port out o behavior { repeat 3 { read i -> x compute b 7 write o <- x - 1 } } }
    channel ab A.o -> B.i capacity %d
    place A sw
    place B hw
    """ % cap
    m = parse_model(src)
    stim = Stimulus({"A.i": tuple(values)})
    trace, stats = simulate_timed(m, stim, 2)
    assert trace.sequences()["B.o"] == [v * 3 - 1 for v in values]
    assert stats.max_occupancy["ab"] <= cap


# -- bundled example ---------------------------------------------------------------

def _isqrt_floor(x: int) -> int:
    return math.isqrt(x) if x >= 0 else 0


def face_oracle(frames: int) -> dict:
    """Straight-line recomputation of the bundled pipeline's outputs."""
    pix = face_pixels(frames)
    labels, dists = [], []
    for f in range(frames):
        p = [min(max(v, 0), 255) for v in pix[f * PIXELS:(f + 1) * PIXELS]]
        filt = [(p[0] + p[1]) // 2, (p[2] + p[3]) // 2]
        f0, f1 = filt[0], filt[1] - filt[0]
        scores = []
        for k in range(ENTRIES):
            v, w = k * 53 + 17, k * 29 + 101
            e0, e1 = v % 256, w % 512 - 256
            d = (f0 - e0) ** 2 + (f1 - e1) ** 2
            scores.append(_isqrt_floor(d))
        best = min(scores)
        labels.append(scores.index(best))
        dists.append(best)
    return {"DISPLAY.label": labels, "DISPLAY.distance": dists}


def test_bundled_golden_trace_matches_oracle():
    t = simulate_untimed(face_model(10), face_stimulus(10))
    seq = t.sequences()
    oracle = face_oracle(10)
    assert seq["DISPLAY.label"] == oracle["DISPLAY.label"]
    assert seq["DISPLAY.distance"] == oracle["DISPLAY.distance"]
    assert t.dumps() == asset_text("face_golden.trace")


def test_bundled_levels_agree():
    stim = face_stimulus(10)
    golden = Trace.loads(asset_text("face_golden.trace"))
    l2 = level2(face_model(10))
    l3 = level3(l2)
    t2, s2 = simulate_timed(l2, stim, 2)
    t3, s3 = simulate_timed(l3, stim, 3)
    assert compare_traces(golden, t2) == EQUAL
    assert compare_traces(golden, t3) == EQUAL
    # ten frames, two downloads each, 100 + 80 words per frame
    assert s3.reconfig_count == 20
    assert s3.bitstream_words_total == 1800
    assert s2.reconfig_count == 0
    assert set(SW_MODULES) <= set(s3.busy_cycles)
