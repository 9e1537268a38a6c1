import pytest
from hypothesis import given, settings, strategies as st

from reconflow.bundled import asset_text, face_model, face_stimulus
from reconflow.coverage import (BIT, BRANCH, CONDITION, STATEMENT, coverage_universe, fault_sites,
                                generate_tests, golden_expectations, measure_coverage,
                                parse_properties, pcc)
from reconflow.errors import PropertyFailsOnGoldenModel
from reconflow.model import parse_model
from reconflow.sim import Stimulus, simulate_untimed

from conftest import corpus_models

PASS_THROUGH = parse_model("system s module M { port in i port out o behavior { read i -> x write o <- x } }")

BRANCH_MODEL = parse_model("""system s module M { port in i port out o behavior {
    read i -> x
    if x > 0 { y = 1 } else { y = 2 }
    write o <- y } }""")

AND_MODEL = parse_model("""system s module M { port in i port out o behavior {
    read i -> a
    read i -> b
    if a > 0 and b > 0 { y = 1 } else { y = 0 }
    write o <- y } }""")


def stim(*values):
    return Stimulus({"M.i": tuple(values)})


def test_fault_universe():
    assert len(fault_sites(PASS_THROUGH)) == 64
    assert len(fault_sites(BRANCH_MODEL)) == 128


@pytest.mark.parametrize("values, expect", [((0,), 0.5), ((-1,), 0.5), ((5,), 0.5)])
def test_pass_through_bit_coverage(values, expect):
    # a fault on x changes the output exactly when the forced bit differs
    assert measure_coverage(PASS_THROUGH, [stim(*values)]).bit_pct == expect


def test_pass_through_two_values_cover_everything():
    assert measure_coverage(PASS_THROUGH, [stim(0), stim(-1)]).bit_pct == 1.0


def test_structural_metrics():
    one = measure_coverage(BRANCH_MODEL, [stim(1)], bits=False)
    assert one.counts[STATEMENT] == (4, 5)
    assert one.branch_pct == 0.5 and one.condition_pct == 0.5
    assert one.bit_pct is None
    both = measure_coverage(BRANCH_MODEL, [stim(1), stim(-1)], bits=False)
    assert both.statement_pct == both.branch_pct == both.condition_pct == 1.0


def test_short_circuit_conditions():
    # a <= 0 skips the second atom
    r = measure_coverage(AND_MODEL, [stim(-1, 5)], bits=False)
    assert r.counts[CONDITION] == (1, 4)
    r = measure_coverage(AND_MODEL, [stim(-1, 5), stim(1, 1), stim(1, -1)], bits=False)
    assert r.counts[CONDITION] == (4, 4)


def test_uncovered_lists_match_counts():
    r = measure_coverage(BRANCH_MODEL, [stim(1)])
    for metric in (STATEMENT, BRANCH, CONDITION, BIT):
        hit, total = r.counts[metric]
        assert len(r.uncovered[metric]) == total - hit


def test_universe_numbers_kernels_after_behavior():
    m = parse_model("""system s bus b
      context c bitstream 1 { fn K latency 1 }
      module T { port out o behavior { reconfigure c callfpga K(1) -> r write o <- r } }
      module K { kernel (a) -> r { if a > 0 { r = a } else { r = 0 } } }
      place T sw place K fpga""")
    u = coverage_universe(m)
    assert [k for k, _ in u.statements] == [("T", 0), ("T", 1), ("T", 2), ("K", 0), ("K", 1), ("K", 2)]
    r = measure_coverage(m, [Stimulus()], bits=False)
    assert r.counts[STATEMENT] == (5, 6)


CORPUS = dict(corpus_models())


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(0, 1000), min_size=1, max_size=4), st.integers(0, 1000))
def test_adding_a_stimulus_never_lowers_coverage(seeds, extra):
    model = CORPUS["branchy"]
    bench = [Stimulus(seed=s) for s in seeds]
    a = measure_coverage(model, bench, bits=False)
    b = measure_coverage(model, bench + [Stimulus(seed=extra)], bits=False)
    for metric in (STATEMENT, BRANCH, CONDITION):
        assert b.value(metric) >= a.value(metric)


@settings(max_examples=15, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=1, max_size=3), st.integers(-5, 5))
def test_bit_coverage_is_monotone(values, extra):
    bench = [stim(v) for v in values]
    a = measure_coverage(BRANCH_MODEL, bench)
    b = measure_coverage(BRANCH_MODEL, bench + [stim(extra)])
    assert b.bit_pct >= a.bit_pct
    assert a.detected <= b.detected


def test_parallel_detection_matches_serial():
    bench = [stim(3), stim(-2)]
    assert measure_coverage(BRANCH_MODEL, bench, workers=2).detected == measure_coverage(BRANCH_MODEL, bench).detected


# -- test generation -------------------------------------------------------------

def test_generation_reaches_full_statement_coverage():
    m = parse_model("system s module M { port out o behavior { write o <- 1 } }")
    kept, report = generate_tests(m, STATEMENT, budget=5)
    assert len(kept) == 1 and report.statement_pct == 1.0


@pytest.mark.parametrize("metric", [STATEMENT, BRANCH, CONDITION])
def test_generation_keeps_only_improving_stimuli(metric):
    model = CORPUS["branchy"]
    kept, report = generate_tests(model, metric, budget=20, seed=3)
    values = [measure_coverage(model, kept[:k + 1], bits=False).value(metric) for k in range(len(kept))]
    assert values == sorted(set(values))  # strictly increasing
    assert measure_coverage(model, kept, bits=False).value(metric) == report.value(metric)
    again, _ = generate_tests(model, metric, budget=20, seed=3)
    assert again == kept


def test_generation_for_bits():
    kept, report = generate_tests(BRANCH_MODEL, BIT, budget=6, seed=1)
    assert kept
    assert measure_coverage(BRANCH_MODEL, kept).bit_pct == report.bit_pct


def test_generation_rejects_bad_arguments():
    with pytest.raises(ValueError):
        generate_tests(PASS_THROUGH, "PATH", budget=1)
    with pytest.raises(ValueError):
        generate_tests(PASS_THROUGH, STATEMENT, budget=0)


# -- property coverage -----------------------------------------------------------

@pytest.mark.parametrize("value", [0, 7, -3])
def test_pcc_of_golden_expectations_equals_bit_coverage(value):
    # pinning every output exactly fails on precisely the faults that change the trace
    s = stim(value)
    g = simulate_untimed(BRANCH_MODEL, s)
    r = pcc(BRANCH_MODEL, golden_expectations(g), [s])
    bits = measure_coverage(BRANCH_MODEL, [s])
    assert r.property_coverage_pct == bits.bit_pct
    assert {k for k, ids in r.detected_by.items() if ids} == set(bits.detected)


def test_pcc_of_no_properties_is_zero():
    r = pcc(PASS_THROUGH, [], [stim(0)])
    assert r.property_coverage_pct == 0.0 and len(r.undetected) == 64


def test_pcc_sign_bit_invariant():
    props = parse_properties("invariant M.o >= 0")
    r = pcc(PASS_THROUGH, props, [stim(5)])
    # only forcing bit 31 to one makes the output negative
    assert r.covered == 1
    assert r.detected_by[("M", "x", 31, "STUCK1")] == ["p1"]


def test_pcc_rejects_failing_property():
    with pytest.raises(PropertyFailsOnGoldenModel):
        pcc(PASS_THROUGH, parse_properties("invariant M.o > 10"), [stim(5)])


@settings(max_examples=10, deadline=None)
@given(st.lists(st.integers(-9, 9), min_size=1, max_size=2), st.integers(-20, 20))
def test_pcc_is_dominated_by_bit_coverage(values, bound):
    bench = [stim(v) for v in values]
    goldens = [simulate_untimed(BRANCH_MODEL, s).sequences()["M.o"] for s in bench]
    lo = min(min(g) for g in goldens)
    props = parse_properties(f"invariant M.o >= {min(lo, bound)}")
    r = pcc(BRANCH_MODEL, props, bench)
    bits = measure_coverage(BRANCH_MODEL, bench)
    covered = {k for k, ids in r.detected_by.items() if ids}
    assert covered <= set(bits.detected)
    assert r.property_coverage_pct <= bits.bit_pct


def test_bundled_property_coverage_one_frame():
    model = face_model(1)
    props = [p for p in parse_properties(asset_text("face.props")) if p.kind == "INVARIANT"]
    r = pcc(model, props, [face_stimulus(1)])
    bits = measure_coverage(model, [face_stimulus(1)])
    assert 0 < r.property_coverage_pct <= bits.bit_pct
    assert {k for k, ids in r.detected_by.items() if ids} <= set(bits.detected)
