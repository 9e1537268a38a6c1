import itertools
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from reconflow.reach import INFEASIBLE, OPTIMAL, UNBOUNDED, solve_lp
from reconflow.reach.simplex import EQ, GE, LE


def test_textbook_maximum():
    # max 3x + 2y st x + y <= 4, x + 3y <= 6, x <= 3  ->  x=3, y=1, value 11
    res = solve_lp(2, [({0: 1, 1: 1}, LE, 4), ({0: 1, 1: 3}, LE, 6), ({0: 1}, LE, 3)], {0: 3, 1: 2})
    assert res.status == OPTIMAL
    assert res.value == 11
    assert res.x == {0: 3, 1: 1}


def test_fractional_optimum_is_exact():
    # max x + y st 2x + y <= 4, x + 3y <= 5  ->  x=7/5, y=6/5
    res = solve_lp(2, [({0: 2, 1: 1}, LE, 4), ({0: 1, 1: 3}, LE, 5)], {0: 1, 1: 1})
    assert res.value == Fraction(13, 5)
    assert res.x == {0: Fraction(7, 5), 1: Fraction(6, 5)}


def test_infeasible_and_unbounded():
    assert solve_lp(1, [({0: 1}, GE, 2), ({0: 1}, LE, 1)]).status == INFEASIBLE
    assert solve_lp(2, [({0: 1, 1: -1}, LE, 1)], {0: 1}).status == UNBOUNDED
    assert solve_lp(1, [({0: 1}, EQ, -1)]).status == INFEASIBLE


def test_minimize_and_equalities():
    # min x + 2y st x + y == 3, y >= 1  ->  x=2, y=1, value 4
    res = solve_lp(2, [({0: 1, 1: 1}, EQ, 3), ({1: 1}, GE, 1)], {0: 1, 1: 2}, maximize=False)
    assert res.status == OPTIMAL and res.value == 4


def test_redundant_equalities():
    res = solve_lp(2, [({0: 1, 1: 1}, EQ, 2), ({0: 2, 1: 2}, EQ, 4)], {0: 1})
    assert res.status == OPTIMAL and res.value == 2


def test_degenerate_cycling_example_terminates():
    # Beale's example cycles under the largest-coefficient rule
    cons = [
        ({0: Fraction(1, 4), 1: -8, 2: -1, 3: 9}, LE, 0),
        ({0: Fraction(1, 2), 1: -12, 2: Fraction(-1, 2), 3: 3}, LE, 0),
        ({2: 1}, LE, 1),
    ]
    res = solve_lp(4, cons, {0: Fraction(3, 4), 1: -20, 2: Fraction(1, 2), 3: -6})
    assert res.status == OPTIMAL and res.value == Fraction(5, 4)


# -- brute-force vertex oracle ------------------------------------------------------

def _solve_square(a, b):
    """Gaussian elimination over the rationals; None when singular."""
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(r)] for row, r in zip(a, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col] / m[col][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [m[i][n] / m[i][i] for i in range(n)]


def vertex_oracle(n, rows, objective):
    """Best objective over all basic feasible points (the region is boxed)."""
    hyper = [(list(c), r) for c, s, r in rows]
    hyper += [([1 if j == i else 0 for j in range(n)], 0) for i in range(n)]
    best = None
    for pick in itertools.combinations(range(len(hyper)), n):
        x = _solve_square([hyper[i][0] for i in pick], [hyper[i][1] for i in pick])
        if x is None or any(v < 0 for v in x):
            continue
        ok = all(
            (s == LE and sum(a * v for a, v in zip(c, x)) <= r)
            or (s == GE and sum(a * v for a, v in zip(c, x)) >= r)
            or (s == EQ and sum(a * v for a, v in zip(c, x)) == r)
            for c, s, r in rows)
        if ok:
            val = sum(a * v for a, v in zip(objective, x))
            best = val if best is None else max(best, val)
    return best


coef = st.integers(-3, 3)


@st.composite
def boxed_lps(draw):
    n = draw(st.integers(1, 3))
    rows = []
    for _ in range(draw(st.integers(1, 4))):
        rows.append((tuple(draw(coef) for _ in range(n)), draw(st.sampled_from([LE, GE, EQ])), draw(st.integers(-4, 6))))
    rows += [(tuple(1 if j == i else 0 for j in range(n)), LE, 5) for i in range(n)]
    obj = tuple(draw(coef) for _ in range(n))
    return n, rows, obj


def _as_lp(rows):
    return [({j: a for j, a in enumerate(c) if a}, s, r) for c, s, r in rows]


@settings(max_examples=300, deadline=None)
@given(boxed_lps())
def test_matches_vertex_enumeration(lp):
    n, rows, obj = lp
    expect = vertex_oracle(n, rows, obj)
    res = solve_lp(n, _as_lp(rows), {j: a for j, a in enumerate(obj)})
    if expect is None:
        assert res.status == INFEASIBLE
    else:
        assert res.status == OPTIMAL
        assert res.value == expect
        x = [res.x.get(j, 0) for j in range(n)]
        assert sum(a * v for a, v in zip(obj, x)) == expect


@settings(max_examples=150, deadline=None)
@given(boxed_lps(), st.randoms(use_true_random=False))
def test_row_order_does_not_matter(lp, rnd):
    n, rows, obj = lp
    shuffled = list(rows)
    rnd.shuffle(shuffled)
    objective = {j: a for j, a in enumerate(obj)}
    a = solve_lp(n, _as_lp(rows), objective)
    b = solve_lp(n, _as_lp(shuffled), objective)
    assert a.status == b.status and a.value == b.value
