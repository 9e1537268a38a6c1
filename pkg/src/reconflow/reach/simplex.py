"""Exact rational LP solver: two-phase simplex with Bland's rule.

Dictionary form, sparse rows.  Every basic variable is kept as
``x_b = rhs + sum(coef[j] * x_j)`` over nonbasic ``j``.  Values are Python
ints while they stay integral and :class:`fractions.Fraction` otherwise, so
all arithmetic is exact (net incidence matrices mostly pivot on +-1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

LE, GE, EQ = "<=", ">=", "=="


@dataclass
class LPResult:
    status: str
    value: Fraction | None = None
    x: dict = field(default_factory=dict)  # var index -> value (nonzero only)
    pivots: int = 0


def _q(x):
    """Collapse integral fractions back to int."""
    if type(x) is Fraction and x.denominator == 1:
        return x.numerator
    return x


def _div(n, d):
    if type(n) is int and type(d) is int and n % d == 0:
        return n // d
    return _q(Fraction(n) / d)


class _Dictionary:
    def __init__(self):
        self.rows: dict = {}  # basic var -> (rhs, {nonbasic: coef})
        self.obj_const = 0
        self.obj: dict = {}
        self.pivots = 0

    def pivot(self, enter: int, leave: int):
        rhs, coefs = self.rows.pop(leave)
        a = coefs.pop(enter)
        # x_enter = (x_leave - rhs - sum coefs) / a
        inv = _div(-1, a)
        new_coefs = {k: _q(v * inv) for k, v in coefs.items()}
        new_coefs[leave] = -inv
        new_rhs = _q(rhs * inv)
        for b, (r, c) in self.rows.items():
            f = c.pop(enter, None)
            if f is None:
                continue
            for k, v in new_coefs.items():
                nv = _q(c.get(k, 0) + f * v)
                if nv:
                    c[k] = nv
                else:
                    c.pop(k, None)
            self.rows[b] = (_q(r + f * new_rhs), c)
        self.rows[enter] = (new_rhs, new_coefs)
        f = self.obj.pop(enter, None)
        if f is not None:
            for k, v in new_coefs.items():
                nv = _q(self.obj.get(k, 0) + f * v)
                if nv:
                    self.obj[k] = nv
                else:
                    self.obj.pop(k, None)
            self.obj_const = _q(self.obj_const + f * new_rhs)
        self.pivots += 1

    def optimize(self, allowed=None) -> bool:
        """Maximize the current objective.  False means unbounded."""
        while True:
            enter = None
            for j in sorted(self.obj):
                if self.obj[j] > 0 and (allowed is None or allowed(j)):
                    enter = j
                    break
            if enter is None:
                return True
            leave, best = None, None
            for b in sorted(self.rows):
                rhs, c = self.rows[b]
                a = c.get(enter)
                if a is not None and a < 0:
                    ratio = Fraction(rhs) / -a
                    if best is None or ratio < best:
                        leave, best = b, ratio
            if leave is None:
                return False
            self.pivot(enter, leave)


def solve_lp(n_vars: int, constraints, objective: dict | None = None, *, maximize: bool = True) -> LPResult:
    """Solve ``max/min objective`` subject to linear constraints and ``x >= 0``.

    ``constraints`` is an iterable of ``(coeffs, sense, rhs)`` with ``coeffs``
    a ``{var: number}`` mapping and ``sense`` one of ``<=``, ``>=``, ``==``.
    With no objective only feasibility is decided.
    """
    d = _Dictionary()
    nxt = n_vars
    artificials = set()
    phase1: dict = {}
    phase1_const = 0
    for coeffs, sense, rhs in constraints:
        row = {j: _q(Fraction(v)) for j, v in coeffs.items() if v}
        rhs = _q(Fraction(rhs))
        if rhs < 0:
            row = {j: -v for j, v in row.items()}
            rhs = -rhs
            sense = {LE: GE, GE: LE, EQ: EQ}[sense]
        # basic = rhs - row.x (+ surplus)
        coefs = {j: -v for j, v in row.items()}
        if sense == LE:
            d.rows[nxt] = (rhs, coefs)
            nxt += 1
            continue
        if sense == GE:
            coefs[nxt] = 1
            nxt += 1
        art = nxt
        nxt += 1
        artificials.add(art)
        d.rows[art] = (rhs, coefs)
        # phase-one objective: maximize -sum(artificials)
        phase1_const -= rhs
        for k, v in coefs.items():
            phase1[k] = phase1.get(k, 0) - v
    d.obj = {k: v for k, v in phase1.items() if v}
    d.obj_const = phase1_const
    if artificials:
        d.optimize()
        if d.obj_const < 0:
            return LPResult(INFEASIBLE, pivots=d.pivots)
        # drive zero-valued artificials out of the basis
        for art in sorted(artificials):
            if art not in d.rows:
                continue
            rhs, c = d.rows[art]
            cand = [k for k in sorted(c) if k not in artificials]
            if cand:
                d.pivot(cand[0], art)
            else:
                del d.rows[art]  # redundant row
        for b, (r, c) in d.rows.items():
            for a in artificials:
                c.pop(a, None)
    if objective is None:
        return LPResult(OPTIMAL, Fraction(0), _values(d, n_vars), d.pivots)
    sign = 1 if maximize else -1
    d.obj, d.obj_const = {}, 0
    for j, v in objective.items():
        v = _q(Fraction(v) * sign)
        if not v:
            continue
        if j in d.rows:
            r, c = d.rows[j]
            d.obj_const = _q(d.obj_const + v * r)
            for k, cv in c.items():
                nv = _q(d.obj.get(k, 0) + v * cv)
                if nv:
                    d.obj[k] = nv
                else:
                    d.obj.pop(k, None)
        else:
            d.obj[j] = _q(d.obj.get(j, 0) + v)
    if not d.optimize(allowed=lambda j: j not in artificials):
        return LPResult(UNBOUNDED, pivots=d.pivots)
    return LPResult(OPTIMAL, Fraction(d.obj_const * sign), _values(d, n_vars), d.pivots)


def _values(d: _Dictionary, n_vars: int) -> dict:
    return {b: Fraction(r) for b, (r, _) in d.rows.items() if b < n_vars and r}
