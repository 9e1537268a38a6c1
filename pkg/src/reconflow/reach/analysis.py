"""State-equation proofs over communication nets.

A marking ``m`` reachable from ``m0`` satisfies ``m = m0 + C x`` for some
firing-count vector ``x >= 0``.  If that system (plus a target and the
firing bounds implied by literal loops) has no rational solution, the
target is unreachable.  A feasible system proves nothing.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import CombinatorialLimit
from .petri import PetriNet
from .simplex import EQ, GE, INFEASIBLE, LE, UNBOUNDED, solve_lp

PROVEN_UNREACHABLE = "PROVEN_UNREACHABLE"
UNKNOWN = "UNKNOWN"
NOT_FOUND = "NOT_FOUND"
UNBOUNDED_FIFO = "UNBOUNDED"

DEFAULT_TARGET_CAP = 10**4
DEFAULT_STATE_CAP = 10**5


@dataclass(frozen=True)
class MarkingConstraint:
    """Conjunction of ``sum(coef * m[p]) sense rhs`` terms."""

    terms: tuple = ()  # of (((place, coef), ...), sense, rhs)
    label: str = ""

    @staticmethod
    def equal(marking) -> "MarkingConstraint":
        return MarkingConstraint(tuple((((p, 1),), EQ, k) for p, k in enumerate(marking)), "m")

    def holds(self, marking) -> bool:
        for coeffs, sense, rhs in self.terms:
            v = sum(c * marking[p] for p, c in coeffs)
            if sense == EQ and v != rhs or sense == LE and v > rhs or sense == GE and v < rhs:
                return False
        return True

    def to_dict(self, net: PetriNet) -> dict:
        def term(coeffs, sense, rhs):
            lhs = " + ".join(f"{c}*{net.places[p]}" if c != 1 else net.places[p] for p, c in coeffs)
            return f"{lhs} {sense} {rhs}"
        return {"label": self.label, "terms": [term(*t) for t in self.terms]}


def _target_rows(net: PetriNet, c, terms) -> list:
    rows = []
    for coeffs, sense, rhs in terms:
        lin: dict = {}
        const = 0
        for p, k in coeffs:
            const += k * net.m0[p]
            for t, v in enumerate(c[p]):
                if v:
                    lin[t] = lin.get(t, 0) + k * v
        rows.append(({t: v for t, v in lin.items() if v}, sense, rhs - const))
    return rows


def _state_equation(net: PetriNet, c, use_bounds: bool = True) -> list:
    """LP rows over firing counts; markings are eliminated via m = m0 + Cx."""
    rows = []
    for p, row in enumerate(c):
        coeffs = {t: v for t, v in enumerate(row) if v}
        if coeffs:
            rows.append((coeffs, GE, -net.m0[p]))
    if use_bounds:
        for t, b in enumerate(net.bounds):
            if b is not None:
                rows.append(({t: 1}, LE, b))
    return rows


def check_unreachable(net: PetriNet, target: MarkingConstraint, *, use_bounds: bool = True) -> str:
    c = net.incidence()
    rows = _state_equation(net, c, use_bounds) + _target_rows(net, c, target.terms)
    res = solve_lp(len(net.transitions), rows)
    return PROVEN_UNREACHABLE if res.status == INFEASIBLE else UNKNOWN


def fifo_bound(net: PetriNet, channel: str, *, use_bounds: bool = True):
    """Sound occupancy bound for a channel: int, or ``UNBOUNDED``."""
    p = net.item[channel]
    c = net.incidence()
    objective = {t: v for t, v in enumerate(c[p]) if v}
    res = solve_lp(len(net.transitions), _state_equation(net, c, use_bounds), objective)
    if res.status == UNBOUNDED:
        return UNBOUNDED_FIFO
    if res.status == INFEASIBLE:  # cannot happen: x = 0 is feasible
        raise AssertionError("state equation infeasible at x = 0")
    return net.m0[p] + math.floor(res.value)


def _moves(net: PetriNet) -> list:
    """Per transition: (pre items, nonzero effect items), for fast firing."""
    out = []
    for tr in net.transitions:
        delta: dict = {}
        for p, w in tr.pre.items():
            delta[p] = delta.get(p, 0) - w
        for p, w in tr.post.items():
            delta[p] = delta.get(p, 0) + w
        out.append((tuple(tr.pre.items()), tuple((p, d) for p, d in delta.items() if d)))
    return out


def _successors(moves, m):
    for t, (pre, delta) in enumerate(moves):
        if all(m[p] >= w for p, w in pre):
            m2 = list(m)
            for p, d in delta:
                m2[p] += d
            yield t, tuple(m2)


def find_witness(net: PetriNet, target: MarkingConstraint, state_cap: int = DEFAULT_STATE_CAP):
    """Shortest firing sequence (transition names) to a target marking, or ``NOT_FOUND``."""
    start = tuple(net.m0)
    if target.holds(start):
        return []
    moves = _moves(net)
    parent = {start: None}
    queue = deque([start])
    while queue:
        m = queue.popleft()
        for t, m2 in _successors(moves, m):
            if m2 in parent:
                continue
            parent[m2] = (m, t)
            if target.holds(m2):
                seq = []
                cur = m2
                while parent[cur] is not None:
                    cur, tt = parent[cur]
                    seq.append(net.transitions[tt].name)
                return seq[::-1]
            if len(parent) >= state_cap:
                return NOT_FOUND
            queue.append(m2)
    return NOT_FOUND


def reachable_markings(net: PetriNet, state_cap: int = DEFAULT_STATE_CAP):
    """Explicit reachability set (up to the cap) and whether it is complete."""
    start = tuple(net.m0)
    moves = _moves(net)
    seen = {start}
    queue = deque([start])
    while queue:
        m = queue.popleft()
        for _, m2 in _successors(moves, m):
            if m2 not in seen:
                if len(seen) >= state_cap:
                    return seen, False
                seen.add(m2)
                queue.append(m2)
    return seen, True


# -- deadlocks -----------------------------------------------------------------

def _choices(net: PetriNet) -> list:
    """Per module: (control place, places that must be empty) options."""
    out = []
    for mod, places in net.control.items():
        opts = [(p, tuple(net.blocking[p])) for p in places if p in net.blocking]
        opts.append((net.terminal[mod], ()))
        out.append(opts)
    return out


def _terms(choice) -> list:
    terms = []
    for ctrl, empty in choice:
        terms.append((((ctrl, 1),), EQ, 1))
        for q in empty:
            terms.append((((q, 1),), EQ, 0))
    return terms


def _label(net: PetriNet, choice) -> str:
    return ", ".join(net.places[c] for c, _ in choice)


def count_targets(net: PetriNet) -> int:
    return math.prod(len(o) for o in _choices(net)) - 1


def deadlock_targets(net: PetriNet, cap: int = DEFAULT_TARGET_CAP) -> list[MarkingConstraint]:
    """Every combination of blocked-or-finished modules except all-finished."""
    n = count_targets(net)
    if n > cap:
        raise CombinatorialLimit(n, cap)
    choices = _choices(net)
    out = []
    for combo in itertools.product(*choices):
        if all(not empty for _, empty in combo):
            continue
        out.append(MarkingConstraint(tuple(_terms(combo)), _label(net, combo)))
    return out


@dataclass
class DeadlockReport:
    targets: int
    proven: int
    unknown: list = field(default_factory=list)  # of (MarkingConstraint, witness or NOT_FOUND)
    lp_calls: int = 0

    @property
    def deadlock_free(self) -> bool:
        return not self.unknown

    def to_dict(self, net: PetriNet) -> dict:
        return {
            "targets": self.targets,
            "proven_unreachable": self.proven,
            "lp_calls": self.lp_calls,
            "deadlock_free": self.deadlock_free,
            "unknown": [
                {**t.to_dict(net), "witness": w if w != NOT_FOUND else None}
                for t, w in self.unknown
            ],
        }


def prove_deadlock_free(net: PetriNet, *, cap: int = DEFAULT_TARGET_CAP,
                        state_cap: int = DEFAULT_STATE_CAP, witness: bool = True) -> DeadlockReport:
    """Decide every deadlock target, pruning on infeasible partial choices.

    Modules are fixed one at a time; if the constraints chosen so far are
    already infeasible, every completion is too and the whole subtree counts
    as proven without further LP calls.  Targets that survive get a BFS
    witness search.
    """
    total = count_targets(net)
    if total > cap:
        raise CombinatorialLimit(total, cap)
    choices = _choices(net)
    report = DeadlockReport(total, 0)
    n_vars = len(net.transitions)
    c = net.incidence()
    base = _state_equation(net, c)

    def dfs(depth, chosen, any_blocked):
        if depth == len(choices):
            if not any_blocked:
                return
            target = MarkingConstraint(tuple(_terms(chosen)), _label(net, chosen))
            report.lp_calls += 1
            if _feasible(chosen):
                w = find_witness(net, target, state_cap) if witness else NOT_FOUND
                report.unknown.append((target, w))
            else:
                report.proven += 1
            return
        for opt in choices[depth]:
            nxt = chosen + [opt]
            blocked = any_blocked or bool(opt[1])
            if depth + 1 < len(choices):
                report.lp_calls += 1
                if not _feasible(nxt):
                    below = math.prod(len(o) for o in choices[depth + 1:])
                    # the all-terminal completion is not a target
                    report.proven += below if blocked else below - 1
                    continue
            dfs(depth + 1, nxt, blocked)

    def _feasible(chosen) -> bool:
        rows = base + _target_rows(net, c, _terms(chosen))
        return solve_lp(n_vars, rows).status != INFEASIBLE

    dfs(0, [], False)
    return report

