"""Static reconfiguration-consistency checking.

A forward must-availability analysis over the SW task's CFG: the abstract
state at each node is the set of contexts (or ``None`` for "nothing
loaded") that may be resident when control reaches it.  A call is safe only
when every context in that set provides the function.  Failing calls get a
syntactic entry-to-call path rebuilt from the predecessor that first
contributed the offending context.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ReconfigViolation, RuntimeTrap
from .model import ast
from .model.cfg import CFG, build_cfg
from .model.intops import wrap32
from .model.validate import fpga_task

NONE = None  # "no context loaded"

CERTIFICATE = "CERTIFICATE"
COUNTEREXAMPLE = "COUNTEREXAMPLE"
CONFIRMED = "CONFIRMED"
NOT_TRIGGERED = "NOT_TRIGGERED"


def _ctx_name(c) -> str:
    return "NONE" if c is None else c


def _sort_key(c):
    return (c is not None, c or "")


@dataclass
class Verdict:
    kind: str
    cfg: CFG = field(repr=False)
    states: dict = field(default_factory=dict, repr=False)  # node -> frozenset
    path: list = field(default_factory=list)
    offending_call: tuple | None = None  # (fn, node)
    missing_in: frozenset = frozenset()
    may_be_infeasible: bool = False
    iterations: int = 0
    module: str | None = None

    @property
    def is_certificate(self) -> bool:
        return self.kind == CERTIFICATE

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "module": self.module, "iterations": self.iterations}
        if self.kind == COUNTEREXAMPLE:
            fn, node = self.offending_call
            out["offending_call"] = {"function": fn, "node": node,
                                     "line": self.cfg.loc(node)[0], "col": self.cfg.loc(node)[1]}
            out["missing_in"] = sorted((_ctx_name(c) for c in self.missing_in))
            out["may_be_infeasible"] = self.may_be_infeasible
            out["path"] = [self._step(n) for n in self.path]
        return out

    def states_dict(self) -> dict:
        return {str(n): sorted(_ctx_name(c) for c in s) for n, s in sorted(self.states.items())}

    def _step(self, n: int) -> dict:
        line, col = self.cfg.loc(n)
        return {"node": n, "line": line, "col": col, "stmt": self.cfg.describe(n)}


def _transfer(node, state: frozenset) -> frozenset:
    if isinstance(node, ast.Reconfigure):
        return frozenset((node.context,))
    return state


def analyze(cfg: CFG, config_map: ast.ConfigurationMap | None, initial: str | None = NONE) -> Verdict:
    """Fixpoint over the powerset of contexts plus NONE; CERTIFICATE or COUNTEREXAMPLE."""
    n_nodes = len(cfg.nodes)
    state_in: dict = {i: frozenset() for i in range(n_nodes)}
    # (node, ctx) -> (pred node or None, order stamp); first contribution wins
    origin: dict = {}
    stamp = 0
    start = frozenset((initial,))
    state_in[cfg.entry] = start
    for c in start:
        origin[(cfg.entry, c)] = (None, stamp)
    work = [cfg.entry]
    queued = {cfg.entry}
    iterations = 0
    while work:
        # lowest node id first keeps the iteration order deterministic
        work.sort(reverse=True)
        n = work.pop()
        queued.discard(n)
        iterations += 1
        out = _transfer(cfg.nodes[n], state_in[n])
        for e in cfg.succ(n):
            new = out - state_in[e.dst]
            if not new:
                continue
            for c in sorted(new, key=_sort_key):
                stamp += 1
                origin[(e.dst, c)] = (n, stamp)
            state_in[e.dst] = state_in[e.dst] | new
            if e.dst not in queued:
                queued.add(e.dst)
                work.append(e.dst)

    verdict = Verdict(CERTIFICATE, cfg, state_in, iterations=iterations)
    for n, node in enumerate(cfg.nodes):
        if not isinstance(node, ast.CallFpga):
            continue
        provides = {c for c in state_in[n] if c is not None and config_map is not None
                    and node.fn in config_map.functions(c)}
        missing = frozenset(state_in[n] - provides)
        if missing:
            bad = min(missing, key=lambda c: origin[(n, c)][1])
            path = _reconstruct(cfg, state_in, origin, n, bad)
            verdict.kind = COUNTEREXAMPLE
            verdict.path = path
            verdict.offending_call = (node.fn, n)
            verdict.missing_in = missing
            verdict.may_be_infeasible = _may_be_infeasible(cfg, path)
            break
    return verdict


def _reconstruct(cfg: CFG, state_in: dict, origin: dict, node: int, ctx) -> list:
    """Walk recorded first contributions back to the entry.

    Stamps strictly decrease along the walk, so it terminates.
    """
    path = [node]
    n, c = node, ctx
    while True:
        pred, _ = origin[(n, c)]
        if pred is None:
            break
        src = cfg.nodes[pred]
        if isinstance(src, ast.Reconfigure):
            # any fact reaching the reconfigure will do; take the earliest one
            c = min(state_in[pred], key=lambda x: origin[(pred, x)][1])
        path.append(pred)
        n = pred
    path.reverse()
    return path


def _const_value(e, env=None):
    env = env or {}
    if isinstance(e, ast.Const):
        return e.value
    if isinstance(e, ast.Var):
        return env.get(e.name)
    if isinstance(e, ast.Unary):
        v = _const_value(e.operand, env)
        if v is None:
            return None
        return (0 if v else 1) if e.op == "not" else wrap32(-v)
    if isinstance(e, ast.Binary):
        a = _const_value(e.left, env)
        if e.op == "and" and a == 0 or e.op == "or" and a not in (None, 0):
            return int(bool(a))
        b = _const_value(e.right, env)
        if a is None or b is None:
            return None
        from .model.intops import div32
        ops = {
            "+": lambda: wrap32(a + b), "-": lambda: wrap32(a - b), "*": lambda: wrap32(a * b),
            "/": lambda: div32(a, b) if b else None,
            "==": lambda: int(a == b), "!=": lambda: int(a != b), "<": lambda: int(a < b),
            "<=": lambda: int(a <= b), ">": lambda: int(a > b), ">=": lambda: int(a >= b),
            "and": lambda: int(bool(a and b)), "or": lambda: int(bool(a or b)),
        }
        return ops[e.op]()
    return None


def _branch_edges(cfg: CFG, path: list):
    """Yield (branch value or None, labels taken) for each branch on the path.

    Values come from constant propagation along the path itself; reads and
    FPGA results are unknown.
    """
    env: dict = {}
    for a, b in zip(path, path[1:]):
        node = cfg.nodes[a]
        if isinstance(node, ast.If):
            labels = {e.label for e in cfg.succ(a) if e.dst == b}
            yield _const_value(node.cond, env), labels
        elif isinstance(node, ast.Assign):
            v = _const_value(node.expr, env)
            if v is None:
                env.pop(node.var, None)
            else:
                env[node.var] = v
        elif isinstance(node, ast.Read):
            env.pop(node.var, None)
        elif isinstance(node, ast.CallFpga):
            env.pop(node.out, None)


def _may_be_infeasible(cfg: CFG, path: list) -> bool:
    """True when the path takes a branch the program may not take: any
    data-dependent branch, or a constant branch against its value."""
    for v, labels in _branch_edges(cfg, path):
        if v is None:
            return True
        if ("then" if v else "else") not in labels:
            return True
    return False


def _statically_infeasible(cfg: CFG, path: list) -> bool:
    for v, labels in _branch_edges(cfg, path):
        if v is not None and ("then" if v else "else") not in labels:
            return True
    return False


def analyze_model(model: ast.SystemModel) -> Verdict:
    """Analyze the model's SW task, or vacuously certify a model without one."""
    task = fpga_task(model)
    body = task.behavior if task is not None else ast.Program()
    v = analyze(build_cfg(body), model.config_map, model.initial_context)
    v.module = task.name if task is not None else None
    return v


@dataclass
class ReplayResult:
    outcome: str
    witness: object = None  # Stimulus
    violation: ReconfigViolation | None = None
    attempts: int = 0

    def to_dict(self) -> dict:
        out = {"outcome": self.outcome, "attempts": self.attempts}
        if self.witness is not None:
            out["witness"] = self.witness.to_dict()
        if self.violation is not None:
            out["violation"] = self.violation.to_dict()
        return out


def replay_counterexample(model: ast.SystemModel, verdict: Verdict, *, budget: int = 200,
                          seed: int = 0, stimuli=None) -> ReplayResult:
    """Search for a level-3 execution raising the violation the verdict predicts.

    Paths through a constant branch against its value are rejected without
    simulation; otherwise stimuli are drawn from ``seed`` (or taken from
    ``stimuli``) until the budget runs out.
    """
    from .sim.stimulus import Stimulus
    from .sim.timed import simulate_timed

    if verdict.kind != COUNTEREXAMPLE:
        raise ValueError("replay needs a COUNTEREXAMPLE verdict")
    if _statically_infeasible(verdict.cfg, verdict.path):
        return ReplayResult(NOT_TRIGGERED, attempts=0)
    fn, node = verdict.offending_call
    loc = verdict.cfg.loc(node)
    candidates = stimuli if stimuli is not None else (Stimulus(seed=seed + i) for i in range(budget))
    attempts = 0
    for stim in candidates:
        attempts += 1
        try:
            simulate_timed(model, stim, 3)
        except ReconfigViolation as v:
            if v.fn == fn and (v.line, v.col) == tuple(loc) and v.module == verdict.module:
                return ReplayResult(CONFIRMED, stim, v, attempts)
        except RuntimeTrap:
            pass
    return ReplayResult(NOT_TRIGGERED, attempts=attempts)
