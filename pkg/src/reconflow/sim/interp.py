"""Statement interpreter shared by every simulator and fault campaign.

Module behaviors compile to nested instruction lists plus expression closures.
``run_behavior`` is a generator: pure statements execute inline while
communication, timing and FPGA statements are yielded to the driving
simulator as effect tuples, whose reply (if any) is sent back in.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import RuntimeTrap
from ..model import ast
from ..model.intops import div32, force_bit, wrap32

# instruction opcodes
ASSIGN, READ, WRITE, COMPUTE, RECONF, CALL, IF, REPEAT = range(8)
# effect tags
E_READ, E_WRITE, E_COMPUTE, E_RECONF, E_CALL = range(5)


@dataclass(frozen=True)
class Fault:
    module: str
    var: str
    bit: int
    stuck_one: bool

    @property
    def polarity(self) -> str:
        return "STUCK1" if self.stuck_one else "STUCK0"

    def key(self) -> tuple:
        return (self.module, self.var, self.bit, self.polarity)


@dataclass
class CoverageRecorder:
    statements: set = field(default_factory=set)  # (module, sid)
    branches: set = field(default_factory=set)  # (module, sid, outcome)
    conditions: set = field(default_factory=set)  # (module, sid, atom, outcome)


class Compiler:
    def __init__(self, module: ast.ModuleDef, fault: Fault | None = None,
                 cov: CoverageRecorder | None = None):
        self.module = module
        self.fault = fault if fault is not None and fault.module == module.name else None
        self.cov = cov
        self.sid = 0

    # expressions -------------------------------------------------------------
    def expr(self, e):
        if isinstance(e, ast.Const):
            v = e.value
            return lambda env: v
        if isinstance(e, ast.Var):
            name = e.name
            f = self.fault
            if f is not None and f.var == name:
                bit, one = f.bit, f.stuck_one
                return lambda env: force_bit(env[name], bit, one)
            return lambda env: env[name]
        if isinstance(e, ast.Unary):
            inner = self.expr(e.operand)
            if e.op == "not":
                return lambda env: 0 if inner(env) else 1
            return lambda env: wrap32(-inner(env))
        lhs, rhs = self.expr(e.left), self.expr(e.right)
        op = e.op
        if op == "+":
            return lambda env: wrap32(lhs(env) + rhs(env))
        if op == "-":
            return lambda env: wrap32(lhs(env) - rhs(env))
        if op == "*":
            return lambda env: wrap32(lhs(env) * rhs(env))
        if op == "/":
            mod = self.module.name
            line, col = e.loc

            def divide(env):
                b = rhs(env)
                a = lhs(env)
                if b == 0:
                    raise RuntimeTrap(mod, line, col)
                return div32(a, b)
            return divide
        if op == "and":
            return lambda env: 1 if (lhs(env) and rhs(env)) else 0
        if op == "or":
            return lambda env: 1 if (lhs(env) or rhs(env)) else 0
        cmp = {
            "==": lambda a, b: a == b, "!=": lambda a, b: a != b,
            "<": lambda a, b: a < b, "<=": lambda a, b: a <= b,
            ">": lambda a, b: a > b, ">=": lambda a, b: a >= b,
        }[op]
        return lambda env: 1 if cmp(lhs(env), rhs(env)) else 0

    def condition(self, e, sid):
        """Branch predicate; with coverage, every atom records its outcome."""
        if self.cov is None:
            return self.expr(e)
        atoms = ast.atoms(e)
        index = {id(a): i for i, a in enumerate(atoms)}
        conds = self.cov.conditions
        mod = self.module.name

        def build(x):
            if isinstance(x, ast.Binary) and x.op in ast.BOOL_OPS:
                lhs, rhs = build(x.left), build(x.right)
                if x.op == "and":
                    return lambda env: 1 if (lhs(env) and rhs(env)) else 0
                return lambda env: 1 if (lhs(env) or rhs(env)) else 0
            if isinstance(x, ast.Unary) and x.op == "not":
                inner = build(x.operand)
                return lambda env: 0 if inner(env) else 1
            plain = self.expr(x)
            key = (mod, sid, index[id(x)])

            def atom(env):
                v = plain(env)
                conds.add(key + (bool(v),))
                return v
            return atom
        return build(e)

    # statements --------------------------------------------------------------
    def block(self, stmts) -> list:
        out = []
        m = self.module
        for s in stmts:
            sid = self.sid
            self.sid += 1
            if isinstance(s, ast.Assign):
                out.append((ASSIGN, sid, s.var, self.expr(s.expr)))
            elif isinstance(s, ast.Read):
                out.append((READ, sid, s.var, s.port, s))
            elif isinstance(s, ast.Write):
                out.append((WRITE, sid, s.port, self.expr(s.expr), s))
            elif isinstance(s, ast.Compute):
                cycles = m.hw_annotation.get(s.label, s.cycles)
                out.append((COMPUTE, sid, s.label, cycles, s))
            elif isinstance(s, ast.Reconfigure):
                out.append((RECONF, sid, s.context, s))
            elif isinstance(s, ast.CallFpga):
                out.append((CALL, sid, s.out, s.fn, tuple(self.expr(a) for a in s.args), s))
            elif isinstance(s, ast.If):
                cond = self.condition(s.cond, sid)
                then = self.block(s.then)
                orelse = self.block(s.orelse)
                out.append((IF, sid, cond, then, orelse))
            elif isinstance(s, ast.Repeat):
                out.append((REPEAT, sid, s.count, self.block(s.body)))
        return out


@dataclass
class CompiledModule:
    module: ast.ModuleDef
    behavior: list
    kernel: list | None
    kernel_first_sid: int
    cov: CoverageRecorder | None

    @property
    def name(self) -> str:
        return self.module.name

    def initial_env(self, params: dict) -> dict:
        return dict(params)

    def run(self, env: dict):
        return _run(self.behavior, env, self.module.name, self.cov)

    def call_kernel(self, args) -> int:
        k = self.module.kernel
        env = dict(zip(k.params, args))
        _run_pure(self.kernel, env, self.module.name, self.cov)
        return env[k.result]


def compile_module(module: ast.ModuleDef, fault: Fault | None = None,
                   cov: CoverageRecorder | None = None) -> CompiledModule:
    c = Compiler(module, fault, cov)
    behavior = c.block(module.behavior.body)
    first = c.sid
    kernel = c.block(module.kernel.body) if module.kernel is not None else None
    return CompiledModule(module, behavior, kernel, first, cov)


def statement_count(module: ast.ModuleDef) -> int:
    n = len(module.behavior.statements())
    if module.kernel is not None:
        n += len(list(ast.walk(module.kernel.body)))
    return n


def _run(block, env, mod, cov):
    stmts = cov.statements if cov is not None else None
    branches = cov.branches if cov is not None else None
    for ins in block:
        op = ins[0]
        if stmts is not None:
            stmts.add((mod, ins[1]))
        if op == ASSIGN:
            env[ins[2]] = ins[3](env)
        elif op == READ:
            env[ins[2]] = yield (E_READ, ins[3], ins[4])
        elif op == WRITE:
            yield (E_WRITE, ins[2], ins[3](env), ins[4])
        elif op == COMPUTE:
            yield (E_COMPUTE, ins[2], ins[3], ins[4])
        elif op == RECONF:
            yield (E_RECONF, ins[2], ins[3])
        elif op == CALL:
            args = tuple(a(env) for a in ins[4])
            env[ins[2]] = yield (E_CALL, ins[3], args, ins[5])
        elif op == IF:
            taken = bool(ins[2](env))
            if branches is not None:
                branches.add((mod, ins[1], taken))
            yield from _run(ins[3] if taken else ins[4], env, mod, cov)
        elif op == REPEAT:
            body = ins[3]
            for _ in range(ins[2]):
                yield from _run(body, env, mod, cov)


def _run_pure(block, env, mod, cov):
    stmts = cov.statements if cov is not None else None
    for ins in block:
        op = ins[0]
        if stmts is not None:
            stmts.add((mod, ins[1]))
        if op == ASSIGN:
            env[ins[2]] = ins[3](env)
        elif op == IF:
            taken = bool(ins[2](env))
            if cov is not None:
                cov.branches.add((mod, ins[1], taken))
            _run_pure(ins[3] if taken else ins[4], env, mod, cov)
        elif op == REPEAT:
            for _ in range(ins[2]):
                _run_pure(ins[3], env, mod, cov)


def compile_model(model: ast.SystemModel, fault: Fault | None = None,
                  cov: CoverageRecorder | None = None,
                  cache: dict | None = None) -> dict:
    """Compile every module; ``cache`` reuses fault-free compilations."""
    out = {}
    for m in model.modules:
        if cache is not None and cov is None and (fault is None or fault.module != m.name):
            if m.name not in cache:
                cache[m.name] = compile_module(m)
            out[m.name] = cache[m.name]
        else:
            out[m.name] = compile_module(m, fault, cov)
    return out
