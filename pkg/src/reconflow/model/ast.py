"""Data types for parsed system models.

Every node is an immutable dataclass.  Source positions live in ``loc`` fields
that are excluded from equality, so two models are structurally identical
exactly when ``==`` holds.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, Union

Loc = tuple  # (line, col)
NOLOC: Loc = (0, 0)


# -- expressions -------------------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: int
    loc: Loc = field(default=NOLOC, compare=False, repr=False)


@dataclass(frozen=True)
class Var:
    name: str
    loc: Loc = field(default=NOLOC, compare=False, repr=False)


@dataclass(frozen=True)
class Unary:
    op: str  # '-' | 'not'
    operand: "Expr"
    loc: Loc = field(default=NOLOC, compare=False, repr=False)


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    loc: Loc = field(default=NOLOC, compare=False, repr=False)


Expr = Union[Const, Var, Unary, Binary]

ARITH_OPS = ("+", "-", "*", "/")
COMPARE_OPS = ("==", "!=", "<", "<=", ">", ">=")
BOOL_OPS = ("and", "or")


def expr_vars(e: Expr) -> Iterator[str]:
    if isinstance(e, Var):
        yield e.name
    elif isinstance(e, Unary):
        yield from expr_vars(e.operand)
    elif isinstance(e, Binary):
        yield from expr_vars(e.left)
        yield from expr_vars(e.right)


def atoms(e: Expr) -> list[Expr]:
    """Atomic conditions of a branch predicate: comparisons, or bare operands
    of boolean connectives."""
    if isinstance(e, Binary) and e.op in BOOL_OPS:
        return atoms(e.left) + atoms(e.right)
    if isinstance(e, Unary) and e.op == "not":
        return atoms(e.operand)
    return [e]


# -- statements --------------------------------------------------------------

@dataclass(frozen=True)
class Read:
    port: str
    var: str
    loc: Loc = field(default=NOLOC, compare=False, repr=False)


@dataclass(frozen=True)
class Write:
    port: str
    expr: Expr
    loc: Loc = field(default=NOLOC, compare=False, repr=False)


@dataclass(frozen=True)
class Assign:
    var: str
    expr: Expr
    loc: Loc = field(default=NOLOC, compare=False, repr=False)


@dataclass(frozen=True)
class Compute:
    label: str
    cycles: int | None = None
    loc: Loc = field(default=NOLOC, compare=False, repr=False)


@dataclass(frozen=True)
class Reconfigure:
    context: str
    loc: Loc = field(default=NOLOC, compare=False, repr=False)


@dataclass(frozen=True)
class CallFpga:
    fn: str
    out: str
    args: tuple = ()
    loc: Loc = field(default=NOLOC, compare=False, repr=False)


@dataclass(frozen=True)
class If:
    cond: Expr
    then: tuple = ()
    orelse: tuple = ()
    loc: Loc = field(default=NOLOC, compare=False, repr=False)


@dataclass(frozen=True)
class Repeat:
    count: int
    body: tuple = ()
    loc: Loc = field(default=NOLOC, compare=False, repr=False)


Stmt = Union[Read, Write, Assign, Compute, Reconfigure, CallFpga, If, Repeat]


def walk(stmts) -> Iterator[Stmt]:
    """Pre-order traversal; the order defines statement indices everywhere."""
    for s in stmts:
        yield s
        if isinstance(s, If):
            yield from walk(s.then)
            yield from walk(s.orelse)
        elif isinstance(s, Repeat):
            yield from walk(s.body)


def stmt_vars(s: Stmt) -> Iterator[str]:
    """Variables read or written by a single statement (not its children)."""
    if isinstance(s, Read):
        yield s.var
    elif isinstance(s, Write):
        yield from expr_vars(s.expr)
    elif isinstance(s, Assign):
        yield s.var
        yield from expr_vars(s.expr)
    elif isinstance(s, CallFpga):
        yield s.out
        for a in s.args:
            yield from expr_vars(a)
    elif isinstance(s, If):
        yield from expr_vars(s.cond)


@dataclass(frozen=True)
class Program:
    params: tuple = ()
    body: tuple = ()

    def statements(self) -> list[Stmt]:
        return list(walk(self.body))


@dataclass(frozen=True)
class Kernel:
    """Pure function body backing a ``callfpga`` of the module's name."""

    params: tuple
    result: str
    body: tuple = ()
    loc: Loc = field(default=NOLOC, compare=False, repr=False)


# -- architecture ------------------------------------------------------------

class Placement(enum.Enum):
    HW = "hw"
    SW = "sw"
    FPGA = "fpga"


@dataclass(frozen=True)
class ModuleDef:
    name: str
    in_ports: tuple = ()
    out_ports: tuple = ()
    behavior: Program = Program()
    hw_annotation: dict = field(default_factory=dict)
    kernel: Kernel | None = None
    loc: Loc = field(default=NOLOC, compare=False, repr=False)

    def variables(self) -> list[str]:
        """Every scalar variable of the module, in first-occurrence order."""
        seen: dict[str, None] = {}
        for p in self.behavior.params:
            seen.setdefault(p)
        for s in walk(self.behavior.body):
            for v in stmt_vars(s):
                seen.setdefault(v)
        if self.kernel is not None:
            for p in self.kernel.params:
                seen.setdefault(p)
            for s in walk(self.kernel.body):
                for v in stmt_vars(s):
                    seen.setdefault(v)
            seen.setdefault(self.kernel.result)
        return list(seen)


@dataclass(frozen=True)
class ChannelDef:
    name: str
    src: tuple  # (module, port)
    dst: tuple
    capacity: int | None = None  # None = unbounded
    selfloop: bool = False
    loc: Loc = field(default=NOLOC, compare=False, repr=False)


@dataclass(frozen=True)
class BusDef:
    name: str = "main_bus"
    cycles_per_word: int = 1
    loc: Loc = field(default=NOLOC, compare=False, repr=False)


@dataclass(frozen=True)
class FnDecl:
    name: str
    latency: int
    loc: Loc = field(default=NOLOC, compare=False, repr=False)


@dataclass(frozen=True)
class Context:
    name: str
    functions: tuple = ()  # of FnDecl
    bitstream_words: int = 1
    loc: Loc = field(default=NOLOC, compare=False, repr=False)

    def function_names(self) -> frozenset:
        return frozenset(f.name for f in self.functions)


@dataclass(frozen=True)
class ConfigurationMap:
    contexts: tuple = ()  # of Context, declaration order

    def names(self) -> list[str]:
        return [c.name for c in self.contexts]

    def get(self, name: str) -> Context | None:
        for c in self.contexts:
            if c.name == name:
                return c
        return None

    def functions(self, ctx: str | None) -> frozenset:
        c = self.get(ctx) if ctx is not None else None
        return c.function_names() if c else frozenset()

    def universe(self) -> set[str]:
        return {f.name for c in self.contexts for f in c.functions}

    def latency(self, fn: str) -> int:
        for c in self.contexts:
            for f in c.functions:
                if f.name == fn:
                    return f.latency
        raise KeyError(fn)

    def bitstream_words(self, ctx: str) -> int:
        return self.get(ctx).bitstream_words

    def without_function(self, ctx: str, fn: str) -> "ConfigurationMap":
        out = []
        for c in self.contexts:
            if c.name == ctx:
                c = Context(c.name, tuple(f for f in c.functions if f.name != fn), c.bitstream_words, c.loc)
            out.append(c)
        return ConfigurationMap(tuple(out))


@dataclass(frozen=True)
class SystemModel:
    name: str
    modules: tuple = ()
    channels: tuple = ()
    bus: BusDef | None = None
    placements: dict = field(default_factory=dict)  # module name -> Placement
    config_map: ConfigurationMap | None = None
    initial_context: str | None = None

    def module(self, name: str) -> ModuleDef:
        for m in self.modules:
            if m.name == name:
                return m
        raise KeyError(name)

    def has_module(self, name: str) -> bool:
        return any(m.name == name for m in self.modules)

    def module_index(self, name: str) -> int:
        for i, m in enumerate(self.modules):
            if m.name == name:
                return i
        raise KeyError(name)

    def channel(self, name: str) -> ChannelDef:
        for c in self.channels:
            if c.name == name:
                return c
        raise KeyError(name)

    def port_bindings(self) -> dict:
        """(module, port) -> channel for every bound port."""
        out = {}
        for c in self.channels:
            out[c.src] = c
            out[c.dst] = c
        return out

    def external_inputs(self) -> list[str]:
        bound = self.port_bindings()
        return [f"{m.name}.{p}" for m in self.modules for p in m.in_ports if (m.name, p) not in bound]

    def external_outputs(self) -> list[str]:
        bound = self.port_bindings()
        return [f"{m.name}.{p}" for m in self.modules for p in m.out_ports if (m.name, p) not in bound]

    def observable_channels(self) -> list[str]:
        """Names that appear in traces: channels plus unbound output ports."""
        return [c.name for c in self.channels] + self.external_outputs()

    def kernel_modules(self) -> list[ModuleDef]:
        return [m for m in self.modules if m.kernel is not None]

    def partition(self, module: str, level: int = 3) -> Placement | None:
        p = self.placements.get(module)
        if level < 3 and p is Placement.FPGA:
            return Placement.HW
        return p
