"""Recursive-descent front-end for the ``.rsm`` system-description language.

Newlines are insignificant; statements are recognised by their leading
keyword, so a model may be written one declaration per line or packed with
optional ``;`` separators.  ``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import Diagnostic, ModelSyntaxError, SemanticError
from . import ast
from .intops import wrap32

KEYWORDS = {
    "system", "module", "port", "in", "out", "param", "annotate", "proc", "kernel",
    "behavior", "channel", "capacity", "unbounded", "selfloop", "bus",
    "cycles_per_word", "place", "hw", "sw", "fpga", "context", "bitstream", "fn",
    "latency", "initial", "read", "write", "compute", "reconfigure", "callfpga",
    "call", "if", "else", "repeat", "and", "or", "not",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<num>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>->|<-|==|!=|<=|>=|[{}(),.;=<>+\-*/])
    """,
    re.VERBOSE,
)

MAX_DEPTH = 100


@dataclass(frozen=True)
class Token:
    kind: str  # 'num' | 'ident' | 'kw' | 'op' | 'eof'
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ModelSyntaxError(
                [Diagnostic(line, pos - line_start + 1, f"unexpected character {text[pos]!r}")]
            )
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind in ("num", "ident", "op"):
            val = m.group()
            if kind == "ident" and val in KEYWORDS:
                kind = "kw"
            toks.append(Token(kind, val, line, pos - line_start + 1))
        pos = m.end()
    toks.append(Token("eof", "<end of input>", line, pos - line_start + 1))
    return toks


@dataclass(frozen=True)
class _Call:
    """Procedure call placeholder, removed by inlining."""

    name: str
    loc: ast.Loc = ast.NOLOC


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.depth = 0

    # -- token helpers -------------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def at(self, *texts: str) -> bool:
        t = self.tok
        return t.kind in ("kw", "op") and t.text in texts

    def fail(self, *expected: str):
        t = self.tok
        exp = ", ".join(expected)
        raise ModelSyntaxError([Diagnostic(t.line, t.col, f"expected {exp}; found {t.text!r}")])

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(repr(text))
        return self.advance()

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.i += 1
        return t

    def ident(self, what: str = "identifier") -> Token:
        if self.tok.kind != "ident":
            self.fail(what)
        return self.advance()

    def number(self, what: str = "integer literal") -> int:
        if self.tok.kind != "num":
            self.fail(what)
        return int(self.advance().text)

    def skip_semis(self):
        while self.at(";"):
            self.advance()

    def enter(self):
        self.depth += 1
        if self.depth > MAX_DEPTH:
            t = self.tok
            raise ModelSyntaxError([Diagnostic(t.line, t.col, "nesting too deep")])

    def leave(self):
        self.depth -= 1

    # -- top level -----------------------------------------------------------
    def parse(self) -> ast.SystemModel:
        name = None
        modules, channels, contexts = [], [], []
        bus = None
        placements: dict = {}
        initial = None
        problems: list[Diagnostic] = []
        self.skip_semis()
        while self.tok.kind != "eof":
            t = self.tok
            if self.at("system"):
                self.advance()
                name = self.ident("system name").text
            elif self.at("module"):
                modules.append(self.parse_module())
            elif self.at("channel"):
                channels.append(self.parse_channel())
            elif self.at("bus"):
                self.advance()
                bname = self.ident("bus name").text
                cpw = 1
                if self.at("cycles_per_word"):
                    self.advance()
                    cpw = self.number()
                if bus is not None:
                    problems.append(Diagnostic(t.line, t.col, "duplicate bus declaration"))
                bus = ast.BusDef(bname, cpw, (t.line, t.col))
            elif self.at("place"):
                self.advance()
                mod = self.ident("module name").text
                if not self.at("hw", "sw", "fpga"):
                    self.fail("'hw'", "'sw'", "'fpga'")
                kind = ast.Placement(self.advance().text)
                if mod in placements:
                    problems.append(Diagnostic(t.line, t.col, f"duplicate placement for module {mod}"))
                placements[mod] = kind
            elif self.at("context"):
                contexts.append(self.parse_context())
            elif self.at("initial"):
                self.advance()
                initial = self.ident("context name").text
            else:
                self.fail("'system'", "'module'", "'channel'", "'bus'", "'place'", "'context'", "'initial'")
            self.skip_semis()
        if problems:
            raise SemanticError(problems)
        return ast.SystemModel(
            name=name or "system",
            modules=tuple(modules),
            channels=tuple(channels),
            bus=bus,
            placements=placements,
            config_map=ast.ConfigurationMap(tuple(contexts)) if contexts else None,
            initial_context=initial,
        )

    def parse_context(self) -> ast.Context:
        t = self.expect("context")
        name = self.ident("context name").text
        self.expect("bitstream")
        words = self.number("bitstream word count")
        self.expect("{")
        fns = []
        self.skip_semis()
        while not self.at("}"):
            ft = self.expect("fn")
            fname = self.ident("function name").text
            self.expect("latency")
            fns.append(ast.FnDecl(fname, self.number("latency"), (ft.line, ft.col)))
            self.skip_semis()
        self.expect("}")
        return ast.Context(name, tuple(fns), words, (t.line, t.col))

    def parse_channel(self) -> ast.ChannelDef:
        t = self.expect("channel")
        name = self.ident("channel name").text
        src = self.endpoint()
        self.expect("->")
        dst = self.endpoint()
        cap = None
        selfloop = False
        while self.at("capacity", "selfloop"):
            if self.advance().text == "capacity":
                if self.at("unbounded"):
                    self.advance()
                    cap = None
                else:
                    cap = self.number("capacity")
            else:
                selfloop = True
        return ast.ChannelDef(name, src, dst, cap, selfloop, (t.line, t.col))

    def endpoint(self) -> tuple:
        mod = self.ident("module name").text
        self.expect(".")
        return (mod, self.ident("port name").text)

    def parse_module(self) -> ast.ModuleDef:
        t = self.expect("module")
        name = self.ident("module name").text
        self.expect("{")
        ins, outs, params = [], [], []
        annotations: dict = {}
        procs: dict = {}
        behavior = None
        kernel = None
        problems = []
        self.skip_semis()
        while not self.at("}"):
            it = self.tok
            if self.at("port"):
                self.advance()
                if self.at("in"):
                    self.advance()
                    ins.append(self.ident("port name").text)
                elif self.at("out"):
                    self.advance()
                    outs.append(self.ident("port name").text)
                else:
                    self.fail("'in'", "'out'")
            elif self.at("param"):
                self.advance()
                params.append(self.ident("parameter name").text)
            elif self.at("annotate"):
                self.advance()
                label = self.ident("compute label").text
                annotations[label] = self.number("cycle count")
            elif self.at("proc"):
                self.advance()
                pname = self.ident("procedure name").text
                if pname in procs:
                    problems.append(Diagnostic(it.line, it.col, f"duplicate procedure {pname}"))
                procs[pname] = (self.block(), (it.line, it.col))
            elif self.at("behavior"):
                self.advance()
                if behavior is not None:
                    problems.append(Diagnostic(it.line, it.col, f"module {name} has two behaviors"))
                behavior = self.block()
            elif self.at("kernel"):
                self.advance()
                self.expect("(")
                kparams = []
                if not self.at(")"):
                    kparams.append(self.ident("parameter name").text)
                    while self.at(","):
                        self.advance()
                        kparams.append(self.ident("parameter name").text)
                self.expect(")")
                self.expect("->")
                result = self.ident("result variable").text
                if kernel is not None:
                    problems.append(Diagnostic(it.line, it.col, f"module {name} has two kernels"))
                kernel = (tuple(kparams), result, self.block(), (it.line, it.col))
            else:
                self.fail("'port'", "'param'", "'annotate'", "'proc'", "'behavior'", "'kernel'", "'}'")
            self.skip_semis()
        self.expect("}")
        body = _inline(behavior or (), procs, problems)
        kern = None
        if kernel is not None:
            kern = ast.Kernel(kernel[0], kernel[1], _inline(kernel[2], procs, problems), kernel[3])
        if problems:
            raise SemanticError(problems)
        return ast.ModuleDef(
            name=name,
            in_ports=tuple(ins),
            out_ports=tuple(outs),
            behavior=ast.Program(tuple(params), body),
            hw_annotation=annotations,
            kernel=kern,
            loc=(t.line, t.col),
        )

    # -- statements ----------------------------------------------------------
    def block(self) -> tuple:
        self.enter()
        self.expect("{")
        out = []
        self.skip_semis()
        while not self.at("}"):
            out.append(self.statement())
            self.skip_semis()
        self.expect("}")
        self.leave()
        return tuple(out)

    def statement(self):
        t = self.tok
        loc = (t.line, t.col)
        if self.at("read"):
            self.advance()
            port = self.ident("port name").text
            self.expect("->")
            return ast.Read(port, self.ident("variable").text, loc)
        if self.at("write"):
            self.advance()
            port = self.ident("port name").text
            self.expect("<-")
            return ast.Write(port, self.expr(), loc)
        if self.at("compute"):
            self.advance()
            label = self.ident("compute label").text
            cycles = self.number() if self.tok.kind == "num" else None
            return ast.Compute(label, cycles, loc)
        if self.at("reconfigure"):
            self.advance()
            if self.tok.kind != "ident":
                t2 = self.tok
                raise SemanticError(
                    [Diagnostic(t2.line, t2.col, "reconfigure requires a literal context name")]
                )
            return ast.Reconfigure(self.advance().text, loc)
        if self.at("callfpga"):
            self.advance()
            fn = self.ident("function name").text
            self.expect("(")
            args = []
            if not self.at(")"):
                args.append(self.expr())
                while self.at(","):
                    self.advance()
                    args.append(self.expr())
            self.expect(")")
            self.expect("->")
            return ast.CallFpga(fn, self.ident("variable").text, tuple(args), loc)
        if self.at("call"):
            self.advance()
            return _Call(self.ident("procedure name").text, loc)
        if self.at("if"):
            return self.if_stmt()
        if self.at("repeat"):
            self.advance()
            n = self.number("loop count")
            if n < 1:
                raise SemanticError([Diagnostic(t.line, t.col, "repeat count must be at least 1")])
            return ast.Repeat(n, self.block(), loc)
        if self.tok.kind == "ident":
            var = self.advance().text
            self.expect("=")
            return ast.Assign(var, self.expr(), loc)
        self.fail("statement")

    def if_stmt(self):
        t = self.expect("if")
        self.enter()
        cond = self.expr()
        then = self.block()
        orelse: tuple = ()
        if self.at("else"):
            self.advance()
            orelse = (self.if_stmt(),) if self.at("if") else self.block()
        self.leave()
        return ast.If(cond, then, orelse, (t.line, t.col))

    # -- expressions ---------------------------------------------------------
    def expr(self):
        self.enter()
        e = self.or_expr()
        self.leave()
        return e

    def or_expr(self):
        e = self.and_expr()
        while self.at("or"):
            t = self.advance()
            e = ast.Binary("or", e, self.and_expr(), (t.line, t.col))
        return e

    def and_expr(self):
        e = self.not_expr()
        while self.at("and"):
            t = self.advance()
            e = ast.Binary("and", e, self.not_expr(), (t.line, t.col))
        return e

    def not_expr(self):
        if self.at("not"):
            t = self.advance()
            self.enter()
            e = ast.Unary("not", self.not_expr(), (t.line, t.col))
            self.leave()
            return e
        return self.comparison()

    def comparison(self):
        e = self.additive()
        if self.at(*ast.COMPARE_OPS):
            t = self.advance()
            e = ast.Binary(t.text, e, self.additive(), (t.line, t.col))
        return e

    def additive(self):
        e = self.term()
        while self.at("+", "-"):
            t = self.advance()
            e = ast.Binary(t.text, e, self.term(), (t.line, t.col))
        return e

    def term(self):
        e = self.unary()
        while self.at("*", "/"):
            t = self.advance()
            e = ast.Binary(t.text, e, self.unary(), (t.line, t.col))
        return e

    def unary(self):
        if self.at("-"):
            t = self.advance()
            self.enter()
            operand = self.unary()
            self.leave()
            if isinstance(operand, ast.Const):
                return ast.Const(wrap32(-operand.value), (t.line, t.col))
            return ast.Unary("-", operand, (t.line, t.col))
        return self.primary()

    def primary(self):
        t = self.tok
        if t.kind == "num":
            self.advance()
            return ast.Const(wrap32(int(t.text)), (t.line, t.col))
        if t.kind == "ident":
            self.advance()
            return ast.Var(t.text, (t.line, t.col))
        if self.at("("):
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        self.fail("expression")


def _inline(stmts, procs: dict, problems: list, stack: tuple = ()) -> tuple:
    out = []
    for s in stmts:
        if isinstance(s, _Call):
            if s.name not in procs:
                problems.append(Diagnostic(*s.loc, f"unknown procedure {s.name}"))
                continue
            if s.name in stack:
                problems.append(
                    Diagnostic(*s.loc, "recursive procedure call: " + " -> ".join(stack + (s.name,)))
                )
                continue
            out.extend(_inline(procs[s.name][0], procs, problems, stack + (s.name,)))
        elif isinstance(s, ast.If):
            out.append(ast.If(s.cond, _inline(s.then, procs, problems, stack),
                              _inline(s.orelse, procs, problems, stack), s.loc))
        elif isinstance(s, ast.Repeat):
            out.append(ast.Repeat(s.count, _inline(s.body, procs, problems, stack), s.loc))
        else:
            out.append(s)
    return tuple(out)


def parse_model(text: str, *, check: bool = True) -> ast.SystemModel:
    """Parse model source.

    Raises :class:`ModelSyntaxError` or :class:`SemanticError` carrying
    positioned diagnostics.  With ``check`` the result is also validated
    against the level-independent model invariants.
    """
    from .validate import validate

    model = _Parser(text).parse()
    if check:
        diags = validate(model, 1)
        if diags:
            raise SemanticError(diags)
    return model


def parse_file(path) -> ast.SystemModel:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())
