"""Canonical pretty-printer; ``parse_model(print_model(m)) == m``."""

from __future__ import annotations

from . import ast

_PREC = {"or": 1, "and": 2, "not": 3}
for _op in ast.COMPARE_OPS:
    _PREC[_op] = 4
_PREC.update({"+": 5, "-": 5, "*": 6, "/": 6})


def format_expr(e: ast.Expr, parent: int = 0) -> str:
    if isinstance(e, ast.Const):
        text = str(e.value)
        return f"({text})" if e.value < 0 and parent >= 5 else text
    if isinstance(e, ast.Var):
        return e.name
    if isinstance(e, ast.Unary):
        if e.op == "not":
            text = "not " + format_expr(e.operand, _PREC["not"])
            return f"({text})" if parent > _PREC["not"] else text
        return "-" + format_expr(e.operand, 7)
    prec = _PREC[e.op]
    # comparisons do not chain; force parentheses on nested ones
    lp = prec + 1 if e.op in ast.COMPARE_OPS else prec
    text = f"{format_expr(e.left, lp)} {e.op} {format_expr(e.right, prec + 1)}"
    return f"({text})" if parent > prec else text


def format_stmts(stmts, indent: int) -> list[str]:
    pad = "  " * indent
    lines = []
    for s in stmts:
        if isinstance(s, ast.Read):
            lines.append(f"{pad}read {s.port} -> {s.var}")
        elif isinstance(s, ast.Write):
            lines.append(f"{pad}write {s.port} <- {format_expr(s.expr)}")
        elif isinstance(s, ast.Assign):
            lines.append(f"{pad}{s.var} = {format_expr(s.expr)}")
        elif isinstance(s, ast.Compute):
            tail = f" {s.cycles}" if s.cycles is not None else ""
            lines.append(f"{pad}compute {s.label}{tail}")
        elif isinstance(s, ast.Reconfigure):
            lines.append(f"{pad}reconfigure {s.context}")
        elif isinstance(s, ast.CallFpga):
            args = ", ".join(format_expr(a) for a in s.args)
            lines.append(f"{pad}callfpga {s.fn}({args}) -> {s.out}")
        elif isinstance(s, ast.If):
            lines.append(f"{pad}if {format_expr(s.cond)} {{")
            lines += format_stmts(s.then, indent + 1)
            if s.orelse:
                lines.append(f"{pad}}} else {{")
                lines += format_stmts(s.orelse, indent + 1)
            lines.append(f"{pad}}}")
        elif isinstance(s, ast.Repeat):
            lines.append(f"{pad}repeat {s.count} {{")
            lines += format_stmts(s.body, indent + 1)
            lines.append(f"{pad}}}")
    return lines


def print_model(model: ast.SystemModel) -> str:
    lines = [f"system {model.name}", ""]
    if model.bus is not None:
        lines += [f"bus {model.bus.name} cycles_per_word {model.bus.cycles_per_word}", ""]
    if model.config_map is not None:
        for c in model.config_map.contexts:
            lines.append(f"context {c.name} bitstream {c.bitstream_words} {{")
            lines += [f"  fn {f.name} latency {f.latency}" for f in c.functions]
            lines.append("}")
        if model.initial_context is not None:
            lines.append(f"initial {model.initial_context}")
        lines.append("")
    for m in model.modules:
        lines.append(f"module {m.name} {{")
        lines += [f"  port in {p}" for p in m.in_ports]
        lines += [f"  port out {p}" for p in m.out_ports]
        lines += [f"  param {p}" for p in m.behavior.params]
        lines += [f"  annotate {k} {v}" for k, v in m.hw_annotation.items()]
        if m.kernel is not None:
            k = m.kernel
            lines.append(f"  kernel ({', '.join(k.params)}) -> {k.result} {{")
            lines += format_stmts(k.body, 2)
            lines.append("  }")
        if m.behavior.body or m.kernel is None:
            lines.append("  behavior {")
            lines += format_stmts(m.behavior.body, 2)
            lines.append("  }")
        lines += ["}", ""]
    for c in model.channels:
        cap = f" capacity {c.capacity}" if c.capacity is not None else ""
        loop = " selfloop" if c.selfloop else ""
        lines.append(f"channel {c.name} {c.src[0]}.{c.src[1]} -> {c.dst[0]}.{c.dst[1]}{cap}{loop}")
    if model.channels:
        lines.append("")
    for m in model.modules:
        if m.name in model.placements:
            lines.append(f"place {m.name} {model.placements[m.name].value}")
    for name, kind in model.placements.items():
        if not model.has_module(name):
            lines.append(f"place {name} {kind.value}")
    return "\n".join(lines).rstrip() + "\n"
