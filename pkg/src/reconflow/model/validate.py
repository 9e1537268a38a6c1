"""Level-gated model checks.

``validate(model, level)`` returns diagnostics rather than raising; the set
required at level ``L`` is always a subset of the set at ``L + 1``.
"""

from __future__ import annotations

from ..errors import Diagnostic
from . import ast


def _d(loc, msg: str) -> Diagnostic:
    line, col = loc if loc else (0, 0)
    return Diagnostic(line, col, msg)


def _dupes(items, what: str, out: list):
    seen = set()
    for name, loc in items:
        if name in seen:
            out.append(_d(loc, f"duplicate {what} name {name}"))
        seen.add(name)


def _check_assigned(stmts, defined: set, module: str, out: list) -> set:
    """Definite-assignment pass; returns the variables defined afterwards."""
    for s in stmts:
        used = []
        if isinstance(s, ast.Write):
            used = list(ast.expr_vars(s.expr))
        elif isinstance(s, ast.Assign):
            used = list(ast.expr_vars(s.expr))
        elif isinstance(s, ast.CallFpga):
            used = [v for a in s.args for v in ast.expr_vars(a)]
        elif isinstance(s, ast.If):
            used = list(ast.expr_vars(s.cond))
        for v in used:
            if v not in defined:
                out.append(_d(s.loc, f"variable {v} used before assignment in {module}"))
                defined = defined | {v}  # report once
        if isinstance(s, (ast.Read, ast.Assign)):
            defined = defined | {s.var}
        elif isinstance(s, ast.CallFpga):
            defined = defined | {s.out}
        elif isinstance(s, ast.If):
            a = _check_assigned(s.then, defined, module, out)
            b = _check_assigned(s.orelse, defined, module, out)
            defined = a & b
        elif isinstance(s, ast.Repeat):
            # count >= 1, so the body always runs at least once
            defined = _check_assigned(s.body, defined, module, out)
    return defined


def _fpga_statements(m: ast.ModuleDef) -> list:
    return [s for s in ast.walk(m.behavior.body) if isinstance(s, (ast.Reconfigure, ast.CallFpga))]


def validate(model: ast.SystemModel, level: int = 1) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    modules = {m.name: m for m in model.modules}
    cmap = model.config_map

    # names
    _dupes([(m.name, m.loc) for m in model.modules], "module", out)
    _dupes([(c.name, c.loc) for c in model.channels], "channel", out)
    if cmap is not None:
        _dupes([(c.name, c.loc) for c in cmap.contexts], "context", out)
        for c in cmap.contexts:
            _dupes([(f.name, f.loc) for f in c.functions], f"function in context {c.name}", out)
            if c.bitstream_words < 1:
                out.append(_d(c.loc, f"context {c.name} needs bitstream_words >= 1"))
        latencies: dict = {}
        for c in cmap.contexts:
            for f in c.functions:
                if f.name in latencies and latencies[f.name] != f.latency:
                    out.append(_d(f.loc, f"function {f.name} has inconsistent latency across contexts"))
                latencies.setdefault(f.name, f.latency)
    if model.bus is not None and model.bus.cycles_per_word < 1:
        out.append(_d(model.bus.loc, "bus cycles_per_word must be >= 1"))

    # modules
    for m in model.modules:
        _dupes([(p, m.loc) for p in m.in_ports + m.out_ports], f"port in module {m.name}", out)
        labels = {s.label for s in ast.walk(m.behavior.body) if isinstance(s, ast.Compute)}
        for label in m.hw_annotation:
            if label not in labels:
                out.append(_d(m.loc, f"annotation {label} names no compute block in {m.name}"))
        for s in ast.walk(m.behavior.body):
            if isinstance(s, ast.Read) and s.port not in m.in_ports:
                out.append(_d(s.loc, f"{m.name} has no input port {s.port}"))
            elif isinstance(s, ast.Write) and s.port not in m.out_ports:
                out.append(_d(s.loc, f"{m.name} has no output port {s.port}"))
            elif isinstance(s, ast.Reconfigure):
                if cmap is None or cmap.get(s.context) is None:
                    out.append(_d(s.loc, f"unknown context {s.context}"))
            elif isinstance(s, ast.CallFpga):
                if s.fn not in modules or modules[s.fn].kernel is None:
                    out.append(_d(s.loc, f"callfpga {s.fn} has no kernel module"))
                elif len(modules[s.fn].kernel.params) != len(s.args):
                    out.append(_d(s.loc, f"callfpga {s.fn} expects {len(modules[s.fn].kernel.params)} arguments"))
        _check_assigned(m.behavior.body, set(m.behavior.params), m.name, out)
        if m.kernel is not None:
            k = m.kernel
            for s in ast.walk(k.body):
                if not isinstance(s, (ast.Assign, ast.If, ast.Repeat)):
                    out.append(_d(s.loc, f"kernel of {m.name} may only assign, branch and loop"))
            defined = _check_assigned(k.body, set(k.params), m.name, out)
            if k.result not in defined:
                out.append(_d(k.loc, f"kernel of {m.name} never assigns its result {k.result}"))

    # function universe: callfpga targets and FPGA-placed kernels
    needed: dict = {}
    for m in model.modules:
        for s in ast.walk(m.behavior.body):
            if isinstance(s, ast.CallFpga):
                needed.setdefault(s.fn, s.loc)
    for name, kind in model.placements.items():
        if kind is ast.Placement.FPGA and name in modules and modules[name].kernel is not None:
            needed.setdefault(name, modules[name].loc)
    universe = cmap.universe() if cmap is not None else set()
    for fn, loc in needed.items():
        if fn not in universe:
            out.append(_d(loc, f"function {fn} is not provided by any context"))

    # channels
    bound: dict = {}
    for c in model.channels:
        for end, ports in ((c.src, "out_ports"), (c.dst, "in_ports")):
            mod, port = end
            if mod not in modules:
                out.append(_d(c.loc, f"channel {c.name} names unknown module {mod}"))
            elif port not in getattr(modules[mod], ports):
                direction = "output" if ports == "out_ports" else "input"
                out.append(_d(c.loc, f"channel {c.name}: {mod} has no {direction} port {port}"))
            elif end in bound:
                out.append(_d(c.loc, f"port {mod}.{port} bound to both {bound[end]} and {c.name}"))
            else:
                bound[end] = c.name
        if c.src[0] == c.dst[0] and not c.selfloop:
            out.append(_d(c.loc, f"channel {c.name} connects {c.src[0]} to itself without 'selfloop'"))
        if c.capacity is not None and c.capacity < 1:
            out.append(_d(c.loc, f"channel {c.name} capacity must be positive"))

    # placements
    for name in model.placements:
        if name not in modules:
            out.append(_d((0, 0), f"placement for unknown module {name}"))
    kinds = set(model.placements.values())
    if kinds & {ast.Placement.SW, ast.Placement.FPGA} and model.bus is None:
        out.append(_d((0, 0), "SW or FPGA placement requires a bus"))
    if ast.Placement.FPGA in kinds and cmap is None:
        out.append(_d((0, 0), "FPGA placement requires configuration map"))
    if model.initial_context is not None and (cmap is None or cmap.get(model.initial_context) is None):
        out.append(_d((0, 0), f"initial context {model.initial_context} is not declared"))

    if level >= 2:
        for m in model.modules:
            if m.name not in model.placements:
                out.append(_d(m.loc, f"module {m.name} has no placement"))

    if level >= 3:
        if cmap is None:
            out.append(_d((0, 0), "level 3 requires a configuration map"))
        owners = [m for m in model.modules if _fpga_statements(m)]
        if len(owners) > 1:
            names = ", ".join(m.name for m in owners)
            out.append(_d(owners[1].loc, f"reconfigure/callfpga must live in a single SW task; found in {names}"))
        for m in owners:
            if model.placements.get(m.name, ast.Placement.SW) is not ast.Placement.SW:
                out.append(_d(m.loc, f"{m.name} issues FPGA operations but is not placed on SW"))
        for name, kind in model.placements.items():
            if kind is ast.Placement.FPGA and name in modules and modules[name].kernel is None:
                out.append(_d(modules[name].loc, f"FPGA-placed module {name} declares no kernel"))
    return out


def fpga_task(model: ast.SystemModel) -> ast.ModuleDef | None:
    """The SW module holding the reconfiguration instrumentation, if any."""
    owners = [m for m in model.modules if _fpga_statements(m)]
    return owners[0] if owners else None
