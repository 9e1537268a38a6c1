"""Command-line front end.

Exit codes: 0 all checks pass, 1 violation or counterexample found,
2 inconclusive (nothing disproved, not everything proven), 3 bad input.
Machine-readable results go to JSON files under ``--out``; human-readable
summaries go to standard output (or the JSON itself with ``--json``).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .errors import (
    CombinatorialLimit, LivelockGuard, ModelError, PropertyFailsOnGoldenModel, ReconfigViolation,
    ReconflowError, RuntimeTrap, TransformError, UnannotatedCompute, UnknownChannel,
    UnknownContext, UnknownModule,
)
from .model import build_cfg, parse_model, print_model, validate

EXIT_OK, EXIT_VIOLATION, EXIT_UNKNOWN, EXIT_USAGE = 0, 1, 2, 3

BUNDLED = {
    "@face": "face.rsm",
    "@face-l2": "face_l2.rsm",
    "@face-l3": "face_l3.rsm",
}


class UsageError(Exception):
    pass


# -- plumbing ------------------------------------------------------------------

class Output:
    def __init__(self, out_dir: str, as_json: bool):
        self.dir = Path(out_dir)
        self.as_json = as_json
        self.result: dict = {}

    def path(self, name: str) -> Path:
        self.dir.mkdir(parents=True, exist_ok=True)
        return self.dir / name

    def write_json(self, name: str, data) -> Path:
        p = self.path(name)
        p.write_text(dumps(data), encoding="utf-8")
        return p

    def write_text(self, name: str, text: str) -> Path:
        p = self.path(name)
        p.write_text(text, encoding="utf-8")
        return p

    def say(self, text: str = ""):
        if not self.as_json:
            print(text)

    def finish(self):
        if self.as_json:
            sys.stdout.write(dumps(self.result))


def dumps(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def model_source(spec: str) -> tuple[str, str]:
    """(text, display name) for a model path or a bundled alias."""
    if spec in BUNDLED:
        from .bundled import asset_text
        return asset_text(BUNDLED[spec]), spec
    p = Path(spec)
    if not p.is_file():
        raise UsageError(f"model file not found: {spec}")
    return p.read_text(encoding="utf-8"), spec


def load_model(spec: str | None, level: int = 1):
    if spec is None:
        raise UsageError("--model is required")
    text, name = model_source(spec)
    try:
        model = parse_model(text)
    except ModelError as e:
        raise UsageError("\n".join(d.format(name) for d in e.diagnostics)) from None
    diags = validate(model, level)
    if diags:
        raise UsageError("\n".join(d.format(name) for d in diags))
    return model


def load_testbench(args):
    from .sim.stimulus import Stimulus, load_stimuli
    if getattr(args, "stimulus", None):
        try:
            stims = load_stimuli(args.stimulus)
        except (OSError, ValueError, KeyError, TypeError) as e:
            raise UsageError(f"cannot read stimulus file {args.stimulus}: {e}") from None
        if not stims:
            raise UsageError(f"stimulus file {args.stimulus} holds no stimuli")
        return stims
    return [Stimulus(seed=args.seed)]


def load_props(path):
    from .coverage.properties import PropertySyntaxError, load_properties
    try:
        return load_properties(path)
    except OSError as e:
        raise UsageError(f"cannot read property file: {e}") from None
    except PropertySyntaxError as e:
        raise UsageError(f"{path}: {e}") from None


def _level(args, default: int) -> int:
    return args.level if args.level is not None else default


# -- sim -----------------------------------------------------------------------

def cmd_sim(args, out: Output) -> int:
    from .sim import Trace, compare_traces, simulate_timed, simulate_untimed
    from .sim.trace import EQUAL

    level = _level(args, 1)
    if level not in (1, 2, 3):
        raise UsageError("sim runs at level 1, 2 or 3")
    model = load_model(args.model, level)
    stim = load_testbench(args)[0]
    deadlines = []
    if args.props:
        from .coverage.properties import DEADLINE
        deadlines = [p for p in load_props(args.props) if p.kind == DEADLINE]
        if deadlines and level == 1:
            raise UsageError("deadline properties need a timed level (2 or 3)")
    stats = None
    try:
        if level == 1:
            trace = simulate_untimed(model, stim)
        else:
            trace, stats = simulate_timed(model, stim, level, deadlines=deadlines, cycle_cap=args.cycle_cap)
    except ReconfigViolation as v:
        out.result = {"status": "violation", "violation": v.to_dict()}
        out.write_json("violation.json", out.result)
        out.say(f"reconfiguration violation: {v}")
        return EXIT_VIOLATION
    except (RuntimeTrap, LivelockGuard) as e:
        out.result = {"status": "aborted", "error": type(e).__name__, "message": str(e)}
        out.write_json("sim.json", out.result)
        out.say(f"simulation aborted: {e}")
        return EXIT_VIOLATION

    out.write_text("trace.txt", trace.dumps())
    summary = {"level": level, "records": len(trace.records), "deadlocked": trace.deadlocked}
    if stats is not None:
        out.write_json("stats.json", stats.to_dict())
        out.write_text("stats.txt", stats.text())
        summary.update(total_cycles=stats.total_cycles, bus_utilization=stats.bus_utilization,
                       reconfig_count=stats.reconfig_count)
        line = (f"level {level}: {stats.total_cycles} cycles, bus utilization "
                f"{stats.bus_utilization:.4f}, {stats.reconfig_count} reconfigurations, "
                f"{len(trace.records)} records")
    else:
        line = f"level 1: {len(trace.records)} records"
    code = EXIT_OK
    if trace.deadlocked:
        line += ", DEADLOCK"
        code = EXIT_VIOLATION
    out.say(line)
    if stats is not None and stats.deadline_results:
        for r in stats.deadline_results:
            out.say(f"deadline {r.property_id}: observed {r.observed}, bound {r.bound}, "
                    f"{'PASS' if r.passed else 'FAIL'}")
            if not r.passed:
                code = EXIT_VIOLATION
    if args.compare:
        try:
            ref = Trace.read(args.compare)
        except (OSError, ValueError) as e:
            raise UsageError(f"cannot read trace {args.compare}: {e}") from None
        cmp = compare_traces(ref, trace)
        summary["compare"] = "EQUAL" if cmp == EQUAL else cmp.to_dict()
        if cmp == EQUAL:
            out.say(f"trace EQUAL to {args.compare}")
        else:
            out.say(f"trace differs from {args.compare}: channel {cmp.channel} index {cmp.index} "
                    f"({cmp.value_a} vs {cmp.value_b})")
            code = EXIT_VIOLATION
    out.result = summary
    out.write_json("sim.json", summary)
    return code


# -- check-reconfig ------------------------------------------------------------

def cmd_check_reconfig(args, out: Output) -> int:
    from .reconfig import CERTIFICATE, CONFIRMED, analyze_model, replay_counterexample

    model = load_model(args.model, 1)
    if model.config_map is None or not model.config_map.contexts:
        raise UsageError("check-reconfig needs a model with a configuration map")
    diags = validate(model, 3)
    if diags:
        raise UsageError("\n".join(d.format(args.model) for d in diags))
    verdict = analyze_model(model)
    result = {"verdict": verdict.to_dict()}
    if args.states:
        result["states"] = verdict.states_dict()
    if verdict.kind == CERTIFICATE:
        out.say(f"CERTIFICATE ({verdict.module or 'no FPGA task'}, {verdict.iterations} iterations)")
        code = EXIT_OK
    else:
        d = verdict.to_dict()
        call = d["offending_call"]
        out.say(f"COUNTEREXAMPLE: callfpga {call['function']} at {call['line']}:{call['col']} "
                f"may run with {', '.join(d['missing_in'])} loaded")
        out.say("path:")
        for step in d["path"]:
            out.say(f"  {step['line']}:{step['col']} {step['stmt']}")
        if verdict.may_be_infeasible:
            out.say("path may be infeasible (data-dependent or constant branch)")
        replay = replay_counterexample(model, verdict, budget=args.replay_budget, seed=args.seed)
        result["replay"] = replay.to_dict()
        out.say(f"replay: {replay.outcome} after {replay.attempts} stimuli")
        code = EXIT_VIOLATION if replay.outcome == CONFIRMED else EXIT_UNKNOWN
    if args.states and verdict.kind == CERTIFICATE:
        for node, ctxs in result["states"].items():
            out.say(f"  node {node} {verdict.cfg.describe(int(node))}: {{{', '.join(ctxs)}}}")
    out.result = result
    out.write_json("reconfig.json", result)
    return code


# -- check-deadlock / fifo / wcet ------------------------------------------------

def cmd_check_deadlock(args, out: Output) -> int:
    from .reach import extract_net, prove_deadlock_free

    model = load_model(args.model, 1)
    net = extract_net(model, reduce=not args.full_net)
    if args.export_net:
        Path(args.export_net).write_text(net.export(), encoding="utf-8")
    try:
        report = prove_deadlock_free(net, cap=args.target_cap, state_cap=args.state_cap)
    except CombinatorialLimit as e:
        out.result = {"error": "CombinatorialLimit", "count": e.count, "cap": e.cap}
        out.write_json("deadlock.json", out.result)
        raise UsageError(str(e)) from None
    data = report.to_dict(net)
    witnessed = [u for u in data["unknown"] if u["witness"] is not None]
    data["witnessed"] = len(witnessed)
    out.say(f"{report.targets} deadlock targets: {report.proven} proven unreachable, "
            f"{len(witnessed)} witnessed, {len(report.unknown) - len(witnessed)} unknown "
            f"({report.lp_calls} LP solves)")
    for u in data["unknown"]:
        out.say(f"  {u['label']}: " + ("witness " + " ".join(u["witness"]) if u["witness"] is not None
                                        else "UNKNOWN"))
    out.result = data
    out.write_json("deadlock.json", data)
    if witnessed:
        return EXIT_VIOLATION
    return EXIT_UNKNOWN if report.unknown else EXIT_OK


def cmd_fifo(args, out: Output) -> int:
    from .reach import extract_net, fifo_bound

    model = load_model(args.model, 1)
    net = extract_net(model, reduce=not args.full_net)
    names = args.channel or [c.name for c in model.channels]
    result = {}
    for name in names:
        if name not in net.item:
            raise UsageError(f"unknown channel {name}")
        b = fifo_bound(net, name)
        cap = model.channel(name).capacity
        result[name] = {"bound": b, "capacity": cap}
        out.say(f"{name:16s} bound {b}" + (f" (capacity {cap})" if cap is not None else ""))
    out.result = result
    out.write_json("fifo.json", result)
    return EXIT_OK


def _node_at(g, line: int | None, default: int) -> int:
    if line is None:
        return default
    for n in range(len(g.nodes)):
        if g.loc(n)[0] == line and n not in (g.entry, g.exit):
            return n
    raise UsageError(f"no statement on line {line}")


def cmd_wcet(args, out: Output) -> int:
    from .reach import deadline_check, node_costs

    level = _level(args, 2)
    model = load_model(args.model, level)
    if not model.has_module(args.module):
        raise UsageError(f"unknown module {args.module}")
    g = build_cfg(model.module(args.module).behavior)
    src = _node_at(g, args.from_line, g.entry)
    dst = _node_at(g, args.to_line, g.exit)
    try:
        costs = node_costs(model, args.module, g, level)
    except UnannotatedCompute as e:
        raise UsageError(str(e)) from None
    v = deadline_check(g, src, dst, args.bound, costs)
    out.result = {"module": args.module, "level": level, **v.to_dict()}
    out.write_json("wcet.json", out.result)
    out.say(f"{args.module}: wcet {v.wcet} cycles, bound {args.bound}: {v.status}")
    return EXIT_OK if v.status == "PASS" else EXIT_VIOLATION


# -- properties and coverage ---------------------------------------------------

def cmd_verify_properties(args, out: Output) -> int:
    from .coverage import DEADLINE, FAIL, check_properties, pcc
    from .sim import simulate_timed, simulate_untimed

    if not args.props:
        raise UsageError("verify-properties needs --props")
    props = load_props(args.props)
    timed = any(p.kind == DEADLINE for p in props)
    level = _level(args, 2 if timed else 1)
    level = min(level, 3)  # level 4 verifies on the most refined simulation
    if timed and level == 1:
        raise UsageError("deadline properties need a timed level (2 or 3)")
    model = load_model(args.model, level)
    testbench = load_testbench(args)
    results = []
    failed = False
    for i, stim in enumerate(testbench):
        try:
            if level == 1:
                trace, stats = simulate_untimed(model, stim), None
            else:
                trace, stats = simulate_timed(model, stim, level, deadlines=[p for p in props if p.kind == DEADLINE])
            checked = check_properties(trace, stats, props, model.observable_channels())
        except UnknownChannel as e:
            raise UsageError(str(e)) from None
        except (RuntimeTrap, ReconfigViolation) as e:
            out.say(f"stimulus {i}: simulation aborted: {e}")
            out.result = {"status": "aborted", "stimulus": i, "message": str(e)}
            out.write_json("properties.json", out.result)
            return EXIT_VIOLATION
        for r in checked:
            results.append({"stimulus": i, **r.to_dict()})
            if r.status == FAIL:
                failed = True
    for r in results:
        extra = f" at index {r['index']}" if "index" in r else ""
        extra += f" (observed {r['observed']})" if "observed" in r else ""
        out.say(f"{r['id']} stimulus {r['stimulus']}: {r['status']}{extra}")
    result = {"properties": results}
    if failed:
        out.result = result
        out.write_json("properties.json", result)
        return EXIT_VIOLATION
    try:
        report = pcc(model, props, testbench, level=level, workers=args.workers)
    except PropertyFailsOnGoldenModel as e:  # pragma: no cover - screened above
        out.say(str(e))
        return EXIT_VIOLATION
    result["pcc"] = report.to_dict()
    result["threshold"] = args.threshold
    out.write_json("pcc.json", report.to_dict())
    out.write_text("pcc.txt", report.text())
    out.say(f"property coverage {report.covered}/{report.total} "
            f"({100 * report.property_coverage_pct:.1f}%), threshold {100 * args.threshold:.1f}%")
    shown = report.undetected[: args.show]
    if shown:
        out.say("undetected faults (extend the property set to catch these):")
        for name in shown:
            out.say(f"  {name}")
        if len(report.undetected) > len(shown):
            out.say(f"  ... {len(report.undetected) - len(shown)} more in pcc.json")
    out.result = result
    out.write_json("properties.json", result)
    return EXIT_UNKNOWN if report.property_coverage_pct < args.threshold else EXIT_OK


def cmd_coverage(args, out: Output) -> int:
    from .coverage import measure_coverage

    model = load_model(args.model, 1)
    testbench = load_testbench(args)
    try:
        report = measure_coverage(model, testbench, bits=not args.no_bits, workers=args.workers)
    except RuntimeTrap as e:
        stim = getattr(e, "stimulus", None)
        out.say(f"runtime trap: {e}" + (f" on stimulus {stim.to_dict()}" if stim else ""))
        return EXIT_VIOLATION
    out.result = report.to_dict()
    out.write_json("coverage.json", out.result)
    out.write_text("coverage.txt", report.text())
    out.say(report.text().rstrip())
    return EXIT_OK


def cmd_atpg(args, out: Output) -> int:
    from .coverage import generate_tests

    model = load_model(args.model, 1)
    try:
        kept, report = generate_tests(model, args.metric, args.budget, args.seed, workers=args.workers)
    except RuntimeTrap as e:
        out.say(f"runtime trap: {e}")
        return EXIT_VIOLATION
    tb = {"stimuli": [s.to_dict() for s in kept]}
    out.write_json("testbench.json", tb)
    out.write_json("coverage.json", report.to_dict())
    out.result = {"retained": len(kept), "metric": args.metric, "coverage": report.to_dict()}
    out.say(f"retained {len(kept)} of {args.budget} candidates; "
            f"{args.metric.lower()} coverage {100 * report.value(args.metric):.1f}%")
    return EXIT_OK


# -- transform -----------------------------------------------------------------

def _direction(text: str):
    from .sim.transform import TO_HW, TO_SW, to_fpga
    if text == "hw":
        return TO_HW
    if text == "sw":
        return TO_SW
    if text.startswith("fpga:") and len(text) > 5:
        return to_fpga(text[5:])
    raise UsageError(f"bad direction '{text}' (hw, sw or fpga:CONTEXT)")


def cmd_transform(args, out: Output) -> int:
    from .sim.transform import transform_group_sw, transform_move_module

    model = load_model(args.model, 1)
    try:
        if args.op == "group-sw":
            if not args.modules:
                raise UsageError("group-sw needs --modules")
            names = [n for n in args.modules.split(",") if n]
            new = transform_group_sw(model, names)
            diags = validate(new, 2)
            if diags:
                raise TransformError("; ".join(d.message for d in diags))
        else:
            if not args.module or not args.to:
                raise UsageError("move needs --module and --to")
            new = transform_move_module(model, args.module, _direction(args.to))
    except (UnknownModule, UnknownContext, TransformError) as e:
        raise UsageError(f"{type(e).__name__}: {e}") from None
    text = print_model(new)
    if parse_model(text) != new:  # pragma: no cover - printer/parser disagreement
        raise ReconflowError("transformed model does not round-trip")
    target = Path(args.output) if args.output else out.path(f"{new.name}.rsm")
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text, encoding="utf-8")
    placed = {k: v.value for k, v in sorted(new.placements.items())}
    out.result = {"model": str(target), "placements": placed}
    out.say(f"wrote {target}")
    return EXIT_OK


# -- bundled example and flow --------------------------------------------------

ASSETS = ("face.rsm", "face_l2.rsm", "face_l3.rsm", "face.props", "face_timing.props",
          "face_stimulus.json", "face_golden.trace")


def cmd_example(args, out: Output) -> int:
    from .bundled import asset_text
    written = [str(out.write_text(name, asset_text(name))) for name in ASSETS]
    out.result = {"files": written}
    for w in written:
        out.say(f"wrote {w}")
    return EXIT_OK


def cmd_flow(args, out: Output) -> int:
    """The four-level progression on the bundled example."""
    from .bundled import KERNELS, SW_MODULES, asset_text
    from .coverage import check_properties, parse_properties, pcc
    from .reconfig import analyze_model
    from .sim import compare_traces, simulate_timed, simulate_untimed
    from .sim.stimulus import Stimulus
    from .sim.trace import EQUAL
    from .sim.transform import to_fpga, transform_group_sw, transform_move_module

    if args.model not in (None, "@face"):
        raise UsageError("flow runs on the bundled example only")
    steps = []

    def step(name, ok, detail):
        steps.append({"step": name, "ok": ok, "detail": detail})
        out.say(f"[{'ok' if ok else 'FAIL'}] {name}: {detail}")
        return ok

    model1 = parse_model(asset_text("face.rsm"))
    stim = Stimulus.from_dict(json.loads(asset_text("face_stimulus.json")))
    t1 = simulate_untimed(model1, stim)
    step("level 1 simulation", not t1.deadlocked, f"{len(t1.records)} records")
    model2 = transform_group_sw(model1, SW_MODULES)
    t2, s2 = simulate_timed(model2, stim, 2)
    step("level 2 simulation", compare_traces(t1, t2) == EQUAL,
         f"{s2.total_cycles} cycles, traces {'EQUAL' if compare_traces(t1, t2) == EQUAL else 'differ'}")
    model3 = model2
    for name, ctx in KERNELS:
        model3 = transform_move_module(model3, name, to_fpga(ctx))
    v = analyze_model(model3)
    step("reconfiguration check", v.is_certificate, v.kind)
    t3, s3 = simulate_timed(model3, stim, 3)
    step("level 3 simulation", compare_traces(t1, t3) == EQUAL,
         f"{s3.total_cycles} cycles, {s3.reconfig_count} reconfigurations, "
         f"{s3.bitstream_words_total} bitstream words")
    props = parse_properties(asset_text("face.props"))
    res = check_properties(t1, None, props)
    step("properties", all(r.status == "PASS" for r in res), f"{len(res)} checked")
    if args.skip_pcc:
        step("property coverage", True, "skipped")
    else:
        rep = pcc(model1, props, [stim], workers=args.workers)
        step("property coverage", True, f"{100 * rep.property_coverage_pct:.1f}%")
    out.result = {"steps": steps}
    out.write_json("flow.json", out.result)
    return EXIT_OK if all(s["ok"] for s in steps) else EXIT_VIOLATION


# -- argument parsing ----------------------------------------------------------

def _globals(p: argparse.ArgumentParser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--model", default=d(None), help="model file, or @face / @face-l2 / @face-l3")
    p.add_argument("--level", type=int, choices=(1, 2, 3, 4), default=d(None))
    p.add_argument("--seed", type=int, default=d(0))
    p.add_argument("--out", default=d("reconflow-out"), help="output directory")
    p.add_argument("--json", action="store_true", default=d(False), help="print JSON to stdout")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="reconflow", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _globals(p, suppress=False)
    sub = p.add_subparsers(dest="command", required=True)

    def cmd(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        _globals(sp, suppress=True)
        sp.set_defaults(func=fn)
        return sp

    sp = cmd("sim", cmd_sim, "simulate at level 1, 2 or 3")
    sp.add_argument("--stimulus", help="stimulus JSON (first entry is used)")
    sp.add_argument("--props", help="property file; deadline entries are measured")
    sp.add_argument("--compare", help="reference trace to compare against")
    sp.add_argument("--cycle-cap", type=int, default=10**8)

    sp = cmd("check-reconfig", cmd_check_reconfig, "prove reconfiguration consistency")
    sp.add_argument("--states", action="store_true", help="include per-node abstract states")
    sp.add_argument("--replay-budget", type=int, default=200)

    sp = cmd("check-deadlock", cmd_check_deadlock, "prove deadlock freedom")
    sp.add_argument("--target-cap", type=int, default=10**4)
    sp.add_argument("--state-cap", type=int, default=10**5)
    sp.add_argument("--full-net", action="store_true", help="one control place per CFG node")
    sp.add_argument("--export-net", help="write the net in place/transition text form")

    sp = cmd("fifo", cmd_fifo, "static channel occupancy bounds")
    sp.add_argument("--channel", action="append")
    sp.add_argument("--full-net", action="store_true")

    sp = cmd("wcet", cmd_wcet, "static worst-case latency of one module")
    sp.add_argument("--module", required=True)
    sp.add_argument("--bound", type=int, required=True)
    sp.add_argument("--from-line", type=int)
    sp.add_argument("--to-line", type=int)

    sp = cmd("verify-properties", cmd_verify_properties, "check properties and their fault coverage")
    sp.add_argument("--props")
    sp.add_argument("--stimulus", help="testbench JSON")
    sp.add_argument("--threshold", type=float, default=0.9)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--show", type=int, default=20, help="undetected faults to print")

    sp = cmd("transform", cmd_transform, "rewrite the architecture")
    sp.add_argument("op", choices=("group-sw", "move"))
    sp.add_argument("--modules", help="comma-separated SW modules (group-sw)")
    sp.add_argument("--module", help="module to move")
    sp.add_argument("--to", help="hw, sw or fpga:CONTEXT")
    sp.add_argument("--output", help="model file to write")

    sp = cmd("coverage", cmd_coverage, "measure testbench coverage")
    sp.add_argument("--stimulus", help="testbench JSON")
    sp.add_argument("--no-bits", action="store_true", help="skip the bit-fault campaign")
    sp.add_argument("--workers", type=int, default=1)

    sp = cmd("atpg", cmd_atpg, "greedy random test generation")
    sp.add_argument("--metric", choices=("STATEMENT", "BRANCH", "CONDITION", "BIT"), default="BRANCH")
    sp.add_argument("--budget", type=int, default=100)
    sp.add_argument("--workers", type=int, default=1)

    cmd("example", cmd_example, "write the bundled example files")

    sp = cmd("flow", cmd_flow, "run the level 1 to 4 flow on the bundled example")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--skip-pcc", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    out = Output(args.out, args.json)
    try:
        code = args.func(args, out)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    out.finish()
    return code


if __name__ == "__main__":
    sys.exit(main())
