"""Trace-level properties and their evaluation.

Property files hold one property per line, optionally prefixed by an id::

    invariant out_conf >= 0
    p2: invariant 2*a - b < 10
    deadline in_frame out_class 4000
    expect out_class 7 18 2

An invariant is a linear comparison over the most recent value of each named
channel, checked after every record on one of those channels.  A deadline
bounds the worst source-to-sink latency of a timed run.  ``expect`` pins a
channel's whole value sequence.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import ReconflowError, UnknownChannel
from ..sim.timed import deadline_latency
from ..sim.trace import Trace

INVARIANT = "INVARIANT"
DEADLINE = "DEADLINE"
EXPECT = "EXPECT"
PASS = "PASS"
FAIL = "FAIL"

OPS = {
    "==": lambda a, b: a == b, "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b, "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b, ">=": lambda a, b: a >= b,
}


class PropertySyntaxError(ReconflowError):
    pass


@dataclass(frozen=True)
class Property:
    id: str
    kind: str
    terms: tuple = ()  # INVARIANT: ((coef, channel), ...)
    op: str = ""
    rhs: int = 0
    src: str = ""  # DEADLINE
    dst: str = ""
    bound: int = 0
    channel: str = ""  # EXPECT
    values: tuple = ()

    def channels(self) -> list[str]:
        if self.kind == INVARIANT:
            return list(dict.fromkeys(ch for _, ch in self.terms))
        if self.kind == DEADLINE:
            return [self.src, self.dst]
        return [self.channel]

    def text(self) -> str:
        if self.kind == INVARIANT:
            lhs = ""
            for i, (k, ch) in enumerate(self.terms):
                sign = "-" if k < 0 else "+"
                mag = abs(k)
                body = ch if mag == 1 else f"{mag}*{ch}"
                lhs += (f"-{body}" if sign == "-" else body) if i == 0 else f" {sign} {body}"
            return f"invariant {lhs} {self.op} {self.rhs}"
        if self.kind == DEADLINE:
            return f"deadline {self.src} {self.dst} {self.bound}"
        return " ".join(["expect", self.channel, *map(str, self.values)])


@dataclass(frozen=True)
class PropertyResult:
    id: str
    status: str
    index: int | None = None  # first violating record (invariant / expect)
    observed: int | None = None  # measured latency (deadline)

    def to_dict(self) -> dict:
        d = {"id": self.id, "status": self.status}
        if self.index is not None:
            d["index"] = self.index
        if self.observed is not None:
            d["observed"] = self.observed
        return d


_TERM = re.compile(r"\s*([+-])?\s*(?:(\d+)\s*\*\s*)?([A-Za-z_][\w.]*)\s*")
_INT = re.compile(r"-?\d+$")


def _linear(text: str, where: str) -> tuple:
    terms: dict = {}
    pos = 0
    first = True
    while pos < len(text):
        m = _TERM.match(text, pos)
        if m is None or (not first and m.group(1) is None):
            raise PropertySyntaxError(f"{where}: bad linear expression '{text}'")
        k = int(m.group(2) or 1) * (-1 if m.group(1) == "-" else 1)
        terms[m.group(3)] = terms.get(m.group(3), 0) + k
        pos = m.end()
        first = False
    if not terms:
        raise PropertySyntaxError(f"{where}: empty expression")
    return tuple((k, ch) for ch, k in terms.items() if k)


def parse_property(line: str, default_id: str) -> Property:
    pid = default_id
    m = re.match(r"\s*([A-Za-z_]\w*)\s*:\s*(.*)$", line)
    if m:
        pid, line = m.group(1), m.group(2)
    words = line.split()
    if not words:
        raise PropertySyntaxError(f"{pid}: empty property")
    kind = words[0]
    if kind == "invariant":
        body = line.split(None, 1)[1] if len(words) > 1 else ""
        m = re.match(r"(.*?)(==|!=|<=|>=|<|>)\s*(-?\d+)\s*$", body)
        if m is None:
            raise PropertySyntaxError(f"{pid}: expected 'invariant <expr> <op> <int>'")
        return Property(pid, INVARIANT, terms=_linear(m.group(1), pid), op=m.group(2), rhs=int(m.group(3)))
    if kind == "deadline":
        if len(words) != 4 or not _INT.match(words[3]) or int(words[3]) < 0:
            raise PropertySyntaxError(f"{pid}: expected 'deadline <src> <dst> <cycles>'")
        return Property(pid, DEADLINE, src=words[1], dst=words[2], bound=int(words[3]))
    if kind == "expect":
        if len(words) < 2 or not all(_INT.match(w) for w in words[2:]):
            raise PropertySyntaxError(f"{pid}: expected 'expect <channel> <int>...'")
        return Property(pid, EXPECT, channel=words[1], values=tuple(int(w) for w in words[2:]))
    raise PropertySyntaxError(f"{pid}: unknown property kind '{kind}'")


def parse_properties(text: str) -> list[Property]:
    props = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            props.append(parse_property(line, f"p{len(props) + 1}"))
    ids = [p.id for p in props]
    dup = {i for i in ids if ids.count(i) > 1}
    if dup:
        raise PropertySyntaxError(f"duplicate property id(s): {', '.join(sorted(dup))}")
    return props


def load_properties(path) -> list[Property]:
    with open(path, encoding="utf-8") as fh:
        return parse_properties(fh.read())


def format_properties(props) -> str:
    return "".join(f"{p.id}: {p.text()}\n" for p in props)


def golden_expectations(trace: Trace, prefix: str = "eq_") -> list[Property]:
    """One EXPECT per observable channel, pinning the trace's data exactly."""
    seqs = trace.sequences()
    return [Property(f"{prefix}{ch}", EXPECT, channel=ch, values=tuple(seqs.get(ch, ())))
            for ch in sorted(trace.channels)]


def check_properties(trace: Trace, stats, props, channels=None) -> list[PropertyResult]:
    """Evaluate each property on a finished run.

    ``channels`` defaults to the trace's channel list; naming anything else
    raises :class:`UnknownChannel`.  Deadlines use the run's deadline results
    when ``stats`` carries a matching one, else the trace's commit times.
    """
    known = set(channels if channels is not None else trace.channels)
    for p in props:
        for ch in p.channels():
            if ch not in known:
                raise UnknownChannel(f"property {p.id}: unknown channel {ch}")
    out = []
    seqs = None
    for p in props:
        if p.kind == INVARIANT:
            out.append(_invariant(trace, p))
        elif p.kind == EXPECT:
            seqs = seqs if seqs is not None else trace.sequences()
            got = seqs.get(p.channel, [])
            bad = next((i for i in range(max(len(got), len(p.values)))
                        if i >= len(got) or i >= len(p.values) or got[i] != p.values[i]), None)
            out.append(PropertyResult(p.id, PASS if bad is None else FAIL, bad))
        else:
            lat = _latency(trace, stats, p)
            ok = lat is not None and lat <= p.bound
            out.append(PropertyResult(p.id, PASS if ok else FAIL, observed=lat))
    return out


def _latency(trace: Trace, stats, p: Property):
    for r in getattr(stats, "deadline_results", None) or ():
        if getattr(r, "src", None) == p.src and getattr(r, "dst", None) == p.dst:
            return r.observed
    if trace.times is None:
        raise ValueError(f"property {p.id}: deadlines need a timed trace")
    return deadline_latency(trace, p.src, p.dst)


def _invariant(trace: Trace, p: Property) -> PropertyResult:
    chans = set(ch for _, ch in p.terms)
    latest: dict = {}
    cmp = OPS[p.op]
    idx = 0
    for ch, _, v in trace.records:
        if ch not in chans:
            continue
        latest[ch] = v
        if len(latest) == len(chans):
            lhs = sum(k * latest[c] for k, c in p.terms)
            if not cmp(lhs, p.rhs):
                return PropertyResult(p.id, FAIL, idx)
        idx += 1
    return PropertyResult(p.id, PASS)
