"""Traces and their comparison."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Trace:
    records: list = field(default_factory=list)  # (channel, seq, value) in commit order
    channels: tuple = ()
    deadlocked: bool = False
    times: list | None = None  # commit cycle per record (timed runs only)
    aborted: str | None = None  # set when a trap or violation cut the run short

    def sequences(self) -> dict:
        out: dict = {c: [] for c in self.channels}
        for ch, _, v in self.records:
            out.setdefault(ch, []).append(v)
        return out

    def commit_times(self, channel: str) -> list:
        return [t for (ch, _, _), t in zip(self.records, self.times or []) if ch == channel]

    def dumps(self) -> str:
        return "".join(f"{ch} {seq} {v}\n" for ch, seq, v in self.records)

    def write(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    @classmethod
    def loads(cls, text: str) -> "Trace":
        records = []
        for line in text.splitlines():
            if not line.strip() or line.startswith("#"):
                continue
            ch, seq, v = line.split()
            records.append((ch, int(seq), int(v)))
        return cls(records, tuple(dict.fromkeys(r[0] for r in records)))

    @classmethod
    def read(cls, path) -> "Trace":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())

    def data_equal(self, other: "Trace") -> bool:
        return compare_traces(self, other) == EQUAL


EQUAL = "EQUAL"


@dataclass(frozen=True)
class Divergence:
    channel: str
    index: int
    value_a: int | None
    value_b: int | None

    def to_dict(self) -> dict:
        return {"channel": self.channel, "index": self.index,
                "value_a": self.value_a, "value_b": self.value_b}


def compare_traces(a: Trace, b: Trace):
    """``EQUAL`` or the first :class:`Divergence` (channel name order, then index).

    A channel missing from one trace counts as an empty sequence; a value of
    ``None`` marks the shorter side.
    """
    sa, sb = a.sequences(), b.sequences()
    for ch in sorted(set(sa) | set(sb)):
        xa, xb = sa.get(ch, []), sb.get(ch, [])
        if xa == xb:
            continue
        for i in range(max(len(xa), len(xb))):
            va = xa[i] if i < len(xa) else None
            vb = xb[i] if i < len(xb) else None
            if va != vb:
                return Divergence(ch, i, va, vb)
    return EQUAL
