"""Line-delimited engagement event log.

Record format, one event per line:

    t=<seconds> ev=<KIND> src=<id> dst=<id> data=<key:value,...>

``dst`` and ``data`` print as ``-`` when empty.  Data keys are sorted and
floats rendered with six significant digits, so a run's log is a pure
function of the scenario and seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

KINDS = frozenset({
    "DETECT", "PROPOSE", "ACCEPT", "REJECT", "LOCK", "QUEUE", "PROMOTE",
    "FIRE", "KILL", "MISS", "LEAK", "MODE",
})


@dataclass(frozen=True)
class Event:
    t: float
    kind: str
    src: str
    dst: str = "-"
    data: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown event kind {self.kind!r}")


def _fmt_value(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def format_event(e: Event) -> str:
    data = ",".join(f"{k}:{_fmt_value(e.data[k])}" for k in sorted(e.data)) or "-"
    return f"t={e.t:.3f} ev={e.kind} src={e.src} dst={e.dst or '-'} data={data}"


def format_log(events: list[Event]) -> str:
    return "\n".join(format_event(e) for e in events) + ("\n" if events else "")
