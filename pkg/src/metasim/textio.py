"""Line-oriented text formats for traces, adaptation histories and reports."""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal
from typing import TYPE_CHECKING, Iterable, Sequence

if TYPE_CHECKING:
    from metasim.adaptation import AdaptationHistory
    from metasim.engine import Trace

ALIVE, DEAD = "#", "."

_SIX_PLACES = Decimal("0.000001")


class UnsupportedRendering(ValueError):
    pass


def format_real(x: float) -> str:
    """Six decimal places, ties rounded half-to-even on the shortest decimal form."""
    text = str(Decimal(repr(float(x))).quantize(_SIX_PLACES, rounding=ROUND_HALF_EVEN))
    return "0.000000" if text == "-0.000000" else text


def render_row(states: Sequence[int]) -> str:
    if not states:
        raise UnsupportedRendering("cannot render a configuration without entities")
    try:
        return "".join((DEAD, ALIVE)[s] if s in (0, 1) else _bad(s) for s in states)
    except TypeError:
        raise UnsupportedRendering(f"non-binary states in {states!r}") from None


def _bad(state: int) -> str:
    raise UnsupportedRendering(f"cannot render state {state!r}; only binary alphabets are supported")


def render_trace(trace: "Trace | Iterable[Sequence[int]]") -> str:
    """One line per snapshot, ``#`` for 1 and ``.`` for 0."""
    rows = [render_row(s) for s in trace]
    if not rows:
        raise UnsupportedRendering("empty trace")
    return "\n".join(rows)


def parse_row(text: str) -> tuple[int, ...]:
    table = {DEAD: 0, ALIVE: 1}
    try:
        return tuple(table[c] for c in text)
    except KeyError as exc:
        raise ValueError(f"unexpected cell character {exc.args[0]!r}") from None


# -- trace.txt ---------------------------------------------------------------


def trace_lines(iteration: int, traces: Sequence["Trace"]) -> list[str]:
    lines = []
    for p, trace in enumerate(traces):
        episode = f"pattern={p} " if len(traces) > 1 else ""
        for t, snapshot in enumerate(trace):
            lines.append(f"iter={iteration} {episode}t={t} {render_row(snapshot)}")
    return lines


_TRACE_LINE = re.compile(r"^iter=(\d+) (?:pattern=(\d+) )?t=(\d+) ([.#]+)$")


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    pattern: int
    t: int
    states: tuple[int, ...]


def read_trace_lines(lines: Iterable[str]) -> list[TraceRow]:
    rows = []
    for n, line in enumerate(lines, 1):
        line = line.rstrip("\n")
        if not line:
            continue
        m = _TRACE_LINE.match(line)
        if not m:
            raise ValueError(f"line {n}: not a trace row: {line!r}")
        it, pattern, t, cells = m.groups()
        rows.append(TraceRow(int(it), int(pattern or 0), int(t), parse_row(cells)))
    return rows


# -- history.txt -------------------------------------------------------------


@dataclass(frozen=True)
class HistoryLine:
    iteration: int
    loss: float
    outcome: str
    rule: str


def history_lines(history: "AdaptationHistory", rules_id) -> list[str]:
    lines = [
        f"# budget={history.budget} tolerance={format_real(history.tolerance)} "
        f"terminated_by={history.terminated_by.value}"
    ]
    for rec in history.iterations:
        lines.append(
            f"iter={rec.index} loss={format_real(rec.loss)} "
            f"outcome={rec.outcome.value} rule={rules_id(rec.rules_used)}"
        )
    return lines


_HISTORY_LINE = re.compile(r"^iter=(\d+) loss=(\S+) outcome=(nexus|society) rule=(\S+)$")
_HEADER = re.compile(r"^# budget=(\d+) tolerance=(\S+) terminated_by=(\S+)$")


def read_history_lines(lines: Iterable[str]) -> tuple[dict[str, str], list[HistoryLine]]:
    """Parse a history file into its header fields and records."""
    header: dict[str, str] = {}
    records = []
    for n, line in enumerate(lines, 1):
        line = line.rstrip("\n")
        if not line:
            continue
        if line.startswith("#"):
            m = _HEADER.match(line)
            if m:
                header = dict(zip(("budget", "tolerance", "terminated_by"), m.groups()))
            continue
        m = _HISTORY_LINE.match(line)
        if not m:
            raise ValueError(f"line {n}: not a history record: {line!r}")
        it, loss, outcome, rule = m.groups()
        records.append(HistoryLine(int(it), float(loss), outcome, rule))
    return header, records
