"""Stream ingestion, schedule parsing and the snapshot run loop behind the CLI."""

from __future__ import annotations

import csv
import io
import itertools
import json
import re
from dataclasses import asdict, dataclass, field
from typing import IO, Iterable, Iterator, Sequence

from .ensemble import Ensemble, TargetSet
from .errors import RecordError, ScheduleParseError
from .sampler import Constant, PowerLaw, Schedule, Uniform

SNAPSHOT_FIELDS = ("member", "n", "k", "position", "timestamp", "value")
TRACE_FIELDS = ("n", "Q")

_NUMBER = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")


# -- schedules ------------------------------------------------------------------


def _number(text: str, pos: int, stop: str = "") -> tuple[float, int]:
    m = _NUMBER.match(text, pos)
    if not m:
        raise ScheduleParseError("expected a number", text, pos)
    end = m.end()
    if end < len(text) and text[end] not in stop:
        raise ScheduleParseError(f"unexpected {text[end]!r}", text, end)
    return float(m.group()), end


def parse_schedule(spec: str) -> Schedule:
    """Parse ``uniform``, ``constant:<a>`` or ``power:<g>,<alpha>``.

    Raises :class:`ScheduleParseError` (with a character position) on syntax
    errors and :class:`ScheduleRangeError` when a parameter is out of range.
    """
    text = spec
    kind = re.match(r"[a-z]*", text).group()
    pos = len(kind)
    if kind == "uniform":
        if pos != len(text):
            raise ScheduleParseError(f"unexpected {text[pos]!r}", text, pos)
        return Uniform()
    if kind not in ("constant", "power"):
        raise ScheduleParseError("expected 'uniform', 'constant:' or 'power:'", text, 0)
    if pos >= len(text) or text[pos] != ":":
        raise ScheduleParseError("expected ':'", text, pos)
    if kind == "constant":
        a, end = _number(text, pos + 1)
        return Constant(a)
    g, end = _number(text, pos + 1, stop=",")
    if end >= len(text):
        raise ScheduleParseError("expected ','", text, end)
    alpha, _ = _number(text, end + 1)
    return PowerLaw(g, alpha)


# -- input records ----------------------------------------------------------------


@dataclass(frozen=True)
class StreamRecord:
    index: int
    timestamp: str | None
    value: str


def _is_header(fields: Sequence[str]) -> bool:
    names = [f.strip().lower() for f in fields]
    return names in (["timestamp", "value"], ["value"])


def read_records(lines: Iterable[str]) -> Iterator[StreamRecord]:
    """Yield records from CSV ``timestamp,value`` rows or bare one-value lines.

    The first line fixes the format: two comma-separated fields mean CSV
    (every row must then have two fields), one field means bare values where
    each whole line is the value.  An optional header (``timestamp,value`` or
    ``value``) is skipped.  Indices are assigned from 1 in read order.
    """
    it = iter(lines)
    first = next(it, None)
    if first is None:
        return
    try:
        head = next(csv.reader([first.rstrip("\r\n")]), [""])
    except csv.Error as exc:
        raise RecordError(str(exc), 1) from None
    if len(head) > 2:
        raise RecordError(f"expected 1 or 2 fields, got {len(head)}", 1)
    header = _is_header(head)

    if len(head) == 1:
        index = 0
        for lineno, raw in enumerate(itertools.chain([first], it), start=1):
            if lineno == 1 and header:
                continue
            index += 1
            yield StreamRecord(index, None, raw.rstrip("\r\n"))
        return

    reader = csv.reader(itertools.chain([first], it))
    index = 0
    try:
        for row in reader:
            lineno = reader.line_num
            if lineno == 1 and header:
                continue
            if len(row) != 2:
                raise RecordError(f"expected 2 fields (timestamp,value), got {len(row)}", lineno)
            index += 1
            yield StreamRecord(index, row[0], row[1])
    except csv.Error as exc:
        raise RecordError(str(exc), reader.line_num) from None


# -- run loop ---------------------------------------------------------------------


@dataclass
class RunConfig:
    schedule: Schedule
    ensemble: int
    seed: int
    targets: TargetSet = field(default_factory=TargetSet)
    fmt: str = "csv"
    trace: bool = False
    endpoints: bool = False
    input_path: str | None = None

    def __post_init__(self) -> None:
        if self.ensemble < 1:
            raise ValueError(f"ensemble size must be >= 1, got {self.ensemble}")
        if self.fmt not in ("csv", "json"):
            raise ValueError(f"format must be csv or json, got {self.fmt!r}")


@dataclass(frozen=True)
class SnapshotRow:
    """One output row; ``member`` is an int, or ``"first"``/``"last"`` for endpoints."""

    member: int | str
    n: int
    k: int
    position: int
    timestamp: str
    value: str


@dataclass
class RunResult:
    config: RunConfig
    n: int
    rows: list[SnapshotRow]
    trace: list[tuple[int, float]] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return self.n == 0


def _row(member: int | str, n: int, record: StreamRecord) -> SnapshotRow:
    return SnapshotRow(member, n, n - record.index + 1, record.index, record.timestamp or "", record.value)


def run_stream(config: RunConfig, records: Iterable[StreamRecord]) -> RunResult:
    """Feed ``records`` through an ensemble and collect the final snapshots.

    Rows are sorted by position (ties by member id, endpoints outermost).
    With ``config.trace`` the quality ``Q`` is recorded after every item.
    """
    ens = Ensemble(config.schedule, config.ensemble, config.seed)
    first = last = None
    trace: list[tuple[int, float]] = []
    for record in records:
        if first is None:
            first = record
        last = record
        ens.update(record)
        if config.trace:
            trace.append((ens.n, ens.quality(config.targets)))
    n = ens.n
    if n == 0:
        return RunResult(config, 0, [], trace)

    rows = [_row(j, n, rec) for j, rec in enumerate(ens.payloads)]
    if config.endpoints:
        rows.append(_row("first", n, first))
        rows.append(_row("last", n, last))
    tie = {"first": -1, "last": config.ensemble}
    rows.sort(key=lambda r: (r.position, tie.get(r.member, r.member)))
    return RunResult(config, n, rows, trace)


# -- output -----------------------------------------------------------------------


def write_snapshots_csv(rows: Iterable[SnapshotRow], out: IO[str]) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(SNAPSHOT_FIELDS)
    for r in rows:
        w.writerow([r.member, r.n, r.k, r.position, r.timestamp, r.value])


def write_trace_csv(trace: Iterable[tuple[int, float]], out: IO[str]) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(TRACE_FIELDS)
    for n, q in trace:
        w.writerow([n, repr(q)])


def read_snapshots_csv(src: IO[str] | str) -> list[SnapshotRow]:
    """Parse CSV written by :func:`write_snapshots_csv`."""
    if isinstance(src, str):
        src = io.StringIO(src)
    reader = csv.reader(src)
    header = next(reader, None)
    if header is None or tuple(header) != SNAPSHOT_FIELDS:
        raise RecordError(f"expected header {','.join(SNAPSHOT_FIELDS)}", 1)
    rows = []
    for row in reader:
        if not row:
            break
        if len(row) != len(SNAPSHOT_FIELDS):
            raise RecordError(f"expected {len(SNAPSHOT_FIELDS)} fields", reader.line_num)
        member = int(row[0]) if row[0].lstrip("-").isdigit() else row[0]
        rows.append(SnapshotRow(member, int(row[1]), int(row[2]), int(row[3]), row[4], row[5]))
    return rows


def render(result: RunResult) -> str:
    """Full CLI output for a run in the configured format."""
    cfg = result.config
    if cfg.fmt == "json":
        doc = {
            "schedule": cfg.schedule.spec,
            "ensemble": cfg.ensemble,
            "seed": cfg.seed,
            "targets": list(cfg.targets.fractions),
            "n": result.n,
            "snapshots": [asdict(r) for r in result.rows],
        }
        if cfg.trace:
            doc["trace"] = [{"n": n, "Q": q} for n, q in result.trace]
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    write_snapshots_csv(result.rows, buf)
    if cfg.trace:
        buf.write("\n")
        write_trace_csv(result.trace, buf)
    return buf.getvalue()
