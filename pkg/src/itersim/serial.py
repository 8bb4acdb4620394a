"""Trace files and schedule scripts.

Traces are line-delimited JSON, one self-describing record per line with
a `type` tag:

  meta          header: n, direction, mode, seed or script hash, horizon
  iis_round     one round's ordered blocks
  as_event      one register-model event (update or snapshot)
  sim_view      a simulated view observed by one simulator
  status_entry  one completed simulated snapshot (counter vector)

Keys are sorted and separators fixed, so serialization is byte
deterministic.

Schedule scripts are plain text.  Iterated-model scripts have one round
per line, blocks separated by `|`, members by whitespace (`1 | 2 3`),
`#` comments, and an optional trailing `repeat` directive that cycles
the listed rounds forever.  Register-model scripts have one process id
per line plus `crash <id>` directives that take effect at their position
in the script.
"""
from __future__ import annotations

import hashlib
import io
import json
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

from .core import (ASEvent, ASTrace, BOT, IISTrace, InvalidInput,
                   OrderedPartition, Schedule)


class ParseError(InvalidInput):
    """A trace or script line did not parse; carries the line number."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


def dumps_record(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def write_records(records: Iterable[dict], fp) -> None:
    for rec in records:
        fp.write(dumps_record(rec))
        fp.write("\n")


def records_to_bytes(records: Iterable[dict]) -> bytes:
    buf = io.StringIO()
    write_records(records, buf)
    return buf.getvalue().encode("utf-8")


def read_records(fp) -> Iterator[dict]:
    for lineno, line in enumerate(fp, 1):
        line = line.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad JSON: {exc.msg}", lineno) from exc
        if not isinstance(rec, dict) or "type" not in rec:
            raise ParseError("record is not an object with a 'type' tag", lineno)
        yield rec


# ---------------------------------------------------------------------------
# Record builders

def meta_record(n: int, direction: str, horizon: int,
                mode: Optional[str] = None, seed: Optional[int] = None,
                script_sha: Optional[str] = None) -> dict:
    rec = {"type": "meta", "n": n, "direction": direction, "horizon": horizon}
    if mode is not None:
        rec["mode"] = mode
    if seed is not None:
        rec["seed"] = seed
    if script_sha is not None:
        rec["script_sha"] = script_sha
    return rec


def iis_trace_records(trace: IISTrace) -> Iterator[dict]:
    for r in range(1, len(trace) + 1):
        part = trace.rounds[r - 1]
        yield {"type": "iis_round", "round": r,
               "blocks": [sorted(b) for b in part.blocks]}


def as_trace_records(trace: ASTrace) -> Iterator[dict]:
    for ev in trace.events:
        rec = {"type": "as_event", "actor": ev.actor, "kind": ev.kind}
        if ev.kind == "update":
            rec["value"] = ev.value
        else:
            rec["result"] = [None if v is BOT else v for v in ev.result]
        yield rec


def sim_view_records(views: Dict[Tuple[int, int], frozenset]) -> Iterator[dict]:
    """views maps (process, round) -> member set."""
    for (p, r), members in sorted(views.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        yield {"type": "sim_view", "process": p, "round": r,
               "view": sorted(members)}


def status_records(outputs) -> Iterator[dict]:
    for o in outputs:
        yield {"type": "status_entry", "process": o.process, "round": o.round,
               "counters": list(o.vector)}


# ---------------------------------------------------------------------------
# Record readers

def load_trace(fp):
    """Parse a trace file into (meta, payload dict).

    payload holds whichever sections the file contains: 'iis' (IISTrace),
    'as' (ASTrace), 'views', 'outputs' (status entries as tuples).
    """
    meta = None
    rounds: List[Tuple[int, OrderedPartition]] = []
    events: List[ASEvent] = []
    views: Dict[Tuple[int, int], frozenset] = {}
    outputs: List[Tuple[int, int, tuple]] = []
    for rec in read_records(fp):
        t = rec["type"]
        if t == "meta":
            meta = rec
        elif t == "iis_round":
            rounds.append((rec["round"], OrderedPartition(rec["blocks"])))
        elif t == "as_event":
            if rec["kind"] == "update":
                events.append(ASEvent(actor=rec["actor"], kind="update",
                                      value=rec["value"]))
            else:
                result = tuple(BOT if v is None else v for v in rec["result"])
                events.append(ASEvent(actor=rec["actor"], kind="snapshot",
                                      result=result))
        elif t == "sim_view":
            views[(rec["process"], rec["round"])] = frozenset(rec["view"])
        elif t == "status_entry":
            outputs.append((rec["process"], rec["round"],
                            tuple(rec["counters"])))
        else:
            raise ParseError(f"unknown record type {t!r}")
    if meta is None:
        raise ParseError("trace has no meta record")
    n = meta["n"]
    payload = {}
    if rounds:
        rounds.sort()
        if [r for r, _ in rounds] != list(range(1, len(rounds) + 1)):
            raise ParseError("iis_round records are not consecutive from 1")
        payload["iis"] = IISTrace(n, [p for _, p in rounds])
    if events:
        payload["as"] = ASTrace(n, events)
    if views:
        payload["views"] = views
    if outputs:
        payload["outputs"] = outputs
    return meta, payload


# ---------------------------------------------------------------------------
# Schedule scripts

def script_sha(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_iis_script(text: str, n: int, horizon: int) -> IISTrace:
    """Parse an iterated-model script into a trace of `horizon` rounds.

    Without `repeat` the script must list at least `horizon` rounds;
    with it, the listed rounds cycle.
    """
    pattern: List[OrderedPartition] = []
    repeat = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        if line == "repeat":
            repeat = True
            continue
        if repeat:
            raise ParseError("rounds listed after 'repeat'", lineno)
        blocks = []
        for chunk in line.split("|"):
            try:
                block = [int(tok) for tok in chunk.split()]
            except ValueError:
                raise ParseError(f"bad block {chunk.strip()!r}", lineno) from None
            if not block:
                raise ParseError("empty block", lineno)
            blocks.append(block)
        try:
            pattern.append(OrderedPartition(blocks))
        except InvalidInput as exc:
            raise ParseError(str(exc), lineno) from None
    if not pattern:
        raise ParseError("script lists no rounds")
    if repeat:
        parts = [pattern[k % len(pattern)] for k in range(horizon)]
    else:
        if len(pattern) < horizon:
            raise ParseError(
                f"script lists {len(pattern)} rounds but horizon is {horizon}"
            )
        parts = pattern[:horizon]
    return IISTrace(n, parts)


def parse_as_script(text: str, horizon: int) -> Schedule:
    """Parse a register-model script: pid per line, `crash <id>` inline,
    optional trailing `repeat`."""
    steps: List[int] = []
    crashes: Dict[int, int] = {}
    repeat = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        if line == "repeat":
            repeat = True
            continue
        if repeat:
            raise ParseError("steps listed after 'repeat'", lineno)
        if line.startswith("crash"):
            toks = line.split()
            if len(toks) != 2 or not toks[1].isdigit():
                raise ParseError("expected 'crash <id>'", lineno)
            pid = int(toks[1])
            if pid in crashes:
                raise ParseError(f"process {pid} crashed twice", lineno)
            crashes[pid] = len(steps)
            continue
        if not line.isdigit():
            raise ParseError(f"bad step {line!r}", lineno)
        steps.append(int(line))
    if not steps:
        raise ParseError("script lists no steps")
    if repeat:
        if crashes:
            raise ParseError("'repeat' cannot follow crash directives")
        steps = [steps[k % len(steps)] for k in range(horizon)]
    else:
        steps = steps[:horizon]
    try:
        return Schedule(steps, crashes)
    except InvalidInput as exc:
        raise ParseError(str(exc)) from None
