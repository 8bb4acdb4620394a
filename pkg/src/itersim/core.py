"""Shared value types: process ids, views, partitions, traces, counters.

Processes are numbered 1..n.  A view is a frozenset of process ids.  An
iterated run is a sequence of ordered partitions; an atomic-snapshot run is
a sequence of update/snapshot events over single-writer registers.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

BOT = None  # empty register cell

RUN = "run"
BLOCKED = "blocked"


class InvalidInput(ValueError):
    pass


class ContractViolation(RuntimeError):
    """A protocol precondition was broken by the caller."""


class SimulationBug(AssertionError):
    """An internal invariant of a simulation run failed; never expected."""


def check_pid(pid: int, n: int) -> None:
    if not 1 <= pid <= n:
        raise InvalidInput(f"process id {pid} out of range 1..{n}")


# ---------------------------------------------------------------------------
# Ordered partitions and IIS traces

@dataclass(frozen=True)
class OrderedPartition:
    """Disjoint non-empty blocks in invocation-group order."""

    blocks: tuple

    def __init__(self, blocks: Iterable[Iterable[int]]):
        bs = tuple(frozenset(b) for b in blocks)
        if any(not b for b in bs):
            raise InvalidInput("empty block in ordered partition")
        union: set = set()
        for b in bs:
            if union & b:
                raise InvalidInput("overlapping blocks in ordered partition")
            union |= b
        object.__setattr__(self, "blocks", bs)

    @property
    def members(self) -> frozenset:
        out: frozenset = frozenset()
        for b in self.blocks:
            out |= b
        return out

    def view_of(self, pid: int) -> frozenset:
        """Prefix union of blocks up to and including pid's block."""
        acc: set = set()
        for b in self.blocks:
            acc |= b
            if pid in b:
                return frozenset(acc)
        raise InvalidInput(f"process {pid} not in partition")


@dataclass(frozen=True)
class IISTrace:
    """A (finite prefix of an) iterated immediate snapshot run."""

    n: int
    rounds: tuple  # tuple[OrderedPartition, ...]

    def __init__(self, n: int, rounds: Iterable[OrderedPartition]):
        rs = tuple(rounds)
        prev = None
        for r, part in enumerate(rs, 1):
            mem = part.members
            if any(p < 1 or p > n for p in mem):
                raise InvalidInput(f"round {r}: process id out of range")
            if prev is not None and not mem <= prev:
                raise InvalidInput(
                    f"round {r}: participants {sorted(mem)} not a subset of "
                    f"round {r - 1} participants {sorted(prev)}"
                )
            prev = mem
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "rounds", rs)

    def __len__(self) -> int:
        return len(self.rounds)

    def participants(self, r: int) -> frozenset:
        return self.rounds[r - 1].members

    def view(self, pid: int, r: int) -> frozenset:
        return self.rounds[r - 1].view_of(pid)

    def round_views(self, r: int) -> dict:
        part = self.rounds[r - 1]
        return {p: part.view_of(p) for p in part.members}


# ---------------------------------------------------------------------------
# Atomic-snapshot traces

@dataclass(frozen=True)
class ASEvent:
    actor: int
    kind: str  # "update" | "snapshot"
    value: object = None          # update payload
    result: Optional[tuple] = None  # snapshot result, one entry per process

    def __post_init__(self):
        if self.kind not in ("update", "snapshot"):
            raise InvalidInput(f"bad event kind {self.kind!r}")


@dataclass(frozen=True)
class ASTrace:
    n: int
    events: tuple

    def __init__(self, n: int, events: Iterable[ASEvent]):
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "events", tuple(events))

    def __len__(self) -> int:
        return len(self.events)


def validate_as_trace(trace: ASTrace) -> None:
    """Replay updates against a register array; every snapshot result must
    equal the register contents at that point.  Raises SimulationBug."""
    cells = [BOT] * trace.n
    for k, ev in enumerate(trace.events):
        check_pid(ev.actor, trace.n)
        if ev.kind == "update":
            cells[ev.actor - 1] = ev.value
        else:
            if ev.result is None or len(ev.result) != trace.n:
                raise SimulationBug(f"event {k}: malformed snapshot result")
            if tuple(ev.result) != tuple(cells):
                raise SimulationBug(
                    f"event {k}: snapshot {ev.result} != registers {tuple(cells)}"
                )


# ---------------------------------------------------------------------------
# Counter vectors

def merge_counters(vectors: Sequence[Sequence[int]]):
    """Pointwise maximum of equal-length counter vectors."""
    if not vectors:
        raise InvalidInput("merge_counters needs at least one vector")
    n = len(vectors[0])
    for v in vectors:
        if len(v) != n:
            raise InvalidInput("counter vector length mismatch")
    return tuple(max(col) for col in zip(*vectors))


# ---------------------------------------------------------------------------
# Round-levels and status entries

# A status entry is a plain tuple (disposition, round, level); round >= 1,
# 1 <= level <= n, disposition in {RUN, BLOCKED}.

def make_entry(disposition: str, rnd: int, level: int) -> tuple:
    if disposition not in (RUN, BLOCKED):
        raise InvalidInput(f"bad disposition {disposition!r}")
    if rnd < 1 or level < 1:
        raise InvalidInput(f"bad round-level ({rnd}, {level})")
    return (disposition, rnd, level)


def rl_key(pid: int, rnd: int, level: int, n: int) -> tuple:
    """Sort key realizing the total order on (process, round, level):
    lower round first, then higher level, then (id + round) mod n."""
    return (rnd, -level, (pid + rnd) % n)


def compare_round_level(a, b, n: int) -> int:
    """a, b: (pid, (round, level)).  Returns -1, 0 or 1."""
    (pa, (ra, la)) = a
    (pb, (rb, lb)) = b
    for p, (r, l) in (a, b):
        if l > n or l < 1:
            raise InvalidInput(f"level {l} out of range 1..{n}")
    ka, kb = rl_key(pa, ra, la, n), rl_key(pb, rb, lb, n)
    return -1 if ka < kb else (1 if ka > kb else 0)


# ---------------------------------------------------------------------------
# Schedules

@dataclass(frozen=True)
class Schedule:
    """A finite activation script plus crash points.

    crashes maps a process id to the step index after which it takes no
    steps; a process absent from the map never crashes.
    """

    steps: tuple
    crashes: Mapping[int, int] = field(default_factory=dict)
    seed: Optional[int] = None

    def __init__(self, steps: Iterable[int], crashes: Optional[Mapping[int, int]] = None,
                 seed: Optional[int] = None):
        st = tuple(steps)
        cr = dict(crashes or {})
        for k, pid in enumerate(st):
            cut = cr.get(pid)
            if cut is not None and k >= cut:
                raise InvalidInput(
                    f"step {k}: process {pid} appears after its crash index {cut}"
                )
        object.__setattr__(self, "steps", st)
        object.__setattr__(self, "crashes", cr)
        object.__setattr__(self, "seed", seed)

    def live(self, universe: Iterable[int]) -> frozenset:
        return frozenset(p for p in universe if p not in self.crashes)

    def appearing(self) -> frozenset:
        return frozenset(self.steps)


# ---------------------------------------------------------------------------
# Cons cells: immutable append-only logs shared across register versions.

def cons(item, prev):
    return (item, prev)


def cons_iter(cell):
    """Yield items newest-first."""
    while cell is not None:
        yield cell[0]
        cell = cell[1]


def cons_list(cell) -> list:
    """Items oldest-first."""
    out = list(cons_iter(cell))
    out.reverse()
    return out


def cons_head(cell):
    return None if cell is None else cell[0]
