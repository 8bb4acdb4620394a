"""One-shot immediate snapshot and the reference iterated executor.

The one-shot object uses the classic level construction: a process walks
levels n down to 1; at level L it registers (writes its level) and takes a
snapshot; if exactly L processes have reached level L it returns them as
its view, otherwise it descends.  At most L processes can ever reach
level L.

`enumerate_is_profiles` explores the same construction as an explicit
state machine with memoization over states, which covers every
interleaving at one-primitive granularity without enumerating the
(astronomically many) schedules one by one.  It serves as the independent
oracle for the kernel-backed object.

`iis_run` builds an IISTrace directly from scheduled partitions; it is the
reference model and is trivially correct by construction.
"""
from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Tuple

from . import kernel
from .core import (ContractViolation, IISTrace, InvalidInput, OrderedPartition,
                   SimulationBug)
from .kernel import SNAP, Write


def is_protocol(pid: int, n: int, value=None):
    """Protocol generator for one invocation of the one-shot IS object.

    Registers hold (level, value).  Returns the view as a dict
    pid -> value restricted to the processes in the returned level set.
    """
    level = n
    while True:
        yield Write((level, value))
        snap = yield SNAP
        reached = {}
        for j, cell in enumerate(snap, 1):
            if cell is not None and cell[0] <= level:
                reached[j] = cell[1]
        if len(reached) > level:
            raise SimulationBug(
                f"{len(reached)} processes at level {level} (bound is {level})"
            )
        if len(reached) == level:
            return reached
        level -= 1


def run_is_object(n: int, schedule, participants: Optional[Iterable[int]] = None,
                  values: Optional[Dict[int, object]] = None):
    """Run one IS object under the given schedule; returns the kernel
    record with outputs mapping pid -> view dict."""
    parts = sorted(participants) if participants is not None else list(range(1, n + 1))
    vals = values or {}
    protocols = {p: (lambda p=p: is_protocol(p, n, vals.get(p, p))) for p in parts}
    if max(parts, default=0) < n:
        # pad so the register array has n cells
        protocols.setdefault(n, lambda: iter(()))
    return kernel.run(protocols, schedule, record_trace=True)


# ---------------------------------------------------------------------------
# Exhaustive exploration of the one-shot object

WRITE, READ, DONE = 0, 1, 2


def enumerate_is_profiles(n: int, participants: Optional[Tuple[int, ...]] = None) -> set:
    """All reachable outcome profiles of one IS object.

    A profile is a tuple, indexed by participant order, of frozenset views
    (or None for processes that never finish, which cannot happen in
    complete executions explored here).  The exploration memoizes states,
    covering every schedule interleaving at write/snapshot granularity.
    """
    parts: Tuple[int, ...] = tuple(sorted(participants)) if participants else tuple(range(1, n + 1))
    idx = {p: k for k, p in enumerate(parts)}

    # state: (levels, phases, outputs)
    #   levels[k]: current target level of participant k
    #   phases[k]: WRITE (about to register), READ (about to snapshot), DONE
    #   outputs[k]: frozenset view or None
    # registered level of participant k is levels[k] if phase != WRITE at
    # that level yet... we track the last written level separately.
    start = (
        tuple(n for _ in parts),       # target level
        tuple(0 for _ in parts),       # written level; 0 = nothing written
        tuple(WRITE for _ in parts),
        tuple(None for _ in parts),
    )
    seen = {start}
    stack = [start]
    profiles = set()
    while stack:
        state = stack.pop()
        targets, written, phases, outputs = state
        if all(ph == DONE for ph in phases):
            profiles.add(outputs)
            continue
        moved = False
        for k, p in enumerate(parts):
            ph = phases[k]
            if ph == DONE:
                continue
            moved = True
            if ph == WRITE:
                w = list(written)
                w[k] = targets[k]
                nphases = list(phases)
                nphases[k] = READ
                nxt = (targets, tuple(w), tuple(nphases), outputs)
            else:  # READ: snapshot at current target level
                lvl = targets[k]
                reached = frozenset(parts[m] for m in range(len(parts))
                                    if written[m] and written[m] <= lvl)
                if len(reached) > lvl:
                    raise SimulationBug(f"level bound violated at level {lvl}")
                if len(reached) == lvl:
                    nout = list(outputs)
                    nout[k] = reached
                    nphases = list(phases)
                    nphases[k] = DONE
                    nxt = (targets, written, tuple(nphases), tuple(nout))
                else:
                    ntargets = list(targets)
                    ntargets[k] = lvl - 1
                    nphases = list(phases)
                    nphases[k] = WRITE
                    nxt = (tuple(ntargets), written, tuple(nphases), outputs)
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
        if not moved:
            profiles.add(outputs)
    return profiles


def profile_to_partition(parts: Tuple[int, ...], profile) -> OrderedPartition:
    """Recover the ordered partition from a complete profile of views."""
    views = {parts[k]: profile[k] for k in range(len(parts))}
    distinct = sorted(set(views.values()), key=len)
    prev: frozenset = frozenset()
    blocks = []
    for v in distinct:
        if not prev <= v:
            raise InvalidInput("views do not form a containment chain")
        blocks.append(v - prev)
        prev = v
    if prev != frozenset(parts):
        raise InvalidInput("views do not cover all participants")
    return OrderedPartition(blocks)


def all_ordered_partitions(items: Tuple[int, ...]):
    """Every ordered partition of items (Fubini enumeration)."""
    items = tuple(items)
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for sub in all_ordered_partitions(rest):
        # insert `first` into an existing block or as a new block anywhere
        for k in range(len(sub)):
            yield sub[:k] + (sub[k] | {first},) + sub[k + 1:]
        for k in range(len(sub) + 1):
            yield sub[:k] + (frozenset([first]),) + sub[k:]


# ---------------------------------------------------------------------------
# Reference IIS executor

def iis_run(n: int, partitions: Iterable, rounds: Optional[int] = None) -> IISTrace:
    """Build the IISTrace for a scheduled sequence of ordered partitions.

    partitions is an iterable of OrderedPartition (or block lists); if
    `rounds` is given, at most that many rounds are consumed.
    """
    out: List[OrderedPartition] = []
    for k, part in enumerate(partitions):
        if rounds is not None and k >= rounds:
            break
        if not isinstance(part, OrderedPartition):
            part = OrderedPartition(part)
        out.append(part)
    return IISTrace(n, out)
