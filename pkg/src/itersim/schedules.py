"""Seeded schedule generators: fair activation scripts with crash
injection for the register model, and nested random partitions with
permanent departures for the iterated model.  The seed fully determines
the schedule."""
from __future__ import annotations

import random
from typing import Iterable, List, Optional, Tuple

from .core import IISTrace, InvalidInput, OrderedPartition, Schedule


def seeded_as_schedule(n: int, steps: int, seed: int,
                       crash_fraction: float = 0.0,
                       crash_by: Optional[int] = None) -> Schedule:
    """Fair random schedule of `steps` activations.  Each process
    independently crashes with probability crash_fraction, at a step
    chosen uniformly in [1, crash_by] (default: first tenth of the run);
    at least one process always survives."""
    rng = random.Random(seed)
    crash_by = crash_by if crash_by is not None else max(1, steps // 10)
    crashes = {}
    pids = list(range(1, n + 1))
    for p in pids:
        if rng.random() < crash_fraction:
            crashes[p] = rng.randint(1, crash_by)
    if len(crashes) == n:
        survivor = rng.choice(pids)
        del crashes[survivor]
    script: List[int] = []
    for k in range(steps):
        live = [p for p in pids if crashes.get(p, steps + 1) > k]
        script.append(rng.choice(live))
    return Schedule(script, crashes, seed=seed)


def round_robin_schedule(n: int, steps: int) -> Schedule:
    return Schedule([1 + (k % n) for k in range(steps)])


def seeded_iis_trace(n: int, rounds: int, seed: int,
                     departure_fraction: float = 0.0,
                     depart_by: Optional[int] = None) -> IISTrace:
    """Random nested-partition trace.  Departing processes leave the
    participant set permanently at a round chosen in [2, depart_by]; at
    least one process never departs.  Departures default to the first 2n
    rounds so that window checks over the suffix see a settled
    participant set.  Block structure is uniform over ordered partitions
    of the participants."""
    rng = random.Random(seed)
    depart_by = depart_by if depart_by is not None else min(max(2, 2 * n), rounds)
    pids = list(range(1, n + 1))
    departures = {}
    for p in pids:
        if rng.random() < departure_fraction:
            departures[p] = rng.randint(2, depart_by)
    if len(departures) == n:
        del departures[rng.choice(pids)]
    parts = []
    for r in range(1, rounds + 1):
        members = [p for p in pids if departures.get(p, rounds + 1) > r]
        parts.append(random_ordered_partition(members, rng))
    return IISTrace(n, parts)


def random_ordered_partition(members: Iterable[int], rng: random.Random) -> OrderedPartition:
    members = list(members)
    if not members:
        raise InvalidInput("cannot partition an empty participant set")
    rng.shuffle(members)
    blocks: List[List[int]] = [[members[0]]]
    for p in members[1:]:
        # grow the last block or start a new one; biased toward short
        # blocks so singleton-first-block rounds (the solo-output case)
        # stay frequent
        if rng.random() < 0.5:
            blocks[-1].append(p)
        else:
            blocks.append([p])
    rng.shuffle(blocks)
    return OrderedPartition(blocks)


def cyclic_partitions(n: int, pattern: List[List[List[int]]], rounds: int) -> IISTrace:
    """Repeat a finite pattern of partitions (given as block lists)."""
    parts = []
    for r in range(rounds):
        parts.append(OrderedPartition(pattern[r % len(pattern)]))
    return IISTrace(n, parts)


def starvation_pattern() -> List[List[List[int]]]:
    """The periodic 3-process schedule on which the non-helping baseline
    starves process 2: [{1},{2,3}] alternating with [{3},{1,2}]."""
    return [[[1], [2, 3]], [[3], [1, 2]]]
