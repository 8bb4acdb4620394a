"""AS-to-IIS simulation: every scheduled process acts as a simulator that
drives all n simulated processes through the per-round level construction,
one resolver-agreement instance per (process, round, level).

Shared state lives in one composite single-writer register per simulator:

  * rows[j]   append-only status log for simulated process j as witnessed
              by this simulator (entries (disposition, round, level))
  * counter   bumped on every loop iteration; freezing compares it
  * views     append-only log of recorded round views ((p, r), members)
  * fields    append-only log of agreement-protocol fields (commit-adopt
              phases and resolutions), keyed per instance

Logs are cons cells, so register writes share structure and snapshots are
O(1).  A simulator ingests every snapshot it takes into incremental
caches; because all logs are append-only, the caches always equal the
content of the most recently ingested snapshot.

The simulated process chosen at each iteration is the "most behind"
candidate that is neither blocked (some simulator obtained no value from
its frontier agreement and the resolution register is still empty) nor
frozen (it recently completed a round that everyone
in its view is aware of, and its simulator has made no physical step
since).  A simulator whose own simulated process is blocked resolves it
itself: it is the designated resolver of its own instances and therefore
always obtains a value.
"""
from __future__ import annotations

from collections import namedtuple
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

from . import kernel
from .agreement import rap_propose
from .analysis import (InsufficientData, WindowParams, aware_of,
                       participation_set, reaches,
                       strongly_correct_window)
from .core import (BLOCKED, IISTrace, OrderedPartition, RUN, Schedule,
                   SimulationBug, cons, cons_head, cons_list, make_entry,
                   rl_key)
from .kernel import SNAP, Write

SimReg = namedtuple("SimReg", ["rows", "counter", "views", "fields"])


def _mask(pids) -> int:
    m = 0
    for p in pids:
        m |= 1 << (p - 1)
    return m


class _FreezeOracle:
    """Tracks the partial simulated trace a simulator has seen and answers
    'largest round x such that everyone in j's round-x view is aware of
    round x of j'.  Awareness of (j, x) is monotone as the trace grows, so
    each verified bound is cached and only newer rounds are re-examined."""

    def __init__(self, n: int):
        self.n = n
        self.views: Dict[Tuple[int, int], frozenset] = {}
        self.adj: Dict[int, Dict[int, int]] = {}
        self.last_round: Dict[int, int] = {}
        self.max_round = 0
        self.verified: Dict[int, int] = {}
        self.dirty = False

    def add_view(self, p: int, r: int, members: frozenset) -> None:
        key = (p, r)
        old = self.views.get(key)
        if old is not None:
            if old != members:
                raise SimulationBug(
                    f"conflicting views for process {p} round {r}: "
                    f"{sorted(old)} vs {sorted(members)}"
                )
            return
        self.views[key] = members
        self.adj.setdefault(r, {})[p] = _mask(members)
        if r > self.last_round.get(p, 0):
            self.last_round[p] = r
        if r > self.max_round:
            self.max_round = r
        self.dirty = True

    def max_aware_round(self, j: int) -> int:
        hi = self.last_round.get(j, 0)
        lo = self.verified.get(j, 0)
        if hi <= lo:
            return lo
        acc: Dict[int, int] = {}
        for r in range(self.max_round, hi, -1):
            for p, m in self.adj.get(r, {}).items():
                acc[p] = acc.get(p, 0) | m
        for x in range(hi, lo, -1):
            for p, m in self.adj.get(x, {}).items():
                acc[p] = acc.get(p, 0) | m
            members = self.views[(j, x)]
            if all(reaches(acc, m, j) for m in members):
                self.verified[j] = x
                return x
        return lo


class Simulator:
    """Per-simulator protocol state; `protocol()` is the generator driven
    by the scheduler kernel."""

    def __init__(self, pid: int, n: int):
        self.pid = pid
        self.n = n
        # own register under construction
        self.rows: List[object] = [None] * n
        self.counter = 0
        self.views_cell = None
        self.fields_cell = None
        self._pending_fields: List[Tuple[object, object]] = []
        # snapshot-fed caches
        self.oracle = _FreezeOracle(n)
        self.reach: Dict[Tuple[int, int], Set[int]] = {}
        self._seen_cells: Dict[int, object] = {}
        self._fields_cache: Dict[int, Dict[object, object]] = {}
        self._fields_ptr: Dict[int, object] = {}
        self._views_ptr: Dict[int, object] = {}
        # algorithm locals
        self.lastf = [0] * (n + 1)
        self.countf = [0] * (n + 1)
        self.proposed: Set[Tuple[int, int, int]] = set()

    # -- register construction ------------------------------------------

    def _reg(self) -> SimReg:
        for key, value in self._pending_fields:
            self.fields_cell = cons((key, value), self.fields_cell)
        self._pending_fields = []
        return SimReg(tuple(self.rows), self.counter, self.views_cell,
                      self.fields_cell)

    # agreement host interface
    def put(self, actor: int, key, value) -> None:
        self._pending_fields.append((key, value))

    def publish(self, actor: int):
        yield Write(self._reg())

    def observe(self, actor: int):
        snap = yield SNAP
        self.ingest(snap)
        return snap

    def collect(self, snap, key) -> Dict[int, object]:
        out = {}
        for m in range(1, self.n + 1):
            cache = self._fields_cache.get(m)
            if cache is not None and key in cache:
                out[m] = cache[key]
        return out

    def resolution(self, snap, inst, resolver: int):
        cache = self._fields_cache.get(resolver)
        if cache is None:
            return None
        return cache.get(("res", inst))

    # -- snapshot ingestion ---------------------------------------------

    def ingest(self, snap) -> None:
        for m in range(1, self.n + 1):
            reg = snap[m - 1]
            if reg is None:
                continue
            cell = reg.fields
            if cell is not self._fields_ptr.get(m):
                stop = self._fields_ptr.get(m)
                cache = self._fields_cache.setdefault(m, {})
                fresh = []
                while cell is not None and cell is not stop:
                    fresh.append(cell[0])
                    cell = cell[1]
                for key, value in fresh:
                    cache.setdefault(key, value)
                self._fields_ptr[m] = reg.fields
            cell = reg.views
            if cell is not self._views_ptr.get(m):
                stop = self._views_ptr.get(m)
                fresh = []
                while cell is not None and cell is not stop:
                    fresh.append(cell[0])
                    cell = cell[1]
                for (p, r), members in reversed(fresh):
                    self.oracle.add_view(p, r, members)
                self._views_ptr[m] = reg.views
            for j in range(1, self.n + 1):
                cell = reg.rows[j - 1]
                while cell is not None and id(cell) not in self._seen_cells:
                    self._seen_cells[id(cell)] = cell
                    _, r, l = cell[0]
                    self.reach.setdefault((r, l), set()).add(j)
                    cell = cell[1]

    # -- snapshot queries -----------------------------------------------

    def frontier(self, snap, p: int) -> Optional[Tuple[int, int]]:
        best = None
        for m in range(1, self.n + 1):
            reg = snap[m - 1]
            if reg is None:
                continue
            head = cons_head(reg.rows[p - 1])
            if head is None:
                continue
            _, r, l = head
            key = (r, -l)
            if best is None or key > best[0]:
                best = (key, (r, l))
        return None if best is None else best[1]

    def is_blocked(self, snap, p: int) -> bool:
        # one blocked mark anywhere suffices: the marking simulator saw no
        # value at this frontier, so nobody can advance p past it until the
        # resolver publishes (simulator p clears its own mark by resolving)
        fr = self.frontier(snap, p)
        if fr is None:
            return False
        for m in range(1, self.n + 1):
            reg = snap[m - 1]
            if reg is None:
                continue
            head = cons_head(reg.rows[p - 1])
            if head is None:
                continue
            d, r, l = head
            if (r, l) == fr and d == BLOCKED:
                return self.resolution(snap, (p, r, l), p) is None
        return False

    @staticmethod
    def _counter_of(snap, j: int) -> int:
        reg = snap[j - 1]
        return 0 if reg is None else reg.counter

    def _freeze_scan(self, snap) -> None:
        if not self.oracle.dirty:
            return
        self.oracle.dirty = False
        for j in sorted(self.oracle.last_round):
            x = self.oracle.max_aware_round(j)
            if x > self.lastf[j]:
                self.lastf[j] = x
                self.countf[j] = self._counter_of(snap, j)

    def _candidates(self, snap) -> List[Tuple[int, Tuple[int, int]]]:
        out = []
        for j in range(1, self.n + 1):
            fr = self.frontier(snap, j)
            if fr is None:
                continue
            if self._counter_of(snap, j) <= self.countf[j]:
                continue
            if self.is_blocked(snap, j):
                continue
            out.append((j, fr))
        return out

    # -- log appends -----------------------------------------------------

    def _append(self, p: int, entry) -> None:
        head = cons_head(self.rows[p - 1])
        if head is not None:
            if rl_key(p, entry[1], entry[2], self.n) < rl_key(p, head[1], head[2], self.n):
                raise SimulationBug(
                    f"non-monotone append {entry} after {head} for process {p}"
                )
        self.rows[p - 1] = cons(entry, self.rows[p - 1])
        self.reach.setdefault((entry[1], entry[2]), set()).add(p)
        self._seen_cells[id(self.rows[p - 1])] = self.rows[p - 1]

    def _record_view(self, p: int, r: int, members: frozenset) -> None:
        self.oracle.add_view(p, r, members)
        self.views_cell = cons(((p, r), members), self.views_cell)

    # -- main loop --------------------------------------------------------

    def protocol(self):
        i, n = self.pid, self.n
        # registration: enter the highest level of round 1; the first
        # counter tick rides along so a single-step process is already a
        # candidate for the others (its participation must become visible)
        self.rows[i - 1] = cons(make_entry(RUN, 1, n), None)
        self.counter = 1
        self._seen_cells[id(self.rows[i - 1])] = self.rows[i - 1]
        self.reach.setdefault((1, n), set()).add(i)
        yield Write(self._reg())
        while True:
            self.counter += 1
            yield Write(self._reg())
            snap = yield SNAP
            self.ingest(snap)
            p = None
            while True:
                if self.is_blocked(snap, i):
                    p = i
                    break
                self._freeze_scan(snap)
                cands = self._candidates(snap)
                if cands:
                    p = min(cands, key=lambda c: rl_key(c[0], c[1][0], c[1][1], n))[0]
                    break
                self.counter += 1
                yield Write(self._reg())
                snap = yield SNAP
                self.ingest(snap)
            fr = self.frontier(snap, p)
            if fr is None:
                raise SimulationBug(f"candidate {p} without a frontier")
            r, l = fr
            inst = (p, r, l)
            if inst in self.proposed:
                # already concluded or blocked here before: only the
                # resolution register can supply new information
                v = self.resolution(snap, inst, p)
            else:
                self.proposed.add(inst)
                proposal = 1 if len(self.reach.get((r, l), ())) == l else 0
                v = yield from rap_propose(self, i, inst, p, proposal)
            if v is None:
                entry = make_entry(BLOCKED, r, l)
                if cons_head(self.rows[p - 1]) != entry:
                    self._append(p, entry)
                    yield Write(self._reg())
                continue
            if v:
                # p completes round r; take a fresh snapshot so the
                # recorded view is the saturated level set (identical at
                # every simulator that records it)
                snap2 = yield SNAP
                self.ingest(snap2)
                members = frozenset(self.reach[(r, l)])
                if len(members) != l:
                    raise SimulationBug(
                        f"level set {sorted(members)} at ({r},{l}) after accept"
                    )
                self._append(p, make_entry(RUN, r + 1, n))
                self._record_view(p, r, members)
                yield Write(self._reg())
            else:
                if l <= 1:
                    raise SimulationBug(f"process {p} descending below level 1")
                self._append(p, make_entry(RUN, r, l - 1))
                yield Write(self._reg())


# ---------------------------------------------------------------------------
# Run driver and result analysis

@dataclass
class Alg1Result:
    n: int
    schedule: Schedule
    views: Dict[Tuple[int, int], frozenset]
    logs: Dict[Tuple[int, int], list]       # (simulator, process) -> entries
    counters: Dict[int, int]
    participants: frozenset                  # registered processes
    live: frozenset
    steps: int
    trace: Optional[IISTrace] = None         # extracted, full length
    stable_rounds: int = 0                   # rounds completed by every live process


def simulate(n: int, schedule: Schedule, horizon: Optional[int] = None,
             record_trace: bool = False) -> Alg1Result:
    sims = {p: Simulator(p, n) for p in range(1, n + 1)}
    protocols = {p: sims[p].protocol for p in range(1, n + 1)}
    rec = kernel.run(protocols, schedule, horizon=horizon,
                     record_trace=record_trace)
    views: Dict[Tuple[int, int], frozenset] = {}
    logs: Dict[Tuple[int, int], list] = {}
    counters: Dict[int, int] = {}
    registered = set()
    for m in range(1, n + 1):
        reg = rec.memory.cells[m - 1]
        if reg is None:
            continue
        registered.add(m)
        counters[m] = reg.counter
        for (p, r), members in cons_list(reg.views):
            old = views.get((p, r))
            if old is not None and old != members:
                raise SimulationBug(
                    f"simulators disagree on view of {p} round {r}"
                )
            views[(p, r)] = members
        for j in range(1, n + 1):
            entries = cons_list(reg.rows[j - 1])
            if entries:
                logs[(m, j)] = entries
    live = frozenset(p for p in registered if p not in schedule.crashes)
    result = Alg1Result(n=n, schedule=schedule, views=views, logs=logs,
                        counters=counters, participants=frozenset(registered),
                        live=live, steps=rec.steps)
    if views:
        result.trace = extract_iis_trace(views, n)
        last = {}
        for (p, r) in views:
            last[p] = max(last.get(p, 0), r)
        if live and all(p in last for p in live):
            result.stable_rounds = min(last[p] for p in live)
    return result


def extract_iis_trace(views: Dict[Tuple[int, int], frozenset], n: int,
                      horizon: Optional[int] = None) -> IISTrace:
    """Rebuild the ordered partitions from the recorded round views.

    Blocks are the successive differences of the distinct views sorted by
    containment; processes that never output in a round but appear in
    views are placed by the smallest view containing them."""
    if not views:
        return IISTrace(n, ())
    rmax = max(r for (_, r) in views)
    if horizon is not None:
        rmax = min(rmax, horizon)
    rounds = []
    for r in range(1, rmax + 1):
        vs = {p: v for (p, rr), v in views.items() if rr == r}
        if not vs:
            raise SimulationBug(f"no views recorded for round {r} <= {rmax}")
        distinct = sorted(set(vs.values()), key=len)
        prev: frozenset = frozenset()
        blocks = []
        for v in distinct:
            if not prev < v:
                raise SimulationBug(
                    f"round {r}: views not a containment chain: "
                    f"{sorted(prev)} !< {sorted(v)}"
                )
            blocks.append(v - prev)
            prev = v
        for p, v in vs.items():
            part = OrderedPartition(blocks)
            if part.view_of(p) != v:
                raise SimulationBug(
                    f"round {r}: view of {p} inconsistent with partition"
                )
        rounds.append(OrderedPartition(blocks))
    return IISTrace(n, rounds)


def check_level_occupancy(result: Alg1Result) -> None:
    """At most l distinct processes may ever be recorded at level l."""
    seen: Dict[Tuple[int, int], set] = {}
    for (m, j), entries in result.logs.items():
        for (_, r, l) in entries:
            seen.setdefault((r, l), set()).add(j)
    for (r, l), procs in seen.items():
        if len(procs) > l:
            raise SimulationBug(
                f"{len(procs)} processes recorded at round {r} level {l}"
            )


def check_frontier_agreement(result: Alg1Result) -> None:
    """Simulators agree on every frontier transition.

    A lagging simulator may skip positions (it appends the successor of
    the current global frontier, not every intermediate step), so
    individual logs are subsequences of the true path.  Their union is
    the full path, and agreement means it is one contiguous level
    descent per round whose completion level matches the recorded view
    size.  A conflicting decision at some (round, level) would leave
    either a level below the completion level or a gap."""
    n = result.n
    occupied: Dict[Tuple[int, int], set] = {}
    for (m, j), entries in result.logs.items():
        for (_, r, l) in entries:
            occupied.setdefault((j, r), set()).add(l)
    for (j, r), levels in sorted(occupied.items()):
        lo, hi = min(levels), max(levels)
        if hi != n or levels != set(range(lo, n + 1)):
            raise SimulationBug(
                f"process {j} round {r}: levels {sorted(levels)} are not a "
                f"contiguous descent from {n}"
            )
        view = result.views.get((j, r))
        if view is not None and len(view) != lo:
            raise SimulationBug(
                f"process {j} round {r}: completed at level {lo} but the "
                f"recorded view has {len(view)} members"
            )
        if (j, r + 1) in occupied and view is None:
            raise SimulationBug(
                f"process {j} entered round {r + 1} without a recorded "
                f"view for round {r}"
            )


@dataclass
class Theorem1Report:
    ok: bool
    strongly_correct: frozenset
    live: frozenset
    participation_ok: bool
    crashed_settled: bool
    details: tuple = ()


def check_theorem1(result: Alg1Result, params: Optional[WindowParams] = None) -> Theorem1Report:
    """Finite-window substitute for correct(E) = strongly-correct(E')."""
    n = result.n
    params = params or WindowParams(burn_in=2 * n, window=2 * n)
    details = []
    trace = result.trace
    stable = result.stable_rounds
    if trace is None or stable < params.burn_in + params.window:
        return Theorem1Report(False, frozenset(), result.live, False, False,
                              ("insufficient stable rounds",))
    stable_trace = IISTrace(n, trace.rounds[:stable])
    try:
        sc = strongly_correct_window(stable_trace, params)
    except InsufficientData as exc:
        return Theorem1Report(False, frozenset(), result.live, False, False,
                              (str(exc),))
    ok = sc == result.live
    if not ok:
        details.append(f"window strongly-correct {sorted(sc)} != live {sorted(result.live)}")

    part_ok = True
    for i in sorted(result.live):
        got = participation_set(trace, i)
        if got != result.participants:
            part_ok = False
            details.append(
                f"participation set of {i}: {sorted(got)} != "
                f"registered {sorted(result.participants)}"
            )

    # crashed processes settle: they stop completing rounds well before the
    # stable suffix ends, or stop appearing in views of the last window
    crashed = result.participants - result.live
    last = {}
    for (p, r) in result.views:
        last[p] = max(last.get(p, 0), r)
    settled = True
    tail = range(max(1, stable - params.window + 1), stable + 1)
    for c in sorted(crashed):
        stopped = last.get(c, 0) <= stable - params.window
        seen_late = any(
            c in v for r in tail for v in stable_trace.round_views(r).values()
        )
        if not stopped and seen_late:
            settled = False
            details.append(f"crashed {c} still active near the horizon")

    return Theorem1Report(ok=ok and part_ok and settled,
                          strongly_correct=sc, live=result.live,
                          participation_ok=part_ok, crashed_settled=settled,
                          details=tuple(details))
