"""Graph machinery over iterated traces: awareness, window-limited
strongly-correct sets, participation sets, and the immediate-snapshot
axiom checker.

Round graphs have an edge i -> j when j appears in i's round view.  All
limit notions are operationalized on finite traces by a burn-in and a
sliding window of W rounds.  Graphs are tiny (n <= 8), represented as
bitmasks: bit p-1 stands for process p.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional

from .core import IISTrace, InvalidInput


@dataclass(frozen=True)
class WindowParams:
    burn_in: int
    window: int

    def __post_init__(self):
        if self.window < 1:
            raise InvalidInput("window width must be >= 1")
        if self.burn_in < 0:
            raise InvalidInput("burn-in must be >= 0")


def default_window_params(n: int) -> WindowParams:
    return WindowParams(burn_in=2 * n, window=2 * n)


class InsufficientData(ValueError):
    """Trace shorter than burn_in + window."""


def _mask(pids: Iterable[int]) -> int:
    m = 0
    for p in pids:
        m |= 1 << (p - 1)
    return m


def _bits(mask: int) -> List[int]:
    out = []
    p = 1
    while mask:
        if mask & 1:
            out.append(p)
        mask >>= 1
        p += 1
    return out


def round_adjacency(trace: IISTrace, r: int) -> Dict[int, int]:
    """Edges of the round-r graph: adj[i] = bitmask of i's view."""
    return {p: _mask(v) for p, v in trace.round_views(r).items()}


def union_adjacency(trace: IISTrace, lo: int, hi: Optional[int] = None) -> Dict[int, int]:
    """Union of round graphs for rounds lo..hi (inclusive, 1-based)."""
    hi = len(trace) if hi is None else hi
    adj: Dict[int, int] = {}
    for r in range(lo, hi + 1):
        for p, m in round_adjacency(trace, r).items():
            adj[p] = adj.get(p, 0) | m
    return adj


def reaches(adj: Dict[int, int], src: int, dst: int) -> bool:
    """Directed path src -> dst over bitmask adjacency."""
    seen = 1 << (src - 1)
    frontier = seen
    target = 1 << (dst - 1)
    while frontier:
        nxt = 0
        for p in _bits(frontier):
            nxt |= adj.get(p, 0)
        if nxt & target:
            return True
        frontier = nxt & ~seen
        seen |= nxt
    return bool(seen & target)


def aware_of(trace: IISTrace, i: int, j: int, r: int) -> bool:
    """True iff a path i -> ... -> j exists in the union graph of rounds >= r."""
    if j not in trace.participants(r):
        raise InvalidInput(f"process {j} does not participate in round {r}")
    return reaches(union_adjacency(trace, r), i, j)


def participation_set(trace: IISTrace, i: int) -> frozenset:
    """Processes whose participation i learns of, by full-information
    relay: each round a process absorbs the knowledge its view members
    held when they entered the round.  Knowledge only flows forward in
    time, so this is not plain reachability in the union graph."""
    knows: Dict[int, frozenset] = {}
    for r in range(1, len(trace) + 1):
        views = trace.round_views(r)
        entering = {p: knows.get(p, frozenset((p,))) for p in views}
        for p, v in views.items():
            acc = entering[p]
            for q in v:
                acc |= entering.get(q, frozenset((q,)))
            knows[p] = acc
    return knows.get(i, frozenset((i,)))


# ---------------------------------------------------------------------------
# IS axioms

@dataclass(frozen=True)
class AxiomReport:
    ok: bool
    violations: tuple  # tuple of (axiom, detail) pairs


def check_is_axioms(views: Dict[int, frozenset]) -> AxiomReport:
    """Verify self-inclusion, containment and immediacy for one round's
    views (mapping pid -> view)."""
    bad = []
    for i, v in views.items():
        if i not in v:
            bad.append(("self-inclusion", f"{i} not in own view {sorted(v)}"))
    items = sorted(views.items())
    for ai in range(len(items)):
        i, vi = items[ai]
        for aj in range(ai + 1, len(items)):
            j, vj = items[aj]
            if not (vi <= vj or vj <= vi):
                bad.append(("containment", f"views of {i} and {j} incomparable"))
    for i, vi in items:
        for j, vj in items:
            if i in vj and not vi <= vj:
                bad.append(("immediacy", f"{i} in view of {j} but V_{i} !<= V_{j}"))
    return AxiomReport(ok=not bad, violations=tuple(bad))


def check_trace_axioms(trace: IISTrace) -> AxiomReport:
    for r in range(1, len(trace) + 1):
        rep = check_is_axioms(trace.round_views(r))
        if not rep.ok:
            return AxiomReport(False, tuple((a, f"round {r}: {d}") for a, d in rep.violations))
    return AxiomReport(True, ())


# ---------------------------------------------------------------------------
# Window-limited strongly-correct sets

def _suffix_candidates(trace: IISTrace, params: WindowParams) -> frozenset:
    """Processes participating in every round after burn-in (the finite
    stand-in for infinitely-participating)."""
    cands = None
    for r in range(params.burn_in + 1, len(trace) + 1):
        mem = trace.participants(r)
        cands = mem if cands is None else cands & mem
    return frozenset(cands or ())


def _settle_round(trace: IISTrace, cands: frozenset) -> int:
    """Last round whose participants still exceed the final participant
    set (0 when every round matches).  Participants are nested, so all
    rounds after this one involve exactly the suffix candidates.  The
    check ranges begin after this point: a process that departs mid-trace
    is gone for good, and survivor verdicts only make sense once views no
    longer mention it."""
    for r in range(len(trace), 0, -1):
        if trace.participants(r) != cands:
            return r
    return 0


def _windows(trace: IISTrace, params: WindowParams, settle: int = 0):
    first = max(params.burn_in, settle) + 1
    last = len(trace) - params.window + 1
    if last < first:
        raise InsufficientData(
            f"trace has {len(trace)} rounds; need >= "
            f"{max(params.burn_in, settle) + params.window}"
        )
    return range(first, last + 1)


def _round_tables(trace: IISTrace, lo: int):
    """Per-round adjacency and view maps for rounds lo..end, computed in
    one pass (window loops would otherwise redo the prefix unions per
    window)."""
    adjs = {}
    views = {}
    for r in range(lo, len(trace) + 1):
        vs = trace.round_views(r)
        views[r] = vs
        adjs[r] = {p: _mask(v) for p, v in vs.items()}
    return adjs, views


def _close_from(adj: Dict[int, int], p: int) -> int:
    """Bitmask of nodes reachable from p (p included)."""
    seen = 1 << (p - 1)
    frontier = seen
    while frontier:
        nxt = 0
        for q in _bits(frontier):
            nxt |= adj.get(q, 0)
        frontier = nxt & ~seen
        seen |= nxt
    return seen


def strongly_correct_window(trace: IISTrace, params: WindowParams) -> frozenset:
    """Return-path form: i survives iff for every start round r after
    burn-in (the last W rounds excluded as the unsettled tail), every
    member of i's round-r view has a path back to i in the union of the
    round graphs from r to the end of the trace.

    The suffix unions shrink as r grows, so the transitive closure is
    maintained incrementally walking r from the end toward burn-in."""
    cands = _suffix_candidates(trace, params)
    starts = _windows(trace, params, _settle_round(trace, cands))
    adjs, views = _round_tables(trace, params.burn_in + 1)
    n = trace.n
    # closure[p]: nodes reachable from p in the union of rounds r..end
    closure = {p: 1 << (p - 1) for p in range(1, n + 1)}
    alive = set(cands)
    for r in range(len(trace), params.burn_in, -1):
        round_adj = adjs[r]
        if any(round_adj.get(p, 0) & ~closure[p] for p in round_adj):
            # closure edges are transitive shortcuts, so one BFS per node
            # over (round edges | previous closure) recloses the union
            combined = {p: round_adj.get(p, 0) | closure[p]
                        for p in range(1, n + 1)}
            closure = {p: _close_from(combined, p) for p in range(1, n + 1)}
        if r in starts:
            for i in list(alive):
                vi = views[r].get(i)
                if vi is None or not all(closure[m] & (1 << (i - 1)) for m in vi):
                    alive.discard(i)
    return frozenset(alive)


def strongly_correct_sink(trace: IISTrace, params: WindowParams) -> frozenset:
    """Sink-component form: the sink strongly connected component of the
    union graph over the last W rounds (the finite stand-in for the limit
    graph, whose edges are those that keep recurring), restricted to the
    processes participating in every round after burn-in."""
    cands = _suffix_candidates(trace, params)
    _windows(trace, params, _settle_round(trace, cands))  # length guard
    adj = union_adjacency(trace, len(trace) - params.window + 1, len(trace))
    sink = _sink_component(adj, cands)
    return frozenset(sink & cands)


def _sink_component(adj: Dict[int, int], nodes: frozenset) -> set:
    """Sink SCC of the graph restricted to nodes.  For window graphs of
    valid traces the restriction has at least one edge between any two
    nodes, so the sink is unique; if the graph is degenerate the
    intersection of all sink components is returned."""
    comp = _scc(adj, nodes)
    sinks = []
    for c in comp:
        is_sink = True
        for p in c:
            for q in _bits(adj.get(p, 0)):
                if q in nodes and q not in c:
                    is_sink = False
                    break
            if not is_sink:
                break
        if is_sink:
            sinks.append(c)
    if not sinks:
        return set()
    out = set(sinks[0])
    for c in sinks[1:]:
        out &= c
    return out


def _scc(adj: Dict[int, int], nodes: frozenset) -> List[set]:
    """Tarjan over the restricted graph; iterative, sizes are tiny."""
    index: Dict[int, int] = {}
    low: Dict[int, int] = {}
    on: set = set()
    stack: List[int] = []
    comps: List[set] = []
    counter = [0]

    ordered = sorted(nodes)

    def strong(v: int):
        work = [(v, iter([q for q in _bits(adj.get(v, 0)) if q in nodes]))]
        index[v] = low[v] = counter[0]
        counter[0] += 1
        stack.append(v)
        on.add(v)
        while work:
            node, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on.add(w)
                    work.append((w, iter([q for q in _bits(adj.get(w, 0)) if q in nodes])))
                    advanced = True
                    break
                elif w in on:
                    low[node] = min(low[node], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = set()
                while True:
                    w = stack.pop()
                    on.discard(w)
                    comp.add(w)
                    if w == node:
                        break
                comps.append(comp)

    for v in ordered:
        if v not in index:
            strong(v)
    return comps


@dataclass(frozen=True)
class CrossCheckReport:
    ok: bool
    return_path_form: frozenset
    sink_form: frozenset
    witness: Optional[str] = None


def proposition1_crosscheck(trace: IISTrace, params: WindowParams) -> CrossCheckReport:
    """Assert the two window-strongly-correct computations agree."""
    a = strongly_correct_window(trace, params)
    b = strongly_correct_sink(trace, params)
    if a == b:
        return CrossCheckReport(True, a, b)
    return CrossCheckReport(
        False, a, b,
        witness=f"return-path form {sorted(a)} != sink form {sorted(b)}",
    )
