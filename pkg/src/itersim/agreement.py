"""Commit-adopt and the resolver agreement protocol.

Both are expressed as generator sub-protocols (driven with `yield from`)
against a host that knows how to publish fields into the caller's own
single-writer register and collect fields from a snapshot.  This lets the
same logic run standalone (for direct contract tests) and embedded inside
the AS-to-IIS simulator, where the fields live in a larger composite
register.

Commit-adopt is the standard two-phase construction: write the proposal
and snapshot; grade (candidate, v) if only v was visible; write the grade
and snapshot; commit iff every visible grade is (candidate, v).

RAP wraps commit-adopt: on commit return the value; on adopt the
designated resolver writes the adopted value to a write-once resolution
register and returns it, while any other process returns the resolution
register's value, which may still be empty (None).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional

from .core import ContractViolation, SimulationBug
from .kernel import SNAP, Write

COMMIT = "commit"
ADOPT = "adopt"


@dataclass(frozen=True)
class CAOutcome:
    grade: str
    value: int


def ca_propose(host, actor: int, inst, v: int):
    """Two-phase commit-adopt.  Returns CAOutcome."""
    host.put(actor, ("ca1", inst), v)
    yield from host.publish(actor)
    snap = yield from host.observe(actor)
    seen1 = host.collect(snap, ("ca1", inst))
    if all(x == v for x in seen1.values()):
        grade = (True, v)
    else:
        grade = (False, min(seen1.values()))
    host.put(actor, ("ca2", inst), grade)
    yield from host.publish(actor)
    snap = yield from host.observe(actor)
    seen2 = host.collect(snap, ("ca2", inst))
    strong = {val for (flag, val) in seen2.values() if flag}
    if len(strong) > 1:
        raise SimulationBug(f"conflicting commit candidates {strong} in {inst}")
    if strong:
        val = next(iter(strong))
        if all(flag for (flag, _) in seen2.values()):
            return CAOutcome(COMMIT, val)
        return CAOutcome(ADOPT, val)
    return CAOutcome(ADOPT, grade[1])


def rap_propose(host, actor: int, inst, resolver: int, v: int):
    """Resolver agreement.  Returns 0/1, or None when blocked."""
    out = yield from ca_propose(host, actor, inst, v)
    if out.grade == COMMIT:
        return out.value
    if actor == resolver:
        host.put(actor, ("res", inst), out.value)
        yield from host.publish(actor)
        return out.value
    snap = yield from host.observe(actor)
    return host.resolution(snap, inst, resolver)


# ---------------------------------------------------------------------------
# Standalone host: registers are plain dicts, copied on write.

class DictHost:
    """Each actor's register is an immutable mapping of fields; publish
    rewrites the whole register (full-information style)."""

    def __init__(self):
        self._local: Dict[int, dict] = {}

    def put(self, actor: int, key, value) -> None:
        self._local.setdefault(actor, {})[key] = value

    def publish(self, actor: int):
        yield Write(dict(self._local.get(actor, {})))

    def observe(self, actor: int):
        snap = yield SNAP
        return snap

    def collect(self, snap, key) -> Dict[int, object]:
        out = {}
        for j, reg in enumerate(snap, 1):
            if reg is not None and key in reg:
                out[j] = reg[key]
        return out

    def resolution(self, snap, inst, resolver: int):
        reg = snap[resolver - 1]
        if reg is None:
            return None
        return reg.get(("res", inst))


# ---------------------------------------------------------------------------
# One-shot RAP instance facade for direct unit tests

class RAPInstance:
    """Book-keeping wrapper enforcing one proposal per actor; produces
    the generator to be driven by the kernel."""

    def __init__(self, inst, resolver: int, host: Optional[DictHost] = None):
        self.inst = inst
        self.resolver = resolver
        self.host = host if host is not None else DictHost()
        self._proposed: set = set()

    def propose(self, actor: int, v: int):
        if actor in self._proposed:
            raise ContractViolation(f"double proposal by {actor} in {self.inst}")
        self._proposed.add(actor)
        return rap_propose(self.host, actor, self.inst, self.resolver, v)

    def read_resolution(self, snap):
        return self.host.resolution(snap, self.inst, self.resolver)


class CAInstance:
    def __init__(self, inst, host: Optional[DictHost] = None):
        self.inst = inst
        self.host = host if host is not None else DictHost()
        self._proposed: set = set()

    def propose(self, actor: int, v: int):
        if actor in self._proposed:
            raise ContractViolation(f"double proposal by {actor} in {self.inst}")
        self._proposed.add(actor)
        return ca_propose(self.host, actor, self.inst, v)
