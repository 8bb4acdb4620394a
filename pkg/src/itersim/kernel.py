"""Deterministic step executor for protocols over simulated single-writer
registers with an atomic snapshot primitive.

A protocol for process i is a generator that yields memory operations
(Write(value) or Snap()) and receives each operation's result at its next
activation.  One activation performs exactly one shared-memory primitive,
so every interleaving is expressible as a schedule of process ids.
Returning from the generator marks the process as decided.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

from .core import ASEvent, ASTrace, BOT, Schedule, SimulationBug, check_pid


class Write:
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value


class Snap:
    __slots__ = ()


SNAP = Snap()


class CrashedProcess(RuntimeError):
    pass


class Memory:
    """Single-writer register array with atomic snapshot."""

    def __init__(self, n: int):
        self.n = n
        self.cells: List[object] = [BOT] * n
        self.crashed: set = set()

    def write(self, actor: int, value) -> None:
        check_pid(actor, self.n)
        if actor in self.crashed:
            raise CrashedProcess(f"write by crashed process {actor}")
        self.cells[actor - 1] = value

    def snapshot(self, actor: int) -> tuple:
        check_pid(actor, self.n)
        if actor in self.crashed:
            raise CrashedProcess(f"snapshot by crashed process {actor}")
        return tuple(self.cells)


@dataclass
class ExecutionRecord:
    n: int
    trace: Optional[ASTrace]
    outputs: Dict[int, object]
    halted: str  # "script-exhausted" | "horizon" | "all-decided"
    steps: int
    memory: Memory = field(repr=False, default=None)


def run(protocols: Dict[int, Callable[[], object]],
        schedule: Schedule,
        horizon: Optional[int] = None,
        record_trace: bool = True,
        on_event: Optional[Callable] = None) -> ExecutionRecord:
    """Drive the protocol generators along the schedule.

    protocols maps pid -> zero-argument factory returning the protocol
    generator.  Identical inputs give identical records.
    """
    n = max(protocols)
    mem = Memory(n)
    gens: Dict[int, object] = {}
    pending: Dict[int, object] = {}
    done: Dict[int, object] = {}
    events: List[ASEvent] = [] if record_trace else None

    steps = 0
    halted = "script-exhausted"
    for k, pid in enumerate(schedule.steps):
        if horizon is not None and steps >= horizon:
            halted = "horizon"
            break
        cut = schedule.crashes.get(pid)
        if cut is not None and k >= cut:
            raise SimulationBug(f"schedule activates {pid} after crash index {cut}")
        if pid in done:
            continue
        if pid not in gens:
            gens[pid] = protocols[pid]()
            try:
                op = next(gens[pid])
            except StopIteration as stop:
                done[pid] = stop.value
                continue
        else:
            try:
                op = gens[pid].send(pending.pop(pid, None))
            except StopIteration as stop:
                done[pid] = stop.value
                if len(done) == len(protocols):
                    halted = "all-decided"
                    break
                continue
        if isinstance(op, Write):
            mem.write(pid, op.value)
            pending[pid] = None
            if events is not None:
                events.append(ASEvent(actor=pid, kind="update", value=op.value))
            if on_event is not None:
                on_event(pid, "update", op.value)
        elif isinstance(op, Snap):
            snap = mem.snapshot(pid)
            pending[pid] = snap
            if events is not None:
                events.append(ASEvent(actor=pid, kind="snapshot", result=snap))
            if on_event is not None:
                on_event(pid, "snapshot", snap)
        else:
            raise SimulationBug(f"protocol {pid} yielded {op!r}")
        steps += 1
        # apply crash exactly at the cut so a late guard also catches misuse
        if cut is not None and k + 1 >= cut:
            mem.crashed.add(pid)

    trace = ASTrace(n, events) if events is not None else None
    return ExecutionRecord(n=n, trace=trace, outputs=dict(done),
                           halted=halted, steps=steps, memory=mem)
