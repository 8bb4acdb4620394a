from itersim.core import Schedule
from itersim.kernel import run


def explore(make_protocols, max_steps=40):
    """Yield the outputs dict of every maximal interleaving of the given
    protocol factories, at one-primitive granularity.

    Generator state cannot be forked, so the execution tree is walked by
    replaying each activation prefix from scratch."""
    pids = sorted(make_protocols().keys())

    def replay(prefix):
        return run(make_protocols(), Schedule(prefix))

    stack = [()]
    while stack:
        prefix = stack.pop()
        rec = replay(prefix)
        undecided = [p for p in pids if p not in rec.outputs]
        if not undecided:
            yield rec.outputs
            continue
        assert len(prefix) < max_steps, "protocol did not terminate"
        for p in undecided:
            stack.append(prefix + (p,))
