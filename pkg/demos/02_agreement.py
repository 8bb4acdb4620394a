"""Commit-adopt and resolver agreement under friendly and adversarial
interleavings."""
from itersim import RAPInstance, CAInstance, Schedule, run


def drive(inst_factory, proposals, schedule):
    inst = inst_factory()
    protocols = {p: (lambda p=p: inst.propose(p, proposals[p]))
                 for p in proposals}
    return run(protocols, Schedule(schedule)).outputs


alternate = [1, 2] * 8

print("commit-adopt, unanimous proposals:",
      drive(lambda: CAInstance("a"), {1: 5, 2: 5}, alternate))
print("commit-adopt, conflicting proposals:",
      drive(lambda: CAInstance("b"), {1: 0, 2: 1}, alternate))

print("resolver agreement, conflict, lock-step:",
      drive(lambda: RAPInstance("c", resolver=1), {1: 0, 2: 1}, alternate))

# process 2 races ahead of the resolver: its read of the resolution
# register comes back empty, so it returns None (bottom) while the
# resolver still returns a value
print("resolver agreement, non-resolver races ahead:",
      drive(lambda: RAPInstance("d", resolver=1), {1: 0, 2: 1},
            [1] + [2] * 6 + [1] * 8))
