"""Commit-adopt and resolver-agreement contracts.

The two-participant cases are checked over every interleaving at
write/snapshot granularity: executions are explored as a tree of
activation prefixes, replaying each prefix from scratch (generator state
cannot be forked)."""
import random

import pytest

from conftest import explore

from itersim.agreement import (ADOPT, CAInstance, COMMIT, DictHost,
                               RAPInstance)
from itersim.core import ContractViolation, Schedule
from itersim.kernel import run


def ca_factory(proposals):
    def make():
        inst = CAInstance("x")
        return {p: (lambda p=p: inst.propose(p, proposals[p]))
                for p in proposals}
    return make


def rap_factory(proposals, resolver):
    def make():
        inst = RAPInstance("x", resolver)
        return {p: (lambda p=p: inst.propose(p, proposals[p]))
                for p in proposals}
    return make


class TestCommitAdoptExhaustive:
    def test_unanimity_implies_commit(self):
        for out in explore(ca_factory({1: 5, 2: 5})):
            assert all(o.grade == COMMIT and o.value == 5
                       for o in out.values())

    def test_agreement_on_commit_and_validity(self):
        committed = adopted = 0
        for out in explore(ca_factory({1: 0, 2: 1})):
            values = {o.value for o in out.values()}
            assert values <= {0, 1}
            strong = {o.value for o in out.values() if o.grade == COMMIT}
            # agreement on commit: a commit pins every other output
            if strong:
                committed += 1
                assert len(strong) == 1
                assert values == strong
            if any(o.grade == ADOPT for o in out.values()):
                adopted += 1
        assert committed > 0 and adopted > 0

    def test_solo_proposer_commits(self):
        for out in explore(ca_factory({1: 9})):
            assert out[1].grade == COMMIT and out[1].value == 9


class TestRAPExhaustive:
    @pytest.mark.parametrize("resolver", [1, 2])
    def test_contract_under_conflicting_proposals(self, resolver):
        blocked = 0
        for out in explore(rap_factory({1: 0, 2: 1}, resolver)):
            returned = {p: v for p, v in out.items() if v is not None}
            # (i) validity + (iv) agreement
            assert set(returned.values()) <= {0, 1}
            assert len(set(returned.values())) <= 1
            # (iii) the resolver never returns bottom
            assert out[resolver] is not None
            if None in out.values():
                blocked += 1
        # conflicting proposals do force adopt outcomes somewhere
        assert blocked > 0

    @pytest.mark.parametrize("v", [0, 1])
    def test_unanimity_never_blocks(self, v):
        for out in explore(rap_factory({1: v, 2: v}, 1)):
            assert out == {1: v, 2: v}


class TestRAPFuzz:
    def test_many_participants(self):
        rng = random.Random(3)
        for trial in range(300):
            n = rng.randint(2, 5)
            proposals = {p: rng.randint(0, 1) for p in range(1, n + 1)}
            resolver = rng.randint(1, n)
            inst = RAPInstance("x", resolver)
            protocols = {p: (lambda p=p: inst.propose(p, proposals[p]))
                         for p in proposals}
            steps = [rng.randint(1, n) for _ in range(40 * n)]
            rec = run(protocols, Schedule(steps))
            assert set(rec.outputs) == set(proposals)
            returned = {v for v in rec.outputs.values() if v is not None}
            assert returned <= set(proposals.values())
            assert len(returned) <= 1
            assert rec.outputs[resolver] is not None
            if len(set(proposals.values())) == 1:
                assert None not in rec.outputs.values()


class TestStickiness:
    def test_resolution_is_sticky_across_reads(self):
        host = DictHost()
        host.put(3, ("res", "x"), 1)
        op = next(host.publish(3))  # the register image the kernel would store
        snap = (None, None, op.value)
        assert host.resolution(snap, "x", 3) == 1
        assert host.resolution(snap, "x", 3) == 1
        assert host.resolution((None, None, None), "x", 3) is None

    def test_double_proposal_rejected(self):
        inst = RAPInstance("x", 1)
        inst.propose(1, 0)
        with pytest.raises(ContractViolation):
            inst.propose(1, 1)
