import pytest

from itersim.analysis import default_window_params
from itersim.core import (BOT, ContractViolation, InvalidInput,
                          SimulationBug, validate_as_trace)
from itersim.iis_to_as import (BASELINE, HELPING, SnapshotOutput,
                               check_theorem2, extract_as_trace, round_step,
                               simulate, steadily_outputting)
from itersim.schedules import (cyclic_partitions, seeded_iis_trace,
                               starvation_pattern)


class TestRoundStep:
    def test_identical_vectors_emit(self):
        c = (1, 0)
        view = {1: (c, (0, 0)), 2: (c, (0, 0))}
        _, _, emitted = round_step(1, c, (0, 0), view)
        assert emitted == c

    def test_disagreeing_vectors_hold(self):
        view = {1: ((1, 0), (0, 0)), 2: ((0, 1), (0, 0))}
        nc, _, emitted = round_step(1, (1, 0), (0, 0), view, BASELINE)
        assert emitted is None
        assert nc == (1, 1)  # merged pointwise max

    def test_helping_adopts_covering_snapshot(self):
        # 2 published a snapshot already containing 1's current count
        view = {1: ((1, 0), (0, 0)), 2: ((2, 1), (1, 1))}
        nc, last, emitted = round_step(1, (1, 0), (0, 0), view, HELPING)
        assert emitted == (1, 1)
        assert last == (1, 1)
        assert nc[0] == 2  # own slot incremented after the output

    def test_baseline_ignores_helpers(self):
        view = {1: ((1, 0), (0, 0)), 2: ((2, 1), (1, 1))}
        _, _, emitted = round_step(1, (1, 0), (0, 0), view, BASELINE)
        assert emitted is None

    def test_view_must_contain_self(self):
        with pytest.raises(ContractViolation):
            round_step(1, (1, 0), (0, 0), {2: ((0, 1), (0, 0))})

    def test_stale_self_entry_rejected(self):
        with pytest.raises(ContractViolation):
            round_step(1, (1, 0), (0, 0), {1: ((9, 9), (0, 0))})


class TestSimulate:
    def test_lockstep_alternates_merge_and_output(self):
        # round 1 merges the differing initial vectors, round 2 emits,
        # and so on: one output per two rounds for both processes
        tr = cyclic_partitions(2, [[[1, 2]]], 50)
        res = simulate(tr)
        assert len(res.outputs_of(1)) == 25
        assert len(res.outputs_of(2)) == 25
        assert all(o.round % 2 == 0 for o in res.outputs)

    def test_starvation_baseline(self):
        tr = cyclic_partitions(3, starvation_pattern(), 200)
        res = simulate(tr, BASELINE)
        assert len(res.outputs_of(2)) == 0
        assert len(res.outputs_of(1)) == 100
        assert len(res.outputs_of(3)) == 100

    def test_starvation_lifted_by_helping(self):
        tr = cyclic_partitions(3, starvation_pattern(), 200)
        res = simulate(tr, HELPING)
        assert len(res.outputs_of(2)) > 30

    def test_unknown_mode_rejected(self):
        tr = cyclic_partitions(2, [[[1, 2]]], 5)
        with pytest.raises(InvalidInput):
            simulate(tr, "turbo")


class TestExtraction:
    def test_containment_order_and_replay(self):
        tr = seeded_iis_trace(3, 400, 9, departure_fraction=0.3)
        res = simulate(tr)
        at = extract_as_trace(res.outputs, 3)
        validate_as_trace(at)
        snaps = [e for e in at.events if e.kind == "snapshot"]
        assert len(snaps) == len(res.outputs)

    def test_zero_counts_read_as_empty_cells(self):
        outs = [SnapshotOutput(1, 1, (1, 0))]
        at = extract_as_trace(outs, 2)
        snap = [e for e in at.events if e.kind == "snapshot"][0]
        assert snap.result == (1, BOT)

    def test_rejects_incomparable_outputs(self):
        outs = [SnapshotOutput(1, 1, (1, 0)), SnapshotOutput(2, 1, (0, 1))]
        with pytest.raises(SimulationBug):
            extract_as_trace(outs, 2)

    def test_rejects_counter_jump(self):
        outs = [SnapshotOutput(1, 1, (1, 0)), SnapshotOutput(1, 2, (3, 0))]
        with pytest.raises(SimulationBug):
            extract_as_trace(outs, 2)


class TestTheorem2:
    def test_crash_free_cycle(self):
        tr = cyclic_partitions(3, starvation_pattern(), 300)
        rep = check_theorem2(simulate(tr))
        assert rep.ok, rep.details
        assert rep.strongly_correct == {1, 2, 3}

    def test_chain_starves_non_sink(self):
        tr = cyclic_partitions(3, [[[1], [2], [3]]], 300)
        res = simulate(tr)
        rep = check_theorem2(res)
        assert rep.ok, rep.details
        assert rep.strongly_correct == {1}
        assert rep.steadily_outputting == {1}

    def test_fuzzed_traces_with_departures(self):
        for seed in range(15):
            tr = seeded_iis_trace(3, 600, seed, departure_fraction=0.4)
            rep = check_theorem2(simulate(tr))
            assert rep.ok, (seed, rep.details)

    def test_steadily_outputting_window_logic(self):
        tr = cyclic_partitions(2, [[[1, 2]]], 40)
        res = simulate(tr)
        assert steadily_outputting(res, burn_in=4, window=4) == {1, 2}
        # a process with no output at all is excluded
        assert steadily_outputting(
            simulate(cyclic_partitions(2, [[[1], [2]]], 40)),
            burn_in=4, window=4) == {1}


class TestDeterminism:
    def test_same_trace_same_outputs(self):
        tr = seeded_iis_trace(4, 300, 21, departure_fraction=0.3)
        assert simulate(tr).outputs == simulate(tr).outputs
