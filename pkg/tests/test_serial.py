import io

import pytest

from itersim.core import ASEvent, ASTrace, BOT
from itersim.iis_to_as import SnapshotOutput
from itersim.schedules import cyclic_partitions, seeded_iis_trace
from itersim.serial import (ParseError, as_trace_records, iis_trace_records,
                            load_trace, meta_record, parse_as_script,
                            parse_iis_script, read_records, records_to_bytes,
                            script_sha, sim_view_records, status_records)


def roundtrip(records):
    text = records_to_bytes(records).decode()
    return load_trace(io.StringIO(text))


class TestTraceRoundTrip:
    def test_iis_trace(self):
        tr = seeded_iis_trace(4, 30, 3, departure_fraction=0.3)
        records = [meta_record(4, "iis-to-as", 30, mode="helping", seed=3)]
        records += list(iis_trace_records(tr))
        meta, payload = roundtrip(records)
        assert payload["iis"] == tr
        assert meta["mode"] == "helping"

    def test_as_trace_with_empty_cells(self):
        at = ASTrace(2, [
            ASEvent(actor=1, kind="update", value=3),
            ASEvent(actor=2, kind="snapshot", result=(3, BOT)),
        ])
        records = [meta_record(2, "iis-to-as", 10)]
        records += list(as_trace_records(at))
        _, payload = roundtrip(records)
        assert payload["as"] == at

    def test_views_and_outputs(self):
        views = {(1, 1): frozenset({1}), (2, 1): frozenset({1, 2})}
        outs = [SnapshotOutput(1, 2, (1, 0))]
        records = [meta_record(2, "as-to-iis", 10)]
        records += list(sim_view_records(views))
        records += list(status_records(outs))
        _, payload = roundtrip(records)
        assert payload["views"] == views
        assert payload["outputs"] == [(1, 2, (1, 0))]

    def test_byte_determinism(self):
        tr = seeded_iis_trace(3, 20, 5)
        records = lambda: [meta_record(3, "iis-to-as", 20, seed=5),
                           *iis_trace_records(tr)]
        assert records_to_bytes(records()) == records_to_bytes(records())


class TestTraceErrors:
    def test_bad_json_carries_line_number(self):
        with pytest.raises(ParseError) as err:
            list(read_records(io.StringIO('{"type":"meta"}\n{oops\n')))
        assert err.value.line == 2

    def test_missing_type_tag(self):
        with pytest.raises(ParseError):
            list(read_records(io.StringIO('{"n": 3}\n')))

    def test_missing_meta(self):
        with pytest.raises(ParseError):
            load_trace(io.StringIO(
                '{"type":"iis_round","round":1,"blocks":[[1]]}\n'))

    def test_unknown_type(self):
        with pytest.raises(ParseError):
            load_trace(io.StringIO('{"type":"wat"}\n'))

    def test_rounds_must_be_consecutive(self):
        text = ('{"type":"meta","n":2,"direction":"iis-to-as","horizon":2}\n'
                '{"type":"iis_round","round":2,"blocks":[[1,2]]}\n')
        with pytest.raises(ParseError):
            load_trace(io.StringIO(text))


class TestIISScript:
    def test_blocks_and_repeat(self):
        tr = parse_iis_script("1 | 2 3\n3 | 1 2\nrepeat\n", 3, 5)
        assert len(tr) == 5
        assert tr.view(1, 1) == {1}
        assert tr.view(2, 1) == {1, 2, 3}
        assert tr.rounds[2] == tr.rounds[0]

    def test_comments_and_blank_lines(self):
        tr = parse_iis_script("# periodic\n\n1 2\nrepeat\n", 2, 3)
        assert tr.view(1, 1) == {1, 2}

    def test_without_repeat_script_must_cover_horizon(self):
        with pytest.raises(ParseError):
            parse_iis_script("1 2\n", 2, 3)

    def test_bad_block_reports_line(self):
        with pytest.raises(ParseError) as err:
            parse_iis_script("1 | x\n", 2, 1)
        assert "line 1" in str(err.value)

    def test_rounds_after_repeat_rejected(self):
        with pytest.raises(ParseError):
            parse_iis_script("1 2\nrepeat\n1 2\n", 2, 2)

    def test_empty_script(self):
        with pytest.raises(ParseError):
            parse_iis_script("# nothing\n", 2, 1)


class TestASScript:
    def test_steps_and_crash(self):
        sch = parse_as_script("1\n2\ncrash 1\n2\n2\n", 5)
        assert sch.steps == (1, 2, 2, 2)
        assert sch.crashes == {1: 2}

    def test_crash_position_is_enforced(self):
        with pytest.raises(ParseError):
            parse_as_script("crash 1\n1\n", 2)

    def test_repeat_extends(self):
        sch = parse_as_script("1\n2\nrepeat\n", 5)
        assert sch.steps == (1, 2, 1, 2, 1)

    def test_double_crash_rejected(self):
        with pytest.raises(ParseError):
            parse_as_script("1\ncrash 2\ncrash 2\n", 1)

    def test_bad_step(self):
        with pytest.raises(ParseError) as err:
            parse_as_script("1\nnope\n", 2)
        assert "line 2" in str(err.value)


class TestScriptSha:
    def test_stable(self):
        assert script_sha("1 2\n") == script_sha("1 2\n")
        assert script_sha("1 2\n") != script_sha("2 1\n")
