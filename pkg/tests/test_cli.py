import json
import os

import pytest

from incube.cli import run
from incube.cube import CellQuery, Filter, GroupBy, aggregate, result_to_delimited, snapshot_load
from incube.ingest import read_incidents
from incube.synthetic import generate_synthetic


@pytest.fixture()
def fixture_csv(tmp_path):
    path = tmp_path / "fixture.csv"
    assert run(["gen", "--seed", "7", "--n", "60", "--out", str(path)]) == 0
    return path


@pytest.fixture()
def snapshot(tmp_path, fixture_csv):
    path = tmp_path / "cube.icq"
    assert run(["build", "--in", str(fixture_csv), "--out", str(path)]) == 0
    return path


def _dirty_csv(tmp_path):
    path = tmp_path / "dirty.csv"
    path.write_text(
        "eventid,year,month,day,country,region,weaptype1,weapsubtype1\n"
        "199307250001,1993,7,25,92,6,5,7\n"  # R2: grenade under firearms
    )
    return path


class TestGen:
    def test_deterministic_output(self, tmp_path, capsys):
        assert run(["gen", "--seed", "3", "--n", "10"]) == 0
        first = capsys.readouterr().out
        assert run(["gen", "--seed", "3", "--n", "10"]) == 0
        assert capsys.readouterr().out == first
        assert first.splitlines()[0].startswith("eventid,year,month,day")

    def test_zero_incidents(self, capsys):
        assert run(["gen", "--seed", "1", "--n", "0"]) == 0
        out = capsys.readouterr().out
        assert len(out.splitlines()) == 1  # header only

    def test_bad_profile(self, tmp_path):
        profile = tmp_path / "profile.json"
        profile.write_text('{"unknown_month": 2.0}')
        assert run(["gen", "--seed", "1", "--n", "5", "--profile", str(profile)]) == 1
        profile.write_text('{"no_such_knob": 0.5}')
        assert run(["gen", "--seed", "1", "--n", "5", "--profile", str(profile)]) == 1


class TestValidate:
    def test_clean_fixture(self, fixture_csv, capsys):
        assert run(["validate", "--in", str(fixture_csv), "--strict"]) == 0
        out = capsys.readouterr().out
        assert out.splitlines() == ["rule,severity,line,eventid,fields,message"]

    def test_strict_flags_errors(self, tmp_path, capsys):
        dirty = _dirty_csv(tmp_path)
        assert run(["validate", "--in", str(dirty), "--strict"]) == 3
        out = capsys.readouterr().out
        assert "R2" in out

    def test_non_strict_reports_but_passes(self, tmp_path):
        assert run(["validate", "--in", str(_dirty_csv(tmp_path))]) == 0

    def test_missing_file(self):
        assert run(["validate", "--in", "/no/such/file.csv"]) == 2


class TestIngest:
    def test_store_and_report(self, tmp_path, fixture_csv, capsys):
        store = tmp_path / "store.csv"
        report = tmp_path / "violations.csv"
        rc = run(
            ["ingest", "--in", str(fixture_csv), "--out", str(store),
             "--report", str(report)]
        )
        assert rc == 0
        incidents, _ = read_incidents(store.read_text())
        assert len(incidents) == 60
        assert report.read_text().startswith("rule,severity,line,eventid")

    def test_drops_error_rows(self, tmp_path):
        dirty = _dirty_csv(tmp_path)
        store = tmp_path / "store.csv"
        report = tmp_path / "violations.csv"
        assert run(["ingest", "--in", str(dirty), "--out", str(store),
                    "--report", str(report)]) == 0
        incidents, _ = read_incidents(store.read_text())
        assert incidents == []


class TestQuery:
    def test_matches_library(self, snapshot, capsys):
        rc = run(
            ["query", "--snapshot", str(snapshot), "--group-by", "space:1",
             "--measure", "incident_count"]
        )
        assert rc == 0
        out = capsys.readouterr().out
        table = snapshot_load(str(snapshot))
        expected = result_to_delimited(
            aggregate(table, CellQuery(group_by=(GroupBy("space", 1),)))
        )
        assert out == expected

    def test_spec_file(self, snapshot, tmp_path, capsys):
        spec = tmp_path / "query.json"
        spec.write_text(json.dumps({
            "group_by": [{"hierarchy": "attack"}],
            "filters": [{"dim": "success", "tristate": "yes"}],
            "measures": ["incident_count", "nkill"],
        }))
        assert run(["query", "--snapshot", str(snapshot), "--spec", str(spec)]) == 0
        out = capsys.readouterr().out
        table = snapshot_load(str(snapshot))
        q = CellQuery(
            group_by=(GroupBy("attack", 1),),
            filters=(Filter("success", ("Yes",)),),
            measures=("incident_count", "nkill"),
        )
        assert out == result_to_delimited(aggregate(table, q))

    def test_env_var_snapshot(self, snapshot, capsys, monkeypatch):
        monkeypatch.setenv("INCUBE_SNAPSHOT", str(snapshot))
        assert run(["query", "--group-by", "space:1"]) == 0
        assert capsys.readouterr().out.startswith("space.region,")

    def test_no_snapshot_is_usage_error(self, monkeypatch):
        monkeypatch.delenv("INCUBE_SNAPSHOT", raising=False)
        assert run(["query", "--group-by", "space:1"]) == 1

    def test_version_mismatch_exit_4(self, snapshot, tmp_path):
        payload = json.loads(snapshot.read_text())
        payload["format_version"] = 99
        bad = tmp_path / "bad.icq"
        bad.write_text(json.dumps(payload))
        assert run(["query", "--snapshot", str(bad), "--group-by", "space:1"]) == 4

    def test_corrupt_snapshot_exit_2(self, tmp_path):
        bad = tmp_path / "bad.icq"
        bad.write_text("not json")
        assert run(["query", "--snapshot", str(bad), "--group-by", "space:1"]) == 2

    def test_bad_group_by_exit_1(self, snapshot):
        assert run(["query", "--snapshot", str(snapshot), "--group-by", "space:x"]) == 1
        assert run(["query", "--snapshot", str(snapshot), "--group-by", "altitude"]) == 1


class TestMine:
    def test_rules_output(self, fixture_csv, capsys):
        rc = run(
            ["mine", "rules", "--in", str(fixture_csv),
             "--min-support", "0.05", "--min-confidence", "0.3"]
        )
        assert rc == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "antecedent,consequent,support,confidence,lift,support_count"
        assert len(lines) > 1

    def test_rules_bad_threshold(self, fixture_csv):
        assert run(["mine", "rules", "--in", str(fixture_csv),
                    "--min-support", "0", "--min-confidence", "0.3"]) == 1

    def test_sequences_output(self, fixture_csv, capsys):
        rc = run(
            ["mine", "sequences", "--in", str(fixture_csv), "--min-support", "2",
             "--dims", "attack", "--max-items", "2"]
        )
        assert rc == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "pattern,support"

    def test_outliers_output(self, snapshot, tmp_path, capsys):
        spec = tmp_path / "q.json"
        spec.write_text(json.dumps({"group_by": [{"hierarchy": "space", "depth": 1}]}))
        rc = run(
            ["mine", "outliers", "--snapshot", str(snapshot), "--spec", str(spec),
             "--measure", "nkill", "--threshold", "3"]
        )
        assert rc == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "coords,measure,value,score,flagged,method"
        assert all(",robust_z" in line for line in lines[1:])


class TestUsage:
    def test_unknown_flag(self):
        assert run(["query", "--bogus"]) == 1

    def test_unknown_subcommand(self):
        assert run(["transmogrify"]) == 1

    def test_help_exits_zero(self):
        assert run(["--help"]) == 0

    def test_bad_addr(self, snapshot):
        assert run(["serve", "--snapshot", str(snapshot), "--addr", "nope"]) == 1
