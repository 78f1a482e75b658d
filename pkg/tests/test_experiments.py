import json
import math
import shutil
import subprocess
import sys

import numpy as np
import pytest

from cranrates.channel import SystemConfig
from cranrates.experiments import (
    DimensionMismatch,
    MalformedChannelFile,
    SWEEP_SCHEMES,
    SweepSpec,
    TrialRecord,
    _parse_values,
    aggregate_records,
    eval_single,
    load_channel,
    run_sweep,
    write_aggregates_csv,
    write_records_csv,
)

SNR_DB_3 = 10.0 * math.log10(3.0)


def small_spec(**overrides):
    base = dict(
        cfg=SystemConfig(
            users=2,
            relays=2,
            snr=3.0,
            backhaul=(0.0, 0.0),
            search="lll",
            seed=42,
            trials=10,
        ),
        axis="backhaul",
        values=(0.0, 0.5, 1.0, 1.5, 2.0),
        schemes=("qcof", "swz", "cutset"),
    )
    base.update(overrides)
    return SweepSpec(**base)


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "cranrates.experiments", *args],
        capture_output=True,
        text=True,
    )


def write_channel(path, users=2, relays=2, rows=None):
    rows = rows if rows is not None else np.eye(relays, users).tolist()
    path.write_text(json.dumps({"L": users, "K": relays, "H": rows}))
    return path


class TestSweepSpec:
    def test_schemes_canonicalized_to_fixed_order(self):
        spec = small_spec(schemes=("cutset", "swz", "qcof"))
        assert spec.schemes == ("qcof", "swz", "cutset")

    def test_report_snr_db_derived_from_config(self):
        assert small_spec().report_snr_db == pytest.approx(SNR_DB_3)
        assert small_spec(snr_db=5.0).report_snr_db == 5.0

    @pytest.mark.parametrize(
        "overrides",
        [
            dict(axis="power"),
            dict(values=()),
            dict(values=(1.0, 1.0)),
            dict(values=(2.0, 1.0)),
            dict(values=(-1.0, 0.0)),
            dict(values=(0.0, math.inf)),
            dict(schemes=("qcof", "mrc")),
            dict(schemes=()),
            dict(workers=0),
            dict(cap=0),
        ],
    )
    def test_invalid_specs_rejected(self, overrides):
        with pytest.raises(ValueError):
            small_spec(**overrides)

    def test_snr_axis_requires_uniform_backhaul(self):
        cfg = SystemConfig(users=2, relays=2, snr=1.0, backhaul=(1.0, 2.0), trials=1)
        with pytest.raises(ValueError):
            SweepSpec(cfg=cfg, axis="snr_db", values=(0.0, 5.0))


@pytest.fixture(scope="module")
def sweep():
    spec = small_spec()
    records, aggregates = run_sweep(spec)
    return spec, records, aggregates


class TestRunSweep:
    def test_record_count_is_axis_times_schemes_times_trials(self, sweep):
        _, records, _ = sweep
        assert len(records) == 5 * 3 * 10

    def test_records_ordered_by_value_scheme_trial(self, sweep):
        spec, records, _ = sweep
        keys = [(r.backhaul, spec.schemes.index(r.scheme), r.trial) for r in records]
        assert keys == sorted(keys)

    def test_every_scheme_bounded_by_cutset(self, sweep):
        _, records, _ = sweep
        cut = {
            (r.backhaul, r.trial): r.sum_rate for r in records if r.scheme == "cutset"
        }
        for r in records:
            assert r.sum_rate <= cut[(r.backhaul, r.trial)] + 1e-9

    def test_zero_backhaul_points_are_zero(self, sweep):
        _, records, _ = sweep
        for r in records:
            if r.backhaul == 0.0:
                assert r.sum_rate == 0.0

    def test_aggregates_cover_every_point_and_scheme(self, sweep):
        spec, _, aggregates = sweep
        assert len(aggregates) == len(spec.values) * len(spec.schemes)
        assert all(a.trials == 10 for a in aggregates)

    def test_rerun_is_byte_identical(self, tmp_path, sweep):
        spec, records, _ = sweep
        again, _ = run_sweep(small_spec())
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        write_records_csv(records, first)
        write_records_csv(again, second)
        assert first.read_bytes() == second.read_bytes()

    def test_worker_count_does_not_change_output(self, sweep):
        spec, records, _ = sweep
        parallel, _ = run_sweep(small_spec(workers=2))
        assert parallel == records


class TestAggregateRecords:
    def rec(self, scheme, trial, rate):
        return TrialRecord(
            scheme=scheme,
            search="lll",
            users=2,
            relays=2,
            snr_db=5.0,
            backhaul=1.0,
            trial=trial,
            sum_rate=rate,
        )

    def test_mean_and_stderr(self):
        records = [self.rec("swz", 0, 1.0), self.rec("swz", 1, 3.0)]
        (agg,) = aggregate_records(records)
        assert agg.mean_sum_rate == 2.0
        assert agg.stderr == pytest.approx(np.std([1.0, 3.0], ddof=1) / math.sqrt(2))
        assert agg.trials == 2

    def test_single_trial_has_zero_stderr(self):
        (agg,) = aggregate_records([self.rec("swz", 0, 1.5)])
        assert agg.stderr == 0.0
        assert agg.trials == 1

    def test_groups_keep_first_appearance_order(self):
        records = [self.rec("qcof", 0, 1.0), self.rec("swz", 0, 2.0), self.rec("qcof", 1, 2.0)]
        aggs = aggregate_records(records)
        assert [a.scheme for a in aggs] == ["qcof", "swz"]

    def test_nonfinite_rate_rejected_at_record_construction(self):
        with pytest.raises(ValueError):
            self.rec("swz", 0, math.inf)
        with pytest.raises(ValueError):
            self.rec("swz", 0, -0.5)


class TestCsvWriters:
    def test_record_header_and_roundtrip(self, tmp_path):
        records, aggregates = run_sweep(small_spec(values=(0.0, 1.0)))
        raw, agg = tmp_path / "r.csv", tmp_path / "a.csv"
        write_records_csv(records, raw)
        write_aggregates_csv(aggregates, agg)
        raw_lines = raw.read_text().splitlines()
        assert raw_lines[0] == "scheme,search,L,K,snr_db,C,trial,sum_rate"
        assert len(raw_lines) == 1 + len(records)
        agg_lines = agg.read_text().splitlines()
        assert agg_lines[0] == "scheme,search,L,K,snr_db,C,mean_sum_rate,stderr,trials"
        cells = raw_lines[1].split(",")
        assert cells[0] == records[0].scheme
        assert float(cells[7]) == records[0].sum_rate


class TestParseValues:
    def test_comma_list(self):
        assert _parse_values("0,0.5,1") == (0.0, 0.5, 1.0)

    def test_inclusive_range(self):
        got = _parse_values("0:6:0.5")
        assert len(got) == 13
        assert got[0] == 0.0
        assert got[-1] == pytest.approx(6.0)

    def test_degenerate_range(self):
        assert _parse_values("1:1:1") == (1.0,)

    @pytest.mark.parametrize("text", ["", "1:2", "1:2:0", "2:1:1", "1:2:3:4", "a,b"])
    def test_bad_syntax_rejected(self, text):
        with pytest.raises(ValueError):
            _parse_values(text)


class TestLoadChannel:
    def test_valid_file(self, tmp_path):
        path = write_channel(tmp_path / "ch.json", rows=[[1.0, 2.0], [3.0, 4.0]])
        np.testing.assert_array_equal(load_channel(path), [[1.0, 2.0], [3.0, 4.0]])

    def test_missing_file(self, tmp_path):
        with pytest.raises(MalformedChannelFile):
            load_channel(tmp_path / "absent.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(MalformedChannelFile):
            load_channel(path)

    @pytest.mark.parametrize(
        "payload",
        [
            [1, 2, 3],
            {"L": 2, "K": 2},
            {"L": "2", "K": 2, "H": [[1, 0], [0, 1]]},
            {"L": 2, "K": 2, "H": "rows"},
            {"L": 2, "K": 2, "H": [[1, 0], [0, True]]},
            {"L": 2, "K": 2, "H": [[1, 0], [0, "x"]]},
        ],
    )
    def test_malformed_payloads(self, tmp_path, payload):
        path = tmp_path / "ch.json"
        path.write_text(json.dumps(payload))
        with pytest.raises(MalformedChannelFile):
            load_channel(path)

    def test_nonfinite_entry(self, tmp_path):
        path = tmp_path / "ch.json"
        path.write_text('{"L": 1, "K": 1, "H": [[1e999]]}')
        with pytest.raises(MalformedChannelFile):
            load_channel(path)

    def test_shape_disagreement(self, tmp_path):
        path = tmp_path / "ch.json"
        path.write_text(json.dumps({"L": 2, "K": 2, "H": [[1.0, 0.0]]}))
        with pytest.raises(DimensionMismatch):
            load_channel(path)


class TestEvalSingle:
    def test_identity_channel_cutset(self, tmp_path):
        path = write_channel(tmp_path / "ch.json")
        cfg = SystemConfig(users=2, relays=2, snr=3.0, backhaul=(1.0, 1.0))
        report = eval_single(path, cfg, ("cutset",))
        assert report["schemes"]["cutset"]["sum_rate"] == pytest.approx(2.0, abs=1e-9)

    def test_full_diagnostic_fields(self, tmp_path):
        path = write_channel(tmp_path / "ch.json")
        cfg = SystemConfig(users=2, relays=2, snr=3.0, backhaul=(1.0, 1.0))
        report = eval_single(path, cfg, SWEEP_SCHEMES)
        assert set(report["schemes"]) == set(SWEEP_SCHEMES)
        qcof = report["schemes"]["qcof"]
        assert {"sum_rate", "A", "r", "sigma", "nu", "g_diag", "rco"} <= set(qcof)
        jqcof = report["schemes"]["jqcof"]
        assert {"sum_rate", "A", "lambda", "eta", "U", "split", "mu"} <= set(jqcof)
        json.dumps(report)

    def test_infinities_serialized_as_null(self, tmp_path):
        path = write_channel(tmp_path / "ch.json")
        cfg = SystemConfig(users=2, relays=2, snr=3.0, backhaul=(0.0, 0.0))
        report = eval_single(path, cfg, ("jqcof",))
        text = json.dumps(report)
        assert "Infinity" not in text
        assert report["schemes"]["jqcof"]["rco"] == [None, None]

    def test_dimension_check(self, tmp_path):
        path = write_channel(tmp_path / "ch.json")
        cfg = SystemConfig(users=3, relays=2, snr=3.0, backhaul=(1.0, 1.0))
        with pytest.raises(DimensionMismatch):
            eval_single(path, cfg, ("cutset",))

    def test_unknown_scheme_rejected(self, tmp_path):
        path = write_channel(tmp_path / "ch.json")
        cfg = SystemConfig(users=2, relays=2, snr=3.0, backhaul=(1.0, 1.0))
        with pytest.raises(ValueError):
            eval_single(path, cfg, ("cutset", "zf"))


class TestCli:
    def test_console_script_installed(self):
        assert shutil.which("cranrates") is not None

    def test_sweep_writes_outputs_and_sidecars(self, tmp_path):
        out = tmp_path / "run.csv"
        proc = run_cli(
            "sweep", "--axis", "backhaul", "--values", "0,1",
            "--users", "2", "--relays", "2", "--snr-db", "5",
            "--trials", "2", "--seed", "1", "--schemes", "qcof,swz,cutset",
            "--search", "lll", "--out", str(out),
        )
        assert proc.returncode == 0, proc.stderr
        assert "wrote 12 records" in proc.stdout
        assert out.exists()
        agg = tmp_path / "run.agg.csv"
        meta = tmp_path / "run.meta.json"
        assert agg.exists() and meta.exists()
        meta_data = json.loads(meta.read_text())
        for key in ("seed", "rng", "epsilon", "allocation", "version", "snr_db"):
            assert key in meta_data
        assert meta_data["allocation"] == "prop1"
        assert len(out.read_text().splitlines()) == 13

    def test_sweep_repeat_run_byte_identical(self, tmp_path):
        args = (
            "sweep", "--axis", "backhaul", "--values", "0,1",
            "--users", "2", "--relays", "2", "--snr-db", "5",
            "--trials", "3", "--seed", "42", "--schemes", "swz,cutset",
            "--search", "lll",
        )
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run_cli(*args, "--out", str(a)).returncode == 0
        assert run_cli(*args, "--out", str(b)).returncode == 0
        assert a.read_bytes() == b.read_bytes()
        assert (tmp_path / "a.agg.csv").read_bytes() == (tmp_path / "b.agg.csv").read_bytes()

    def test_sweep_json_format(self, tmp_path):
        out = tmp_path / "run.json"
        proc = run_cli(
            "sweep", "--axis", "snr-db", "--values=-5,0,5",
            "--users", "2", "--relays", "2", "--backhaul", "2",
            "--trials", "2", "--schemes", "swz,cutset", "--search", "lll",
            "--format", "json", "--out", str(out),
        )
        assert proc.returncode == 0, proc.stderr
        rows = json.loads(out.read_text())
        assert len(rows) == 3 * 2 * 2
        assert {r["snr_db"] for r in rows} == {-5.0, 0.0, 5.0}
        assert all(r["C"] == 2.0 for r in rows)

    @pytest.mark.parametrize(
        "bad_args",
        [
            ("sweep", "--axis", "backhaul", "--values", "0,1", "--users", "2",
             "--relays", "2", "--trials", "1"),
            ("sweep", "--axis", "backhaul", "--values", "0,1", "--users", "2",
             "--relays", "2", "--snr-db", "5", "--backhaul", "1", "--trials", "1"),
            ("sweep", "--axis", "snr-db", "--values", "0,5", "--users", "2",
             "--relays", "2", "--trials", "1"),
            ("sweep", "--axis", "backhaul", "--values", "1,1", "--users", "2",
             "--relays", "2", "--snr-db", "5", "--trials", "1"),
        ],
    )
    def test_sweep_flag_validation(self, tmp_path, bad_args):
        proc = run_cli(*bad_args, "--out", str(tmp_path / "x.csv"))
        assert proc.returncode == 1
        assert "error:" in proc.stderr

    def test_sweep_enumeration_guard_reports_trial_and_relay(self, tmp_path):
        proc = run_cli(
            "sweep", "--axis", "backhaul", "--values", "0,1",
            "--users", "2", "--relays", "2", "--snr-db", "15",
            "--trials", "1", "--schemes", "qcof", "--search", "exhaustive",
            "--cap", "1", "--out", str(tmp_path / "x.csv"),
        )
        assert proc.returncode == 1
        assert "trial 0, relay 0" in proc.stderr

    def test_eval_reports_cutset(self, tmp_path):
        path = write_channel(tmp_path / "ch.json")
        proc = run_cli(
            "eval", "--channel", str(path), "--snr-db", repr(SNR_DB_3),
            "--backhaul", "1,1", "--schemes", "cutset",
        )
        assert proc.returncode == 0, proc.stderr
        report = json.loads(proc.stdout)
        assert report["schemes"]["cutset"]["sum_rate"] == pytest.approx(2.0, abs=1e-9)

    def test_eval_writes_file_when_asked(self, tmp_path):
        path = write_channel(tmp_path / "ch.json")
        out = tmp_path / "report.json"
        proc = run_cli(
            "eval", "--channel", str(path), "--snr-db", "5",
            "--backhaul", "1,1", "--schemes", "swz,cutset", "--out", str(out),
        )
        assert proc.returncode == 0, proc.stderr
        report = json.loads(out.read_text())
        assert {"swz", "cutset"} == set(report["schemes"])

    def test_eval_malformed_channel_fails(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{broken")
        proc = run_cli("eval", "--channel", str(path), "--snr-db", "5", "--backhaul", "1,1")
        assert proc.returncode == 1
        assert "error:" in proc.stderr

    def test_eval_dimension_mismatch_fails(self, tmp_path):
        path = write_channel(tmp_path / "ch.json")
        proc = run_cli(
            "eval", "--channel", str(path), "--snr-db", "5",
            "--backhaul", "1,1", "--users", "3",
        )
        assert proc.returncode == 1
        assert "L=2" in proc.stderr

    def test_eval_backhaul_count_checked(self, tmp_path):
        path = write_channel(tmp_path / "ch.json")
        proc = run_cli(
            "eval", "--channel", str(path), "--snr-db", "5", "--backhaul", "1,1,1",
        )
        assert proc.returncode == 1
        assert "error:" in proc.stderr
