import csv
import io
import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from zeno_tsvf.cli import main
from zeno_tsvf.tsvf import closed_form_pD1_unblocked

GOLDEN = Path(__file__).parent / "golden"


def run(capsysbinary, *argv):
    rc = main(list(argv))
    out = capsysbinary.readouterr()
    return rc, out.out, out.err


class TestSimulate:
    def test_json(self, capsysbinary):
        rc, out, err = run(capsysbinary, "simulate", "--M", "2", "--N", "2", "--bit", "1")
        assert rc == 0 and err == b""
        doc = json.loads(out)
        assert doc["p_D2"] == pytest.approx(0.140625, abs=1e-12)
        assert doc["oracle"]["p_D2"] == pytest.approx(doc["p_D2"], abs=1e-12)

    def test_schedule_listing(self, capsysbinary):
        _, out, _ = run(capsysbinary, "simulate", "--M", "2", "--N", "2", "--bit", "1",
                        "--emit-schedule")
        assert len(json.loads(out)["schedule"]["events"]) == 13

    def test_csv(self, capsysbinary):
        rc, out, _ = run(capsysbinary, "simulate", "--M", "2", "--N", "2", "--format", "csv")
        rows = list(csv.reader(io.StringIO(out.decode())))
        assert rc == 0 and rows[0] == ["sink", "probability"]

    def test_byte_identical(self, capsysbinary):
        a = run(capsysbinary, "simulate", "--M", "7", "--N", "9", "--bit", "1")[1]
        b = run(capsysbinary, "simulate", "--M", "7", "--N", "9", "--bit", "1")[1]
        assert a == b


class TestErrors:
    @pytest.mark.parametrize("argv", [
        ["simulate", "--M", "0", "--N", "2"],
        ["simulate", "--M", "2"],
        ["simulate", "--M", "2", "--N", "2", "--bit", "3"],
        ["trace", "--M", "2", "--N", "2"],
        ["frobnicate"],
        [],
        ["simulate", "--M", "2", "--N", "2", "--bi", "1"],
    ])
    def test_usage(self, capsysbinary, argv):
        rc, out, err = run(capsysbinary, *argv)
        assert rc == 2 and out == b""
        assert json.loads(err)["code"] == "usage"

    def test_engine_error(self, capsysbinary):
        rc, out, err = run(capsysbinary, "trace", "--M", "2", "--N", "2", "--post", "D2")
        assert rc == 1 and out == b""
        assert err == (GOLDEN / "trace_M2_N2_bit0_D2.err").read_bytes()


class TestTrace:
    @pytest.mark.parametrize("bit,post", [(0, "D1"), (1, "D1"), (1, "D2")])
    def test_golden(self, capsysbinary, bit, post):
        rc, out, _ = run(capsysbinary, "trace", "--M", "2", "--N", "2", "--bit", str(bit),
                         "--post", post)
        assert rc == 0
        assert out == (GOLDEN / f"trace_M2_N2_bit{bit}_{post}.csv").read_bytes()

    def test_weakvalues(self, capsysbinary):
        rc, out, _ = run(capsysbinary, "weakvalues", "--M", "2", "--N", "2", "--post", "D1")
        rows = list(csv.DictReader(io.StringIO(out.decode())))
        assert rc == 0 and len(rows) == 10
        assert float(rows[2]["W_c_re"]) == pytest.approx(0.5, abs=1e-12)

    def test_output_file(self, tmp_path, capsysbinary):
        dest = tmp_path / "t.json"
        rc, out, _ = run(capsysbinary, "trace", "--M", "2", "--N", "2", "--post", "D1",
                         "--format", "json", "-o", str(dest))
        assert rc == 0 and out == b""
        assert len(json.loads(dest.read_text())["rows"]) == 10


class TestMonitor:
    def test_reproducible_and_oracles(self, capsysbinary):
        argv = ["monitor", "--M", "2", "--N", "2", "--seed", "123", "--n-runs", "20000"]
        rc, a, _ = run(capsysbinary, *argv)
        _, b, _ = run(capsysbinary, *argv)
        assert rc == 0 and a == b
        doc = json.loads(a)
        assert doc["never_found_oracle"]["D2"] == pytest.approx(9 / 13, abs=1e-12)
        assert sum(doc["detector_counts"].values()) == 20000

    def test_subset_and_placement(self, capsysbinary):
        rc, out, _ = run(capsysbinary, "monitor", "--M", "2", "--N", "2", "--bit", "1",
                         "--seed", "1", "--n-runs", "100", "--monitor", "inner:1,1;inner:2,2",
                         "--placement", "after_absorber")
        doc = json.loads(out)
        assert rc == 0 and doc["found_histogram"] == {"0": 100}
        assert "never_found_oracle" not in doc

    def test_seed_required(self, capsysbinary):
        assert run(capsysbinary, "monitor", "--M", "2", "--N", "2", "--n-runs", "5")[0] == 2


class TestEve:
    def test_json_and_density(self, tmp_path, capsysbinary):
        dens = tmp_path / "d.csv"
        rc, out, _ = run(capsysbinary, "eve", "--M", "2", "--N", "2", "--g", "1.0",
                         "--couple-at", "inner:2,1", "--density-out", str(dens))
        assert rc == 0
        assert json.loads(out)["mutual_information_bits"] > 0
        assert dens.read_text().splitlines()[0] == "x,p0,p1"

    def test_post_reports_pointer_means(self, capsysbinary):
        _, out, _ = run(capsysbinary, "eve", "--M", "2", "--N", "2", "--g", "0.01",
                        "--couple-at", "inner:1,1", "--post", "D1")
        means = json.loads(out)["pointer_mean"]
        assert means["0"] / 0.01 == pytest.approx(0.5, rel=1e-3)

    def test_bad_slice(self, capsysbinary):
        rc, _, _ = run(capsysbinary, "eve", "--M", "2", "--N", "2", "--g", "1",
                       "--couple-at", "outer")
        assert rc == 2


class TestSweep:
    def test_closed_form(self, capsysbinary):
        rc, out, _ = run(capsysbinary, "sweep", "--M", "1:40", "--N", "1,3", "--jobs", "1")
        rows = list(csv.DictReader(io.StringIO(out.decode())))
        assert rc == 0 and len(rows) == 80
        for r in rows:
            assert float(r["p_D1"]) == pytest.approx(closed_form_pD1_unblocked(int(r["M"])),
                                                     abs=1e-12)
            assert float(r["total"]) == pytest.approx(1.0, abs=1e-12)

    def test_parallel_matches_serial(self, capsysbinary):
        argv = ["sweep", "--M", "2:6", "--N", "2,4", "--bit", "0,1"]
        a = run(capsysbinary, *argv, "--jobs", "1")[1]
        b = run(capsysbinary, *argv, "--jobs", "3")[1]
        assert a == b

    def test_eve_columns(self, capsysbinary):
        rc, out, _ = run(capsysbinary, "sweep", "--M", "2", "--N", "2", "--bit", "0",
                         "--g", "0.5,1", "--couple-at", "inner:2,1")
        rows = list(csv.DictReader(io.StringIO(out.decode())))
        assert rc == 0 and "I_bits" in rows[0]

    def test_point_cap(self, capsysbinary):
        rc = run(capsysbinary, "sweep", "--M", "1:50", "--N", "1:50", "--max-points", "10")[0]
        assert rc in (1, 2)


def test_config_defaults_and_override(tmp_path, capsysbinary):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"M": 2, "N": 2, "bit": 1}))
    _, a, _ = run(capsysbinary, "simulate", "--config", str(cfg))
    assert json.loads(a)["params"]["bit"] == 1
    _, b, _ = run(capsysbinary, "simulate", "--config", str(cfg), "--bit", "0")
    assert json.loads(b)["params"]["bit"] == 0
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(capsysbinary, "simulate", "--config", str(cfg))[0] == 2


def test_subprocess_entry_point():
    env = dict(os.environ)
    proc = subprocess.run([sys.executable, "-m", "zeno_tsvf.cli", "simulate", "--M", "2",
                           "--N", "2"], capture_output=True, env=env, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["p_D1"] == pytest.approx(0.25)
