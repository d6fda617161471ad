import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from subfekete.cli import CSV_COLUMNS, main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def cfg(name):
    return CONFIGS / name


def write(tmp_path, doc, name="c.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return p


RUNS = [
    ("bounds", "--config", cfg("scalar3.json"), "--n-max", 5),
    ("extremal", "--config", cfg("ex_diag.json"), "--depth", 8, "--forbid", "11", "--tol", 1e-9),
    ("survivors", "--config", cfg("ex_diag.json"), "--depth", 6, "--forbid", "11",
     "--threshold", 5.4),
    ("jsr", "--config", cfg("ex_diag.json"), "--n-max", 4, "--forbid", "11"),
    ("jsr", "--config", cfg("golden.json"), "--n-max", 10),
    ("contract-cert", "--config", cfg("halves.json"), "--n-max", 4),
    ("contract-cert", "--config", cfg("grow_shrink.json"), "--n-max", 4, "--forbid", "00"),
    ("zero-convergence", "--config", cfg("decay.json"), "--n-max", 4),
    ("zero-convergence", "--config", cfg("ex_diag.json"), "--n-max", 12),
    ("tm-speed", "--config", cfg("right_mover.json"), "--n-max", 12),
    ("tm-speed", "--config", cfg("bouncer.json"), "--n-max", 8, "--mode", "input"),
    ("check-submult", "--config", cfg("golden.json"), "--n-max", 5),
    ("paper-example",),
]


class TestCommands:
    def test_bounds_scalar(self, capsys):
        code, out, _ = run(capsys, "bounds", "--config", cfg("scalar3.json"), "--n-max", 5)
        assert code == 0
        recs = json.loads(out)["result"]["records"]
        assert all(r["root"] == pytest.approx(3.0, rel=1e-12) for r in recs)

    def test_jsr_running_upper(self, capsys):
        code, out, _ = run(
            capsys, "jsr", "--config", cfg("ex_diag.json"), "--n-max", 4, "--forbid", "11"
        )
        assert code == 0
        rec2 = json.loads(out)["result"]["bounds"]["records"][1]
        assert rec2["running_upper"] == pytest.approx(math.sqrt(30), rel=1e-12)

    def test_extremal_bisect_block(self, capsys):
        code, out, _ = run(capsys, *RUNS[1])
        res = json.loads(out)["result"]
        assert code == 0
        assert res["bisect"]["lo"] <= res["t_n"] + 1e-9
        assert res["witness"].startswith("10")

    def test_survivors(self, capsys):
        code, out, _ = run(capsys, *RUNS[2])
        res = json.loads(out)["result"]
        assert code == 0 and res["nonempty"] and "101010" in res["words"]

    def test_contract_cert(self, capsys):
        code, out, _ = run(capsys, *RUNS[5])
        res = json.loads(out)["result"]
        assert res["certificate"]["M"] == 1
        assert res["trajectory"][-1][0] == pytest.approx(2 + 98 * 0.5**4)
        code, out, _ = run(capsys, *RUNS[6])
        assert json.loads(out)["result"]["certificate"]["M"] == 2

    def test_zero_convergence(self, capsys):
        _, out, _ = run(capsys, *RUNS[7])
        res = json.loads(out)["result"]
        assert (res["status"], res["n"]) == ("FOUND", 1)
        _, out, _ = run(capsys, *RUNS[8])
        res = json.loads(out)["result"]
        assert (res["status"], res["n"]) == ("NOT_UP_TO", 12)

    def test_tm_speed(self, capsys):
        _, out, _ = run(capsys, *RUNS[9])
        recs = json.loads(out)["result"]["records"]
        assert [r["S_n"] for r in recs] == list(range(2, 14))

    def test_check_submult_clean(self, capsys):
        code, out, _ = run(capsys, *RUNS[11])
        assert code == 0 and json.loads(out)["result"]["violations"] == []

    def test_check_submult_violation_exit_2(self, capsys, monkeypatch):
        # every bundled functional is submultiplicative, so fake a finding
        import subfekete.cli as cli
        from subfekete.fekete import Violation

        monkeypatch.setattr(
            cli, "check_submultiplicative", lambda *a, **k: [Violation((0,), (0,), 10.0, 9.0)]
        )
        code, out, err = run(capsys, *RUNS[11])
        assert code == 2 and "violated" in err
        assert json.loads(out)["result"]["violations"][0]["eval_uv"] == 10.0

    def test_invariant_violation_exit_2(self, capsys, monkeypatch):
        import subfekete.cli as cli
        from subfekete.errors import InvariantViolation

        def boom(*a, **k):
            raise InvariantViolation("forced")

        monkeypatch.setattr(cli, "bounds_report", boom)
        code, _, err = run(capsys, *RUNS[0])
        assert code == 2 and "forced" in err

    def test_paper_example_flags(self, capsys):
        code, out, _ = run(capsys, "paper-example")
        lines = json.loads(out)["result"]["lines"]
        assert code == 0
        assert sum(ln["status"] == "DISCREPANCY" for ln in lines) >= 2


class TestErrors:
    def test_unknown_command(self, capsys):
        assert run(capsys, "frobnicate")[0] == 1

    def test_missing_config(self, capsys):
        code, _, err = run(capsys, "bounds")
        assert code == 1 and "--config" in err

    def test_unreadable_config(self, capsys, tmp_path):
        assert run(capsys, "bounds", "--config", tmp_path / "nope.json")[0] == 1
        bad = tmp_path / "bad.json"
        bad.write_text("{")
        assert run(capsys, "bounds", "--config", bad)[0] == 1

    def test_bad_kind(self, capsys, tmp_path):
        code, _, err = run(capsys, "bounds", "--config", write(tmp_path, {"kind": "graph"}))
        assert code == 1 and "kind" in err

    def test_missing_field(self, capsys, tmp_path):
        code, _, err = run(capsys, "bounds", "--config", write(tmp_path, {"kind": "matrix"}))
        assert code == 1 and "matrices" in err

    def test_cap_enforced(self, capsys):
        code, _, err = run(capsys, "bounds", "--config", cfg("scalar3.json"), "--n-max", 25)
        assert code == 1 and "1..24" in err

    def test_wrong_instance_kind(self, capsys):
        code, _, err = run(capsys, "tm-speed", "--config", cfg("ex_diag.json"))
        assert code == 1 and "turing" in err

    def test_bad_threshold(self, capsys):
        assert run(capsys, "survivors", "--config", cfg("ex_diag.json"))[0] == 1

    def test_bad_workers_and_tol(self, capsys):
        assert run(capsys, "bounds", "--config", cfg("scalar3.json"), "--workers", 0)[0] == 1
        assert run(capsys, "extremal", "--config", cfg("scalar3.json"), "--tol", -1)[0] == 1

    def test_forbid_outside_alphabet(self, capsys):
        code, _, _ = run(capsys, "bounds", "--config", cfg("ex_diag.json"), "--forbid", "2")
        assert code == 1


class TestFormats:
    @pytest.mark.parametrize("argv", RUNS, ids=lambda a: a[0])
    def test_csv_header(self, capsys, argv):
        code, out, _ = run(capsys, *argv, "--format", "csv")
        assert code == 0
        header = out.splitlines()[0]
        assert header == ",".join(CSV_COLUMNS[argv[0]])

    def test_shortest_floats(self, capsys):
        _, out, _ = run(capsys, *RUNS[1], "--format", "csv")
        row = out.splitlines()[2].split(",")
        assert row[2] == "30.0"

    def test_json_sorted(self, capsys):
        _, out, _ = run(capsys, *RUNS[0])
        doc = json.loads(out)
        assert out == json.dumps(doc, sort_keys=True, indent=2) + "\n"

    def test_help_lists_columns(self, capsys):
        code, out, _ = run(capsys, "--help")
        assert code == 0
        for cols in CSV_COLUMNS.values():
            assert ",".join(cols) in out


class TestDeterminism:
    @pytest.mark.parametrize("argv", RUNS, ids=lambda a: a[0])
    def test_repeat_and_workers(self, capsys, argv):
        outs = []
        for workers in (1, 1, 4):
            code, out, _ = run(capsys, *argv, "--workers", workers)
            assert code == 0
            outs.append(out)
        assert outs[0] == outs[1] == outs[2]

    @pytest.mark.parametrize("argv", RUNS, ids=lambda a: a[0])
    def test_verify_round_trip(self, capsys, tmp_path, argv):
        _, out, _ = run(capsys, *argv)
        report = tmp_path / "r.json"
        report.write_text(out)
        code, out2, _ = run(capsys, *argv, "--verify", report)
        assert (code, out2) == (0, "verified\n")

    def test_verify_mismatch(self, capsys, tmp_path):
        _, out, _ = run(capsys, *RUNS[0])
        doc = json.loads(out)
        doc["result"]["records"][0]["phi_n"] = 3.0000001
        report = write(tmp_path, doc, "r.json")
        assert run(capsys, *RUNS[0], "--verify", report)[0] == 2


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "subfekete", "bounds", "--config", str(cfg("scalar3.json")),
         "--n-max", "3", "--format", "csv"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[1] == "1,3.0,3.0,3.0,0"
