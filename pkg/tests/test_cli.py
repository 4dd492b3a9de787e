import csv
import io
import json
import subprocess
import sys

import pytest

from distillery.cli import main
from distillery.fock import load_state


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestMalt:
    def test_reference_threshold(self):
        code, out, err = run("malt", "--lambda", "0.2", "--T", "0.99")
        assert code == 0
        assert "f_c = 60" in err
        rows = rows_of(out)
        assert len(rows) == 61 and rows[-1]["f"] == "60"

    def test_gain_reported(self):
        code, _, err = run("malt", "--lambda", "0.2", "--T", "0.9")
        gain = float(err.split("averaged gain = ")[1].split()[0])
        assert code == 0 and gain > 1

    def test_zero_squeezing_is_a_clean_error(self):
        code, out, err = run("malt", "--lambda", "0", "--T", "0.9")
        assert code == 2 and err.startswith("error:") and out == ""

    def test_json_format(self):
        code, out, _ = run("malt", "--format", "json")
        doc = json.loads(out)
        assert code == 0 and doc["f_c"] == 60 and len(doc["table"]) == 61


class TestDistill:
    def test_noiseless_rounds(self):
        code, out, _ = run("distill", "--lambda", "0.2", "--T", "0.99", "--iters", "3")
        rows = rows_of(out)
        negs = [float(r["logneg"]) for r in rows]
        assert code == 0 and len(rows) == 4
        assert all(b > a for a, b in zip(negs, negs[1:]))
        cum = [float(r["cumulative_prob"]) for r in rows]
        assert all(b <= a for a, b in zip(cum, cum[1:]))

    def test_zero_rounds_echo_resource(self):
        code, out, _ = run("distill", "--iters", "0")
        rows = rows_of(out)
        assert code == 0 and len(rows) == 1 and rows[0]["heralding_prob"] == "1"

    def test_heavy_dephasing_stays_below_resource(self):
        _, out, _ = run("distill", "--v", "10", "--iters", "3")
        negs = [float(r["logneg"]) for r in rows_of(out)]
        assert negs[-1] < negs[0]
        assert negs[-1] > 0

    def test_seeded_runs_repeat(self):
        a = run("distill", "--seed", "7", "--T", "0.9")
        b = run("distill", "--seed", "7", "--T", "0.9")
        assert a == b


class TestBudget:
    def test_reference_point(self):
        code, out, err = run("budget", "--lambda", "0.15", "--T", "0.75", "--B", "20000")
        assert code == 0
        assert "reference i_m = 54" in err
        rows = {r["mu_convention"]: r for r in rows_of(out)}
        assert rows["worst_case_fc"]["i_m"] == "54"
        assert set(rows) == {"worst_case_fc", "best_case_f0"}

    def test_infeasible(self):
        code, out, err = run("budget", "--B", "1")
        assert code == 0 and "infeasible" in err
        assert all(r["feasible"] == "false" for r in rows_of(out))

    def test_large_budget_curve(self):
        code, out, _ = run("budget", "--B", "1e9", "--curve")
        rows = rows_of(out)
        assert code == 0 and len(rows) > 100
        assert rows[-1]["within_budget"] == "false"
        assert all(r["within_budget"] == "true" for r in rows[:-1])


class TestConfig:
    def test_file_then_flags(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"lambda": 0.15, "T": 0.75, "B": 20000}))
        _, out, _ = run("budget", "--config", str(cfg))
        assert rows_of(out)[0]["i_m"] == "54"
        _, out, _ = run("budget", "--config", str(cfg), "--B", "1")
        assert rows_of(out)[0]["i_m"] == "0"

    def test_unknown_key(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"colour": "red"}))
        assert run("malt", "--config", str(cfg))[0] == 2

    def test_eps_trunc_range(self):
        assert run("malt", "--eps-trunc", "0.1")[0] == 2

    def test_missing_config_file(self, tmp_path):
        assert run("malt", "--config", str(tmp_path / "missing.json"))[0] == 2

    def test_out_file(self, tmp_path):
        path = tmp_path / "m.csv"
        code, out, _ = run("malt", "--out", str(path))
        assert code == 0 and out == ""
        assert path.read_bytes().startswith(b"f,x,mu,P_f,P_bar_f,logneg\n")

    def test_bad_flag_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            run("malt", "--lambda", "abc")
        assert exc.value.code == 2


class TestState:
    def test_dump_load(self, tmp_path):
        path = tmp_path / "s.json"
        code, _, _ = run("state", "dump", "--resource", "subtracted", "--lambda", "0.1",
                         "--out", str(path))
        assert code == 0
        state = load_state(path)
        assert state.coeffs[1] == pytest.approx(0.2, rel=1e-15)
        code, out, _ = run("state", "load", str(path))
        assert code == 0 and out.startswith("pure state")

    def test_mixed_dump(self, tmp_path):
        path = tmp_path / "m.json"
        run("state", "dump", "--mixed", "--v", "1", "--lambda", "0.2", "--out", str(path))
        code, out, _ = run("state", "load", str(path))
        logneg = float(out.split("logneg ")[1])
        assert code == 0 and logneg == pytest.approx(0.07609515618845564, abs=1e-12)

    def test_load_needs_path(self):
        assert run("state", "load")[0] == 2


class TestFigure:
    def test_fig4_and_gnuplot(self, tmp_path):
        csv_path = tmp_path / "f4.csv"
        gp = tmp_path / "f4.gp"
        code, _, _ = run("figure", "fig4", "--out", str(csv_path), "--gnuplot", str(gp))
        assert code == 0
        assert csv_path.read_text().startswith("lambda,B,T,i_m\n")
        assert str(csv_path) in gp.read_text()

    def test_unknown_figure(self):
        with pytest.raises(SystemExit):
            run("figure", "fig9")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "distillery", "malt"], capture_output=True,
                          text=True, check=False)
    assert proc.returncode == 0 and "f_c = 60" in proc.stderr
