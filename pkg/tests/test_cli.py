"""Command-line surface: parsing, config layering, exit codes, artifacts."""

import json
import math

import pytest

from kerneldecay import cli, experiments


def run(capsys, *argv):
    """Invoke main() in process; argparse's own exits map to code 2."""
    try:
        code = cli.main(list(argv))
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 2
    captured = capsys.readouterr()
    return code, captured.out, captured.err


SINGLE = "single(c=1, t=10)"


class TestEval:
    def test_alternating_family_at_half(self, capsys):
        code, out, _ = run(capsys, "eval", "--family", "a", "--z", "0.5")
        assert code == 0
        value_line = out.splitlines()[0]
        assert value_line.startswith("K1(0.5+0.0j) = ")
        value = complex(value_line.split(" = ")[1].replace(" ", ""))
        assert value.real == pytest.approx(math.pi, rel=1e-10)
        assert "truncation_bound = " in out
        assert "terms_used = " in out

    def test_order_two(self, capsys):
        code, out, _ = run(capsys, "eval", "--family", SINGLE,
                           "--z", "11", "--order", "2")
        assert code == 0
        value = complex(out.splitlines()[0].split(" = ")[1])
        assert value.real == pytest.approx(1.0, rel=1e-12)

    def test_missing_family(self, capsys):
        code, _, err = run(capsys, "eval", "--z", "0.5")
        assert code == 2
        assert "family: required but not given" in err

    def test_unknown_family_kind(self, capsys):
        code, _, err = run(capsys, "eval", "--family", "bogus()",
                           "--z", "0.5")
        assert code == 2
        assert "unknown family kind" in err

    def test_bad_z(self, capsys):
        code, _, err = run(capsys, "eval", "--family", "a", "--z", "zzz")
        assert code == 2
        assert "z:" in err

    def test_bad_order(self, capsys):
        code, _, err = run(capsys, "eval", "--family", "a", "--z", "1",
                           "--order", "3")
        assert code == 2
        assert "order" in err


class TestIntegrate:
    def test_prints_record_and_bounds(self, capsys):
        code, out, _ = run(capsys, "integrate", "--family", SINGLE,
                           "--r", "20", "--p", "0.25", "--mode", "tail")
        assert code == 0
        assert "integral_value = 0.0" in out
        assert "converged = True" in out
        for name in experiments.BOUND_NAMES:
            assert f"{name} = " in out

    def test_one_exponent_only(self, capsys):
        code, _, err = run(capsys, "integrate", "--family", SINGLE,
                           "--r", "20", "--p", "0.25,0.4")
        assert code == 2
        assert "exactly one exponent" in err


class TestListFamilies:
    def test_exact_catalog(self, capsys):
        code, out, _ = run(capsys, "list-families")
        assert code == 0
        lines = out.strip().splitlines()
        assert [line[0] for line in lines] == list("abcdefgh")
        assert all("classes=" in line and "rho=" in line for line in lines)
        assert any("reciprocal(a=1)" in line for line in lines)
        assert any("random(rho=1.5, a=2, seed=42)" in line for line in lines)


class TestRadiusSpec:
    def test_grammar_errors(self, capsys):
        for bad, fragment in [
            ("10:100", "expected min:max"),
            ("abc:2:3", "malformed"),
            ("100:10:4", "need 0 < min < max"),
            ("10:100:0", "points-per-decade"),
        ]:
            code, _, err = run(capsys, "verify", "--family", SINGLE,
                               "--p", "0.25", "--r", bad)
            assert code == 2, bad
            assert fragment in err

    def test_pole_radii_nudged_unless_asked(self, tmp_path, capsys):
        def radii_of(outdir, *extra):
            code, _, _ = run(capsys, "sweep", "--family", SINGLE,
                             "--r", "10:100:4", "--p", "0.25",
                             "--mode", "tail", "--tol", "1e-2",
                             "--out", str(outdir), *extra)
            assert code == 0
            return [rec.r for rec in
                    experiments.read_csv(outdir / "sweep.csv")]

        nudged = radii_of(tmp_path / "a")
        raw = radii_of(tmp_path / "b", "--include-pole-radii")
        assert 10.0 in raw
        assert 10.0 not in nudged
        assert len(raw) == len(nudged)


class TestConfigFile:
    def test_config_supplies_missing_flags(self, tmp_path, capsys):
        cfg = tmp_path / "run.conf"
        cfg.write_text(
            "# defaults for the verify run\n"
            f"family = {SINGLE}\n"
            "p = 0.25\n"
            "r = 20:200:4\n"
            "tol = 1e-4\n")
        code, out, _ = run(capsys, "verify", "--config", str(cfg),
                           "--out", str(tmp_path / "out"))
        assert code == 0
        assert "verdict: all hold" in out

    def test_flags_override_config(self, tmp_path, capsys):
        cfg = tmp_path / "run.conf"
        cfg.write_text(f"family = {SINGLE}\np = 0.25\nr = 20:200:4\n")
        out_dir = tmp_path / "out"
        code, _, _ = run(capsys, "sweep", "--config", str(cfg),
                         "--r", "30:40:2", "--mode", "tail",
                         "--tol", "1e-2", "--out", str(out_dir))
        assert code == 0
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert manifest["radius_spec"] == "30:40:2"

    def test_unknown_key(self, tmp_path, capsys):
        cfg = tmp_path / "run.conf"
        cfg.write_text("familly = a\n")
        code, _, err = run(capsys, "verify", "--config", str(cfg),
                           "--p", "0.25", "--r", "20:40:4")
        assert code == 2
        assert "unknown key 'familly'" in err

    def test_key_for_wrong_command(self, tmp_path, capsys):
        cfg = tmp_path / "run.conf"
        cfg.write_text("family = a\nthreads = 2\n")
        code, _, err = run(capsys, "eval", "--config", str(cfg), "--z", "1")
        assert code == 2
        assert "does not apply" in err

    def test_bad_value(self, tmp_path, capsys):
        cfg = tmp_path / "run.conf"
        cfg.write_text("tol = soon\n")
        code, _, err = run(capsys, "verify", "--config", str(cfg),
                           "--family", SINGLE, "--p", "0.25",
                           "--r", "20:40:4")
        assert code == 2
        assert "bad value for 'tol'" in err

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "verify", "--config", "/no/such/file",
                           "--family", SINGLE, "--p", "0.25",
                           "--r", "20:40:4")
        assert code == 2
        assert "cannot read" in err


class TestOutputDirectory:
    def test_env_var_wins(self, tmp_path, capsys, monkeypatch):
        env_dir = tmp_path / "env-out"
        flag_dir = tmp_path / "flag-out"
        monkeypatch.setenv("KERNEL_DECAY_OUT", str(env_dir))
        code, _, _ = run(capsys, "sweep", "--family", SINGLE,
                         "--p", "0.25", "--r", "20:40:2", "--mode", "tail",
                         "--tol", "1e-2", "--out", str(flag_dir))
        assert code == 0
        assert (env_dir / "sweep.csv").exists()
        assert not flag_dir.exists()

    def test_flag_used_otherwise(self, tmp_path, capsys, monkeypatch):
        monkeypatch.delenv("KERNEL_DECAY_OUT", raising=False)
        out_dir = tmp_path / "flag-out"
        code, _, _ = run(capsys, "sweep", "--family", SINGLE,
                         "--p", "0.25", "--r", "20:40:2", "--mode", "tail",
                         "--tol", "1e-2", "--out", str(out_dir))
        assert code == 0
        assert (out_dir / "sweep.csv").exists()
        assert (out_dir / "manifest.json").exists()


class TestSweepCommand:
    def test_artifacts_and_reruns_byte_identical(self, tmp_path, capsys):
        def one(outdir):
            code, out, _ = run(capsys, "sweep", "--family", SINGLE,
                               "--p", "0.25,0.4", "--r", "20:200:4",
                               "--mode", "tail,start", "--tol", "1e-3",
                               "--threads", "2", "--out", str(outdir))
            assert code == 0
            assert str(outdir / "sweep.csv") in out
            return (outdir / "sweep.csv").read_bytes()

        assert one(tmp_path / "one") == one(tmp_path / "two")

    def test_manifest_contents(self, tmp_path, capsys):
        out_dir = tmp_path / "out"
        code, _, _ = run(capsys, "sweep", "--family", SINGLE,
                         "--p", "0.25", "--r", "20:40:2", "--mode", "tail",
                         "--tol", "1e-2", "--seed", "7",
                         "--out", str(out_dir))
        assert code == 0
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert manifest["family_spec"] == SINGLE
        assert manifest["p_values"] == [0.25]
        assert manifest["modes"] == ["tail"]
        assert manifest["seed"] == 7
        assert manifest["artifact_version"] == experiments.ARTIFACT_VERSION
        assert manifest["outputs"] == ["sweep.csv", "manifest.json"]
        assert "timestamp" in manifest

    def test_unknown_mode(self, capsys):
        code, _, err = run(capsys, "sweep", "--family", SINGLE,
                           "--p", "0.25", "--r", "20:40:2",
                           "--mode", "sideways")
        assert code == 2
        assert "unknown mode" in err


class TestVerifyCommand:
    def test_all_hold_exit_zero(self, tmp_path, capsys):
        out_dir = tmp_path / "out"
        code, out, _ = run(capsys, "verify", "--family", SINGLE,
                           "--p", "0.25", "--r", "20:200:4",
                           "--tol", "1e-4", "--out", str(out_dir))
        assert code == 0
        assert "verdict: all hold" in out
        assert " OK" in out and " FAIL" not in out
        header = (out_dir / "verdicts.csv").read_text().splitlines()[0]
        assert header == "r,p,mode,bound,measured,rhs,slack,holds"

    def test_failure_exits_one(self, tmp_path, capsys, monkeypatch):
        def fake(*args, **kwargs):
            row = {"r": 10.0, "p": 0.25, "mode": "tail", "bound": "tail_rhs",
                   "measured": 2.0, "rhs": 1.0, "slack": 0.0, "holds": False}
            return [row], False

        monkeypatch.setattr(cli.experiments, "verify_inequalities", fake)
        code, out, _ = run(capsys, "verify", "--family", SINGLE,
                           "--p", "0.25", "--r", "20:40:2",
                           "--out", str(tmp_path / "out"))
        assert code == 1
        assert "verdict: FAILURES" in out
        assert " FAIL" in out


class TestReportCommand:
    def test_svg_rendered_and_deterministic(self, tmp_path, capsys):
        def one(outdir):
            code, out, _ = run(capsys, "report", "--family", SINGLE,
                               "--p", "0.25", "--r", "20:200:4",
                               "--mode", "start", "--tol", "1e-3",
                               "--out", str(outdir))
            assert code == 0
            assert str(outdir / "report.svg") in out
            data = (outdir / "report.svg").read_bytes()
            assert data.startswith(b"<?xml")
            return data

        assert one(tmp_path / "one") == one(tmp_path / "two")

    def test_manifest_lists_svg(self, tmp_path, capsys):
        out_dir = tmp_path / "out"
        run(capsys, "report", "--family", SINGLE, "--p", "0.25",
            "--r", "20:40:2", "--mode", "tail", "--tol", "1e-2",
            "--out", str(out_dir))
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert manifest["outputs"] == ["sweep.csv", "report.svg",
                                       "manifest.json"]


class TestArgparseSurface:
    def test_no_command(self, capsys):
        code, _, _ = run(capsys)
        assert code == 2

    def test_unknown_command(self, capsys):
        code, _, _ = run(capsys, "frobnicate")
        assert code == 2

    def test_bad_p_list(self, capsys):
        code, _, err = run(capsys, "verify", "--family", SINGLE,
                           "--p", "0.25,fast", "--r", "20:40:2")
        assert code == 2
        assert "comma-separated floats" in err
