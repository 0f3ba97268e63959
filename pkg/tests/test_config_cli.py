import os
import re

import numpy as np
import pytest

from offshore_awe import cli
from offshore_awe.config import builtin_path, dump_config, load_config, load_config_text
from offshore_awe.engine import SimRecord
from offshore_awe.errors import ParseError, ValidationError

BUILTIN = "builtin:paper_baseline"


def baseline_text():
    return open(load_config(BUILTIN).source).read()


class TestConfig:
    def test_model_parameters(self, paper_config):
        s = paper_config.sim
        assert s.aero.area == 360 and s.kite_mass == 90
        assert s.tether.diameter == 0.035 and s.tether.density == 980
        assert s.tether.breaking_load == 490e3 and s.tether.breaking_elongation == 0.03
        assert tuple(s.tether.exit_point()) == (0.0, 0.0, 7.8475)
        assert s.control.targets.p_minus == (0.6, -0.4)
        assert s.control.targets.p_plus == (0.6, 0.4)
        assert tuple(s.wind) == (8.5, 0.0, 0.0)
        w = s.waves
        assert (w.hs, w.te, w.gamma_j) == (0.5, 3.7, 3.1)
        assert s.hydro is not None and s.radiation.order > 0
        assert w.exc_coeffs.shape == (w.n_bins, 6)

    def test_round_trip(self, paper_config, tmp_path):
        text = dump_config(paper_config)
        again = load_config_text(text, base_dir=str(tmp_path))
        assert dump_config(again) == text

    def test_targets_order(self):
        text = baseline_text().replace("target_minus = 0.6 -0.4", "target_minus = 0.6 0.5")
        with pytest.raises(ValidationError) as exc:
            load_config_text(text)
        assert any("phi_minus" in p for p in exc.value.problems)

    def test_non_pd_mass_named(self, tmp_path):
        src = open(builtin_path("data/paper_like_spar.txt")).read()
        lines = src.splitlines()
        i = lines.index("[M]")
        lines[i + 1] = "-1 " + " ".join(lines[i + 1].split()[1:])
        bad = tmp_path / "bad.txt"
        bad.write_text("\n".join(lines) + "\n")
        text = baseline_text().replace("builtin:paper_like_spar", str(bad))
        with pytest.raises(ValidationError) as exc:
            load_config_text(text)
        assert any("mass matrix M" in p for p in exc.value.problems)

    def test_collects_all_problems(self):
        text = baseline_text().replace("dt = 0.01", "dt = -1").replace("hs = 0.5", "hs = -2")
        with pytest.raises(ValidationError) as exc:
            load_config_text(text)
        assert len(exc.value.problems) >= 2

    def test_unknown_key_line(self):
        text = baseline_text().replace("k_p = 2.0", "k_p = 2.0\nkp = 3")
        line = text.splitlines().index("kp = 3") + 1
        with pytest.raises(ParseError, match=rf":{line}:.*kp"):
            load_config_text(text)

    def test_bad_value_line(self):
        text = baseline_text().replace("area = 360", "area = big")
        line = text.splitlines().index("area = big") + 1
        with pytest.raises(ParseError, match=rf":{line}:"):
            load_config_text(text)

    def test_unknown_section(self):
        with pytest.raises(ParseError, match="unknown section"):
            load_config_text(baseline_text() + "\n[extra]\na = 1\n")

    def test_onshore(self):
        text = baseline_text().replace("platform = offshore", "platform = onshore")
        assert load_config_text(text).sim.onshore


def run_cli(args, capsys):
    rc = cli.main(args)
    out = capsys.readouterr()
    return rc, out.out, out.err


def read_manifest(out_dir):
    text = open(os.path.join(out_dir, "manifest.txt")).read()
    files = dict(re.findall(r"^(\S+) = (sha256:\S+ bytes:\d+)$", text, re.M))
    return text, files


class TestCLI:
    def test_usage_errors(self, capsys):
        assert run_cli([], capsys)[0] == cli.EXIT_INVALID
        assert run_cli(["nope"], capsys)[0] == cli.EXIT_INVALID
        assert run_cli(["simulate", BUILTIN, "--mode", "bad"], capsys)[0] == cli.EXIT_INVALID

    def test_missing_config(self, capsys, tmp_path):
        rc, _, err = run_cli(["simulate", str(tmp_path / "none.cfg")], capsys)
        assert rc == cli.EXIT_INVALID and "error" in err

    def test_invalid_config(self, capsys, tmp_path):
        p = tmp_path / "bad.cfg"
        p.write_text(baseline_text().replace("dt = 0.01", "dt = 0.03"))
        rc, _, err = run_cli(["simulate", str(p)], capsys)
        assert rc == cli.EXIT_INVALID and "control_period" in err

    def test_simulate_and_analyze(self, capsys, tmp_path):
        out = tmp_path / "sim"
        rc, stdout, _ = run_cli(["simulate", BUILTIN, "--length", "900", "--duration", "150",
                                 "--out", str(out)], capsys)
        assert rc == cli.EXIT_OK
        text, files = read_manifest(out)
        assert "seed = 1" in text and "[simulation]" in text
        assert set(files) == {"record.csv", "record.events.csv"}
        for name, info in files.items():
            assert info.startswith(f"sha256:{cli.sha256(out / name)}")
        rec = SimRecord.from_csv(out / "record.csv")
        assert len(rec.t) == 1500 and rec.settle_time > 0

        # platform settle time exceeds 150 s: analyze cannot find a steady window
        rc, _, err = run_cli(["analyze", str(out / "record.csv"), "--out",
                              str(tmp_path / "an")], capsys)
        assert rc == cli.EXIT_ABORT and "InsufficientHistory" in err

    def test_analyze_onshore(self, capsys, tmp_path):
        p = tmp_path / "on.cfg"
        p.write_text(baseline_text().replace("platform = offshore", "platform = onshore"))
        out = tmp_path / "sim"
        assert run_cli(["simulate", str(p), "--length", "900", "--duration", "500",
                        "--out", str(out)], capsys)[0] == cli.EXIT_OK
        an = tmp_path / "an"
        rc, stdout, _ = run_cli(["analyze", str(out / "record.csv"), "--out", str(an)], capsys)
        assert rc == cli.EXIT_OK
        vals = dict(ln.split(" = ") for ln in stdout.splitlines())
        f_traj = float(vals["f_traj"].split()[0])
        assert 0.015 < f_traj < 0.05
        _, files = read_manifest(an)
        assert "analysis.txt" in files and any(f.endswith(".py") for f in files)
        assert np.isfinite(float(vals["eta"].split()[0]))

        rc, stdout, _ = run_cli(["compare", str(out / "record.csv"), str(out / "record.csv"),
                                 "--out", str(tmp_path / "cmp")], capsys)
        assert rc == cli.EXIT_OK and "identical = yes" in stdout

    def test_freq_response(self, capsys, tmp_path):
        rc, stdout, _ = run_cli(["freq-response", BUILTIN, "-n", "2000",
                                 "--out", str(tmp_path)], capsys)
        assert rc == cli.EXIT_OK
        sway = [ln for ln in stdout.splitlines() if ln.strip().startswith("sway")][0]
        assert float(sway.split()[1]) == pytest.approx(0.0185, abs=3e-4)
        frf = np.loadtxt(tmp_path / "frf.csv", delimiter=",", skiprows=1)
        assert frf.shape == (2000, 7)

    def test_env_output_dir(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv(cli.OUTPUT_ENV, str(tmp_path / "env"))
        assert run_cli(["freq-response", BUILTIN, "-n", "500"], capsys)[0] == cli.EXIT_OK
        assert (tmp_path / "env" / "freq_response" / "manifest.txt").exists()

    def test_sweep_small(self, capsys, tmp_path):
        p = tmp_path / "on.cfg"
        p.write_text(baseline_text().replace("platform = offshore", "platform = onshore"))
        rc, stdout, _ = run_cli(["sweep", str(p), "--lengths", "700", "900", "--modes",
                                 "baseline", "--duration", "400", "--out", str(tmp_path)],
                                capsys)
        assert rc == cli.EXIT_OK
        rows = open(tmp_path / "eta_baseline.csv").read().splitlines()
        assert rows[0].startswith("length,f_traj") and len(rows) == 3
        _, files = read_manifest(tmp_path)
        assert "force_stats.csv" in files and "record_baseline_L700.csv" in files
