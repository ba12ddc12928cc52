"""Unit tests for the command-line front end and CSV emission."""

import csv
import json

import numpy as np
import pytest

from dicke_css.cli import main, parse_config
from dicke_css.css import eta_analytic_n2


def _read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


class TestParseConfig:
    def test_defaults(self):
        cfg = parse_config(["exact", "--n", "30"])
        assert cfg.subcommand == "exact"
        assert cfg.options["n"] == 30
        assert cfg.options["gamma"] == 1.0
        assert cfg.options["points"] == 1200

    def test_qt_flags(self):
        cfg = parse_config(["qt", "--strategy", "phi-opt", "--n", "50",
                            "--ntraj", "100", "--seed", "42"])
        assert cfg.options["strategy"] == "phi-opt"
        assert cfg.options["ntraj"] == 100
        assert cfg.options["seed"] == 42

    def test_config_file_merge(self, tmp_path):
        cfile = tmp_path / "c.json"
        cfile.write_text(json.dumps({"n": 7, "gamma": 2.0}))
        cfg = parse_config(["exact", "--config", str(cfile), "--n", "9"])
        # explicit flag wins, file fills the rest
        assert cfg.options["n"] == 9
        assert cfg.options["gamma"] == 2.0

    def test_unknown_config_key_rejected(self, tmp_path):
        cfile = tmp_path / "c.json"
        cfile.write_text(json.dumps({"bogus": 1}))
        with pytest.raises(SystemExit):
            parse_config(["exact", "--config", str(cfile)])

    def test_subcommand_mismatch_rejected(self, tmp_path):
        cfile = tmp_path / "c.json"
        cfile.write_text(json.dumps({"subcommand": "qt"}))
        with pytest.raises(SystemExit):
            parse_config(["exact", "--config", str(cfile)])

    def test_subcommand_required(self):
        with pytest.raises(SystemExit):
            parse_config([])


class TestEntropyCommand:
    def test_json_output(self, capsys):
        assert main(["entropy", "--n", "4", "--m", "2"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["n"] == 4 and out["m"] == 2 and out["n_b"] == 2
        assert out["entropy_bits"] == pytest.approx(1.2516291673878228)


class TestExactCommand:
    def test_outputs_and_provenance(self, tmp_path):
        args = ["exact", "--n", "5", "--t-max", "4.0", "--points", "40",
                "--out-dir", str(tmp_path)]
        assert main(args) == 0
        rows = _read_csv(tmp_path / "populations.csv")
        assert len(rows) == 40 * 6
        cfg = json.loads((tmp_path / "run_config.json").read_text())
        assert cfg["subcommand"] == "exact" and cfg["n"] == 5

    def test_population_cascade_shape(self, tmp_path):
        # top level decays monotonically; intermediate levels rise then fall
        main(["exact", "--n", "5", "--t-max", "8.0", "--points", "100",
              "--out-dir", str(tmp_path)])
        rows = _read_csv(tmp_path / "populations.csv")
        series = {m: [] for m in range(6)}
        for r in rows:
            series[int(r["m"])].append(float(r["prob"]))
        top = np.array(series[5])
        assert (np.diff(top) <= 1e-12).all()
        for m in (1, 2, 3, 4):
            s = np.array(series[m])
            peak = int(np.argmax(s))
            assert 0 < peak < len(s) - 1
            assert (np.diff(s[:peak + 1]) >= -1e-12).all()
            assert (np.diff(s[peak:]) <= 1e-12).all()

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            main(["exact", "--n", "4", "--t-max", "2.0", "--points", "10",
                  "--out-dir", str(out)])
        assert (a / "populations.csv").read_bytes() == \
            (b / "populations.csv").read_bytes()


class TestCssTraceCommand:
    def test_n2_passage_matches_analytic(self, tmp_path):
        assert main(["css-trace", "--n", "2", "--t-max", "6.0",
                     "--t-points", "13", "--out-dir", str(tmp_path)]) == 0
        rows = _read_csv(tmp_path / "passage.csv")
        assert len(rows) == 13
        for r in rows[1:]:
            t = float(r["t"])
            assert abs(float(r["eta"]) - eta_analytic_n2(t)) < 1e-6
            assert float(r["negativity"]) < 1e-6
        weights = _read_csv(tmp_path / "css_weights.csv")
        assert len(weights) == 13 * 3
        assert {"t", "a", "theta_a", "P_a"} == set(weights[0])


class TestCssScanCommand:
    def test_landscape_output(self, tmp_path):
        assert main(["css-scan", "--n", "4", "--t-max", "3.0",
                     "--t-points", "4", "--eta-points", "5",
                     "--eta-min", "0.2", "--eta-max", "1.0",
                     "--out-dir", str(tmp_path)]) == 0
        rows = _read_csv(tmp_path / "landscape.csv")
        assert len(rows) == 20
        vals = [float(r["log10_negativity"]) for r in rows]
        assert all(-10.0 <= v <= 0.0 for v in vals)


class TestQtCommand:
    def test_ensemble_output(self, tmp_path):
        assert main(["qt", "--n", "5", "--dt", "0.01", "--t-max", "1.0",
                     "--strategy", "phi-random", "--ntraj", "4",
                     "--seed", "9", "--out-dir", str(tmp_path)]) == 0
        rows = _read_csv(tmp_path / "qt_ensemble.csv")
        assert len(rows) == 11
        assert float(rows[0]["t"]) == 0.0
        assert float(rows[0]["xi_mean"]) == pytest.approx(1.0)
        cfg = json.loads((tmp_path / "run_config.json").read_text())
        assert cfg["strategy"] == "phi-random" and cfg["dt"] == 0.01

    def test_seed_determinism(self, tmp_path):
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            main(["qt", "--n", "4", "--dt", "0.01", "--t-max", "0.5",
                  "--ntraj", "3", "--seed", "5", "--out-dir", str(out)])
            outs.append((out / "qt_ensemble.csv").read_bytes())
        assert outs[0] == outs[1]


class TestQtScalingCommand:
    def test_row_count(self, tmp_path):
        assert main(["qt-scaling", "--n-list", "4,6", "--dt", "0.01",
                     "--t-max", "1.0", "--ntraj", "2", "--seed", "1",
                     "--out-dir", str(tmp_path)]) == 0
        rows = _read_csv(tmp_path / "qt_scaling.csv")
        assert len(rows) == 6  # two sizes, three strategies
        assert {r["strategy"] for r in rows} == \
            {"naive", "phi_random", "phi_opt"}


class TestErrorPaths:
    def test_invalid_value_exits_1(self, tmp_path, capsys):
        assert main(["exact", "--n", "0", "--out-dir", str(tmp_path)]) == 1
        assert "error" in capsys.readouterr().err

    def test_float_format_round_trips(self, tmp_path):
        main(["exact", "--n", "3", "--t-max", "1.0", "--points", "5",
              "--out-dir", str(tmp_path)])
        from dicke_css.dicke import ModelParams, evolve_exact
        rows = _read_csv(tmp_path / "populations.csv")
        pops = evolve_exact(ModelParams(n_emitters=3),
                            np.linspace(0, 1, 5))
        for r in rows:
            t = float(r["t"])
            m = int(r["m"])
            ref = next(p for p in pops if p.time == t)
            assert float(r["prob"]) == ref.probs[m]
