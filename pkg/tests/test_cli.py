import csv
import json
import math
from pathlib import Path

import numpy as np
import pytest

from simcost import cli, config as cfgmod, models, qmat
from simcost.qmat import X, Y, Z

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"


def write(tmp_path, text, name="model.toml"):
    p = tmp_path / name
    p.write_text(text)
    return p


PAULI_MIN = """
name = "p1"
model = "pauli"
seed = 7
[system]
qubits = 1
[gates]
tau = 1.0
[sweep]
t = [0.01, 0.1]
n_values = [2]
"""


class TestGrammar:
    def test_entry_forms(self):
        assert cfgmod.parse_entry("1.5") == 1.5
        assert cfgmod.parse_entry("-2i") == -2j
        assert cfgmod.parse_entry("0.5-0.25i") == 0.5 - 0.25j
        with pytest.raises(cfgmod.ConfigError):
            cfgmod.parse_entry("abc")

    def test_pauli_word(self):
        m = cfgmod.parse_pauli_word("1.0 * X1 Y3", 3)
        expected = qmat.embed_local(X, 0, [2, 2, 2]) @ qmat.embed_local(Y, 2, [2, 2, 2])
        assert np.allclose(m, expected)

    def test_bare_word_and_coefficient(self):
        assert np.allclose(cfgmod.parse_pauli_word("Z1", 1), Z)
        assert np.allclose(cfgmod.parse_pauli_word("-0.5 * Z1", 1), -0.5 * Z)

    def test_word_errors(self):
        with pytest.raises(cfgmod.ConfigError):
            cfgmod.parse_pauli_word("W1", 1)
        with pytest.raises(cfgmod.ConfigError):
            cfgmod.parse_pauli_word("X9", 2)
        with pytest.raises(cfgmod.ConfigError):
            cfgmod.parse_pauli_word("2 * X1 * Y1", 1)

    def test_operator_sum(self):
        m = cfgmod.parse_operator(["X1", "Y1"], 1)
        assert np.allclose(m, X + Y)

    def test_dense(self):
        m = cfgmod.parse_dense([["0", "1"], ["0", "0"]])
        assert np.allclose(m, qmat.LOWER)
        with pytest.raises(cfgmod.ConfigError):
            cfgmod.parse_dense([["0", "1", "0"], ["0", "0", "1"]])


class TestLoadConfig:
    def test_minimal_pauli(self, tmp_path):
        cfg = cfgmod.load_config(write(tmp_path, PAULI_MIN))
        assert cfg.kind == "pauli" and cfg.n_qubits == 1 and cfg.seed == 7
        assert cfg.sweep.t_values == (0.01, 0.1)
        model = cfgmod.build_model(cfg)
        assert isinstance(model, models.PauliNoiseModel)

    def test_unknown_keys_rejected(self, tmp_path):
        bad = PAULI_MIN + "\nunknown_key = 3\n"
        with pytest.raises(cfgmod.ConfigError):
            cfgmod.load_config(write(tmp_path, bad))
        bad2 = PAULI_MIN.replace("[sweep]", "[sweep]\nbogus = 1")
        with pytest.raises(cfgmod.ConfigError):
            cfgmod.load_config(write(tmp_path, bad2))

    def test_named_model_rejects_custom_sections(self, tmp_path):
        bad = PAULI_MIN + "\n[[jumps]]\npauli = \"X1\"\n"
        with pytest.raises(cfgmod.ConfigError):
            cfgmod.load_config(write(tmp_path, bad))

    def test_logspace_sweep(self, tmp_path):
        text = PAULI_MIN.replace(
            "t = [0.01, 0.1]", "t_logspace = { start = 1e-3, stop = 1e-1, points = 5 }"
        )
        cfg = cfgmod.load_config(write(tmp_path, text))
        assert len(cfg.sweep.t_values) == 5
        assert cfg.sweep.t_values[0] == pytest.approx(1e-3)
        assert cfg.sweep.t_values[-1] == pytest.approx(1e-1)

    def test_custom_model_with_dense_jump(self, tmp_path):
        text = """
name = "c"
model = "custom"
[system]
qubits = 1
[gates]
tau = 0.5
[[jumps]]
dense = [["0", "1.4142135623730951"], ["0", "0"]]
[sweep]
t = [0.1]
"""
        cfg = cfgmod.load_config(write(tmp_path, text))
        model = cfgmod.build_model(cfg)
        assert isinstance(model, models.CustomModel)
        assert np.allclose(model.jumps[0], math.sqrt(2) * qmat.LOWER)

    def test_non_hermitian_hamiltonian_fails(self, tmp_path):
        text = """
name = "bad"
model = "custom"
[system]
qubits = 1
[hamiltonian]
dense = [["0", "1"], ["0", "0"]]
[[jumps]]
pauli = "X1"
"""
        cfg = cfgmod.load_config(write(tmp_path, text))
        with pytest.raises(ValueError):
            cfgmod.build_model(cfg)


class TestSimulateCommand:
    def test_exact_pauli_rows(self, tmp_path):
        cfg = write(tmp_path, PAULI_MIN)
        rc = cli.main(["simulate", "--config", str(cfg), "--scheme", "exact-pauli",
                       "--out", str(tmp_path / "out"), "--workers", "1"])
        assert rc == 0
        with open(tmp_path / "out" / "p1-exact-pauli.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 2
        for row in rows:
            assert float(row["diamond_error"]) <= 1e-8

    def test_empty_grid_empty_csv(self, tmp_path):
        text = PAULI_MIN.replace("t = [0.01, 0.1]", "t = []")
        cfg = write(tmp_path, text)
        rc = cli.main(["simulate", "--config", str(cfg), "--scheme", "exact-pauli",
                       "--out", str(tmp_path / "out")])
        assert rc == 0
        content = (tmp_path / "out" / "p1-exact-pauli.csv").read_text().strip().splitlines()
        assert len(content) == 1  # header only

    def test_scheme_model_mismatch(self, tmp_path, capsys):
        cfg = write(tmp_path, PAULI_MIN)
        rc = cli.main(["simulate", "--config", str(cfg), "--scheme", "exact-ad",
                       "--out", str(tmp_path / "out")])
        assert rc == 1
        assert "amplitude-damping" in capsys.readouterr().err

    def test_symmetric_requires_hermitian_jumps(self, tmp_path, capsys):
        text = """
name = "ad"
model = "amplitude-damping"
[system]
qubits = 1
[sweep]
t = [0.1]
"""
        cfg = write(tmp_path, text)
        rc = cli.main(["simulate", "--config", str(cfg), "--scheme", "symmetric",
                       "--out", str(tmp_path / "out")])
        assert rc == 1
        assert "Hermitian" in capsys.readouterr().err

    def test_poisson_rows_below_bound(self, tmp_path):
        cfg = write(tmp_path, PAULI_MIN)
        rc = cli.main(["simulate", "--config", str(cfg), "--scheme", "poisson",
                       "--out", str(tmp_path / "out"), "--workers", "2"])
        assert rc == 0
        with open(tmp_path / "out" / "p1-poisson.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert rows
        for row in rows:
            assert float(row["error_over_bound"]) <= 1.0

    def test_determinism_byte_identical(self, tmp_path):
        cfg = write(tmp_path, PAULI_MIN)
        for out in ("out_a", "out_b"):
            assert cli.main(["simulate", "--config", str(cfg), "--scheme", "poisson",
                             "--out", str(tmp_path / out), "--seed", "99",
                             "--workers", "2"]) == 0
        a = (tmp_path / "out_a" / "p1-poisson.csv").read_bytes()
        b = (tmp_path / "out_b" / "p1-poisson.csv").read_bytes()
        assert a == b

    def test_parse_error_exit_code(self, tmp_path, capsys):
        cfg = write(tmp_path, PAULI_MIN + "\ngarbage = { [ \n")
        rc = cli.main(["simulate", "--config", str(cfg), "--scheme", "poisson",
                       "--out", str(tmp_path / "out")])
        assert rc == 1


class TestBoundCommand:
    def test_pauli_bound_outputs(self, tmp_path):
        cfg = write(tmp_path, PAULI_MIN)
        out = tmp_path / "out"
        rc = cli.main(["bound", "--config", str(cfg), "--out", str(out)])
        assert rc == 0
        data = json.loads((out / "p1-bound.json").read_text())
        hand = 0.5 * min(0.5 * (1 / (6 * math.log(2))) ** 2, 1 / 8)
        assert data["bound"] == pytest.approx(hand, abs=1e-12)
        text = (out / "p1-bound.txt").read_text()
        assert "sandwich" in text

    def test_fixed_time_kind(self, tmp_path):
        text = PAULI_MIN + "\n[bounds]\nalpha = 2.0\nbeta = 2.0\nfixed_time_tau = 0.01\n"
        cfg = write(tmp_path, text)
        out = tmp_path / "out"
        rc = cli.main(["bound", "--config", str(cfg), "--kind", "fixed-time", "--out", str(out)])
        assert rc == 0
        data = json.loads((out / "p1-bound.json").read_text())
        assert data["fixed_time_applicable"] is True

    def test_fixed_time_without_tau_rejected(self, tmp_path, capsys):
        cfg = write(tmp_path, PAULI_MIN)
        rc = cli.main(["bound", "--config", str(cfg), "--kind", "fixed-time",
                       "--out", str(tmp_path / "out")])
        assert rc == 1

    def test_custom_bound_requires_analytic_upper(self, tmp_path, capsys):
        text = """
name = "c"
model = "custom"
[system]
qubits = 1
[[jumps]]
pauli = "X1"
[resource]
members = ["X1"]
[certificates]
operators = ["Z1"]
"""
        cfg = write(tmp_path, text)
        rc = cli.main(["bound", "--config", str(cfg), "--out", str(tmp_path / "out")])
        assert rc == 1
        assert "kappa_upper" in capsys.readouterr().err


class TestFitCommand:
    def make_csv(self, tmp_path, rows, header=("t", "diamond_error")):
        p = tmp_path / "data.csv"
        with open(p, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(rows)
        return p

    def test_exact_power_law(self, tmp_path, capsys):
        ts = np.logspace(-3, -1, 8)
        p = self.make_csv(tmp_path, [(t, 7 * t**3) for t in ts])
        rc = cli.main(["fit", "--csv", str(p)])
        assert rc == 0
        line = capsys.readouterr().out
        slope = float(line.split()[1])
        assert slope == pytest.approx(3.0, abs=1e-6)

    def test_nonpositive_rejected(self, tmp_path, capsys):
        p = self.make_csv(tmp_path, [(0.1, 0.0), (0.2, 1.0), (0.3, 1.0), (0.4, 1.0)])
        assert cli.main(["fit", "--csv", str(p)]) == 1

    def test_too_few_rows(self, tmp_path):
        p = self.make_csv(tmp_path, [(0.1, 1.0), (0.2, 2.0)])
        assert cli.main(["fit", "--csv", str(p)]) == 1

    def test_missing_column(self, tmp_path):
        p = self.make_csv(tmp_path, [(0.1, 1.0)] * 5)
        assert cli.main(["fit", "--csv", str(p), "--y", "nope"]) == 1


class TestVerifyCommand:
    def test_pauli_passes(self, tmp_path):
        cfg = write(tmp_path, PAULI_MIN)
        assert cli.main(["verify", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0

    def test_damping_env_passes(self, tmp_path):
        text = """
name = "ad"
model = "amplitude-damping"
[system]
qubits = 1
[sweep]
t = [0.1]
"""
        cfg = write(tmp_path, text)
        assert cli.main(["verify", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0

    def test_broken_resource_fails(self, tmp_path):
        # Jumps generate X and Y rotations but the resource keeps only X:
        # invariance of the conditional expectation fails.
        text = """
name = "broken"
model = "custom"
[system]
qubits = 1
[[jumps]]
pauli = "X1"
[[jumps]]
pauli = "Y1"
[resource]
members = ["X1"]
[certificates]
operators = ["Z1"]
[sweep]
t = [0.1]
"""
        cfg = write(tmp_path, text)
        assert cli.main(["verify", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2

    def test_corrupt_config_exit_one(self, tmp_path):
        text = """
name = "bad"
model = "custom"
[system]
qubits = 1
[hamiltonian]
dense = [["0", "1"], ["0", "0"]]
[[jumps]]
pauli = "X1"
"""
        cfg = write(tmp_path, text)
        assert cli.main(["verify", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 1


class TestWorkerSelection:
    def test_env_fallback(self, monkeypatch):
        ns = type("NS", (), {"workers": None})()
        monkeypatch.setenv("SIMCOST_WORKERS", "3")
        assert cli._worker_count(ns) == 3
        monkeypatch.setenv("SIMCOST_WORKERS", "bogus")
        assert cli._worker_count(ns) >= 1
        ns.workers = 2
        assert cli._worker_count(ns) == 2


class TestShippedConfigs:
    @pytest.mark.parametrize("name", ["pauli1.toml", "pauli2.toml", "ad1.toml", "custom_xz.toml"])
    def test_configs_parse_and_build(self, name):
        cfg = cfgmod.load_config(CONFIG_DIR / name)
        cfgmod.build_model(cfg)
