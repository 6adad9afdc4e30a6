import math
from pathlib import Path

import numpy as np
import pytest

from decomc import ConfigError
from decomc.cli import main
from decomc.config import load_config, parse_overrides
from decomc.scenario import COLUMNS, render_csv, run_scenario

DEMOS = Path(__file__).resolve().parent.parent / "demos" / "configs"

LADDER = """
[decomc]
version = 1
[bath]
kind = ladder
omega0 = 1.0
n_modes = 8
mode_amplitude = 0.1
[drive]
t = 0.5, 2
omega_r = 20
[ensemble]
kind = microcanonical
quanta = 12
"""

OHMIC = """
[bath]
kind = ohmic
eta = 0.1
[drive]
t_start = 0
t_stop = 4
t_num = 5
omega_r = 100
[ensemble]
kind = canonical
beta = 1.0
"""


def read_rows(text):
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    header = lines[0].split(",")
    return header, [dict(zip(header, ln.split(","))) for ln in lines[1:]]


@pytest.fixture
def write(tmp_path):
    def _write(text, name="s.cfg"):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    return _write


class TestConfig:
    def test_linspace_grid_and_defaults(self):
        cfg = load_config(text=OHMIC)
        np.testing.assert_allclose(cfg.t_grid, [0, 1, 2, 3, 4])
        assert cfg["numerics.rtol"] == 1e-8
        assert cfg["drive.amplitude"] == 1.0

    @pytest.mark.parametrize(
        "patch",
        [
            {"bath.kind": "glass"},
            {"bath.colour": "blue"},
            {"numerics.rtol": "0.5"},
            {"drive.t": "1, 0.5"},
            {"ensemble.energy": "2.0"},
            {"decomc.version": "2"},
            {"bath.eta": "-1"},
            {"ensemble.beta": "abc"},
        ],
    )
    def test_rejects(self, patch):
        with pytest.raises(ConfigError):
            load_config(text=OHMIC, overrides=patch)

    def test_missing_key(self):
        with pytest.raises(ConfigError):
            load_config(text=OHMIC.replace("eta = 0.1", ""))

    def test_hash_tracks_effective_values(self):
        a = load_config(text=OHMIC)
        b = load_config(text=OHMIC + "\n[numerics]\nrtol = 1e-8\n")
        c = load_config(text=OHMIC, overrides={"ensemble.beta": "2"})
        assert a.sha256 == b.sha256
        assert a.sha256 != c.sha256

    def test_overrides_syntax(self):
        assert parse_overrides(["bath.eta=0.2"]) == {"bath.eta": "0.2"}
        with pytest.raises(ConfigError):
            parse_overrides(["eta=0.2"])


class TestScenario:
    def test_thermal_rows_start_at_zero(self):
        table = run_scenario(load_config(text=OHMIC), "thermal", threads=2)
        assert table.columns == COLUMNS["thermal"]
        assert table.rows[0]["Q_R"] == 0.0
        assert table.rows[0]["C_thermal_abs"] == 1.0
        assert not table.failed

    def test_compare_gap_column(self):
        table = run_scenario(load_config(text=LADDER), "compare", threads=1)
        for row in table.rows:
            assert row["gap_abs"] >= abs(row["C_micro_abs"] - row["C_thermal_abs"]) - 1e-15
            assert row["method"] == "contour-period"

    def test_thread_count_does_not_change_output(self):
        cfg = load_config(text=LADDER)
        a = render_csv(run_scenario(cfg, "compare", threads=1))
        b = render_csv(run_scenario(cfg, "compare", threads=4))
        assert a == b

    def test_failed_rows_become_nan(self):
        # a target energy far below the ladder's reach cannot be bracketed
        cfg = load_config(text=LADDER.replace("quanta = 12", "energy = 1e-320"))
        table = run_scenario(cfg, "micro", threads=1)
        assert table.failed
        assert all(math.isnan(r["C_micro_abs"]) for r in table.rows)
        assert "NonConvergence" in render_csv(table)

    def test_micro_needs_microcanonical_ensemble(self):
        with pytest.raises(ConfigError):
            run_scenario(load_config(text=OHMIC), "micro")


class TestCommandLine:
    def test_thermal(self, write, capsys):
        assert main(["thermal", "--config", write(OHMIC)]) == 0
        header, rows = read_rows(capsys.readouterr().out)
        assert header[:4] == ["t", "Q_R", "Q_I", "C_thermal_abs"]
        assert float(rows[0]["Q_R"]) == 0.0

    def test_output_is_byte_identical(self, write, tmp_path):
        cfg = write(LADDER)
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["compare", "--config", cfg, "--out", str(out1)]) == 0
        assert main(["compare", "--config", cfg, "--out", str(out2), "--threads", "3"]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        text = out1.read_text()
        assert text.startswith("# decomc ")
        assert "# config_sha256: " in text

    def test_oracle_exit_codes(self, write, capsys):
        cfg = write(LADDER)
        assert main(["oracle", "--config", cfg]) == 0
        _, rows = read_rows(capsys.readouterr().out)
        assert max(float(r["micro_err"]) for r in rows) < 1e-8
        assert main(["oracle", "--config", cfg, "--set", "numerics.oracle_tol=1e-30"]) == 3

    def test_config_error_exit(self, write):
        assert main(["thermal", "--config", write(OHMIC), "--set", "bath.kind=glass"]) == 1
        assert main(["thermal", "--config", "/nonexistent.cfg"]) == 1
        assert main(["oracle", "--config", write(LADDER), "--set", "ensemble.quanta=70"]) == 1

    def test_nonconvergence_exit(self, write):
        cfg = write(LADDER.replace("quanta = 12", "energy = 1e-320"))
        assert main(["micro", "--config", cfg]) == 2

    def test_threads_env(self, write, monkeypatch):
        monkeypatch.setenv("DECOMC_THREADS", "0")
        assert main(["thermal", "--config", write(OHMIC)]) == 1
        monkeypatch.setenv("DECOMC_THREADS", "2")
        assert main(["thermal", "--config", write(OHMIC)]) == 0

    def test_flag_overrides(self, write, capsys):
        assert main(["thermal", "--config", write(OHMIC), "--t", "1, 2", "--beta", "2"]) == 0
        _, rows = read_rows(capsys.readouterr().out)
        assert [float(r["t"]) for r in rows] == [1.0, 2.0]

    def test_sweep(self, write, capsys):
        text = LADDER + "\n[sweep]\ncommand = compare\nparameter = ensemble.quanta\nvalues = 5, 10\n"
        assert main(["sweep", "--config", write(text)]) == 0
        header, rows = read_rows(capsys.readouterr().out)
        assert header[0] == "sweep_value"
        assert [r["sweep_value"] for r in rows] == ["5.0", "5.0", "10.0", "10.0"]

    def test_neff(self, capsys):
        assert main(["neff", "--L", "1", "--T", "0.1"]) == 0
        first = capsys.readouterr().out.splitlines()[0]
        assert first == "N_eff = 13.9"
        assert main(["neff", "--L", "2", "--T", "0.05"]) == 0
        assert capsys.readouterr().out.splitlines()[0] == first
        assert main(["neff", "--L", "0", "--T", "0.1"]) == 1


class TestDemoConfigs:
    def test_ohmic_line_gap_is_two_and_a_half_percent(self, capsys):
        assert main(["compare", "--config", str(DEMOS / "ohmic_line.cfg")]) == 0
        _, rows = read_rows(capsys.readouterr().out)
        row = next(r for r in rows if float(r["t"]) == 20.0)
        assert float(row["Q_R"]) == pytest.approx(1.0)
        assert abs(float(row["preexp_correction"])) / float(row["Q_R"]) == pytest.approx(0.025)
        assert float(row["n_eff"]) == pytest.approx(10.0)

    @pytest.mark.parametrize("name, command", [
        ("ohmic.cfg", "thermal"), ("ladder.cfg", "oracle"), ("neff_sweep.cfg", "sweep"),
    ])
    def test_demo_configs_run(self, name, command, capsys):
        assert main([command, "--config", str(DEMOS / name)]) == 0


class TestOtherBaths:
    def test_tabulated_bath_with_log_z_table(self, tmp_path, capsys):
        from decomc import ModeSet, log_partition

        # a smooth hump of spectral weight and the partition function of a dense ladder
        w = np.linspace(0.05, 4.0, 80)
        np.savetxt(tmp_path / "F.dat", np.column_stack([w, 0.1 * w * np.exp(-w)]))
        modes = ModeSet(0.05 * np.arange(1, 400), np.ones(399))
        beta = np.linspace(0.5, 3.0, 60)
        np.savetxt(tmp_path / "lnz.csv", np.column_stack([beta, log_partition(modes, beta)]),
                   delimiter=",")
        cfg = tmp_path / "table.cfg"
        cfg.write_text(
            "[bath]\nkind = table\nspectral_table = F.dat\nthermo = table\nlogz_table = lnz.csv\n"
            "[drive]\nt = 1, 3\nomega_r = 50\n"
            "[ensemble]\nkind = microcanonical\nn_eff = 20\n"
        )
        assert main(["compare", "--config", str(cfg)]) == 0
        _, rows = read_rows(capsys.readouterr().out)
        assert all(r["method"] == "saddle-corrected" for r in rows)
        assert all(float(r["n_eff"]) == pytest.approx(20.0) for r in rows)

    def test_missing_table_is_config_error(self, write):
        text = "[bath]\nkind = table\nspectral_table = nope.dat\n[drive]\nt = 1\n" \
               "[ensemble]\nkind = canonical\nbeta = 1\n"
        assert main(["thermal", "--config", write(text)]) == 1

    def test_transmission_line_oracle(self, write):
        text = (
            "[bath]\nkind = transmission_line\nlength = 1.0\nspeed = 0.6366197723675814\n"
            "n_modes = 4\nmode_amplitude = 0.1\n"
            "[drive]\nt = 1, 2\nomega_r = 10\n"
            "[ensemble]\nkind = microcanonical\nquanta = 7\n"
        )
        assert main(["oracle", "--config", write(text)]) == 0
