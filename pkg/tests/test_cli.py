import csv
import io
import json

import numpy as np
import pytest

from aimsolve import reference_data
from aimsolve.cli import CSV_HEADER, main
from aimsolve.closed_form import gk_wavefunction


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture(scope="module")
def quartic_rows(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli") / "quartic.csv"
    main(["solve", "--problem", "quartic", "--A", "0.1", "--levels", "6", "--iters", "40",
          "--format", "csv", "--out", str(out)])
    return rows(out.read_text())


class TestSolve:
    def test_harmonic(self, capsys):
        code, out, err = run(capsys, "solve", "--problem", "harmonic1d", "--levels", "3", "--format", "csv")
        assert code == 0
        assert [float(r["E_aim"]) for r in rows(out)] == pytest.approx([1, 3, 5], abs=1e-9)
        assert "x0=0.0" in err

    def test_csv_header(self, capsys):
        _, out, _ = run(capsys, "solve", "--problem", "harmonic1d", "--levels", "1", "--format", "csv")
        assert out.splitlines()[0] == ",".join(CSV_HEADER)
        r = rows(out)[0]
        assert r["E_oracle"] == "" and float(r["E_exact"]) == 1.0
        assert json.loads(r["param_json"]) == {}

    @pytest.mark.parametrize("level", range(6))
    def test_quartic_table_column(self, quartic_rows, level):
        E = float(quartic_rows[level]["E_aim"])
        assert E == pytest.approx(reference_data.TABLE3[level][1], abs=1e-5)

    def test_unstabilized_exit_code(self, capsys):
        code, out, _ = run(capsys, "solve", "--problem", "spiked", "--gamma", "3", "--A", "0.001",
                           "--alpha-exp", "4", "--levels", "1", "--format", "csv")
        assert code == 2
        assert rows(out)[0]["stabilized"] == "false"

    def test_loose_tolerance_stabilizes(self, capsys):
        code, _, _ = run(capsys, "solve", "--problem", "spiked", "--gamma", "3", "--A", "0.001",
                         "--alpha-exp", "4", "--levels", "1", "--tol", "1e-8")
        assert code == 0

    @pytest.mark.parametrize(
        "argv",
        [
            ["solve", "--problem", "spiked", "--gamma", "3", "--A", "bad"],
            ["solve"],
            ["solve", "--problem", "custom", "--potential", "2x"],
            ["solve", "--problem", "custom"],
            ["solve", "--problem", "spiked", "--N", "3"],
            ["solve", "--problem", "harmonic1d", "--iters", "1"],
            ["solve", "--problem", "harmonic1d", "--estep", "0"],
            ["solve", "--problem", "spiked", "--A", "-1"],
            ["solve", "--problem", "harmonic1d", "--x0", "left"],
            ["frobnicate"],
        ],
    )
    def test_usage_errors(self, capsys, argv):
        code, _, err = run(capsys, *argv)
        assert code == 1
        assert "error" in err

    def test_custom_potential_is_classified(self, capsys):
        code, out, err = run(capsys, "solve", "--problem", "custom", "--potential", "x^2 + 6*x^-2",
                             "--levels", "2", "--format", "csv")
        assert code == 0
        assert [r["problem"] for r in rows(out)] == ["goldman_krivchenkov"] * 2
        assert [float(r["E_aim"]) for r in rows(out)] == pytest.approx([7, 11], abs=1e-8)

    def test_dimension_flags(self, capsys):
        _, out, _ = run(capsys, "solve", "--problem", "spiked", "--A", "10", "--alpha-exp", "1.9",
                        "--N", "5", "--l", "0", "--levels", "1", "--format", "csv")
        r = rows(out)[0]
        assert json.loads(r["param_json"])["gamma"] == 1.0
        assert float(r["E_aim"]) == pytest.approx(9.16309, abs=1e-4)

    def test_output_file_and_determinism(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (a, b):
            run(capsys, "solve", "--problem", "quartic", "--A", "0.1", "--levels", "3", "--iters", "20",
                "--format", "csv", "--out", str(path))
        assert a.read_bytes() == b.read_bytes()
        assert a.read_text().startswith("problem,")

    def test_table_format(self, capsys):
        _, out, _ = run(capsys, "solve", "--problem", "harmonic1d", "--levels", "2")
        lines = out.splitlines()
        assert lines[0].startswith("params") and len(lines) == 3


class TestConfigFile:
    def test_flags_override_file(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# quartic run\nproblem = quartic\nA = 0.1\nlevels = 2\niters = 20\nformat = csv\n")
        _, out, err = run(capsys, "solve", "--config", str(cfg), "--iters", "30")
        assert "max_iter=30" in err
        assert len(rows(out)) == 2

    def test_unknown_key(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("bogus = 1\n")
        code, _, err = run(capsys, "solve", "--config", str(cfg), "--problem", "harmonic1d")
        assert code == 1 and "bogus" in err

    def test_bad_value(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("problem = harmonic1d\nlevels = many\n")
        code, _, _ = run(capsys, "solve", "--config", str(cfg))
        assert code == 1

    def test_missing_file(self, capsys, tmp_path):
        code, _, _ = run(capsys, "solve", "--config", str(tmp_path / "nope.cfg"))
        assert code == 1


class TestScan:
    def test_brackets(self, capsys):
        code, out, _ = run(capsys, "scan", "--problem", "harmonic1d", "--emax", "6", "--estep", "0.5")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "E_lo,E_hi" and len(lines) == 4


class TestVerify:
    def test_harmonic(self, capsys):
        code, out, _ = run(capsys, "verify", "--problem", "harmonic1d", "--max-dev", "1e-8")
        assert code == 0
        assert out.splitlines()[-1].endswith("PASS")

    def test_table2_small_coupling(self, capsys):
        code, out, _ = run(capsys, "verify", "--table", "2", "--A", "0.001", "--max-dev", "1e-7")
        assert code == 0
        assert out.count("PASS") == 4

    def test_quartic_shallow_discrepancy_reported(self, capsys):
        code, out, _ = run(capsys, "verify", "--problem", "quartic", "--A", "0.1", "--levels", "6")
        assert code == 2
        assert "FAIL" in out

    def test_needs_a_target(self, capsys):
        code, _, _ = run(capsys, "verify")
        assert code == 1


class TestTables:
    def test_table3(self, capsys):
        code, out, err = run(capsys, "table3", "--format", "csv")
        assert code == 0
        got = [float(r["E_aim"]) for r in rows(out)]
        assert got[:4] == pytest.approx([t[1] for t in reference_data.TABLE3[:4]], abs=1e-5)
        assert "max_iter=40" in err

    def test_table2(self, capsys):
        code, out, _ = run(capsys, "table2", "--format", "csv")
        r = rows(out)
        assert code == 0 and len(r) == 12
        for row, ref in zip(r, reference_data.TABLE2):
            assert float(row["E_oracle"]) == pytest.approx(ref[3], rel=1e-9)

    def test_table1_fixed_A(self, capsys):
        code, out, err = run(capsys, "table1", "--A", "10", "--format", "csv")
        r = rows(out)
        assert code == 0 and len(r) == 18
        assert "calibrated" not in err
        assert float(r[0]["E_aim"]) == pytest.approx(8.48545, abs=5e-4)


class TestReconstruct:
    def test_hermite_k2(self, capsys):
        code, out, _ = run(capsys, "reconstruct", "--problem", "hermite", "--k", "2", "--xmin", "1", "--xmax", "2")
        data = np.loadtxt(io.StringIO(out), delimiter=",", skiprows=1)
        x, psi = data[:, 0], data[:, 2]
        target = (2 * x * x - 1) * np.exp(-x * x / 2)
        assert code == 0
        assert np.allclose(psi / psi[0], target / target[0], rtol=1e-7)

    def test_harmonic_ground_state(self, capsys):
        code, out, _ = run(capsys, "reconstruct", "--problem", "harmonic1d")
        data = np.loadtxt(io.StringIO(out), delimiter=",", skiprows=1)
        x, psi = data[:, 0], data[:, 2]
        assert np.allclose(psi / psi[0], np.exp(-(x * x - x[0] ** 2) / 2), rtol=1e-10)

    def test_gk_matches_wavefunction(self, capsys):
        code, out, err = run(capsys, "reconstruct", "--problem", "gk", "--gamma", "2", "--n", "1",
                             "--xmin", "0.1", "--xmax", "1.6", "--points", "401")
        data = np.loadtxt(io.StringIO(out), delimiter=",", skiprows=1)
        r, psi = data[:, 0], data[:, 2]
        ratio = psi / gk_wavefunction(1, 2.0, r)
        assert code == 0
        assert np.max(np.abs(ratio / ratio[0] - 1)) < 1e-6

    def test_node_truncates_grid(self, capsys):
        code, out, err = run(capsys, "reconstruct", "--problem", "gk", "--gamma", "2", "--n", "1")
        assert code == 0
        assert "truncated" in err
        x = np.loadtxt(io.StringIO(out), delimiter=",", skiprows=1)[:, 0]
        assert x[-1] < np.sqrt(3.5)

    def test_bad_window(self, capsys):
        code, _, _ = run(capsys, "reconstruct", "--problem", "harmonic1d", "--xmin", "2", "--xmax", "1")
        assert code == 1
