import json

import numpy as np
import pytest

from elastic_schwarz.cli import (
    ConfigError,
    config_header,
    load_config,
    main,
    parse_kv_lines,
)


def read(path):
    with open(path, "rb") as fh:
        return fh.read()


def header_only(path):
    return [line for line in read(path).decode().splitlines() if line.startswith("#")]


class TestConfig:
    def test_defaults_match_reference_setup(self):
        cfg = load_config(None, {})
        assert (cfg.rho, cfg.cp, cfg.cs) == (1.0, 1.0, 0.5)
        assert (cfg.nx, cfg.ny, cfg.overlap_cells) == (80, 40, 4)
        assert cfg.delta == 0.1 and cfg.omega == 1.0
        assert cfg.k_max == pytest.approx(3.0 * cfg.omega / cfg.cs)
        medium = cfg.medium()
        assert medium.cp == pytest.approx(cfg.cp, rel=1e-12)
        assert medium.cs == pytest.approx(cfg.cs, rel=1e-12)

    def test_lame_parametrization(self, tmp_path):
        path = tmp_path / "cfg"
        path.write_text("lame_lambda = 2.0\nlame_mu = 1.0\nrho = 4.0\n")
        cfg = load_config(path, {})
        assert cfg.medium_given == "lame"
        assert cfg.cp == pytest.approx(1.0, rel=1e-12)
        assert cfg.cs == pytest.approx(0.5, rel=1e-12)

    def test_both_parametrizations_rejected(self, tmp_path):
        path = tmp_path / "cfg"
        path.write_text("lame_lambda = 2.0\nlame_mu = 1.0\ncp = 1.0\n")
        with pytest.raises(ConfigError, match="exactly one"):
            load_config(path, {})

    def test_speed_ordering_rejected(self):
        with pytest.raises(ConfigError, match="material"):
            load_config(None, {"cp": 0.4, "cs": 0.5})

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "cfg"
        path.write_text("bogus = 1\n")
        with pytest.raises(ConfigError, match="bogus"):
            load_config(path, {})

    def test_field_validation_names_field(self):
        with pytest.raises(ConfigError, match="omega"):
            load_config(None, {"omega": -1.0})
        with pytest.raises(ConfigError, match="overlap_cells"):
            load_config(None, {"overlap_cells": 3})

    def test_header_round_trips_through_parser(self):
        cfg = load_config(None, {"omega": 5.0, "seed": 99})
        parsed = parse_kv_lines(config_header(cfg, "sweep"))
        cfg2 = load_config(None, parsed)
        assert cfg2 == cfg

    def test_comment_lines_ignored(self):
        parsed = parse_kv_lines(["# just a note", "", "omega = 2.0"])
        assert parsed == {"omega": 2.0}


class TestSweepCommand:
    def test_deterministic_output(self, tmp_path):
        args = ["sweep", "--k-count", "50"]
        assert main(args + ["--out", str(tmp_path / "a")]) == 0
        assert main(args + ["--out", str(tmp_path / "b")]) == 0
        assert read(tmp_path / "a" / "sweep.csv") == read(tmp_path / "b" / "sweep.csv")

    def test_header_reproduces_run(self, tmp_path):
        assert main(["sweep", "--out", str(tmp_path / "a"), "--omega", "5",
                     "--k-count", "40"]) == 0
        cfg_file = tmp_path / "replay.cfg"
        cfg_file.write_text("\n".join(header_only(tmp_path / "a" / "sweep.csv")))
        assert main(["sweep", "--config", str(cfg_file),
                     "--out", str(tmp_path / "b")]) == 0
        assert read(tmp_path / "a" / "sweep.csv") == read(tmp_path / "b" / "sweep.csv")

    def test_zero_overlap_gives_flat_curves(self, tmp_path):
        assert main(["sweep", "--out", str(tmp_path), "--delta", "0",
                     "--k-count", "30"]) == 0
        rows = [line.split(",") for line in
                read(tmp_path / "sweep.csv").decode().splitlines()
                if not (line.startswith("#") or line.startswith("k,"))]
        for row in rows:
            assert abs(float(row[1]) - 1.0) <= 1e-12
            assert abs(float(row[2]) - 1.0) <= 1e-12

    def test_bad_config_exits_2(self, tmp_path, capsys):
        assert main(["sweep", "--out", str(tmp_path), "--omega", "-1"]) == 2
        assert "omega" in capsys.readouterr().err


class TestVerifyCommand:
    def test_default_battery_passes(self, tmp_path):
        assert main(["verify", "--out", str(tmp_path)]) == 0
        report = json.loads(read(tmp_path / "verify_report.json"))
        assert report["all_passed"]
        names = {check["name"] for check in report["checks"]}
        assert "zero_overlap_stagnation" in names
        assert "closed_form_vs_oracle_eigenvalues" in names
        assert "asymptotic_slope_vs_finite_difference" in names
        for check in report["checks"]:
            assert check["max_deviation"] <= check["tolerance"]

    def test_zero_overlap_config_passes(self, tmp_path):
        assert main(["verify", "--out", str(tmp_path), "--delta", "0"]) == 0
        report = json.loads(read(tmp_path / "verify_report.json"))
        assert report["all_passed"]
        names = {check["name"] for check in report["checks"]}
        assert "zone_degenerate_no_overlap" in names


class TestModesimCommand:
    def test_oracle_table(self, tmp_path):
        assert main(["modesim", "--out", str(tmp_path), "--k-count", "12",
                     "--k-min", "0.3", "--k-max", "5.0"]) == 0
        lines = read(tmp_path / "modesim.csv").decode().splitlines()
        body = [line for line in lines if not line.startswith("#")]
        assert body[0] == "k,rho_closed,rho_numeric,eig_deviation,power_growth"
        for line in body[1:]:
            fields = line.split(",")
            assert float(fields[3]) <= 1e-10
            assert float(fields[1]) == pytest.approx(float(fields[2]), rel=1e-9)


class TestSchwarzCommand:
    def test_zero_initial_guess_stays_zero(self, tmp_path):
        assert main(["schwarz", "--out", str(tmp_path), "--nx", "20", "--ny", "10",
                     "--initial-error", "0", "--n-iter", "4"]) == 0
        lines = read(tmp_path / "schwarz_history.csv").decode().splitlines()
        body = [line for line in lines if not (line.startswith("#") or
                                               line.startswith("iter,"))]
        assert len(body) == 5
        for line in body:
            assert float(line.split(",")[1]) == 0.0

    def test_deterministic_artifacts(self, tmp_path):
        args = ["schwarz", "--nx", "20", "--ny", "10", "--n-iter", "3"]
        assert main(args + ["--out", str(tmp_path / "a")]) == 0
        assert main(args + ["--out", str(tmp_path / "b")]) == 0
        for name in ("schwarz_history.csv", "schwarz_final.csv", "schwarz_final.bin"):
            assert read(tmp_path / "a" / name) == read(tmp_path / "b" / name)

    def test_off_grid_midline_exits_2(self, tmp_path, capsys):
        code = main(["schwarz", "--out", str(tmp_path), "--nx", "21", "--ny", "10"])
        assert code == 2
        assert "midline" in capsys.readouterr().err

    def test_writes_field_artifacts(self, tmp_path):
        assert main(["schwarz", "--out", str(tmp_path), "--nx", "20", "--ny", "10",
                     "--n-iter", "2"]) == 0
        from elastic_schwarz.fem import read_solution_binary

        meta, table = read_solution_binary(tmp_path / "schwarz_final.bin")
        assert meta["nx"] == 20 and meta["ny"] == 10
        csv_lines = read(tmp_path / "schwarz_final.csv").decode().splitlines()
        data = [line for line in csv_lines if not line.startswith(("#", "node"))]
        assert len(data) == meta["n_nodes"] == table.shape[0]


class TestSpectrumCommand:
    def test_single_domain_flag_gives_unit_spectrum(self, tmp_path):
        assert main(["spectrum", "--out", str(tmp_path), "--nx", "12", "--ny", "6",
                     "--single-domain"]) == 0
        rows = [line.split(",") for line in
                read(tmp_path / "spectrum.csv").decode().splitlines()
                if not line.startswith(("#", "re,"))]
        eigs = np.array([[float(a), float(b)] for a, b in rows])
        assert np.abs(eigs[:, 0] - 1.0).max() < 1e-8
        assert np.abs(eigs[:, 1]).max() < 1e-8

    def test_budget_exceeded_exits_4(self, tmp_path, capsys):
        assert main(["spectrum", "--out", str(tmp_path),
                     "--nx", "140", "--ny", "72"]) == 4
        assert "coarser" in capsys.readouterr().err


class TestGmresCommand:
    def test_identity_flag_converges_immediately(self, tmp_path):
        assert main(["gmres", "--out", str(tmp_path), "--nx", "12", "--ny", "6",
                     "--identity-system", "--single-domain"]) == 0
        lines = read(tmp_path / "gmres_history.csv").decode().splitlines()
        assert "# converged=true" in lines
        body = [line for line in lines if not (line.startswith("#") or
                                               line.startswith("iter,"))]
        assert len(body) == 2  # start plus one iteration

    def test_histories_written(self, tmp_path):
        assert main(["gmres", "--out", str(tmp_path), "--nx", "20", "--ny", "10"]) == 0
        for name in ("gmres_history.csv", "ras_history.csv"):
            lines = read(tmp_path / name).decode().splitlines()
            body = [line for line in lines if not (line.startswith("#") or
                                                   line.startswith("iter,"))]
            assert float(body[0].split(",")[1]) == 1.0
