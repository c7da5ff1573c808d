import json
from pathlib import Path

import numpy as np
import pytest

from schurdyn.cli import main as cli_main
from schurdyn.errors import ValidationError
from schurdyn.harness import (
    CSV_COLUMNS,
    ExperimentConfig,
    load_preset,
    preset_names,
    run_experiment,
    run_sweep,
)

DATA = Path(__file__).parent / "data"


def quick_cfg(**overrides):
    raw = {
        "name": "golden",
        "model": "ep2",
        "c": 2.0,
        "timescale": 25.0,
        "cycles": 1,
        "steps": 2048,
        "init": "decaying",
        "tiers": ["exact", "subleading"],
        "emit": "csv",
    }
    raw.update(overrides)
    return ExperimentConfig(raw)


class TestConfig:
    def test_unknown_keys_rejected(self):
        with pytest.raises(ValidationError, match="unknown config keys"):
            ExperimentConfig({"name": "x", "frobnicate": 1})

    def test_unknown_tier_rejected(self):
        with pytest.raises(ValidationError):
            ExperimentConfig({"tiers": ["exact", "bogus"]})

    def test_unknown_init_rejected(self):
        with pytest.raises(ValidationError):
            ExperimentConfig({"init": "sideways"})

    def test_exact_tier_always_present(self):
        cfg = ExperimentConfig({"tiers": ["subleading"]})
        assert cfg.tiers[0] == "exact"

    def test_presets_ship_with_package(self):
        assert set(preset_names()) >= {"fig1", "fig2", "fig3", "fig4"}
        cfg = load_preset("fig2")
        assert cfg.raw["c"] == 2.0 and cfg.raw["timescale"] == 50.0
        with pytest.raises(ValidationError):
            load_preset("fig9")


@pytest.fixture(scope="module")
def run_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("golden_run")
    summary = run_experiment(quick_cfg(), out)
    return out, summary


class TestRunExperiment:

    def test_files_written(self, run_dir):
        out, summary = run_dir
        names = {p.name for p in out.iterdir()}
        assert {"golden_exact.csv", "golden_subleading.csv",
                "golden_summary.json"} <= names

    def test_csv_schema_and_golden_head(self, run_dir):
        out, _ = run_dir
        for tier in ("exact", "subleading"):
            got = (out / f"golden_{tier}.csv").read_text().splitlines()
            assert got[0] == ",".join(CSV_COLUMNS)
            golden = (DATA / f"golden_{tier}_head.csv").read_text().splitlines()
            assert got[:4] == golden

    def test_exact_tier_q_fields_empty(self, run_dir):
        out, _ = run_dir
        row = (out / "golden_exact.csv").read_text().splitlines()[1].split(",")
        idx_qa = CSV_COLUMNS.index("abs_q_a")
        assert row[idx_qa] == "" and row[idx_qa + 1] == ""

    def test_deterministic_outputs(self, run_dir, tmp_path):
        out, _ = run_dir
        run_experiment(quick_cfg(), tmp_path)
        for tier in ("exact", "subleading"):
            a = (out / f"golden_{tier}.csv").read_bytes()
            b = (tmp_path / f"golden_{tier}.csv").read_bytes()
            assert a == b

    def test_summary_contents(self, run_dir):
        _, summary = run_dir
        assert "subleading" in summary["tiers"]
        info = summary["tiers"]["subleading"]
        assert "max_rel_err_abs_q_a" in info
        assert "min_fidelity_after_2pct" in info
        assert summary["transitions"]["exact"]
        assert summary["runtime_seconds"] > 0

    def test_json_emission(self, tmp_path):
        run_experiment(quick_cfg(emit="json", tiers=["exact"], name="jrun"), tmp_path)
        records = json.loads((tmp_path / "jrun_exact.json").read_text())
        assert list(records[0].keys()) == CSV_COLUMNS

    def test_exact_series_grid_converged(self, tmp_path):
        # doubling the step count moves the emitted state columns by the
        # integrator's second-order error, which shrinks ~4x per doubling
        run_experiment(quick_cfg(name="a", steps=2048, tiers=["exact"]), tmp_path)
        run_experiment(quick_cfg(name="b", steps=4096, tiers=["exact"]), tmp_path)
        run_experiment(quick_cfg(name="c", steps=8192, tiers=["exact"]), tmp_path)
        ix = CSV_COLUMNS.index("x_state")

        def col(name, stride):
            rows = (tmp_path / f"{name}_exact.csv").read_text().splitlines()[1:]
            return np.array([float(r.split(",")[ix]) for r in rows[::stride]])

        xa, xb, xc = col("a", 1), col("b", 2), col("c", 4)
        diff_ab = np.abs(xa - xb).max()
        diff_bc = np.abs(xb - xc).max()
        assert diff_ab < 2e-3
        assert diff_ab / diff_bc > 3.0


class TestSweep:
    def test_timescale_sweep_error_decreases(self, tmp_path):
        base = quick_cfg(name="sw", steps=2048, timescale=None)
        del base.raw["timescale"]
        summary = run_sweep(base, "timescale", [12.5, 25.0], tmp_path)
        errs = [m["subleading_max_rel_err_abs_q_a"] for m in summary["members"]]
        assert errs[1] < errs[0]
        assert (tmp_path / "sw_sweep_summary.json").exists()


class TestCli:
    def test_figure_preset(self, tmp_path):
        rc = cli_main(["figure", "fig2", "--out", str(tmp_path)])
        assert rc == 0
        names = {p.name for p in tmp_path.iterdir()}
        assert {"fig2_exact.csv", "fig2_subleading.csv", "fig2_leading.csv",
                "fig2_summary.json"} <= names

    def test_evolve_matches_preset_pipeline(self, tmp_path):
        rc = cli_main([
            "evolve", "--c", "2", "--T", "25", "--cycles", "1",
            "--init", "decaying", "--tier", "subleading",
            "--steps", "2048", "--name", "golden", "--out", str(tmp_path),
        ])
        assert rc == 0
        got = (tmp_path / "golden_subleading.csv").read_text().splitlines()[:4]
        golden = (DATA / "golden_subleading_head.csv").read_text().splitlines()
        assert got == golden

    def test_schur_subcommand(self, tmp_path, capsys):
        mfile = tmp_path / "m.json"
        mfile.write_text("[[1, [0, 1]], [0, 3]]")
        rc = cli_main(["schur", "--matrix", str(mfile)])
        assert rc == 0
        out = capsys.readouterr().out
        assert "U =" in out and "A =" in out and "eigenvalues:" in out

    def test_validation_error_exit_code(self, tmp_path, capsys):
        rc = cli_main(["evolve", "--steps", "10", "--out", str(tmp_path)])
        assert rc == 1

    def test_numerical_error_exit_code(self, tmp_path, capsys):
        mfile = tmp_path / "m.json"
        mfile.write_text("[[0, 1], [0, 0]]")  # defective: double eigenvalue 0
        rc = cli_main(["schur", "--matrix", str(mfile)])
        assert rc == 2

    def test_usage_error_exit_code(self):
        with pytest.raises(SystemExit) as exc:
            cli_main(["evolve", "--tier", "bogus"])
        assert exc.value.code == 1

    def test_tol_override(self, tmp_path):
        mfile = tmp_path / "m.json"
        mfile.write_text("[[1, 2], [0, 3]]")
        rc = cli_main(["schur", "--matrix", str(mfile), "--tol", "schur_check=1e-8"])
        assert rc == 0
        rc = cli_main(["schur", "--matrix", str(mfile), "--tol", "nonsense=1"])
        assert rc == 1
