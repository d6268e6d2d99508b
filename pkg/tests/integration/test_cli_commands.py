"""
End-to-end command runs writing into temporary directories
"""
import numpy as np
import orjson
import pandas as pd
import pytest

from sensornet.cli import main
from sensornet.record_export import sidecar_path, write_series


def run(tmp_path, *argv) -> int:
    return main(["--log-level", "WARNING", *argv, "--out", str(tmp_path)])


class TestSingleGraphCommands:
    def test_dn_single_spin(self, tmp_path, capsys):
        assert run(tmp_path, "dn", "--n", "1") == 0
        assert orjson.loads(capsys.readouterr().out)["dn"] == pytest.approx(0.0707107, abs=1e-7)
        assert (tmp_path / "dn.csv").exists()
        assert sidecar_path(tmp_path / "dn.csv").exists()

    def test_qfi_single_spin(self, tmp_path, capsys):
        assert run(tmp_path, "qfi", "--n", "1") == 0
        assert orjson.loads(capsys.readouterr().out)["qfi"] == pytest.approx(108.19, abs=0.01)

    def test_gap(self, tmp_path):
        assert run(tmp_path, "gap", "--n", "2", "--h", "0.1") == 0
        frame = pd.read_csv(tmp_path / "gap.csv")
        assert frame["gap"][0] == pytest.approx(np.sqrt(0.29) - 0.5, abs=1e-9)

    def test_varmx(self, tmp_path):
        assert run(tmp_path, "varmx", "--n", "3", "--t", "0.5", "--format", "json") == 0
        rows = orjson.loads((tmp_path / "varmx.json").read_bytes())["rows"]
        assert rows[0]["var_mx"] > 0


class TestGaCommand:
    def test_ga_writes_records(self, tmp_path):
        assert run(tmp_path, "ga", "--n", "3", "--pop", "8", "--gens", "3", "--seed", "4") == 0
        assert (tmp_path / "ga_run_n3_seed4.json").exists()
        assert (tmp_path / "best_graph_n3_seed4.json").exists()
        frame = pd.read_csv(tmp_path / "ga_summary.csv")
        assert list(frame.columns) == ["N", "first_hit_generation", "best_dn", "best_qfi"]

    def test_ga_outputs_carry_provenance(self, tmp_path):
        assert run(tmp_path, "ga", "--n", "3", "--pop", "4", "--gens", "1", "--seed", "4") == 0
        for name in ("ga_run_n3_seed4.json", "best_graph_n3_seed4.json", "ga_summary.csv"):
            meta = orjson.loads(sidecar_path(tmp_path / name).read_bytes())
            assert meta["seed"] == 4
            assert meta["command"] == "ga"
            assert meta["config"]["population"] == 4


class TestSweeps:
    def test_gap_vs_n(self, tmp_path):
        assert run(tmp_path, "sweep", "gap-vs-n", "--h", "0.1", "--n-min", "2", "--n-max", "6") == 0
        frame = pd.read_csv(tmp_path / "gap_vs_n.csv")
        two = frame[frame["N"] == 2]
        assert set(two["family"]) == {"cycle", "complete"}
        np.testing.assert_allclose(two["gap"], 0.0385165, atol=1e-7)

    def test_t0_scaling(self, tmp_path):
        assert run(tmp_path, "t0-scaling", "--n-min", "2", "--n-max", "6") == 0
        frame = pd.read_csv(tmp_path / "t0_scaling.csv")
        row = frame[(frame["scaling"] == "bare") & (frame["N"] == 2)].iloc[0]
        assert row["f_q"] == pytest.approx(15.38462, abs=1e-5)
        assert row["xi2"] == pytest.approx(7.69231, abs=1e-5)
        meta = orjson.loads(sidecar_path(tmp_path / "t0_scaling.csv").read_bytes())
        assert set(meta["summary"]) == {"bare", "kac"}

    def test_dn_qfi_vs_n_first_row(self, tmp_path):
        argv = ["sweep", "dn-qfi-vs-n", "--n-min", "1", "--n-max", "3", "--pop", "10", "--gens", "3", "--temperatures", "0.08",
                "--seed", "0"]
        assert run(tmp_path, *argv) == 0
        frame = pd.read_csv(tmp_path / "dn_qfi_vs_n.csv")
        first = frame[frame["N"] == 1].iloc[0]
        assert first["best_dn"] == pytest.approx(0.0707107, abs=1e-7)
        assert first["qfi"] == pytest.approx(108.19, abs=0.01)
        assert (tmp_path / "ga_records_T0.08" / "ga_summary.csv").exists()

    def test_csv_bodies_are_deterministic(self, tmp_path):
        argv = ["sweep", "h-sweep", "--n-min", "2", "--n-max", "4", "--pop", "8", "--gens", "3", "--seed", "7",
                "--h-values", "0.05", "0.5"]
        assert run(tmp_path / "a", *argv) == 0
        assert run(tmp_path / "b", *argv) == 0
        assert (tmp_path / "a" / "h_sweep.csv").read_bytes() == (tmp_path / "b" / "h_sweep.csv").read_bytes()

    def test_husimi(self, tmp_path):
        argv = ["husimi", "--n", "4", "--theta-samples", "91", "--phi-samples", "181"]
        assert run(tmp_path, *argv) == 0
        assert (tmp_path / "husimi_grid.csv").exists()
        meta = orjson.loads(sidecar_path(tmp_path / "husimi_profile.csv").read_bytes())
        assert meta["summary"]["normalization"] == pytest.approx(0.8, abs=2e-3)

    def test_varmx_and_rescaled(self, tmp_path):
        assert run(tmp_path, "sweep", "varmx-vs-n", "--n-min", "1", "--n-max", "4", "--t", "0.5") == 0
        assert run(tmp_path, "sweep", "rescaled-qfi", "--n-min", "1", "--n-max", "4", "--t", "2") == 0
        frame = pd.read_csv(tmp_path / "rescaled_qfi.csv")
        np.testing.assert_allclose(frame["qfi_per_n"] * frame["N"], frame["qfi"])

    def test_fits(self, tmp_path):
        Ns = np.arange(2, 12)
        series = write_series(Ns, 0.5 * Ns ** 1.7, tmp_path / "series.csv")
        assert run(tmp_path, "sweep", "fits", "--series", str(series)) == 0
        frame = pd.read_csv(tmp_path / "fits.csv")
        power = frame[(frame["kind"] == "power_law") & (frame["parity"] == "all")].iloc[0]
        assert power["exponent"] == pytest.approx(1.7, abs=1e-9)


class TestFitAndNetworkCommands:
    def test_fit_power_law(self, tmp_path, capsys):
        Ns = np.arange(2, 10)
        series = write_series(Ns, Ns ** 2.0, tmp_path / "series.csv")
        assert run(tmp_path, "fit", "--series", str(series), "--power-law", "--parity", "even") == 0
        assert orjson.loads(capsys.readouterr().out)["exponent"] == pytest.approx(2.0, abs=1e-9)
        assert (tmp_path / "fit.json").exists()

    def test_train_then_predict(self, tmp_path):
        Ns = np.arange(1, 12)
        series = write_series(Ns, 0.1 * Ns, tmp_path / "series.csv")
        assert run(tmp_path, "nn-train", "--series", str(series), "--parity", "odd", "--epochs", "300", "--seed", "0") == 0
        model = tmp_path / "model_dn_odd.json"
        assert model.exists()
        assert run(tmp_path, "nn-predict", "--model", str(model), "--n-min", "13", "--n-max", "21") == 0
        frame = pd.read_csv(tmp_path / "predictions_dn_odd.csv")
        assert list(frame["N"]) == [13, 15, 17, 19, 21]
        assert np.all(np.isfinite(frame["prediction"]))


class TestExitCodes:
    def test_unknown_sweep(self, tmp_path):
        assert run(tmp_path, "sweep", "bogus") == 2

    def test_invalid_range(self, tmp_path):
        assert run(tmp_path, "sweep", "gap-vs-n", "--n-min", "5", "--n-max", "3") == 2

    def test_size_cap(self, tmp_path):
        assert run(tmp_path, "dn", "--n", "14") == 2

    def test_thermal_command_at_zero_temperature(self, tmp_path):
        assert run(tmp_path, "qfi", "--n", "2", "--t", "0") == 2

    def test_missing_series_file(self, tmp_path):
        assert run(tmp_path, "fit", "--series", str(tmp_path / "absent.csv")) == 4

    def test_size_cap_applies_to_size_sweeps(self, tmp_path):
        assert run(tmp_path, "sweep", "gap-vs-n", "--n-min", "2", "--n-max", "14") == 2

    def test_extrapolation_range_is_not_capped(self, tmp_path):
        Ns = np.arange(2, 13, 2)
        series = write_series(Ns, 0.05 * Ns, tmp_path / "series.csv")
        assert run(tmp_path, "nn-train", "--series", str(series), "--parity", "even", "--epochs", "50", "--seed", "1") == 0
        argv = ["nn-predict", "--model", str(tmp_path / "model_dn_even.json"), "--n-min", "14", "--n-max", "40"]
        assert run(tmp_path, *argv) == 0
        assert list(pd.read_csv(tmp_path / "predictions_dn_even.csv")["N"]) == list(range(14, 41, 2))

    @pytest.mark.parametrize("argv", [
        ["ga", "--n", "3", "--pop", "4", "--gens", "1"],
        ["sweep", "h-sweep", "--n-min", "2", "--n-max", "3", "--pop", "4", "--gens", "1"],
        ["sweep", "dn-qfi-vs-n", "--n-min", "1", "--n-max", "2", "--pop", "4", "--gens", "1"],
    ])
    def test_stochastic_commands_need_seed(self, tmp_path, argv):
        assert run(tmp_path, *argv) == 2
        assert not list(tmp_path.glob("*.json")) and not list(tmp_path.glob("*.csv"))

    def test_training_needs_seed(self, tmp_path):
        series = write_series(np.arange(1, 8, 2), [0.1, 0.3, 0.5, 0.7], tmp_path / "series.csv")
        assert run(tmp_path, "nn-train", "--series", str(series), "--parity", "odd", "--epochs", "10") == 2
        assert not (tmp_path / "model_dn_odd.json").exists()

    def test_seed_beyond_64_bits(self, tmp_path):
        assert run(tmp_path, "ga", "--n", "2", "--pop", "4", "--gens", "1", "--seed", str(2 ** 64)) == 2
