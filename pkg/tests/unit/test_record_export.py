"""
CSV/JSON emission, provenance sidecars and GA record export
"""
import orjson
import pandas as pd
import pytest

from sensornet.errors import ConfigurationError, PersistenceError
from sensornet.genetic_topology_optimizer import GaConfig, evolve
from sensornet.ground_state_metrology import polynomial_fit
from sensornet.record_export import (
    AGGREGATE_FILENAME,
    export_records,
    load_record,
    read_series,
    sidecar_path,
    write_fit,
    write_series,
    write_table,
)


def test_empty_export_writes_header_only(tmp_path):
    export_records([], tmp_path)
    assert (tmp_path / AGGREGATE_FILENAME).read_text().strip() == "N,first_hit_generation,best_dn,best_qfi"


def test_single_run_export(tmp_path):
    record = evolve(GaConfig(n=1, population=4, generations=2, seed=5))
    written = export_records([record], tmp_path)
    assert len(written) == 2

    frame = pd.read_csv(tmp_path / AGGREGATE_FILENAME)
    assert list(frame["N"]) == [1]
    assert list(frame["first_hit_generation"]) == [0]

    loaded = load_record(written[0])
    assert loaded.seed == 5
    assert loaded.graph() == record.graph()

    for path in written:
        meta = orjson.loads(sidecar_path(path).read_bytes())
        assert meta["seed"] == 5
        assert meta["config"]["n"] == 1


def test_table_sidecar_has_provenance(tmp_path):
    path = write_table(pd.DataFrame({"N": [1, 2], "value": [0.5, 0.25]}), tmp_path / "t.csv", "test", {"h": 0.05}, seed=9)
    meta = orjson.loads(sidecar_path(path).read_bytes())
    assert meta["seed"] == 9
    assert meta["config"] == {"h": 0.05}
    assert meta["command"] == "test"
    assert {"numpy", "scipy", "networkx", "pandas", "sensornet"} <= set(meta["versions"])


def test_csv_bodies_are_reproducible(tmp_path):
    frame = pd.DataFrame({"N": [1, 2, 3], "value": [1 / 3, 2 / 3, 0.1]})
    first = write_table(frame, tmp_path / "a.csv", "test", {}, seed=1)
    second = write_table(frame, tmp_path / "b.csv", "test", {}, seed=1)
    assert first.read_bytes() == second.read_bytes()
    assert "0.333333333333" in first.read_text()


def test_json_format(tmp_path):
    path = write_table(pd.DataFrame({"N": [1]}), tmp_path / "a.json", "test", {}, seed=1, fmt="json")
    assert orjson.loads(path.read_bytes())["rows"] == [{"N": 1}]


def test_unknown_format(tmp_path):
    with pytest.raises(ConfigurationError):
        write_table(pd.DataFrame(), tmp_path / "a.xml", "test", {}, fmt="xml")


def test_series_round_trip(tmp_path):
    path = write_series([2, 3, 4], [1.5, 2.5, 3.5], tmp_path / "s.csv")
    assert read_series(path) == ([2, 3, 4], [1.5, 2.5, 3.5])


def test_series_missing_columns(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,y\n1,2\n")
    with pytest.raises(ConfigurationError):
        read_series(path)


def test_missing_series_file(tmp_path):
    with pytest.raises(PersistenceError) as excinfo:
        read_series(tmp_path / "absent.csv")
    assert excinfo.value.path == tmp_path / "absent.csv"


def test_fit_json(tmp_path):
    path = write_fit(polynomial_fit([1, 2, 3], [2, 4, 6], 1), tmp_path / "fit.json")
    data = orjson.loads(path.read_bytes())
    assert data["kind"] == "polynomial"
    assert data["coefficients"][1] == pytest.approx(2.0)


def test_unwritable_target(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(PersistenceError):
        write_series([1], [1.0], blocker / "sub" / "s.csv")
