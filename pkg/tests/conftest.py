"""
Shared fixtures for the sensornet test suite
"""
import numpy as np
import pytest

from sensornet.config import SpinSystemParams, get_settings
from sensornet.graph_topology import Graph, GraphKind, random_connected_init, standard_graph


@pytest.fixture(autouse=True)
def _fresh_settings(monkeypatch):
    """Tests see the default environment regardless of the caller's shell"""
    for name in ("SENSORNET_MAX_SPINS", "SENSORNET_LOG_LEVEL", "SENSORNET_WORKERS", "SENSORNET_OUTPUT_DIR"):
        monkeypatch.delenv(name, raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def default_params() -> SpinSystemParams:
    return SpinSystemParams()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def single_edge() -> Graph:
    return Graph(2, ((0, 1),))


@pytest.fixture
def complete4() -> Graph:
    return standard_graph(GraphKind.COMPLETE, 4)


@pytest.fixture
def small_graph_corpus() -> list:
    """Twenty-four seeded random connected graphs on 3..6 nodes"""
    generator = np.random.default_rng(7)
    return [
        random_connected_init(n, n, generator)
        for n in (3, 4, 5, 6)
        for _ in range(6)
    ]
