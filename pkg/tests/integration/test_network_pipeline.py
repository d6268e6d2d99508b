"""
Training the extrapolation network on GA output and predicting larger sizes
"""
import numpy as np
import pytest

from sensornet.genetic_topology_optimizer import GaConfig, evolve
from sensornet.sensitivity_network import TrainConfig, predict_series, split_by_parity, train

# Small GA budget: the N=12 runs dominate, each distinct graph costs one 4096x4096 diagonalization
GA_BUDGET = dict(population=6, generations=2, seed=0)


@pytest.fixture(scope="module")
def ga_series():
    return [(n, evolve(GaConfig(n=n, **GA_BUDGET)).best_dn) for n in range(1, 13)]


@pytest.mark.slow
@pytest.mark.parametrize("parity, horizon", [("odd", range(13, 22, 2)), ("even", range(14, 22, 2))])
def test_ga_data_to_extrapolation(ga_series, parity, horizon):
    data = split_by_parity(ga_series, parity)
    assert [n for n, _ in data] == (list(range(1, 12, 2)) if parity == "odd" else list(range(2, 13, 2)))
    targets = np.array([y for _, y in data])

    model, history = train(data, TrainConfig(seed=0), parity, "dn")
    assert len(history) == 4000
    assert history[-1] < 0.01 * max(targets.var(), 1e-12)

    predictions = predict_series(model, list(horizon))
    assert [n for n, _ in predictions] == list(horizon)
    assert all(np.isfinite(y) for _, y in predictions)
