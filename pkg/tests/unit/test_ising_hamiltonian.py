"""
Dense TFIM assembly and the shared basis convention
"""
import numpy as np
import pytest

from sensornet.config import CouplingScaling, SpinSystemParams
from sensornet.errors import ConfigurationError, DisconnectedGraphError, SizeCapExceeded
from sensornet.graph_topology import Graph, GraphKind, standard_graph
from sensornet.ising_hamiltonian import build_tfim, collective_mx, effective_coupling, ising_diagonal, spin_signs


def test_effective_coupling():
    assert effective_coupling(-1.0, 4, CouplingScaling.BARE) == -0.5
    assert effective_coupling(-1.0, 4, "kac") == pytest.approx(-0.125)
    with pytest.raises(ConfigurationError):
        effective_coupling(-1.0, 0, "bare")


def test_node_zero_is_most_significant_bit():
    z = spin_signs(3)
    # basis index 4 = 0b100: node 0 down, nodes 1 and 2 up
    assert list(z[:, 4]) == [-1, 1, 1]
    assert list(z[:, 0]) == [1, 1, 1]
    assert list(z[:, 7]) == [-1, -1, -1]


def test_ising_diagonal_single_edge():
    diagonal = ising_diagonal(Graph(2, ((0, 1),)), -0.5)
    np.testing.assert_allclose(diagonal, [0.5, -0.5, -0.5, 0.5])


def test_collective_mx_structure():
    mx = collective_mx(3)
    assert mx.shape == (8, 8)
    np.testing.assert_array_equal(mx, mx.T)
    assert np.all(mx.sum(axis=0) == 3)
    assert mx[0, 4] == 1.0 and mx[0, 1] == 1.0 and mx[0, 3] == 0.0


def test_single_spin_hamiltonian():
    H = build_tfim(Graph(1), SpinSystemParams(h=0.05))
    np.testing.assert_allclose(H.entries, [[0.0, -0.05], [-0.05, 0.0]])
    assert H.n_spins == 1 and H.dim == 2


def test_single_edge_spectrum():
    H = build_tfim(Graph(2, ((0, 1),)), SpinSystemParams(J=-1.0, h=0.05))
    eigenvalues = np.linalg.eigvalsh(H.entries)
    expected = sorted([-np.sqrt(0.26), -0.5, 0.5, np.sqrt(0.26)])
    np.testing.assert_allclose(eigenvalues, expected, atol=1e-9)


def test_hamiltonian_is_symmetric_and_real(complete4):
    H = build_tfim(complete4, SpinSystemParams(h=0.3, scaling="kac"))
    assert H.entries.dtype == np.float64
    np.testing.assert_array_equal(H.entries, H.entries.T)


def test_zero_field_is_diagonal(complete4):
    H = build_tfim(complete4, SpinSystemParams(h=0.0))
    assert np.count_nonzero(H.entries - np.diag(np.diag(H.entries))) == 0


def test_disconnected_graph_rejected():
    with pytest.raises(DisconnectedGraphError):
        build_tfim(Graph(3, ((0, 1),)), SpinSystemParams())


def test_size_cap_enforced():
    with pytest.raises(SizeCapExceeded) as excinfo:
        build_tfim(standard_graph(GraphKind.PATH, 5), SpinSystemParams(max_spins=4))
    assert excinfo.value.cap == 4
    assert excinfo.value.exit_code == 2


def test_field_derivative_is_minus_mx(complete4):
    lower = build_tfim(complete4, SpinSystemParams(h=0.2)).entries
    upper = build_tfim(complete4, SpinSystemParams(h=0.35)).entries
    np.testing.assert_allclose((upper - lower) / 0.15, -collective_mx(4), atol=1e-12)


@pytest.mark.parametrize("kind", [GraphKind.PATH, GraphKind.CYCLE, GraphKind.COMPLETE])
def test_traceless(kind):
    H = build_tfim(standard_graph(kind, 4), SpinSystemParams(h=0.3))
    assert np.trace(H.entries) == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("n", [1, 3, 5])
def test_single_flip_entries_above_diagonal(n):
    H = build_tfim(standard_graph(GraphKind.PATH, n), SpinSystemParams(h=0.05)).entries
    upper = H[np.triu_indices(2 ** n, k=1)]
    flips = upper[upper != 0]
    assert flips.size == n * 2 ** (n - 1)
    np.testing.assert_array_equal(flips, -0.05)


def test_node_relabeling_permutes_basis():
    g = standard_graph(GraphKind.PATH, 4)
    permutation = [2, 0, 3, 1]
    p = SpinSystemParams(h=0.2)
    original = build_tfim(g, p).entries
    relabeled = build_tfim(g.relabel(permutation), p).entries

    # basis state b, read node by node, is state `moved[b]` after the relabeling
    moved = np.zeros(16, dtype=int)
    for b in range(16):
        for node in range(4):
            bit = (b >> (3 - node)) & 1
            moved[b] |= bit << (3 - permutation[node])
    np.testing.assert_allclose(relabeled[np.ix_(moved, moved)], original, atol=1e-12)
    np.testing.assert_allclose(np.linalg.eigvalsh(relabeled), np.linalg.eigvalsh(original), atol=1e-10)
