"""
Eigensystems, spectral deformation, gaps and ground states
"""
import numpy as np
import pytest

from sensornet.config import SpinSystemParams
from sensornet.errors import ConfigurationError, NumericalFailure
from sensornet.graph_topology import Graph, GraphKind, standard_graph
from sensornet.ising_hamiltonian import build_tfim
from sensornet.spectral_analysis import (
    eigensystem,
    energy_gap,
    ground_state,
    lowest_levels,
    spectral_deformation_dn,
)


class TestEigensystem:
    def test_ascending_and_orthonormal(self, complete4):
        spectrum = eigensystem(build_tfim(complete4, SpinSystemParams(h=0.4)))
        assert np.all(np.diff(spectrum.eigenvalues) >= 0)
        np.testing.assert_allclose(spectrum.eigenvectors.T @ spectrum.eigenvectors, np.eye(16), atol=1e-12)

    def test_non_symmetric_rejected(self):
        with pytest.raises(NumericalFailure):
            eigensystem(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_non_square_rejected(self):
        with pytest.raises(NumericalFailure):
            eigensystem(np.zeros((2, 3)))


class TestSpectralDeformation:
    def test_single_spin(self):
        assert spectral_deformation_dn(Graph(1), SpinSystemParams(h=0.05)) == pytest.approx(0.05 * np.sqrt(2), abs=1e-9)

    def test_zero_field_gives_zero(self, complete4):
        assert spectral_deformation_dn(complete4, SpinSystemParams(h=0.0)) == 0.0

    def test_even_in_field(self, complete4):
        p = SpinSystemParams(h=0.2)
        assert spectral_deformation_dn(complete4, p) == pytest.approx(
            spectral_deformation_dn(complete4, p.with_field(-0.2)), abs=1e-12
        )

    def test_invariant_under_relabeling(self):
        g = Graph(4, ((0, 1), (1, 2), (1, 3)))
        p = SpinSystemParams()
        assert spectral_deformation_dn(g, p) == pytest.approx(spectral_deformation_dn(g.relabel([3, 0, 2, 1]), p), abs=1e-12)

    def test_levels_beyond_dimension_rejected(self):
        with pytest.raises(ConfigurationError):
            spectral_deformation_dn(Graph(1), SpinSystemParams(dn_levels=3))

    def test_zero_field_levels_sorted_diagonal(self, complete4):
        levels = lowest_levels(complete4, SpinSystemParams(h=0.0), 3)
        # antiferromagnetic K4: six configurations with two spins down share the minimum
        np.testing.assert_allclose(levels, [-1.0, -1.0, -1.0])


class TestGapAndGroundState:
    def test_two_spin_gap(self):
        gap = energy_gap(build_tfim(standard_graph(GraphKind.COMPLETE, 2), SpinSystemParams(h=0.1)))
        assert gap == pytest.approx(np.sqrt(0.29) - 0.5, abs=1e-9)

    def test_gap_accepts_spectrum(self, single_edge):
        spectrum = eigensystem(build_tfim(single_edge, SpinSystemParams(h=0.1)))
        assert energy_gap(spectrum) == pytest.approx(0.0385164807, abs=1e-9)

    def test_ground_state_is_positive_and_normalized(self, complete4):
        ground = ground_state(build_tfim(complete4, SpinSystemParams(h=0.3)))
        assert np.linalg.norm(ground.vector) == pytest.approx(1.0)
        assert np.all(ground.vector > 0)
        assert not ground.degenerate

    def test_degenerate_ground_level_flagged(self, complete4):
        ground = ground_state(build_tfim(complete4, SpinSystemParams(h=0.0)))
        assert ground.degenerate
        assert ground.gap == pytest.approx(0.0, abs=1e-12)

    def test_single_edge_ground_amplitudes(self, single_edge):
        vector = ground_state(build_tfim(single_edge, SpinSystemParams(h=0.05))).vector
        # (|00> + |11>)/sqrt(2) and (|01> + |10>)/sqrt(2) components
        aligned = (vector[0] + vector[3]) / np.sqrt(2)
        anti_aligned = (vector[1] + vector[2]) / np.sqrt(2)
        assert aligned == pytest.approx(0.0985376, abs=1e-7)
        assert anti_aligned == pytest.approx(0.9951323, abs=1e-7)
        assert vector[0] == pytest.approx(vector[3]) and vector[1] == pytest.approx(vector[2])
