"""
Eigendecomposition and spectral observables: D_n fitness, energy gap,
ground state.
"""
import logging
from dataclasses import dataclass
from typing import Union

import numpy as np
import scipy.linalg as la

from .config import SpinSystemParams
from .errors import ConfigurationError, NumericalFailure
from .graph_topology import Graph
from .ising_hamiltonian import HamiltonianMatrix, build_tfim

logger = logging.getLogger(__name__)

SYMMETRY_TOLERANCE = 1e-12
DEGENERACY_TOLERANCE = 1e-10


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues with matching orthonormal eigenvector columns"""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]


@dataclass(frozen=True)
class GroundState:
    """Sign-fixed lowest eigenvector plus a degeneracy flag"""
    vector: np.ndarray
    energy: float
    gap: float
    degenerate: bool


def _as_array(H: Union[HamiltonianMatrix, np.ndarray]) -> np.ndarray:
    return H.entries if isinstance(H, HamiltonianMatrix) else np.asarray(H, dtype=float)


def eigensystem(H: Union[HamiltonianMatrix, np.ndarray]) -> Spectrum:
    """Full dense symmetric diagonalization, eigenvalues ascending"""
    matrix = _as_array(H)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise NumericalFailure(f"Expected a square matrix, got shape {matrix.shape}")
    scale = max(1.0, float(np.max(np.abs(matrix)))) if matrix.size else 1.0
    if np.max(np.abs(matrix - matrix.T), initial=0.0) > SYMMETRY_TOLERANCE * scale:
        raise NumericalFailure("Hamiltonian is not symmetric")

    try:
        eigenvalues, eigenvectors = la.eigh(matrix)
    except (la.LinAlgError, ValueError) as e:
        logger.error(f"Dense eigensolver failed on {matrix.shape[0]}x{matrix.shape[0]} matrix: {e}")
        raise NumericalFailure(f"Eigensolver did not converge: {e}") from e

    return Spectrum(eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def lowest_levels(g: Graph, p: SpinSystemParams, count: int) -> np.ndarray:
    """Lowest `count` eigenvalues of the TFIM at field p.h"""
    H = build_tfim(g, p)
    if p.h == 0:
        # H(0) is diagonal
        return np.sort(np.diag(H.entries))[:count]
    return la.eigh(H.entries, eigvals_only=True, subset_by_index=[0, count - 1])


def spectral_deformation_dn(g: Graph, p: SpinSystemParams) -> float:
    """Euclidean distance between the lowest dn_levels eigenvalues at h and at 0"""
    levels = p.dn_levels
    if levels > 2 ** g.n:
        raise ConfigurationError(f"dn_levels={levels} exceeds the dimension 2^{g.n}")

    try:
        perturbed = lowest_levels(g, p, levels)
        unperturbed = lowest_levels(g, p.with_field(0.0), levels)
    except la.LinAlgError as e:
        raise NumericalFailure(f"Eigensolver did not converge for {g}: {e}") from e

    return float(np.sqrt(np.sum((perturbed - unperturbed) ** 2)))


def energy_gap(H: Union[HamiltonianMatrix, np.ndarray, Spectrum]) -> float:
    """E_1 - E_0 of the full spectrum (0 for a degenerate ground level)"""
    spectrum = H if isinstance(H, Spectrum) else eigensystem(H)
    if spectrum.dim < 2:
        raise ConfigurationError("Energy gap needs at least two levels")
    return float(max(spectrum.eigenvalues[1] - spectrum.eigenvalues[0], 0.0))


def fix_sign(vector: np.ndarray) -> np.ndarray:
    """Flip the sign so the largest-magnitude amplitude is positive"""
    pivot = int(np.argmax(np.abs(vector)))
    return -vector if vector[pivot] < 0 else vector


def ground_state(H: Union[HamiltonianMatrix, np.ndarray, Spectrum]) -> GroundState:
    """Unit-norm lowest eigenvector with a deterministic sign"""
    spectrum = H if isinstance(H, Spectrum) else eigensystem(H)
    vector = spectrum.eigenvectors[:, 0]
    vector = fix_sign(vector / np.linalg.norm(vector))

    gap = float(spectrum.eigenvalues[1] - spectrum.eigenvalues[0]) if spectrum.dim > 1 else float("inf")
    degenerate = gap <= DEGENERACY_TOLERANCE
    if degenerate:
        logger.warning(f"Ground level is degenerate (gap={gap:.3e}); representative is arbitrary")

    return GroundState(
        vector=vector,
        energy=float(spectrum.eigenvalues[0]),
        gap=gap,
        degenerate=degenerate,
    )
