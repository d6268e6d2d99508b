"""
Gibbs-state quantities for field sensing.

All quantities are taken with respect to the transverse field h. The
Hamiltonian is affine in h with dH/dh = -M_x, so the field generator
X = -M_x is exact; no numerical derivative enters the SLD construction.
"""
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
from scipy.special import logsumexp

from .config import SpinSystemParams
from .errors import ConfigurationError, NumericalFailure
from .graph_topology import Graph
from .ising_hamiltonian import build_tfim, collective_mx
from .spectral_analysis import Spectrum, eigensystem

logger = logging.getLogger(__name__)

KERNEL_DEGENERACY = 1e-12


@dataclass(frozen=True)
class GibbsEnsemble:
    """Boltzmann populations over an ascending spectrum"""
    probabilities: np.ndarray
    log_partition: float
    beta: float
    spectrum: Spectrum

    @property
    def log_probabilities(self) -> np.ndarray:
        """g_j = -beta * E_j - ln Z"""
        return -self.beta * self.spectrum.eigenvalues - self.log_partition


@dataclass(frozen=True)
class QfiValue:
    """Fisher information with its population and coherence parts"""
    value: float
    classical: float
    coherent: float


@dataclass(frozen=True)
class MagnetizationVariance:
    """Direct Var(M_x) with the fluctuation-dissipation estimate beside it"""
    direct: float
    fdt_estimate: float
    relative_deviation: float
    mean_mx: float
    second_moment: float


def _beta(T: float) -> float:
    if T <= 0:
        raise ConfigurationError(f"Thermal quantities need T > 0, got T={T}")
    return 1.0 / T


def gibbs_weights(spectrum: Spectrum, T: float) -> GibbsEnsemble:
    """Max-shifted Boltzmann weights and ln Z"""
    beta = _beta(T)
    exponents = -beta * spectrum.eigenvalues
    log_partition = float(logsumexp(exponents))
    probabilities = np.exp(exponents - log_partition)
    return GibbsEnsemble(
        probabilities=probabilities,
        log_partition=log_partition,
        beta=beta,
        spectrum=spectrum,
    )


def log_partition_function(g: Graph, p: SpinSystemParams) -> float:
    beta = _beta(p.T)
    energies = la.eigh(build_tfim(g, p).entries, eigvals_only=True)
    return float(logsumexp(-beta * energies))


def sld_kernel(g_values: np.ndarray) -> np.ndarray:
    """f(g_j, g_k) = tanh(d/2) / (d/2) with d = g_j - g_k, and 1 where d ~ 0"""
    half = 0.5 * (g_values[:, None] - g_values[None, :])
    kernel = np.ones_like(half)
    mask = np.abs(2 * half) >= KERNEL_DEGENERACY
    kernel[mask] = np.tanh(half[mask]) / half[mask]
    return kernel


def generator_in_eigenbasis(spectrum: Spectrum, operator: np.ndarray) -> np.ndarray:
    V = spectrum.eigenvectors
    return V.T @ operator @ V


def qfi_from_ensemble(ensemble: GibbsEnsemble, generator: np.ndarray) -> QfiValue:
    """SLD Fisher information of a Gibbs state for a field coupling to `generator`.

    `generator` is dH/dh expressed in the energy eigenbasis.
    """
    p = ensemble.probabilities
    beta = ensemble.beta
    diagonal = np.diag(generator)

    g_dot = -beta * generator
    g_dot[np.diag_indices_from(g_dot)] = -beta * (diagonal - p @ diagonal)

    sld = sld_kernel(ensemble.log_probabilities) * g_dot
    weighted = p[:, None] * sld ** 2

    classical = float(np.trace(weighted))
    total = float(weighted.sum())
    return QfiValue(value=total, classical=classical, coherent=total - classical)


def thermal_qfi_sld(g: Graph, p: SpinSystemParams) -> QfiValue:
    """Thermal quantum Fisher information with respect to h"""
    spectrum = eigensystem(build_tfim(g, p))
    ensemble = gibbs_weights(spectrum, p.T)
    generator = generator_in_eigenbasis(spectrum, -collective_mx(g.n, p.size_cap()))
    result = qfi_from_ensemble(ensemble, generator)
    if not np.isfinite(result.value):
        raise NumericalFailure(f"Non-finite QFI for {g} at T={p.T}, h={p.h}")
    return result


def _sqrt_gibbs_state(g: Graph, p: SpinSystemParams) -> np.ndarray:
    spectrum = eigensystem(build_tfim(g, p))
    ensemble = gibbs_weights(spectrum, p.T)
    V = spectrum.eigenvectors
    return (V * np.sqrt(ensemble.probabilities)) @ V.T


def uhlmann_fidelity_root(sqrt_rho1: np.ndarray, sqrt_rho2: np.ndarray) -> float:
    """sqrt(F) = Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)) = nuclear norm of sqrt(rho1) sqrt(rho2)"""
    return float(np.sum(la.svdvals(sqrt_rho1 @ sqrt_rho2)))


def fidelity_qfi_oracle(g: Graph, p: SpinSystemParams, delta: float = 1e-3) -> float:
    """Independent QFI estimate 8 (1 - sqrt F) / delta^2 from neighbouring Gibbs states"""
    if delta == 0:
        raise ConfigurationError("Fidelity oracle needs a non-zero field step")
    _beta(p.T)

    sqrt_lower = _sqrt_gibbs_state(g, p.with_field(p.h - delta / 2))
    sqrt_upper = _sqrt_gibbs_state(g, p.with_field(p.h + delta / 2))
    root_fidelity = uhlmann_fidelity_root(sqrt_lower, sqrt_upper)

    return max(0.0, 8.0 * (1.0 - root_fidelity) / delta ** 2)


def susceptibility_chi_x(g: Graph, p: SpinSystemParams, delta_h: float = 1e-4) -> float:
    """chi_x = (1 / (N beta)) d^2 ln Z / dh^2 by central second difference"""
    if delta_h <= 0:
        raise ConfigurationError(f"Field step must be positive, got {delta_h}")
    beta = _beta(p.T)

    upper = log_partition_function(g, p.with_field(p.h + delta_h))
    centre = log_partition_function(g, p)
    lower = log_partition_function(g, p.with_field(p.h - delta_h))

    curvature = (upper - 2.0 * centre + lower) / delta_h ** 2
    return curvature / (g.n * beta)


def magnetization_variance(g: Graph, p: SpinSystemParams, delta_h: float = 1e-4) -> MagnetizationVariance:
    """Var(M_x) from the Gibbs state, with the FDT estimate (N / beta) chi_x"""
    spectrum = eigensystem(build_tfim(g, p))
    ensemble = gibbs_weights(spectrum, p.T)
    mx = generator_in_eigenbasis(spectrum, collective_mx(g.n, p.size_cap()))

    weights = ensemble.probabilities
    mean_mx = float(weights @ np.diag(mx))
    second_moment = float(weights @ np.sum(mx ** 2, axis=1))
    direct = max(second_moment - mean_mx ** 2, 0.0)

    fdt_estimate = g.n / ensemble.beta * susceptibility_chi_x(g, p, delta_h)
    deviation = abs(fdt_estimate - direct) / direct if direct > 0 else abs(fdt_estimate)

    if deviation > 1e-3:
        logger.debug(f"FDT estimate deviates from direct Var(M_x) by {deviation:.2e} for {g}")

    return MagnetizationVariance(
        direct=direct,
        fdt_estimate=fdt_estimate,
        relative_deviation=deviation,
        mean_mx=mean_mx,
        second_moment=second_moment,
    )


def ground_state_field_qfi(spectrum: Spectrum, mx: np.ndarray) -> float:
    """Pure-state QFI for h: 4 sum_{k>0} |<e_k|M_x|e_0>|^2 / (E_k - E_0)^2"""
    column = spectrum.eigenvectors.T @ (mx @ spectrum.eigenvectors[:, 0])
    gaps = spectrum.eigenvalues[1:] - spectrum.eigenvalues[0]
    if np.any(gaps <= 0):
        raise NumericalFailure("Pure-state field QFI needs a non-degenerate ground level")
    return float(4.0 * np.sum(column[1:] ** 2 / gaps ** 2))
