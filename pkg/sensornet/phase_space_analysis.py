"""
Spin-coherent-state analysis of ground states.

A coherent state |theta, phi> is the product of cos(theta/2)|0> +
e^{i phi} sin(theta/2)|1> over all spins, so its amplitude on basis state b
depends only on the number k of down spins in b. Overlaps with an arbitrary
state therefore reduce to the n+1 class sums W_k = sum_{popcount(b)=k} psi_b.
"""
import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid

from .config import check_size_cap
from .errors import ConfigurationError
from .ising_hamiltonian import collective_mx, spin_signs

logger = logging.getLogger(__name__)

DEFAULT_THETA_SAMPLES = 181
DEFAULT_PHI_SAMPLES = 361
SYMMETRY_TOLERANCE = 1e-8


@dataclass(frozen=True)
class HusimiGrid:
    """Q(theta, phi) = |<theta, phi|psi>|^2 / pi on a uniform product grid"""
    theta_samples: np.ndarray
    phi_samples: np.ndarray
    q_values: np.ndarray
    n_spins: int
    symmetric: bool
    state: np.ndarray

    def normalization(self) -> float:
        """Quadrature of Q sin(theta) over the sphere"""
        return _sphere_integral(self, np.ones_like(self.q_values))

    def to_frame(self) -> pd.DataFrame:
        theta, phi = np.meshgrid(self.theta_samples, self.phi_samples, indexing="ij")
        return pd.DataFrame({
            "theta": theta.ravel(),
            "phi": phi.ravel(),
            "q": self.q_values.ravel(),
        })


@dataclass(frozen=True)
class EquatorialProfile:
    """|<pi/2, phi|psi>| along the equator"""
    phi: np.ndarray
    abs_overlap: np.ndarray
    argmax_phi: float
    antipodal_ratio: float
    local_maxima: List[float]

    def rows(self) -> List[Tuple[float, float]]:
        return list(zip(self.phi.tolist(), self.abs_overlap.tolist()))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"phi": self.phi, "abs_overlap": self.abs_overlap})


@dataclass(frozen=True)
class HusimiSpinMoments:
    """<S_x> from the Husimi function next to the direct expectation values"""
    sx_exact_symbol: float
    sx_literal_integral: float
    sx_direct: float
    sx2_direct: float
    reliable: bool


def _n_from_dim(state: np.ndarray) -> int:
    dim = state.shape[0]
    n = int(round(np.log2(dim)))
    if 2 ** n != dim:
        raise ConfigurationError(f"State length {dim} is not a power of two")
    return n


def popcounts(n: int) -> np.ndarray:
    """Number of down spins in every basis state"""
    return ((1 - spin_signs(n)) // 2).sum(axis=0)


def class_sums(state: np.ndarray) -> np.ndarray:
    """W_k = sum of amplitudes over basis states with k down spins"""
    n = _n_from_dim(state)
    counts = popcounts(n)
    real = np.bincount(counts, weights=np.real(state), minlength=n + 1)
    imag = np.bincount(counts, weights=np.imag(state), minlength=n + 1)
    return real + 1j * imag


def symmetric_subspace_deviation(state: np.ndarray) -> float:
    """Largest departure of an amplitude from its popcount-class mean"""
    n = _n_from_dim(state)
    counts = popcounts(n)
    sizes = np.bincount(counts, minlength=n + 1)
    means = class_sums(state) / sizes
    return float(np.max(np.abs(state - means[counts])))


def spin_coherent_state(n: int, theta: float, phi: float) -> np.ndarray:
    """Product state with every spin along (theta, phi), complex amplitudes"""
    check_size_cap(n)
    k = popcounts(n)
    up = np.cos(theta / 2)
    down = np.exp(1j * phi) * np.sin(theta / 2)
    return up ** (n - k) * down ** k


def coherent_overlaps(state: np.ndarray, theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """<theta, phi|psi> on the outer product of theta and phi samples"""
    n = _n_from_dim(state)
    sums = class_sums(state)
    k = np.arange(n + 1)

    radial = np.cos(theta[:, None] / 2) ** (n - k) * np.sin(theta[:, None] / 2) ** k
    phases = np.exp(-1j * np.outer(k, phi))
    return (radial * sums) @ phases


def _require_unit(state: np.ndarray) -> None:
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > 1e-8:
        raise ConfigurationError(f"Phase-space analysis needs a unit state, got norm {norm:.10f}")


def husimi_grid(
    state: np.ndarray,
    n_theta: int = DEFAULT_THETA_SAMPLES,
    n_phi: int = DEFAULT_PHI_SAMPLES,
) -> HusimiGrid:
    """Husimi Q-function on a uniform grid including both endpoints"""
    state = np.asarray(state, dtype=complex)
    _require_unit(state)
    if n_theta < 2 or n_phi < 2:
        raise ConfigurationError("Husimi grid needs at least two samples per angle")

    theta = np.linspace(0.0, np.pi, n_theta)
    phi = np.linspace(0.0, 2 * np.pi, n_phi)
    q_values = np.abs(coherent_overlaps(state, theta, phi)) ** 2 / np.pi

    return HusimiGrid(
        theta_samples=theta,
        phi_samples=phi,
        q_values=q_values,
        n_spins=_n_from_dim(state),
        symmetric=symmetric_subspace_deviation(state) <= SYMMETRY_TOLERANCE,
        state=state,
    )


def equatorial_overlap_profile(state: np.ndarray, n_phi: int = DEFAULT_PHI_SAMPLES) -> EquatorialProfile:
    """|<theta=pi/2, phi|psi>| on a uniform phi grid over [0, 2 pi]"""
    state = np.asarray(state, dtype=complex)
    _require_unit(state)
    if n_phi < 2:
        raise ConfigurationError("Equatorial profile needs at least two phi samples")

    phi = np.linspace(0.0, 2 * np.pi, n_phi)
    overlap = np.abs(coherent_overlaps(state, np.array([np.pi / 2]), phi)[0])
    antipodal = np.abs(coherent_overlaps(state, np.array([np.pi / 2]), np.array([0.0, np.pi]))[0])

    # periodic grid: drop the duplicated 2 pi endpoint when scanning for maxima
    ring = overlap[:-1]
    is_peak = (ring >= np.roll(ring, 1)) & (ring >= np.roll(ring, -1)) & (ring > ring.min() + 1e-12)

    return EquatorialProfile(
        phi=phi,
        abs_overlap=overlap,
        argmax_phi=float(phi[int(np.argmax(ring))]),
        antipodal_ratio=float(antipodal[1] / antipodal[0]) if antipodal[0] > 0 else float("inf"),
        local_maxima=[float(x) for x in phi[:-1][is_peak]],
    )


def _sphere_integral(grid: HusimiGrid, weight: np.ndarray) -> float:
    sin_theta = np.sin(grid.theta_samples)[:, None]
    inner = trapezoid(grid.q_values * weight * sin_theta, grid.phi_samples, axis=1)
    return float(trapezoid(inner, grid.theta_samples))


def sx_from_husimi(grid: HusimiGrid) -> HusimiSpinMoments:
    """<S_x> as a Husimi integral (exact symbol and literal forms) and directly"""
    state = grid.state
    n = grid.n_spins
    spin = n / 2

    theta, phi = np.meshgrid(grid.theta_samples, grid.phi_samples, indexing="ij")
    x_direction = np.sin(theta) * np.cos(phi)

    symbol_integral = _sphere_integral(grid, x_direction)
    literal = float(trapezoid(
        trapezoid(grid.q_values * x_direction, grid.phi_samples, axis=1),
        grid.theta_samples,
    ))

    mx = collective_mx(n)
    applied = mx @ state
    sx_direct = 0.5 * float(np.real(np.vdot(state, applied)))
    sx2_direct = 0.25 * float(np.real(np.vdot(applied, applied)))

    if not grid.symmetric:
        logger.warning("State is outside the symmetric subspace; Husimi <S_x> estimate is unreliable")

    return HusimiSpinMoments(
        sx_exact_symbol=(2 * spin + 1) * (spin + 1) / 4 * symbol_integral,
        sx_literal_integral=literal,
        sx_direct=sx_direct,
        sx2_direct=sx2_direct,
        reliable=grid.symmetric,
    )

