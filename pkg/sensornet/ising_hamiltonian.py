"""
Dense transverse-field Ising Hamiltonians on graphs.

    H = -J_eff * sum_{(i,j) in E} sz_i sz_j - h * sum_i sx_i

Basis convention shared by every module: basis index b in [0, 2^n) stores
node i at bit (n-1-i), so node 0 is the most significant bit. Bit value 0 is
spin up (sz = +1), bit value 1 is spin down (sz = -1).
"""
import logging
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .config import CouplingScaling, SpinSystemParams, check_size_cap
from .errors import ConfigurationError
from .graph_topology import Graph, require_connected

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HamiltonianMatrix:
    """Dense real symmetric Hamiltonian on n_spins spins"""
    entries: np.ndarray
    n_spins: int

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def effective_coupling(J: float, n: int, scaling: Union[CouplingScaling, str]) -> float:
    """Bare coupling J/2 or Kac-scaled coupling J/(2n)"""
    if n < 1:
        raise ConfigurationError(f"Node count must be at least 1, got {n}")
    if CouplingScaling(scaling) is CouplingScaling.KAC:
        return J / (2 * n)
    return J / 2


def spin_signs(n: int) -> np.ndarray:
    """Array z[i, b] = +1/-1 giving the sz eigenvalue of node i in basis state b"""
    states = np.arange(2 ** n)
    shifts = (n - 1 - np.arange(n))[:, None]
    return 1 - 2 * ((states[None, :] >> shifts) & 1)


def ising_diagonal(g: Graph, J_eff: float) -> np.ndarray:
    """Diagonal of the coupling term -J_eff * sum_E sz_i sz_j"""
    z = spin_signs(g.n)
    diagonal = np.zeros(2 ** g.n)
    for u, v in g.edges:
        diagonal += z[u] * z[v]
    return -J_eff * diagonal


def collective_mx(n: int, max_spins: Optional[int] = None) -> np.ndarray:
    """Total transverse magnetization M_x = sum_i sx_i as a dense matrix"""
    check_size_cap(n, max_spins)
    dim = 2 ** n
    states = np.arange(dim)
    mx = np.zeros((dim, dim))
    for i in range(n):
        mx[states, states ^ (1 << (n - 1 - i))] = 1.0
    return mx


def build_tfim(g: Graph, p: SpinSystemParams) -> HamiltonianMatrix:
    """Assemble the dense TFIM Hamiltonian for graph g at field p.h"""
    check_size_cap(g.n, p.size_cap())
    require_connected(g)

    J_eff = effective_coupling(p.J, g.n, p.scaling)
    entries = -p.h * collective_mx(g.n, p.size_cap())
    entries[np.diag_indices_from(entries)] = ising_diagonal(g, J_eff)

    return HamiltonianMatrix(entries=entries, n_spins=g.n)
