"""
sensornet: topology optimization of graph-structured spin sensors.

Exact diagonalization of transverse-field Ising models on small graphs,
thermal and ground-state quantum Fisher information, a genetic algorithm over
connected topologies, Husimi phase-space analysis, finite-size scaling fits
and a small extrapolation network.
"""
__version__ = "1.0.0"

from .config import CouplingScaling, SpinSystemParams, get_settings
from .errors import (
    ConfigurationError,
    DisconnectedGraphError,
    InsufficientDataError,
    NumericalFailure,
    PersistenceError,
    SensorNetError,
    SizeCapExceeded,
)
from .graph_topology import Graph, GraphKind, standard_graph

__all__ = [
    "__version__",
    "ConfigurationError",
    "CouplingScaling",
    "DisconnectedGraphError",
    "Graph",
    "GraphKind",
    "InsufficientDataError",
    "NumericalFailure",
    "PersistenceError",
    "SensorNetError",
    "SizeCapExceeded",
    "SpinSystemParams",
    "get_settings",
    "standard_graph",
]
