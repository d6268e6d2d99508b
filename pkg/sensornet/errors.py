"""
Exception hierarchy for sensornet.

Library code raises these; only the command-line front end turns them into
process exit codes.
"""
from pathlib import Path
from typing import Optional, Union


class SensorNetError(Exception):
    """Base class for all sensornet failures"""

    exit_code = 1


class ConfigurationError(SensorNetError):
    """Invalid sizes, parameters or command options"""

    exit_code = 2


class SizeCapExceeded(ConfigurationError):
    """Requested spin count exceeds the dense-matrix size cap"""

    def __init__(self, n_spins: int, cap: int):
        super().__init__(
            f"{n_spins} spins exceed the size cap of {cap} "
            f"(dense dimension {2 ** n_spins}); raise max_spins explicitly to override"
        )
        self.n_spins = n_spins
        self.cap = cap


class DisconnectedGraphError(ConfigurationError):
    """A physics operation received a graph with more than one component"""


class InsufficientDataError(ConfigurationError):
    """Too few data points for a fit or a training run"""


class NumericalFailure(SensorNetError):
    """Solver non-convergence, non-symmetric input or non-finite values"""

    exit_code = 3


class PersistenceError(SensorNetError):
    """Reading or writing an artifact failed"""

    exit_code = 4

    def __init__(self, message: str, path: Optional[Union[str, Path]] = None):
        if path is not None:
            message = f"{message}: {path}"
        super().__init__(message)
        self.path = Path(path) if path is not None else None
