"""
Zero-temperature metrology and finite-size scaling fits.

Generator QFI F_Q = 4 Var(M_x) on pure states, the squeezing parameter
xi^2 = F_Q / N, and least-squares fits of F_Q(N) either as polynomials in N
or as polynomials in log N for log F_Q (power laws at degree 1).
"""
import logging
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as la
from pydantic import BaseModel, Field

from .errors import ConfigurationError, InsufficientDataError
from .ising_hamiltonian import collective_mx

logger = logging.getLogger(__name__)

MAX_FIT_DEGREE = 4


class FitKind(str, Enum):
    POLYNOMIAL = "polynomial"
    LOGLOG_POLYNOMIAL = "loglog_polynomial"
    POWER_LAW = "power_law"


class Parity(str, Enum):
    ALL = "all"
    EVEN = "even"
    ODD = "odd"


class ScalingFit(BaseModel):
    """Least-squares scaling fit of a size series"""
    kind: FitKind
    parity: Parity = Parity.ALL
    degree: int = Field(ge=0, le=MAX_FIT_DEGREE)
    coefficients: List[float]
    exponent: Optional[float] = None
    residual: float = Field(ge=0)
    r_squared: float
    x_range: Tuple[float, float]
    point_count: int

    def evaluate(self, xs: Sequence[float]) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if self.kind is FitKind.POLYNOMIAL:
            return np.polynomial.polynomial.polyval(xs, self.coefficients)
        return np.exp(np.polynomial.polynomial.polyval(np.log(xs), self.coefficients))


class PeakSummary(BaseModel):
    """Where a size series peaks and whether it declines afterwards"""
    peak_n: int
    peak_value: float
    declines_after_peak: bool


def generator_qfi_ground(state: np.ndarray, n: int) -> float:
    """F_Q = 4 (<M_x^2> - <M_x>^2) for a pure state"""
    state = np.asarray(state)
    if state.shape != (2 ** n,):
        raise ConfigurationError(f"State of shape {state.shape} does not match {n} spins")
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > 1e-10:
        raise ConfigurationError(f"State must be normalized, got norm {norm:.12f}")

    applied = collective_mx(n) @ state
    mean = float(np.real(np.vdot(state, applied)))
    second = float(np.real(np.vdot(applied, applied)))
    return max(4.0 * (second - mean ** 2), 0.0)


def spin_squeezing(qfi: float, n: int) -> float:
    """xi^2 = F_Q / N"""
    if n < 1:
        raise ConfigurationError(f"Spin count must be positive, got {n}")
    return qfi / n


def polynomial_fit(
    xs: Sequence[float],
    ys: Sequence[float],
    degree: int,
    log_space: bool = False,
    parity: Parity = Parity.ALL,
    allow_interpolation: bool = False,
) -> ScalingFit:
    """Least-squares polynomial fit solved through a QR decomposition"""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ConfigurationError("xs and ys must be equal-length sequences")
    if not 0 <= degree <= MAX_FIT_DEGREE:
        raise ConfigurationError(f"Fit degree must be in [0, {MAX_FIT_DEGREE}], got {degree}")
    minimum = degree + 1 if allow_interpolation else degree + 2
    if xs.size < minimum:
        raise InsufficientDataError(f"{xs.size} points cannot determine a degree-{degree} fit")

    if log_space:
        if np.any(xs <= 0) or np.any(ys <= 0):
            raise ConfigurationError("Log-space fits need strictly positive data")
        u, v = np.log(xs), np.log(ys)
    else:
        u, v = xs, ys

    design = np.vander(u, degree + 1, increasing=True)
    q, r = np.linalg.qr(design)
    coefficients = la.solve_triangular(r, q.T @ v)

    misfit = v - design @ coefficients
    residual = float(np.sqrt(np.mean(misfit ** 2)))
    spread = float(np.sum((v - v.mean()) ** 2))
    r_squared = 1.0 - float(np.sum(misfit ** 2)) / spread if spread > 0 else 1.0

    return ScalingFit(
        kind=FitKind.LOGLOG_POLYNOMIAL if log_space else FitKind.POLYNOMIAL,
        parity=parity,
        degree=degree,
        coefficients=[float(c) for c in coefficients],
        residual=residual,
        r_squared=r_squared,
        x_range=(float(xs.min()), float(xs.max())),
        point_count=int(xs.size),
    )


def filter_parity(Ns: Sequence[int], values: Sequence[float], parity: Parity) -> Tuple[np.ndarray, np.ndarray]:
    Ns = np.asarray(Ns, dtype=int)
    values = np.asarray(values, dtype=float)
    parity = Parity(parity)
    if parity is Parity.ALL:
        return Ns, values
    keep = Ns % 2 == (0 if parity is Parity.EVEN else 1)
    return Ns[keep], values[keep]


def power_law_fit(Ns: Sequence[int], Fs: Sequence[float], parity: Parity = Parity.ALL) -> ScalingFit:
    """F ~ N^alpha by a degree-1 fit in log-log space over one parity class"""
    parity = Parity(parity)
    kept_N, kept_F = filter_parity(Ns, Fs, parity)
    if kept_N.size < 3:
        raise InsufficientDataError(f"Power-law fit needs at least 3 {parity.value} points, got {kept_N.size}")
    if np.any(kept_F <= 0):
        raise ConfigurationError("Power-law fits need strictly positive values")

    fit = polynomial_fit(kept_N, kept_F, 1, log_space=True, parity=parity)
    return fit.model_copy(update={"kind": FitKind.POWER_LAW, "exponent": fit.coefficients[1]})


def peak_size(Ns: Sequence[int], values: Sequence[float]) -> PeakSummary:
    """Size at which a series is largest and whether it falls after that"""
    Ns = np.asarray(Ns, dtype=int)
    values = np.asarray(values, dtype=float)
    if Ns.size == 0:
        raise InsufficientDataError("Empty series has no peak")
    order = np.argsort(Ns)
    Ns, values = Ns[order], values[order]
    index = int(np.argmax(values))
    return PeakSummary(
        peak_n=int(Ns[index]),
        peak_value=float(values[index]),
        declines_after_peak=bool(index < Ns.size - 1),
    )
