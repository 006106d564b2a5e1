"""
Descending spectra and the weak/strict, additive/log majorization predicates

Vectors are re-sorted internally, so every predicate is invariant under
permutations of its inputs.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from utils.errors import DimensionError, DomainError, NotPSDError
from utils.linalg_core import Tolerance, is_psd, psd_power, sym_eigen, symmetrize

logger = logging.getLogger(__name__)

# log(0) stand-in: partial sums stay finite while any zero entry still
# dominates every partial sum it enters
LOG_ZERO = float(np.log(np.finfo(np.float64).tiny))


@dataclass(frozen=True)
class MajorizationVerdict:
    """
    Outcome of one majorization predicate

    slack is min over k of (lhs partial - rhs partial), in log units for the
    log variants. equality_defect is None for the weak variants.
    """

    holds: bool
    worst_k: int
    slack: float
    equality_defect: Optional[float]
    threshold: float
    partial_slacks: tuple = ()

    @property
    def margin(self):
        if self.equality_defect is None:
            return self.slack
        return min(self.slack, -self.equality_defect)

    def to_dict(self):
        return {
            "holds": self.holds,
            "worst_k": self.worst_k,
            "slack": self.slack,
            "equality_defect": self.equality_defect,
            "threshold": self.threshold,
        }


def descending(values):
    """Finite real vector sorted in descending order"""
    values = np.asarray(values, dtype=np.float64).ravel()
    if not np.all(np.isfinite(values)):
        raise DomainError("Eigenvalue vector has non-finite entries")
    return np.sort(values)[::-1]


def spectrum(M, tol=None):
    """Descending eigenvalues of a symmetric matrix"""
    return sym_eigen(M, tol).eigenvalues.copy()


def spectrum_of_product(X, Y, tol=None):
    """
    Eigenvalues of XY for PSD X, Y, taken from the similar matrix X^{1/2}YX^{1/2}

    Raises:
        NotPSDError: X or Y is not PSD
    """
    tol = tol or Tolerance.from_env()
    X_half = psd_power(X, 0.5, tol)
    if not is_psd(Y, tol):
        raise NotPSDError("Y must be positive semidefinite")
    congruent = symmetrize(X_half @ np.asarray(Y, dtype=np.float64) @ X_half)
    return np.clip(spectrum(congruent, tol), 0.0, None)


def _pair(x, y):
    x = descending(x)
    y = descending(y)
    if x.shape != y.shape:
        raise DimensionError(f"Vectors must have equal length, got {x.size} and {y.size}")
    return x, y


def _verdict(lhs_partials, rhs_partials, threshold, equality_defect=None):
    differences = lhs_partials - rhs_partials
    worst = int(np.argmin(differences))
    slack = float(differences[worst])
    holds = slack >= -threshold
    if equality_defect is not None:
        holds = holds and equality_defect <= threshold
    return MajorizationVerdict(
        holds=bool(holds),
        worst_k=worst + 1,
        slack=slack,
        equality_defect=None if equality_defect is None else float(equality_defect),
        threshold=float(threshold),
        partial_slacks=tuple(float(d) for d in differences),
    )


def _additive_threshold(x, y, tol):
    return tol.scaled(max(np.abs(x).sum(), np.abs(y).sum(), 1.0))


def weak_majorizes(x, y, tol=None):
    """x ≻_w y: every partial sum of x↓ dominates that of y↓"""
    tol = tol or Tolerance.from_env()
    x, y = _pair(x, y)
    return _verdict(np.cumsum(x), np.cumsum(y), _additive_threshold(x, y, tol))


def majorizes(x, y, tol=None):
    """x ≻ y: weak majorization plus equal totals"""
    tol = tol or Tolerance.from_env()
    x, y = _pair(x, y)
    defect = abs(float(x.sum() - y.sum()))
    return _verdict(np.cumsum(x), np.cumsum(y), _additive_threshold(x, y, tol), defect)


def _nonnegative(values, tol):
    top = max(float(values[0]), 0.0)
    if values[-1] < -tol.abs * (1.0 + top):
        raise DomainError(f"Log-majorization needs non-negative entries, got {values[-1]:.3e}")
    return np.clip(values, 0.0, None)


def _logs(values):
    logs = np.full(values.shape, LOG_ZERO)
    positive = values > 0
    logs[positive] = np.log(values[positive])
    return np.maximum(logs, LOG_ZERO)


def _log_threshold(n, tol):
    return max(tol.abs, tol.rel * n)


def weak_log_majorizes(x, y, tol=None):
    """
    x ≻_wlog y: every partial product of x↓ dominates that of y↓

    Evaluated as partial sums of logarithms. Zero entries take log 0 = -inf
    (represented by LOG_ZERO), so a zero in x where y is positive fails and
    zeros at the same positions compare equal.
    """
    tol = tol or Tolerance.from_env()
    x, y = _pair(x, y)
    x, y = _nonnegative(x, tol), _nonnegative(y, tol)
    return _verdict(np.cumsum(_logs(x)), np.cumsum(_logs(y)), _log_threshold(x.size, tol))


def log_majorizes(x, y, tol=None):
    """
    x ≻_log y: weak log-majorization plus equal total products

    Total-product equality holds when both vectors contain a zero (both
    products are 0); if only one does, the defect is the log-domain gap.
    """
    tol = tol or Tolerance.from_env()
    x, y = _pair(x, y)
    x, y = _nonnegative(x, tol), _nonnegative(y, tol)
    x_logs, y_logs = _logs(x), _logs(y)
    if x[-1] == 0 and y[-1] == 0:
        defect = 0.0
    else:
        defect = abs(float(x_logs.sum() - y_logs.sum()))
    return _verdict(np.cumsum(x_logs), np.cumsum(y_logs), _log_threshold(x.size, tol), defect)
