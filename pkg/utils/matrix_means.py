"""
Weighted geometric mean A♯_tB and the mean A♮_tB built on psd_power
"""

import logging
from dataclasses import dataclass

import numpy as np

from utils.errors import DomainError
from utils.linalg_core import (
    Tolerance,
    as_matrix,
    condition_number,
    psd_power,
    sym_eigen,
    symmetrize,
)

logger = logging.getLogger(__name__)

CONDITION_WARNING_LIMIT = 1e12


@dataclass(frozen=True)
class MeanParams:
    """Weight t of a matrix mean, 0 <= t <= 1"""

    t: float = 0.5

    def __post_init__(self):
        if not (0.0 <= float(self.t) <= 1.0):
            raise DomainError(f"Mean weight t must lie in [0, 1], got {self.t}")


def _weight(t):
    if isinstance(t, MeanParams):
        return float(t.t)
    return float(MeanParams(float(t)).t)


def _require_pd(M, name, tol):
    eigenvalues = sym_eigen(M, tol).eigenvalues
    top = float(eigenvalues[0])
    if top <= 0 or eigenvalues[-1] <= tol.abs * top:
        raise DomainError(f"{name} must be positive definite (smallest eigenvalue {eigenvalues[-1]:.3e})")


def conditioning_warning(M, limit=CONDITION_WARNING_LIMIT):
    """
    True when cond(M) exceeds `limit`; logs a warning instead of failing

    Searches deliberately visit ill-conditioned inputs, so this is reported
    as result metadata by the callers.
    """
    cond = condition_number(M)
    if cond > limit:
        logger.warning(f"Condition number {cond:.3e} exceeds {limit:.0e}; mean may be inaccurate")
        return True
    return False


def sharp(A, B, t=0.5, tol=None):
    """
    Weighted geometric mean A♯_tB = A^{1/2}(A^{-1/2}BA^{-1/2})^tA^{1/2}

    Args:
        A: Positive definite matrix
        B: Positive semidefinite matrix
        t: Weight in [0, 1] (float or MeanParams)
        tol: Tolerance

    Returns:
        Symmetric PSD matrix; A itself at t = 0
    """
    tol = tol or Tolerance.from_env()
    t = _weight(t)
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    _require_pd(A, "A", tol)
    if t == 0.0:
        return symmetrize(A)

    A_half = psd_power(A, 0.5, tol)
    A_inv_half = psd_power(A, -0.5, tol)
    inner = symmetrize(A_inv_half @ B @ A_inv_half)
    return symmetrize(A_half @ psd_power(inner, t, tol) @ A_half)


def natural(A, B, t=0.5, tol=None):
    """
    The mean A♮_tB = A^{1/2}(B^{1/2}A^{-1}B^{1/2})^tA^{1/2}

    Not symmetric in (A, B).

    Args:
        A: Positive definite matrix
        B: Positive definite matrix
        t: Weight in [0, 1], 1/2 by default
        tol: Tolerance

    Returns:
        Symmetric PD matrix
    """
    tol = tol or Tolerance.from_env()
    t = _weight(t)
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    _require_pd(A, "A", tol)
    _require_pd(B, "B", tol)

    A_half = psd_power(A, 0.5, tol)
    A_inv = psd_power(A, -1.0, tol)
    B_half = psd_power(B, 0.5, tol)
    inner = symmetrize(B_half @ A_inv @ B_half)
    return symmetrize(A_half @ psd_power(inner, t, tol) @ A_half)


def natural_factorization(A, B, tol=None):
    """A^{1/2}B^{1/2}(A♯B)^{-1}B^{1/2}A^{1/2}, which equals A♮B"""
    tol = tol or Tolerance.from_env()
    X = psd_power(A, 0.5, tol) @ psd_power(B, 0.5, tol)
    H = sharp(A, B, 0.5, tol)
    return symmetrize(X @ np.linalg.solve(H, X.T))
