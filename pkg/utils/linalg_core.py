"""
Dense real matrix primitives: symmetric eigendecomposition, PSD powers,
absolute values, polar factors, determinants, norms and regularization.

All functions are pure; inputs are never modified in place.
"""

import os
import logging
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla

from utils.errors import (
    DimensionError,
    DomainError,
    NotPSDError,
    SingularMatrixError,
)

logger = logging.getLogger(__name__)

DEFAULT_REL_TOL = 1e-9
DEFAULT_ABS_TOL = 1e-12
DEFAULT_EPS = 1e-10
TOLERANCE_ENV_VAR = "DETLAB_TOL"


@dataclass(frozen=True)
class Tolerance:
    """Relative tolerance plus an absolute floor"""

    rel: float = DEFAULT_REL_TOL
    abs: float = DEFAULT_ABS_TOL

    def __post_init__(self):
        for name in ("rel", "abs"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise DomainError(f"Tolerance.{name} must be finite and >= 0, got {value}")

    def scaled(self, scale):
        """Absolute threshold for a quantity of magnitude `scale`"""
        return max(self.abs, self.rel * scale)

    def widened(self, rel):
        """Copy with the relative part raised to at least `rel`"""
        if rel <= self.rel:
            return self
        return Tolerance(rel=float(rel), abs=self.abs)

    def to_dict(self):
        return {"rel": self.rel, "abs": self.abs}

    @classmethod
    def from_dict(cls, data):
        return cls(rel=float(data.get("rel", DEFAULT_REL_TOL)),
                   abs=float(data.get("abs", DEFAULT_ABS_TOL)))

    @classmethod
    def from_env(cls, environ=None):
        """
        Default tolerance, overridden by DETLAB_TOL ("rel" or "rel,abs")

        Args:
            environ: Mapping to read instead of os.environ

        Returns:
            Tolerance
        """
        environ = os.environ if environ is None else environ
        raw = environ.get(TOLERANCE_ENV_VAR, "").strip()
        if not raw:
            return cls()
        parts = [part.strip() for part in raw.split(",")]
        try:
            if len(parts) == 1:
                return cls(rel=float(parts[0]))
            if len(parts) == 2:
                return cls(rel=float(parts[0]), abs=float(parts[1]))
        except ValueError:
            pass
        raise DomainError(f"{TOLERANCE_ENV_VAR} must be '<rel>' or '<rel>,<abs>', got {raw!r}")


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenvalues (descending) and orthogonal eigenvector basis of a symmetric matrix"""

    eigenvalues: np.ndarray
    basis: np.ndarray

    def reconstruct(self):
        return (self.basis * self.eigenvalues) @ self.basis.T


def as_matrix(M, name="matrix"):
    """
    Validate and convert input to a square float64 array

    Raises:
        DimensionError: input is not a non-empty square 2-D array
        DomainError: input has NaN or Inf entries
    """
    M = np.array(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise DimensionError(f"{name} must be a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise DomainError(f"{name} has non-finite entries")
    return M


def symmetrize(M):
    return 0.5 * (M + M.T)


def symmetry_defect(M):
    return float(np.linalg.norm(M - M.T, "fro"))


def sym_eigen(M, tol=None):
    """
    Symmetric eigendecomposition with descending eigenvalues

    The input is symmetrized as (M + Mᵀ)/2 first. Each eigenvector is
    sign-fixed so that its largest-magnitude component is positive.

    Args:
        M: Square matrix, symmetric to within tol.rel·‖M‖_F
        tol: Tolerance, defaults to Tolerance.from_env()

    Returns:
        SpectralDecomposition
    """
    tol = tol or Tolerance.from_env()
    M = as_matrix(M)
    defect = symmetry_defect(M)
    if defect > tol.scaled(np.linalg.norm(M, "fro")):
        raise DomainError(f"Matrix is not symmetric (defect {defect:.3e})")

    eigenvalues, basis = np.linalg.eigh(symmetrize(M))
    order = np.argsort(-eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    basis = basis[:, order]

    pivots = np.argmax(np.abs(basis), axis=0)
    signs = np.sign(basis[pivots, np.arange(basis.shape[1])])
    signs[signs == 0] = 1.0
    basis = basis * signs

    return SpectralDecomposition(eigenvalues=eigenvalues, basis=basis)


def _clamped_spectrum(M, tol):
    """Eigendecomposition with small negative eigenvalues clamped to zero"""
    decomposition = sym_eigen(M, tol)
    eigenvalues = decomposition.eigenvalues
    top = max(float(eigenvalues[0]), 0.0)
    floor = tol.abs * (1.0 + top)
    if eigenvalues[-1] < -floor:
        raise NotPSDError(
            f"Matrix is not positive semidefinite (smallest eigenvalue {eigenvalues[-1]:.3e})"
        )
    return np.clip(eigenvalues, 0.0, None), decomposition.basis, floor


def psd_power(M, p, tol=None):
    """
    Real power of a symmetric PSD matrix, Q·diag(λᵖ)·Qᵀ

    p = 0 returns the identity on the support (the orthogonal projector onto
    the range of M); negative powers require every eigenvalue to exceed
    tol.abs relative to λ₁.

    Raises:
        NotPSDError: an eigenvalue is negative beyond the clamp threshold
        SingularMatrixError: p < 0 and M is numerically singular
    """
    tol = tol or Tolerance.from_env()
    eigenvalues, basis, floor = _clamped_spectrum(M, tol)
    p = float(p)

    if p < 0:
        top = eigenvalues[0]
        if top <= 0 or eigenvalues[-1] <= tol.abs * top:
            raise SingularMatrixError(f"Cannot take power {p} of a singular matrix")
        powered = eigenvalues ** p
    elif p == 0:
        powered = np.where(eigenvalues > floor, 1.0, 0.0)
    else:
        powered = eigenvalues ** p

    return symmetrize((basis * powered) @ basis.T)


def matrix_power_psd(M, p, tol=None):
    """
    Power of a PSD matrix, taking non-negative integer exponents exactly

    Integer exponents use repeated multiplication; everything else goes
    through psd_power.
    """
    p = float(p)
    if p >= 0 and p.is_integer():
        M = as_matrix(M)
        return symmetrize(np.linalg.matrix_power(symmetrize(M), int(p)))
    return psd_power(M, p, tol)


def _gram(X, side):
    if side == "right":
        return symmetrize(X.T @ X)
    if side == "left":
        return symmetrize(X @ X.T)
    raise DomainError(f"side must be 'right' or 'left', got {side!r}")


def abs_value(X, side="right", tol=None):
    """
    Matrix absolute value

    Args:
        X: Square matrix
        side: "right" for |X| = (XᵀX)^{1/2}, "left" for (XXᵀ)^{1/2}
        tol: Tolerance

    Returns:
        Symmetric PSD matrix whose eigenvalues are the singular values of X
    """
    X = as_matrix(X)
    return psd_power(_gram(X, side), 0.5, tol)


def abs_power(X, p, side="right", tol=None):
    """|X|^p computed as (XᵀX)^{p/2}; even integer p is taken exactly"""
    X = as_matrix(X)
    return matrix_power_psd(_gram(X, side), float(p) / 2.0, tol)


def polar_unitary(X, tol=None):
    """
    Orthogonal factor U of the polar decomposition X = U|X|

    Raises:
        SingularMatrixError: smallest singular value is below tol.abs·‖X‖
    """
    tol = tol or Tolerance.from_env()
    X = as_matrix(X)
    singular_values = np.linalg.svd(X, compute_uv=False)
    if singular_values[0] == 0 or singular_values[-1] <= tol.abs * singular_values[0]:
        raise SingularMatrixError("Polar factor is not unique for a singular matrix; regularize first")
    unitary, _ = sla.polar(X, side="right")
    return unitary


def det_general(M):
    """
    Determinant of a general square matrix via pivoted LU

    Returns:
        float, exactly 0.0 for an exactly singular factorization
    """
    M = as_matrix(M)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, pivots = sla.lu_factor(M, check_finite=False)
    swaps = np.count_nonzero(pivots != np.arange(M.shape[0]))
    sign = -1.0 if swaps % 2 else 1.0
    return float(sign * np.prod(np.diag(lu)))


def spectral_norm(M):
    """Largest singular value"""
    return float(np.linalg.norm(as_matrix(M), 2))


def condition_number(M):
    """2-norm condition number; inf for singular input"""
    M = as_matrix(M)
    singular_values = np.linalg.svd(M, compute_uv=False)
    if singular_values[-1] == 0:
        return float("inf")
    return float(singular_values[0] / singular_values[-1])


def regularize(A, eps=DEFAULT_EPS):
    """
    Shift a PSD matrix to a positive definite one: A + eps·‖A‖·I (eps·I for A = 0)

    Raises:
        DomainError: eps <= 0
    """
    if not eps > 0:
        raise DomainError(f"Regularization eps must be > 0, got {eps}")
    A = as_matrix(A)
    norm = spectral_norm(A)
    shift = eps * norm if norm > 0 else eps
    return symmetrize(A) + shift * np.eye(A.shape[0])


def is_psd(M, tol=None):
    """True iff M is symmetric within tol and λ_min >= -tol.rel·(1 + λ₁)"""
    tol = tol or Tolerance.from_env()
    M = as_matrix(M)
    if symmetry_defect(M) > tol.scaled(np.linalg.norm(M, "fro")):
        return False
    eigenvalues = np.linalg.eigvalsh(symmetrize(M))
    top = float(eigenvalues[-1])
    return bool(eigenvalues[0] >= -tol.rel * (1.0 + max(top, 0.0)))


def denman_beavers_sqrt(M, max_iterations=100, tol=1e-13):
    """
    Square root of a PD matrix by the Denman-Beavers iteration

    Independent of the spectral path; used as an oracle for psd_power and
    abs_value. Stops once the update is below tol or stagnates at rounding
    level, then takes one Newton step against the original M.
    """
    M = as_matrix(M)
    Y, Z = M.copy(), np.eye(M.shape[0])
    previous = np.inf
    for iteration in range(max_iterations):
        Y_next = 0.5 * (Y + np.linalg.inv(Z))
        Z_next = 0.5 * (Z + np.linalg.inv(Y))
        change = np.linalg.norm(Y_next - Y, "fro") / max(np.linalg.norm(Y_next, "fro"), 1.0)
        Y, Z = Y_next, Z_next
        if change < tol or (change < 1e-8 and change >= previous):
            break
        previous = change
    else:
        logger.warning(f"Denman-Beavers iteration did not converge in {max_iterations} iterations")
    Y = 0.5 * (Y + np.linalg.solve(Y, M))
    return symmetrize(Y)
