"""
Determinant inequality checks of the form det(A² + X) vs det(A² + Y)
"""

from .. import InequalityCheck
from utils.errors import DomainError
from utils.linalg_core import abs_power, det_general, matrix_power_psd

ORIENTATIONS = ("ba", "ab")


class DeterminantCheck(InequalityCheck):
    """Base class for determinant checks"""

    def square(self, A, tol):
        return matrix_power_psd(A, 2, tol)

    def abs_term(self, A, B, p, orientation, tol):
        """|BA|^p for orientation "ba", |AB|^p for "ab" (right absolute value)"""
        if orientation == "ba":
            return abs_power(B @ A, p, tol=tol)
        if orientation == "ab":
            return abs_power(A @ B, p, tol=tol)
        raise DomainError(f"orientation must be one of {ORIENTATIONS}, got {orientation!r}")

    def product_term(self, A, B, p, tol):
        """AᵖBᵖ (not symmetric in general)"""
        return matrix_power_psd(A, p, tol) @ matrix_power_psd(B, p, tol)

    def det_sum(self, S, X):
        return det_general(S + X)
