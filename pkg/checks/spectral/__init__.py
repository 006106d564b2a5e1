"""
Eigenvalue-vector checks: log-majorization, additive majorization and the
spectral-norm chain
"""

import numpy as np

from .. import InequalityCheck, scalar_margin
from utils.linalg_core import abs_power, det_general, matrix_power_psd, symmetrize
from utils.majorization import spectrum


class SpectralCheck(InequalityCheck):
    """Base class for checks comparing spectra"""

    def spectrum(self, M, tol):
        """Descending eigenvalues with rounding-level negatives clipped"""
        return np.clip(spectrum(symmetrize(M), tol), 0.0, None)

    def abs_sum(self, A, B, p, orientation, tol):
        """A² + |BA|ᵖ ("ba") or A² + |AB|ᵖ ("ab")"""
        X = B @ A if orientation == "ba" else A @ B
        return symmetrize(matrix_power_psd(A, 2, tol) + abs_power(X, p, tol=tol))

    def determinant_implication(self, premise, lhs, rhs, tol):
        """
        Determinant consequence det(lhs) >= det(rhs) of a majorization

        Returns:
            dict with the comparison and whether premise => conclusion held
        """
        comparison = scalar_margin(det_general(lhs), det_general(rhs), "lhs", tol)
        comparison["implication_holds"] = bool(not premise.holds or comparison["holds"])
        return comparison
