"""
Determinant conjecture: det(A² + |AB|ᵖ) >= det(A² + AᵖBᵖ) for 0 <= p <= 2
"""

from . import DeterminantCheck
from .. import PowerParamMixin


class Conjecture1Check(PowerParamMixin, DeterminantCheck):
    """Open for p outside {1, 2}; agrees with thm2 at p = 1 and thm4 at p = 2"""

    check_id = "conj1"
    description = "det(A^2+|AB|^p) >= det(A^2+A^p B^p), 0<=p<=2 (conjecture)"

    def is_proven(self, params):
        return False

    def compute(self, A, B, tol, params):
        p = params["p"]
        A2 = self.square(A, tol)
        lhs = self.det_sum(A2, self.abs_term(A, B, p, "ab", tol))
        rhs = self.det_sum(A2, self.product_term(A, B, p, tol))
        return self.scalar_result(lhs, rhs, "lhs", tol)
