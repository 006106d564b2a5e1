"""
Checks for the proven determinant inequalities: the polar form, thm1 to thm4,
the det(I + ·) consequence of the geometric-mean log-majorization and the
det(A²+|AB|) >= det(A²+|BA|) corollary
"""

import numpy as np

from . import ORIENTATIONS, DeterminantCheck
from .. import PowerParamMixin, WeightParamMixin, scalar_margin
from utils.errors import DomainError
from utils.linalg_core import det_general, matrix_power_psd, polar_unitary
from utils.majorization import spectrum, spectrum_of_product, weak_log_majorizes
from utils.matrix_means import sharp

# det(A²+|BA|) = det(A+UᵀB)·det A holds exactly; the rounding allowance is fixed
EQUIVALENCE_TOL = 1e-8


class PolarFormCheck(DeterminantCheck):
    """det(A + UᵀB) <= det(A + B), U the orthogonal polar factor of BA"""

    check_id = "eq1_polar"
    description = "det(A+U^T B) <= det(A+B)"

    def compute(self, A, B, tol, params):
        U = polar_unitary(B @ A, tol)
        lhs = det_general(A + U.T @ B)
        rhs = det_general(A + B)

        A2 = self.square(A, tol)
        det_a = det_general(A)
        thm1_lhs = self.det_sum(A2, self.abs_term(A, B, 1.0, "ba", tol))
        identity_defect = abs(thm1_lhs - lhs * det_a) / max(abs(thm1_lhs), 1.0)
        thm1_rhs = self.det_sum(A2, A @ B)
        factorization_defect = abs(thm1_rhs - det_a * rhs) / max(abs(thm1_rhs), 1.0)

        return self.scalar_result(lhs, rhs, "rhs", tol, details={
            "identity_defect": identity_defect,
            "factorization_defect": factorization_defect,
            "equivalence_holds": bool(max(identity_defect, factorization_defect) <= EQUIVALENCE_TOL),
        })


class Thm1Check(DeterminantCheck):
    """det(A² + |BA|) <= det(A² + AB)"""

    check_id = "thm1"
    description = "det(A^2+|BA|) <= det(A^2+AB)"

    def compute(self, A, B, tol, params):
        A2 = self.square(A, tol)
        lhs = self.det_sum(A2, self.abs_term(A, B, 1.0, "ba", tol))
        rhs = self.det_sum(A2, self.product_term(A, B, 1.0, tol))
        return self.scalar_result(lhs, rhs, "rhs", tol)


class Thm2Check(DeterminantCheck):
    """det(A² + |AB|) >= det(A² + AB)"""

    check_id = "thm2"
    description = "det(A^2+|AB|) >= det(A^2+AB)"

    def compute(self, A, B, tol, params):
        A2 = self.square(A, tol)
        lhs = self.det_sum(A2, self.abs_term(A, B, 1.0, "ab", tol))
        rhs = self.det_sum(A2, self.product_term(A, B, 1.0, tol))
        return self.scalar_result(lhs, rhs, "lhs", tol)


class Thm3Check(PowerParamMixin, DeterminantCheck):
    """
    det(A² + |BA|ᵖ) <= det(A² + AᵖBᵖ), proven for 0 <= p <= 2

    Both orientations of the absolute value are always evaluated; the
    `orientation` parameter picks the one the verdict is based on. The trace
    gap trace(A²+|BA|ᵖ) - trace(A²+AᵖBᵖ) is recorded as well.
    """

    check_id = "thm3"
    description = "det(A^2+|BA|^p) <= det(A^2+A^p B^p), 0<=p<=2"

    def extra_params(self, params):
        orientation = params.pop("orientation", "ba")
        if orientation not in ORIENTATIONS:
            raise DomainError(f"orientation must be one of {ORIENTATIONS}, got {orientation!r}")
        return {"orientation": orientation}

    def is_proven(self, params):
        return params["orientation"] == "ba" and not params["out_of_range"]

    def compute(self, A, B, tol, params):
        p = params["p"]
        A2 = self.square(A, tol)
        product = self.product_term(A, B, p, tol)
        rhs = self.det_sum(A2, product)

        orientations = {}
        for orientation in ORIENTATIONS:
            term = self.abs_term(A, B, p, orientation, tol)
            orientations[orientation] = scalar_margin(self.det_sum(A2, term), rhs, "rhs", tol)
            if orientation == "ba":
                trace_gap = float(np.trace(term) - np.trace(product))

        chosen = orientations[params["orientation"]]
        return self.scalar_result(chosen["lhs"], rhs, "rhs", tol, details={
            "orientations": orientations,
            "trace_gap": trace_gap,
        })


class Thm4Check(DeterminantCheck):
    """det(A² + |AB|²) >= det(A² + A²B²)"""

    check_id = "thm4"
    description = "det(A^2+|AB|^2) >= det(A^2+A^2 B^2)"

    def compute(self, A, B, tol, params):
        A2 = self.square(A, tol)
        lhs = self.det_sum(A2, self.abs_term(A, B, 2.0, "ab", tol))
        rhs = self.det_sum(A2, self.product_term(A, B, 2.0, tol))
        return self.scalar_result(lhs, rhs, "lhs", tol)


class Thm12CorollaryCheck(DeterminantCheck):
    """det(A² + |AB|) >= det(A² + |BA|), thm1 and thm2 chained through det(A² + AB)"""

    check_id = "thm12_corollary"
    description = "det(A^2+|AB|) >= det(A^2+|BA|)"

    def compute(self, A, B, tol, params):
        A2 = self.square(A, tol)
        lhs = self.det_sum(A2, self.abs_term(A, B, 1.0, "ab", tol))
        rhs = self.det_sum(A2, self.abs_term(A, B, 1.0, "ba", tol))
        return self.scalar_result(lhs, rhs, "lhs", tol)


class P2ConsequenceCheck(WeightParamMixin, DeterminantCheck):
    """
    det(I + A♯_tB) <= det(I + A^{1-t}Bᵗ)

    Also evaluates the weak log-majorization λ(A^{1-t}Bᵗ) ≻_wlog λ(A♯_tB)
    that implies it and records whether the implication held.
    """

    check_id = "eq6_p2"
    description = "det(I+A #_t B) <= det(I+A^(1-t) B^t)"

    def compute(self, A, B, tol, params):
        t = params["t"]
        identity = np.eye(A.shape[0])
        mean = sharp(A, B, t, tol)
        A_pow = matrix_power_psd(A, 1.0 - t, tol)
        B_pow = matrix_power_psd(B, t, tol)

        lhs = det_general(identity + mean)
        rhs = det_general(identity + A_pow @ B_pow)
        result = self.scalar_result(lhs, rhs, "rhs", tol)

        premise = weak_log_majorizes(spectrum_of_product(A_pow, B_pow, tol), np.clip(spectrum(mean, tol), 0, None), tol)
        result.details["weak_log_majorization"] = premise.to_dict()
        result.details["implication_holds"] = bool(not premise.holds or result.passed)
        return result
