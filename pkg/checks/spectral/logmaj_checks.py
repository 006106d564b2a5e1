"""
Log-majorization checks: the geometric-mean relation, the ♮-mean lemma and
Weyl's singular-value relation for ABA⁻¹
"""

import numpy as np

from . import SpectralCheck
from .. import WeightParamMixin, scalar_margin
from utils.linalg_core import matrix_power_psd, psd_power
from utils.majorization import log_majorizes, spectrum_of_product, weak_log_majorizes
from utils.matrix_means import natural, sharp


class GeoMeanLogMajCheck(WeightParamMixin, SpectralCheck):
    """λ(A♯_tB) ≺_log λ(A^{1-t}Bᵗ)"""

    check_id = "eq5_logmaj"
    description = "lambda(A #_t B) <_log lambda(A^(1-t) B^t)"

    def compute(self, A, B, tol, params):
        t = params["t"]
        mean_spectrum = self.spectrum(sharp(A, B, t, tol), tol)
        product_spectrum = spectrum_of_product(matrix_power_psd(A, 1.0 - t, tol), matrix_power_psd(B, t, tol), tol)
        verdict = log_majorizes(product_spectrum, mean_spectrum, tol)
        return self.majorization_result(verdict, mean_spectrum, product_spectrum, tol)


class Lemma1Check(SpectralCheck):
    """λ(A♮B) ≻_log λ(A^{1/2}B^{1/2})"""

    check_id = "lemma1"
    description = "lambda(A natural B) >_log lambda(A^(1/2) B^(1/2))"

    def compute(self, A, B, tol, params):
        mean_spectrum = self.spectrum(natural(A, B, 0.5, tol), tol)
        product_spectrum = spectrum_of_product(psd_power(A, 0.5, tol), psd_power(B, 0.5, tol), tol)
        verdict = log_majorizes(mean_spectrum, product_spectrum, tol)
        return self.majorization_result(verdict, mean_spectrum, product_spectrum, tol)


class WeylLogMajCheck(SpectralCheck):
    """
    λ(|ABA⁻¹|) ≻_log λ(ABA⁻¹) = λ(B)

    Also records the consequence det(I + |ABA⁻¹|²) >= det(I + B²), which is
    the reduced form of det(A² + |AB|²) >= det(A² + A²B²).
    """

    check_id = "weyl"
    description = "lambda(|A B A^-1|) >_log lambda(B)"

    def compute(self, A, B, tol, params):
        # A symmetric: solve(A, (AB)ᵀ)ᵀ = ABA⁻¹
        X = np.linalg.solve(A, (A @ B).T).T
        singular_values = np.linalg.svd(X, compute_uv=False)
        b_spectrum = self.spectrum(B, tol)
        verdict = log_majorizes(singular_values, b_spectrum, tol)
        result = self.majorization_result(verdict, singular_values, b_spectrum, tol)

        premise = weak_log_majorizes(singular_values ** 2, b_spectrum ** 2, tol)
        consequence = scalar_margin(
            np.prod(1.0 + singular_values ** 2), np.prod(1.0 + b_spectrum ** 2), "lhs", tol
        )
        consequence["implication_holds"] = bool(not premise.holds or consequence["holds"])
        result.details["det_consequence"] = consequence
        result.details["conjugate_defect"] = float(
            np.linalg.norm(A @ B - X @ A) / max(np.linalg.norm(A @ B), 1.0)
        )
        return result
