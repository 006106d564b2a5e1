"""
Additive majorization between λ(A² + |BA|ᵖ) and λ(A² + |AB|ᵖ)
"""

import numpy as np

from . import SpectralCheck
from .. import PowerParamMixin, Verdict
from utils.errors import DomainError
from utils.majorization import majorizes


class EvenPowerCheck(SpectralCheck):
    """
    λ(A² + |BA|^{2k}) ≻ λ(A² + |AB|^{2k}) and its determinant consequence
    det(A² + |AB|^{2k}) >= det(A² + |BA|^{2k})

    Passes only when both statements hold. margin is the majorization margin;
    the determinant margin and whether majorization => determinant held are
    kept in details.
    """

    check_id = "even_power"
    param_name = "k"
    description = "lambda(A^2+|BA|^2k) > lambda(A^2+|AB|^2k), det form"

    def validate_param(self, value):
        if isinstance(value, bool) or float(value) != int(float(value)) or int(float(value)) < 1:
            raise DomainError(f"Check {self.check_id} needs a positive integer k, got {value}")
        return int(float(value))

    def compute(self, A, B, tol, params):
        p = 2.0 * params["k"]
        X = self.abs_sum(A, B, p, "ba", tol)
        Y = self.abs_sum(A, B, p, "ab", tol)
        x_spectrum, y_spectrum = self.spectrum(X, tol), self.spectrum(Y, tol)

        verdict = majorizes(x_spectrum, y_spectrum, tol)
        determinant = self.determinant_implication(verdict, Y, X, tol)
        result = self.majorization_result(verdict, x_spectrum, y_spectrum, tol, details={
            "determinant": determinant,
            "determinant_margin": determinant["margin"],
            "implication_holds": determinant["implication_holds"],
        })
        if not determinant["holds"]:
            result.verdict = Verdict.FAIL
        return result


class Conjecture2Check(PowerParamMixin, SpectralCheck):
    """
    λ(A² + |BA|ᵖ) ≻ λ(A² + |AB|ᵖ) for all p > 0

    trace|BA|ᵖ = trace|AB|ᵖ always holds (BA and AB share singular values);
    its defect is reported before the majorization verdict.
    """

    check_id = "conj2"
    description = "lambda(A^2+|BA|^p) > lambda(A^2+|AB|^p), p>0 (conjecture)"
    p_upper = None
    strictly_positive = True

    def is_proven(self, params):
        return False

    def compute(self, A, B, tol, params):
        p = params["p"]
        X = self.abs_sum(A, B, p, "ba", tol)
        Y = self.abs_sum(A, B, p, "ab", tol)
        trace_x, trace_y = float(np.trace(X)), float(np.trace(Y))
        trace_defect = abs(trace_x - trace_y) / max(abs(trace_x), abs(trace_y), 1.0)
        if trace_defect > tol.scaled(1.0):
            self.logger.warning(f"{self.check_id} p={p}: trace defect {trace_defect:.3e} above tolerance")

        x_spectrum, y_spectrum = self.spectrum(X, tol), self.spectrum(Y, tol)
        verdict = majorizes(x_spectrum, y_spectrum, tol)
        determinant = self.determinant_implication(verdict, Y, X, tol)
        return self.majorization_result(verdict, x_spectrum, y_spectrum, tol, details={
            "trace_defect": trace_defect,
            "determinant": determinant,
            "implication_holds": determinant["implication_holds"],
        })
