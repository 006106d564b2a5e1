"""
Spectral-norm chain ‖A♮B‖ >= ‖X‖, ‖X‖² <= ‖H‖·‖XH⁻¹Xᵀ‖, ‖H‖ <= λ₁(X)
with X = A^{1/2}B^{1/2} and H = A♯B
"""

import numpy as np

from . import SpectralCheck
from .. import CheckResult, Verdict, scalar_margin
from utils.linalg_core import psd_power, spectral_norm, symmetrize
from utils.majorization import spectrum_of_product
from utils.matrix_means import natural, sharp


class NormChainCheck(SpectralCheck):
    """Three links, each compared as a scalar inequality; the overall margin is the minimum"""

    check_id = "norm_chain"
    description = "||A natural B|| >= ||X||, ||X||^2 <= ||H|| ||X H^-1 X^T||, ||H|| <= lambda_1(X)"

    def compute(self, A, B, tol, params):
        A_half, B_half = psd_power(A, 0.5, tol), psd_power(B, 0.5, tol)
        X = A_half @ B_half
        H = sharp(A, B, 0.5, tol)
        N = natural(A, B, 0.5, tol)
        schur = symmetrize(X @ np.linalg.solve(H, X.T))

        x_norm, h_norm = spectral_norm(X), spectral_norm(H)
        links = {
            "natural_norm": scalar_margin(spectral_norm(N), x_norm, "lhs", tol),
            "schur_complement": scalar_margin(x_norm ** 2, h_norm * spectral_norm(schur), "rhs", tol),
            "geometric_mean_norm": scalar_margin(
                h_norm, float(spectrum_of_product(A_half, B_half, tol)[0]), "rhs", tol
            ),
        }
        worst = min(links, key=lambda name: links[name]["margin"])
        holds = all(link["holds"] for link in links.values())

        return CheckResult(
            check_id=self.check_id,
            lhs=links[worst]["lhs"],
            rhs=links[worst]["rhs"],
            margin=links[worst]["margin"],
            raw_margin=links[worst]["raw_margin"],
            verdict=Verdict.PASS if holds else Verdict.FAIL,
            tol_used=tol,
            details={
                "links": links,
                "worst_link": worst,
                "factorization_defect": float(
                    np.linalg.norm(schur - N) / max(np.linalg.norm(N), 1.0)
                ),
            },
        )
