"""
Check id -> class mapping and one entry point per statement
"""

import logging

from checks.determinant.conjecture_checks import Conjecture1Check
from checks.determinant.theorem_checks import (
    P2ConsequenceCheck,
    PolarFormCheck,
    Thm1Check,
    Thm2Check,
    Thm3Check,
    Thm4Check,
    Thm12CorollaryCheck,
)
from checks.spectral.logmaj_checks import GeoMeanLogMajCheck, Lemma1Check, WeylLogMajCheck
from checks.spectral.majorization_checks import Conjecture2Check, EvenPowerCheck
from checks.spectral.norm_chain_check import NormChainCheck
from utils.errors import DomainError
from utils.linalg_core import DEFAULT_EPS

logger = logging.getLogger(__name__)

# order is the stable report order
CHECK_CLASSES = {
    "eq1_polar": PolarFormCheck,
    "thm1": Thm1Check,
    "thm2": Thm2Check,
    "thm3": Thm3Check,
    "eq5_logmaj": GeoMeanLogMajCheck,
    "eq6_p2": P2ConsequenceCheck,
    "lemma1": Lemma1Check,
    "norm_chain": NormChainCheck,
    "thm4": Thm4Check,
    "weyl": WeylLogMajCheck,
    "even_power": EvenPowerCheck,
    "conj1": Conjecture1Check,
    "conj2": Conjecture2Check,
    "thm12_corollary": Thm12CorollaryCheck,
}

CONJECTURE_CHECK_IDS = ("conj1", "conj2")
PROVEN_CHECK_IDS = tuple(c for c in CHECK_CLASSES if c not in CONJECTURE_CHECK_IDS)


def get_available_checks():
    """Get check ids with their descriptions"""
    return {check_id: cls.description for check_id, cls in CHECK_CLASSES.items()}


def get_check(check_id, tol=None, eps=DEFAULT_EPS):
    """Instantiate the check registered under `check_id`"""
    if check_id not in CHECK_CLASSES:
        raise DomainError(f"Unknown check {check_id!r} (available: {', '.join(CHECK_CLASSES)})")
    return CHECK_CLASSES[check_id](tol=tol, eps=eps)


def check_param_name(check_id):
    return CHECK_CLASSES[check_id].param_name if check_id in CHECK_CLASSES else None


def run_check(check_id, A, B, params=None, tol=None, eps=DEFAULT_EPS):
    """
    Evaluate one check on a PSD pair

    Args:
        check_id: Registered check id
        A: PSD matrix
        B: PSD matrix
        params: dict with p, t, k (and orientation for thm3) as required
        tol: Tolerance, DETLAB_TOL or the defaults when None
        eps: Regularization strength

    Returns:
        CheckResult
    """
    return get_check(check_id, tol, eps).evaluate(A, B, **(params or {}))


def check_polar_form(A, B, tol=None):
    return run_check("eq1_polar", A, B, tol=tol)


def check_thm1(A, B, tol=None):
    return run_check("thm1", A, B, tol=tol)


def check_thm2(A, B, tol=None):
    return run_check("thm2", A, B, tol=tol)


def check_thm3(A, B, p, tol=None, orientation="ba"):
    return run_check("thm3", A, B, {"p": p, "orientation": orientation}, tol=tol)


def check_geo_mean_logmaj(A, B, t, tol=None):
    return run_check("eq5_logmaj", A, B, {"t": t}, tol=tol)


def check_p2_consequence(A, B, t, tol=None):
    return run_check("eq6_p2", A, B, {"t": t}, tol=tol)


def check_lemma1(A, B, tol=None):
    return run_check("lemma1", A, B, tol=tol)


def check_norm_chain(A, B, tol=None):
    return run_check("norm_chain", A, B, tol=tol)


def check_thm4(A, B, tol=None):
    return run_check("thm4", A, B, tol=tol)


def check_weyl_logmaj(A, B, tol=None):
    return run_check("weyl", A, B, tol=tol)


def check_even_power(A, B, k, tol=None):
    return run_check("even_power", A, B, {"k": k}, tol=tol)


def check_conjecture1(A, B, p, tol=None):
    return run_check("conj1", A, B, {"p": p}, tol=tol)


def check_conjecture2(A, B, p, tol=None):
    return run_check("conj2", A, B, {"p": p}, tol=tol)


def check_thm12_corollary(A, B, tol=None):
    return run_check("thm12_corollary", A, B, tol=tol)
