"""
Base classes for inequality checks

Each check evaluates one statement on a PSD pair (A, B) and returns a
CheckResult with a signed margin (positive = satisfied with room). A failed
inequality is data, never an exception; only structural problems raise.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from utils.errors import DimensionError, DomainError, NotPSDError
from utils.linalg_core import (
    DEFAULT_EPS,
    Tolerance,
    as_matrix,
    condition_number,
    is_psd,
    regularize,
)
from utils.matrix_means import conditioning_warning

MACHINE_EPS = float(np.finfo(np.float64).eps)


class Verdict(str, Enum):
    """Outcome of a single check"""

    PASS = "pass"
    FAIL = "fail"
    WARN = "warn"


def to_jsonable(value):
    """Convert numpy scalars/arrays and nested containers to plain Python"""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if hasattr(value, "to_dict"):
        return to_jsonable(value.to_dict())
    return value


@dataclass
class CheckResult:
    """
    Verdict of one inequality on one input pair

    lhs/rhs are the two sides in the order the statement is written: scalars
    for determinant and norm inequalities, descending eigenvalue vectors for
    majorization statements. margin is scale-normalized; raw_margin is the
    plain difference (favored side minus the other).
    """

    check_id: str
    lhs: Any
    rhs: Any
    margin: float
    verdict: Verdict
    tol_used: Tolerance
    raw_margin: float = 0.0
    params: dict = field(default_factory=dict)
    proven: bool = True
    accuracy_warning: bool = False
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.verdict is Verdict.PASS

    def to_dict(self):
        return to_jsonable({
            "check_id": self.check_id,
            "params": self.params,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "raw_margin": self.raw_margin,
            "verdict": self.verdict,
            "proven": self.proven,
            "accuracy_warning": self.accuracy_warning,
            "tol_used": self.tol_used.to_dict(),
            "details": self.details,
        })


def scalar_margin(lhs, rhs, favored, tol):
    """
    Compare the two sides of a scalar inequality

    Args:
        lhs: Left-hand side as written
        rhs: Right-hand side as written
        favored: "lhs" or "rhs", the side expected to be larger
        tol: Tolerance used for the pass threshold

    Returns:
        dict with lhs, rhs, raw_margin, margin, threshold and holds
    """
    lhs, rhs = float(lhs), float(rhs)
    high, low = (lhs, rhs) if favored == "lhs" else (rhs, lhs)
    raw = high - low
    threshold = tol.scaled(max(abs(lhs), abs(rhs), 1.0))
    return {
        "lhs": lhs,
        "rhs": rhs,
        "raw_margin": raw,
        "margin": raw / max(abs(high), 1.0),
        "threshold": threshold,
        "holds": bool(raw >= -threshold),
    }


class InequalityCheck:
    """
    Base class for all checks

    Subclasses set check_id, param_name ("p", "t", "k" or None) and
    implement compute() on the regularized pair.
    """

    check_id = None
    param_name = None
    default_param = None
    description = ""

    def __init__(self, tol=None, eps=DEFAULT_EPS):
        """Initialize the check"""
        self.tol = tol or Tolerance.from_env()
        self.eps = float(eps)
        self.logger = logging.getLogger(__name__)

    def compute(self, A, B, tol, params):
        """Evaluate the statement on regularized A, B; return a CheckResult"""
        raise NotImplementedError("Subclasses must implement compute()")

    def validate_param(self, value):
        return float(value)

    def normalize_params(self, params):
        """Validate parameters; unknown keys are rejected"""
        params = {k: v for k, v in (params or {}).items() if v is not None}
        normalized = {}
        if self.param_name:
            value = params.pop(self.param_name, self.default_param)
            if value is None:
                raise DomainError(f"Check {self.check_id} needs parameter {self.param_name!r}")
            normalized[self.param_name] = self.validate_param(value)
        normalized.update(self.extra_params(params))
        if params:
            raise DomainError(f"Check {self.check_id} does not take parameters {sorted(params)}")
        return normalized

    def extra_params(self, params):
        """Pop and validate additional parameters from `params`"""
        return {}

    def is_proven(self, params):
        return True

    def rounding_tolerance(self, cond_a, cond_b):
        """Tolerance covering the rounding error expected at this conditioning"""
        return self.tol.widened(MACHINE_EPS * cond_a * cond_b)

    def evaluate(self, A, B, **params):
        """
        Run the check on a PSD pair

        The verdict is always judged against the configured tolerance. A
        failure that disappears under the rounding tolerance, or any failure
        on an input with cond > 1e12, is reported as warn with
        accuracy_warning set.

        Args:
            A: PSD matrix
            B: PSD matrix of the same size
            **params: p, t or k as the check requires

        Returns:
            CheckResult

        Raises:
            DimensionError, NotPSDError, DomainError on structural problems
        """
        A = as_matrix(A, "A")
        B = as_matrix(B, "B")
        if A.shape != B.shape:
            raise DimensionError(f"A is {A.shape} but B is {B.shape}")
        for name, M in (("A", A), ("B", B)):
            if not is_psd(M, self.tol):
                raise NotPSDError(f"{name} is not positive semidefinite")

        params = self.normalize_params(params)
        A_reg = regularize(A, self.eps)
        B_reg = regularize(B, self.eps)
        cond_a, cond_b = condition_number(A_reg), condition_number(B_reg)
        rounding_tol = self.rounding_tolerance(cond_a, cond_b)

        result = self.compute(A_reg, B_reg, self.tol, params)
        result.params = params
        result.proven = self.is_proven(params)
        ill_conditioned = any([conditioning_warning(A_reg), conditioning_warning(B_reg)])
        within_rounding = False
        if result.verdict is Verdict.FAIL and rounding_tol is not self.tol:
            within_rounding = self.compute(A_reg, B_reg, rounding_tol, params).verdict is Verdict.PASS
        result.accuracy_warning = ill_conditioned or within_rounding
        result.details.setdefault("condition_numbers", [cond_a, cond_b])
        result.details["rounding_tolerance"] = rounding_tol.to_dict()
        result.details["within_rounding"] = within_rounding
        if result.verdict is Verdict.FAIL and result.accuracy_warning:
            result.verdict = Verdict.WARN
        if result.verdict is not Verdict.PASS:
            self.logger.debug(f"{self.check_id} {params}: {result.verdict.value} (margin {result.margin:.3e})")
        return result

    def scalar_result(self, lhs, rhs, favored, tol, details=None):
        """CheckResult for a scalar inequality"""
        comparison = scalar_margin(lhs, rhs, favored, tol)
        details = dict(details or {})
        details["threshold"] = comparison["threshold"]
        return CheckResult(
            check_id=self.check_id,
            lhs=comparison["lhs"],
            rhs=comparison["rhs"],
            margin=comparison["margin"],
            raw_margin=comparison["raw_margin"],
            verdict=Verdict.PASS if comparison["holds"] else Verdict.FAIL,
            tol_used=tol,
            details=details,
        )

    def majorization_result(self, verdict, lhs, rhs, tol, details=None):
        """CheckResult whose margin is the majorization verdict's margin"""
        details = dict(details or {})
        details["majorization"] = verdict.to_dict()
        return CheckResult(
            check_id=self.check_id,
            lhs=[float(v) for v in lhs],
            rhs=[float(v) for v in rhs],
            margin=float(verdict.margin),
            raw_margin=float(verdict.margin),
            verdict=Verdict.PASS if verdict.holds else Verdict.FAIL,
            tol_used=tol,
            details=details,
        )


class PowerParamMixin:
    """Validation for the exponent p (p >= 0, flagged out of range above 2)"""

    param_name = "p"
    p_upper = 2.0
    strictly_positive = False

    def validate_param(self, value):
        p = float(value)
        if not np.isfinite(p) or p < 0 or (self.strictly_positive and p == 0):
            bound = "> 0" if self.strictly_positive else ">= 0"
            raise DomainError(f"Check {self.check_id} needs finite p {bound}, got {value}")
        return p

    def normalize_params(self, params):
        params = dict(params or {})
        # derived flag; present when params come back from a stored record
        params.pop("out_of_range", None)
        normalized = super().normalize_params(params)
        if self.p_upper is not None:
            normalized["out_of_range"] = bool(normalized["p"] > self.p_upper)
        return normalized


class WeightParamMixin:
    """Validation for the mean weight t in [0, 1]"""

    param_name = "t"
    default_param = 0.5

    def validate_param(self, value):
        t = float(value)
        if not 0.0 <= t <= 1.0:
            raise DomainError(f"Check {self.check_id} needs t in [0, 1], got {value}")
        return t
