"""
Replay a single check on a stored matrix pair or on a trial from a report
"""

import logging

from checks.registry import get_check
from report_summary import load_records
from search_runner import reproduce_trial
from utils.errors import ReportParseError
from utils.linalg_core import DEFAULT_EPS
from utils.matrix_io import load_matrix_pair

logger = logging.getLogger(__name__)


def replay(pair_path, check_id, params=None, tol=None, eps=DEFAULT_EPS):
    """
    Run one check on an {"A": Matrix, "B": Matrix} file

    Args:
        pair_path: Matrix pair file
        check_id: Registered check id
        params: p, t, k (and orientation for thm3)
        tol: Tolerance; DETLAB_TOL or the defaults when None
        eps: Regularization strength

    Returns:
        CheckResult

    Raises:
        MatrixParseError: malformed pair file
    """
    A, B = load_matrix_pair(pair_path)
    check = get_check(check_id, tol, eps)
    result = check.evaluate(A, B, **(params or {}))
    logger.info(f"Replayed {check_id} on {pair_path}: {result.verdict.value} (margin {result.margin:.6e})")
    return result


def replay_trial(report_path, trial_index):
    """
    Re-run a trial stored in a report and compare margins

    Returns:
        (record, CheckResult, margin_difference); the difference is None when
        the stored trial had no margin (a recorded structural error)

    Raises:
        ReportParseError: the report has no record with that trial index
    """
    for record in load_records(report_path):
        if int(record["trial_index"]) == int(trial_index):
            break
    else:
        raise ReportParseError(f"{report_path} has no trial {trial_index}")

    result = reproduce_trial(record)
    stored = record.get("margin")
    difference = None if stored is None else abs(result.margin - float(stored))
    if difference is not None:
        logger.info(f"Trial {trial_index} ({record['check_id']}): margin difference {difference:.3e}")
    return record, result, difference
