"""
Search report reading and aggregation

Records are JSON Lines, one trial per line. The summary groups them per check
(counts by verdict, min margin with its trial and seed, a margin histogram
over fixed edges) and lists counterexample candidates for the conjecture
checks and boundary witnesses for thm3.
"""

import json
import logging
from pathlib import Path

import numpy as np
import pandas as pd

from checks.registry import CONJECTURE_CHECK_IDS, PROVEN_CHECK_IDS, get_check
from utils.errors import DetlabError, ReportParseError
from utils.linalg_core import Tolerance

logger = logging.getLogger(__name__)

REQUIRED_FIELDS = ("trial_index", "check_id", "verdict")

VERDICTS = ("pass", "fail", "warn")

# signed decades; margins are scale-normalized so these read the same for every n
HISTOGRAM_EDGES = [-np.inf, -1.0, -1e-3, -1e-6, -1e-9, 0.0, 1e-9, 1e-6, 1e-3, 1.0, np.inf]


def _edge_label(low, high):
    return f"[{low:g}, {high:g})"


HISTOGRAM_LABELS = [_edge_label(lo, hi) for lo, hi in zip(HISTOGRAM_EDGES[:-1], HISTOGRAM_EDGES[1:])]


def load_records(report_path):
    """
    Read a JSON Lines report

    A malformed final line (an interrupted run) is skipped with a warning;
    a malformed line anywhere else is an error.

    Returns:
        list of record dicts

    Raises:
        ReportParseError: malformed line or record without the required fields
        OSError: unreadable file
    """
    path = Path(report_path)
    with open(path, "r", encoding="utf-8") as f:
        lines = f.read().splitlines()
    while lines and not lines[-1].strip():
        lines.pop()

    records = []
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as e:
            if number == len(lines):
                logger.warning(f"Skipping truncated last line {number} of {path}")
                break
            raise ReportParseError(f"{path} line {number}: invalid JSON ({e.msg})")
        if not isinstance(record, dict):
            raise ReportParseError(f"{path} line {number}: record must be a JSON object")
        missing = [name for name in REQUIRED_FIELDS if name not in record]
        if missing:
            raise ReportParseError(f"{path} line {number}: record is missing {missing}")
        if record["verdict"] not in VERDICTS:
            raise ReportParseError(f"{path} line {number}: unknown verdict {record['verdict']!r}")
        records.append(record)

    logger.debug(f"Loaded {len(records)} records from {path}")
    return records


def record_proven(record):
    """
    Whether a failure of `record` counts against a proven statement

    Uses the stored flag when present; otherwise asks the registered check,
    so thm3 outside p <= 2 or in the "ab" orientation does not count.
    """
    if record.get("proven") is not None:
        return bool(record["proven"])
    try:
        check = get_check(record["check_id"], Tolerance())
        return bool(check.is_proven(check.normalize_params(record.get("params"))))
    except (DetlabError, TypeError, ValueError):
        return record["check_id"] in PROVEN_CHECK_IDS


def records_frame(records):
    """One row per record with the columns the summary needs"""
    columns = ["trial_index", "seed", "check_id", "n", "margin", "verdict", "proven"]
    rows = [{name: record.get(name) for name in columns} for record in records]
    frame = pd.DataFrame(rows, columns=columns)
    # 64-bit unsigned seeds do not survive int64/float64 columns
    frame["seed"] = pd.Series([record.get("seed") for record in records], dtype=object)
    frame["margin"] = pd.to_numeric(frame["margin"], errors="coerce")
    frame["proven"] = pd.Series([record_proven(record) for record in records], dtype=bool)
    return frame


def margin_histogram(margins):
    """Counts per fixed margin bin; errored trials (no margin) are left out"""
    binned = pd.cut(margins.dropna(), bins=HISTOGRAM_EDGES, right=False, labels=HISTOGRAM_LABELS)
    counts = binned.value_counts(sort=False)
    return {label: int(counts.get(label, 0)) for label in HISTOGRAM_LABELS}


def _check_summary(group):
    verdicts = group["verdict"].value_counts()
    summary = {
        "count": int(len(group)),
        "pass": int(verdicts.get("pass", 0)),
        "fail": int(verdicts.get("fail", 0)),
        "warn": int(verdicts.get("warn", 0)),
        "proven": bool(group["proven"].any()),
        "proven_failures": int(((group["verdict"] == "fail") & group["proven"]).sum()),
        "min_margin": None,
        "worst_trial": None,
        "worst_seed": None,
        "histogram": margin_histogram(group["margin"]),
    }
    margins = group["margin"].dropna()
    if not margins.empty:
        worst = group.loc[margins.idxmin()]
        summary["min_margin"] = float(worst["margin"])
        summary["worst_trial"] = int(worst["trial_index"])
        summary["worst_seed"] = None if pd.isna(worst["seed"]) else int(worst["seed"])
    return summary


def _is_boundary_witness(record):
    if record["check_id"] != "thm3":
        return False
    params = record.get("params") or {}
    if record["verdict"] == "fail" and (params.get("out_of_range") or params.get("orientation") == "ab"):
        return True
    orientations = (record.get("details") or {}).get("orientations") or {}
    return bool(params.get("out_of_range")) and not orientations.get("ba", {}).get("holds", True)


def build_summary(records, config=None, tool_version=None):
    """
    Aggregate records into the summary document

    Args:
        records: list of record dicts (load_records output)
        config: Config echo to embed
        tool_version: Version string to embed

    Returns:
        dict
    """
    frame = records_frame(records)
    per_check = {}
    for check_id, group in frame.groupby("check_id", sort=False):
        per_check[str(check_id)] = _check_summary(group)

    candidates = [
        record for record in records
        if record["check_id"] in CONJECTURE_CHECK_IDS and record["verdict"] == "fail"
    ]
    witnesses = [
        {
            "trial_index": record["trial_index"],
            "seed": record.get("seed"),
            "params": record.get("params"),
            "lhs": record.get("lhs"),
            "rhs": record.get("rhs"),
            "sampler_a": record.get("sampler_a"),
            "orientations": (record.get("details") or {}).get("orientations"),
        }
        for record in records if _is_boundary_witness(record)
    ]
    proven_failures = sum(check["proven_failures"] for check in per_check.values())

    return {
        "tool_version": tool_version,
        "config": config,
        "total_records": int(len(frame)),
        "checks": per_check,
        "counterexample_candidates": candidates,
        "boundary_witnesses": witnesses,
        "proven_failures": int(proven_failures),
    }


def write_summary(summary, summary_path):
    path = Path(summary_path)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(summary, f, indent=2)
        f.write("\n")
    return path


def format_summary(summary):
    """Human-readable table plus candidate and witness sections"""
    lines = ["=" * 60, "SEARCH SUMMARY", "=" * 60]
    lines.append(f"Records: {summary['total_records']}")

    if summary["checks"]:
        table = pd.DataFrame.from_dict(summary["checks"], orient="index")
        table = table[["count", "pass", "fail", "warn", "min_margin", "worst_seed"]]
        table.index.name = "check"
        lines.append(table.to_string(float_format=lambda v: f"{v:.3e}"))
    else:
        lines.append("No records.")

    for check_id, check in summary["checks"].items():
        if check["proven_failures"]:
            lines.append(f"❌ {check_id}: {check['proven_failures']} proven-statement failures")
    if not summary["proven_failures"]:
        lines.append("✅ No proven-statement failures")

    candidates = summary["counterexample_candidates"]
    lines.append("")
    lines.append(f"Counterexample candidates: {len(candidates)}")
    for record in candidates:
        lines.append(
            f"  {record['check_id']} trial {record['trial_index']} seed {record.get('seed')} "
            f"params {record.get('params')} margin {record.get('margin')}"
        )

    witnesses = summary.get("boundary_witnesses", [])
    if witnesses:
        lines.append("")
        lines.append(f"Boundary witnesses (thm3 outside its proven range): {len(witnesses)}")
        for witness in witnesses:
            lines.append(
                f"  trial {witness['trial_index']} params {witness['params']} "
                f"lhs {witness['lhs']} rhs {witness['rhs']}"
            )
    return "\n".join(lines)


def summarize(report_path):
    """
    Summarize a report file

    Returns:
        (text, exit_code): exit code 1 if any proven statement failed, else 0

    Raises:
        ReportParseError: malformed report
    """
    summary = build_summary(load_records(report_path))
    exit_code = 1 if summary["proven_failures"] else 0
    return format_summary(summary), exit_code
