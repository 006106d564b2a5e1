"""
Matrix JSON text format: {"n": int, "rows": [[...], ...]}, row-major.
Pair files hold {"A": Matrix, "B": Matrix}.
"""

import json
import logging
import math
from pathlib import Path

import numpy as np

from utils.errors import MatrixParseError

logger = logging.getLogger(__name__)

CORPUS_DIR = Path(__file__).resolve().parent.parent / "corpus"
WORKED_EXAMPLE_FILE = "worked_example.json"


def matrix_to_dict(M):
    M = np.asarray(M, dtype=np.float64)
    return {"n": int(M.shape[0]), "rows": [[float(v) for v in row] for row in M]}


def matrix_from_dict(data, field="matrix", line=None):
    """
    Parse one Matrix object

    Args:
        data: Decoded JSON object
        field: Field path used in error messages
        line: Line of the object in its source file, if known

    Raises:
        MatrixParseError: with the offending field path
    """
    if not isinstance(data, dict):
        raise MatrixParseError("Matrix must be a JSON object", line=line, field=field)
    if "n" not in data or "rows" not in data:
        raise MatrixParseError("Matrix needs 'n' and 'rows'", line=line, field=field)

    n = data["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise MatrixParseError(f"'n' must be a positive integer, got {n!r}", line=line, field=f"{field}.n")

    rows = data["rows"]
    if not isinstance(rows, list) or len(rows) != n:
        raise MatrixParseError(f"'rows' must be a list of {n} rows", line=line, field=f"{field}.rows")

    values = np.empty((n, n))
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise MatrixParseError(f"row must have {n} entries", line=line, field=f"{field}.rows[{i}]")
        for j, value in enumerate(row):
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
                raise MatrixParseError(
                    f"entry must be a finite number, got {value!r}", line=line, field=f"{field}.rows[{i}][{j}]"
                )
            values[i, j] = float(value)
    return values


def _line_of_key(text, key):
    """1-based line of the first `"key"` occurrence, or None"""
    marker = f'"{key}"'
    for number, line in enumerate(text.splitlines(), start=1):
        if marker in line:
            return number
    return None


def load_matrix_pair(path):
    """
    Read an {"A": Matrix, "B": Matrix} file

    Returns:
        (A, B) as float64 ndarrays

    Raises:
        MatrixParseError: malformed JSON (with line/column) or bad fields
        OSError: unreadable file
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise MatrixParseError(f"Invalid JSON in {path}: {e.msg} at column {e.colno}", line=e.lineno)

    if not isinstance(data, dict):
        raise MatrixParseError(f"{path} must hold a JSON object with 'A' and 'B'", line=1)
    matrices = []
    for key in ("A", "B"):
        if key not in data:
            raise MatrixParseError(f"{path} is missing matrix {key!r}", field=key)
        matrices.append(matrix_from_dict(data[key], field=key, line=_line_of_key(text, key)))

    A, B = matrices
    if A.shape != B.shape:
        raise MatrixParseError(f"A is {A.shape[0]}x{A.shape[0]} but B is {B.shape[0]}x{B.shape[0]}", field="B.n")
    logger.debug(f"Loaded {A.shape[0]}x{A.shape[0]} matrix pair from {path}")
    return A, B


def save_matrix_pair(path, A, B):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump({"A": matrix_to_dict(A), "B": matrix_to_dict(B)}, f, indent=2)
        f.write("\n")
    return path


def corpus_path(name):
    """Path of a bundled corpus file; absolute paths pass through"""
    path = Path(name)
    return path if path.is_absolute() else CORPUS_DIR / path


def load_corpus_pair(name=WORKED_EXAMPLE_FILE):
    return load_matrix_pair(corpus_path(name))
