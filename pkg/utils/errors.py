"""
Exception types raised by the matrix primitives, checks and report tooling
"""

import numpy as np


class DetlabError(Exception):
    """Base class for all errors raised by this project"""


class DimensionError(DetlabError, ValueError):
    """Input shapes are not square or do not match"""


class DomainError(DetlabError, ValueError):
    """Input lies outside the domain of an operation"""


class NotPSDError(DomainError):
    """A matrix required to be positive semidefinite is not"""


class SingularMatrixError(DomainError, np.linalg.LinAlgError):
    """A matrix required to be invertible is (numerically) singular"""


class ConfigError(DetlabError, ValueError):
    """A search configuration failed validation"""


class MatrixParseError(DetlabError, ValueError):
    """
    A matrix or matrix-pair file could not be parsed

    Args:
        message: What went wrong
        line: 1-based line number in the source file, when known
        field: Dotted path of the offending field, e.g. "A.rows[1][0]"
    """

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field is not None:
            location.append(f"field {field}")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)


class ReportParseError(DetlabError, ValueError):
    """A search report file is malformed"""
