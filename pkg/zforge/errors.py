"""Exception hierarchy shared by every zforge module.

Each error carries the exit code the command-line front end maps it to, so library
code only ever raises and the CLI decides how to report.
"""
from typing import Optional


class ZforgeError(Exception):
    exit_code = 1


class GraphError(ZforgeError):
    """Malformed graph data: duplicate edge, self-loop, unknown vertex id."""

    exit_code = 4


class InputError(ZforgeError):
    """An input file could not be read or does not have the expected shape."""

    exit_code = 4


class FormulaSyntaxError(ZforgeError):
    exit_code = 2

    def __init__(self, message: str, line: int, column: int, offset: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column
        self.offset = offset


class MonotoneViolation(ZforgeError):
    exit_code = 3

    def __init__(self, operator: str, line: Optional[int] = None, column: Optional[int] = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{operator} is not available in monotone mode{where}")
        self.operator = operator
        self.line = line
        self.column = column


class NonMonotoneGate(ZforgeError):
    exit_code = 3


class NetlistError(ZforgeError):
    exit_code = 4


class ArityMismatch(ZforgeError):
    exit_code = 4


class MissingVariable(ZforgeError):
    exit_code = 4


class UnknownVariable(ZforgeError):
    exit_code = 4


class InvalidPartition(ZforgeError):
    exit_code = 4


class LimitExceeded(ZforgeError):
    exit_code = 5

    def __init__(self, what: str, size: int, limit: int):
        super().__init__(f"{what} of {size} exceeds the configured limit of {limit}")
        self.size = size
        self.limit = limit


class OracleMismatch(ZforgeError):
    exit_code = 1


class ConfluenceViolation(ZforgeError):
    exit_code = 1
