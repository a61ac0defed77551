"""Exception hierarchy.  ``exit_code`` is what the CLI returns for each class."""
from __future__ import annotations


class CIError(Exception):
    exit_code = 1


class ParseError(CIError):
    exit_code = 2

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.field = field
        self.line = line


class NotRegular(CIError):
    """The relation sequence fails the Hilbert series test for regularity."""

    exit_code = 3

    def __init__(self, level: int, degree: int):
        super().__init__(
            f"f_{level} is a zero divisor modulo (f_1..f_{level - 1}): "
            f"Hilbert series mismatch in degree {degree}"
        )
        self.level = level
        self.degree = degree


class DegreeBoundTooSmall(CIError):
    exit_code = 4

    def __init__(self, step: int, bound: int):
        super().__init__(
            f"syzygies of step {step} continue above internal degree {bound}; raise the degree bound"
        )
        self.step = step
        self.bound = bound


class Undetermined(CIError):
    exit_code = 5


class WindowTooShort(Undetermined):
    pass


class LiftFailed(CIError):
    """A linear lift that exactness guarantees turned out to be unsolvable."""

    exit_code = 6
