"""Exception hierarchy shared by every module."""
from __future__ import annotations


class RepairLPError(Exception):
    """Base class for all errors raised by repairlp."""


class SchemaError(RepairLPError):
    """A fact or atom does not conform to the declared schema."""


class ParseError(RepairLPError):
    def __init__(self, message: str, span=None):
        self.span = span
        if span is not None:
            message = f"{span}: {message}"
        super().__init__(message)


class UnsafeError(RepairLPError):
    """A rule, constraint or query has a variable that no positive literal binds."""


class CompileError(RepairLPError):
    """A constraint cannot be compiled by the requested routine."""


class GroundingError(RepairLPError):
    pass


class ResourceLimitExceeded(RepairLPError):
    """The solver hit its branch ceiling or the oracle its universe bound."""


class InconsistentProgram(RepairLPError):
    """The program has no consistent semantics (its only answer set is the set of all literals)."""


class NoAdmissibleRepair(RepairLPError):
    """No answer set survived strong-constraint filtering."""
