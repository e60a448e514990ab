"""Exception hierarchy.

Every error carries a stable ``code`` string (the name used in reports and
HTTP bodies) plus optional location data.  Codes are part of the external
contract; the Python class names are implementation detail.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class SourceRef:
    """A half-open source region, 1-based lines and columns."""

    file: str
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __post_init__(self) -> None:
        if (self.end_line, self.end_col) < (self.start_line, self.start_col):
            raise ValueError("source region ends before it starts")

    def __str__(self) -> str:
        return f"{self.file}:{self.start_line}:{self.start_col}"


class Error(Exception):
    """Base class; ``code`` is the stable machine-readable error name."""

    code = "Error"

    def __init__(self, message: str, *, uri=None, source_ref: Optional[SourceRef] = None):
        super().__init__(message)
        self.message = message
        self.uri = uri
        self.source_ref = source_ref

    def __str__(self) -> str:
        loc = f" at {self.source_ref}" if self.source_ref else ""
        return f"{self.code}: {self.message}{loc}"


# -- kernel ------------------------------------------------------------------

class MalformedUri(Error):
    code = "MalformedUri"


class InvalidPosition(Error):
    code = "InvalidPosition"


class NotFound(Error):
    code = "NotFound"


class DuplicateDeclaration(Error):
    code = "DuplicateDeclaration"


# -- concrete syntax ---------------------------------------------------------

class ParseError(Error):
    code = "SyntaxError"


class UnresolvedName(ParseError):
    code = "UnresolvedName"

    def __init__(self, name: str, *, source_ref: Optional[SourceRef] = None):
        super().__init__(f"cannot resolve name '{name}'", source_ref=source_ref)
        self.name = name


class NonAssociativeChain(ParseError):
    code = "NonAssociativeChain"


# -- module structure --------------------------------------------------------

class IncludeCycle(Error):
    code = "IncludeCycle"


class MetaCycle(Error):
    code = "MetaCycle"


class NameClash(Error):
    code = "NameClash"


class MissingAssignment(Error):
    code = "MissingAssignment"


class NoFoundation(Error):
    code = "NoFoundation"


# -- typing (raised by foundations) -------------------------------------------

class TypingError(Error):
    code = "TypingError"


class NotFunctionType(TypingError):
    code = "NotFunctionType"


class TypeMismatch(TypingError):
    code = "TypeMismatch"


class UntypedConstant(TypingError):
    code = "UntypedConstant"


class UnboundVariable(TypingError):
    code = "UnboundVariable"


class KindError(TypingError):
    code = "KindError"


class BudgetExceeded(TypingError):
    code = "BudgetExceeded"


# -- services ----------------------------------------------------------------

class MissingManifest(Error):
    code = "MissingManifest"


class DuplicateId(Error):
    code = "DuplicateId"


class QueryFormatError(Error):
    code = "MalformedQuery"


# -- frontends ---------------------------------------------------------------

class CommandError(Error):
    code = "CommandError"
