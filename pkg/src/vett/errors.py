"""Error hierarchy and diagnostics.

Every checker-facing failure is a ``VettError`` carrying a stable error
code.  ``Diagnostic`` is the reporting wrapper: it pins the error to a
source span and optionally snapshots the transformation context that was
in scope when checking failed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional


@dataclass(frozen=True)
class Span:
    file: str = "<input>"
    line: int = 0
    col: int = 0
    end_line: int = 0
    end_col: int = 0

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col}"


class VettError(Exception):
    code = "E000"

    def __init__(self, message: str, span: Optional[Span] = None, phi=None):
        super().__init__(message)
        self.message = message
        self.span = span
        self.phi = phi


class ParseError(VettError):
    code = "E001"


class ScopeError(VettError):
    code = "E010"


class DuplicateName(VettError):
    code = "E011"


class NotSmall(VettError):
    code = "E020"


class UniverseMismatch(VettError):
    code = "E021"


class TypeMismatch(VettError):
    code = "E030"


class VariableMismatch(VettError):
    code = "E031"


class ProjectionOnNonProduct(VettError):
    code = "E032"


class GraphComponentMismatch(VettError):
    code = "E033"


class VarianceError(VettError):
    code = "E034"


class ArityError(VettError):
    code = "E035"


class EndpointMismatch(VettError):
    code = "E036"


class FullGeneralityError(VettError):
    code = "E037"


class LinearityError(VettError):
    code = "E040"


class ContextSplitError(VettError):
    code = "E041"


class BoundaryMismatch(VettError):
    code = "E042"


class DecompositionFailure(VettError):
    code = "E043"


class FuelExhausted(VettError):
    code = "E050"


class Unevaluable(VettError):
    code = "E060"


class IllDefinedOnQuotient(VettError):
    code = "E061"


class CapExceeded(VettError):
    code = "E062"


class ModelError(VettError):
    code = "E063"


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    span: Span
    code: str
    message: str
    phi_snapshot: Optional[str] = field(default=None)

    @classmethod
    def from_error(cls, err: VettError, default_span: Optional[Span] = None,
                   phi_printer=None) -> "Diagnostic":
        span = err.span or default_span or Span()
        snap = None
        if err.phi is not None and phi_printer is not None:
            snap = phi_printer(err.phi)
        return cls("error", span, err.code, err.message, snap)

    def render(self) -> str:
        out = f"{self.span}: [{self.code}] {self.message}"
        if self.phi_snapshot:
            block = "\n".join("  | " + line for line in self.phi_snapshot.splitlines())
            out += "\n  in context:\n" + block
        return out
