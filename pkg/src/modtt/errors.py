from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class Span:
    line: int
    col: int

    def __str__(self):
        return f"{self.line}:{self.col}"


KINDS = (
    "mismatch",
    "not-a-function",
    "not-a-pair",
    "extent-side-condition",
    "scope",
    "phase-violation",
    "dynamic-in-static",
    "needs-annotation",
)


class TypeCheckError(Exception):
    """A failed typing or elaboration premise.

    ``kind`` is one of :data:`KINDS`; ``expected``/``actual`` hold printed forms
    when the failure is a comparison.
    """

    def __init__(self, kind: str, message: str, *, expected: Optional[str] = None,
                 actual: Optional[str] = None, span: Optional[Span] = None):
        assert kind in KINDS, kind
        super().__init__(message)
        self.kind = kind
        self.message = message
        self.expected = expected
        self.actual = actual
        self.span = span

    def with_span(self, span):
        if self.span is None and span is not None:
            self.span = span
        return self

    def to_json(self):
        return {
            "kind": self.kind,
            "message": self.message,
            "span": None if self.span is None else {"line": self.span.line, "col": self.span.col},
            "expected": self.expected,
            "actual": self.actual,
        }

    def __str__(self):
        where = f"{self.span}: " if self.span else ""
        s = f"{where}{self.kind}: {self.message}"
        if self.expected is not None:
            s += f"\n  expected: {self.expected}"
        if self.actual is not None:
            s += f"\n  actual:   {self.actual}"
        return s


class ParseError(Exception):
    def __init__(self, message: str, span: Span):
        super().__init__(f"{span}: {message}")
        self.message = message
        self.span = span


class FuelExhausted(Exception):
    pass


class ObservationError(Exception):
    """An outcome that is not an observable boolean was compared."""


class OracleTimeout(Exception):
    pass
