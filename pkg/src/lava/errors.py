"""Shared error vocabulary: issue reports for validators, raised errors for executors.

Validators return an :class:`IssueReport` (possibly empty = ok) so callers can
show every violation at once.  Pipeline executors raise :class:`EngineError`
with a stable ``code`` and, where relevant, the pipeline ``stage`` that failed.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Issue:
    """One validation violation with a stable machine-readable code."""

    code: str
    message: str
    field: str | None = None

    def to_doc(self) -> dict:
        doc = {"code": self.code, "message": self.message}
        if self.field is not None:
            doc["field"] = self.field
        return doc


@dataclass
class IssueReport:
    """Accumulates issues; empty report means the checked object is valid."""

    issues: list[Issue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def add(self, code: str, message: str, field: str | None = None) -> None:
        self.issues.append(Issue(code, message, field))

    def codes(self) -> set[str]:
        return {i.code for i in self.issues}

    def to_doc(self) -> list[dict]:
        return [i.to_doc() for i in self.issues]

    def __bool__(self) -> bool:  # truthy when there ARE issues, like a non-empty list
        return bool(self.issues)


class EngineError(Exception):
    """Raised when a pipeline operation cannot proceed.

    ``code`` is one of the stable identifiers used across the HTTP API
    (EmptyScope, MissingRequiredInput, MethodMismatch, ...).  ``stage``
    labels which pipeline stage failed when an indicator execution is
    multi-stage (query, analysis, merge, second-level, visualization).
    """

    def __init__(
        self,
        code: str,
        message: str,
        *,
        stage: str | None = None,
        issues: IssueReport | None = None,
    ):
        super().__init__(message)
        self.code = code
        self.message = message
        self.stage = stage
        self.issues = issues or IssueReport()

    def to_doc(self) -> dict:
        doc: dict = {"code": self.code, "message": self.message}
        if self.stage:
            doc["stage"] = self.stage
        if self.issues:
            doc["issues"] = self.issues.to_doc()
        return doc

    def __repr__(self) -> str:
        stage = f", stage={self.stage!r}" if self.stage else ""
        return f"EngineError({self.code!r}, {self.message!r}{stage})"
