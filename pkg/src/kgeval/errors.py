"""Exception hierarchy shared across the package."""

from __future__ import annotations


class KgEvalError(Exception):
    """Base class for every error raised by this package."""


# --- graph model ----------------------------------------------------------


class EmptyLabel(KgEvalError):
    """An entity label is empty after normalization."""


class DuplicateEntity(KgEvalError):
    pass


class DuplicateDependency(KgEvalError):
    pass


class DanglingReference(KgEvalError):
    """A dependency references an entity not declared in the entity list."""

    def __init__(self, dependency, label: str):
        self.dependency = dependency
        self.label = label
        super().__init__(f"dependency {dependency!r} references undeclared entity {label!r}")


class VerdictKeyMismatch(KgEvalError):
    """Grounding verdicts reference items absent from the reference graph."""


# --- predicate DSL / formats ----------------------------------------------


class DependencyParseError(KgEvalError):
    pass


class UnknownPredicate(DependencyParseError):
    pass


class ArityError(DependencyParseError):
    pass


class NestingTooDeep(DependencyParseError):
    pass


class UnbalancedParens(DependencyParseError):
    pass


class MalformedJson(KgEvalError):
    pass


class ManifestError(KgEvalError):
    """Base for positioned manifest errors; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class MalformedLine(ManifestError):
    pass


class InvalidLevel(ManifestError):
    pass


class InvalidDiscipline(ManifestError):
    pass


# --- fidelity --------------------------------------------------------------


class EmptyReference(KgEvalError):
    pass


class SizeCapExceeded(KgEvalError):
    pass


# --- readability -----------------------------------------------------------


class InvalidThresholds(KgEvalError):
    pass


class InvalidRegion(KgEvalError):
    pass


# --- extraction backend ----------------------------------------------------


class NoStructuredBlock(KgEvalError):
    """The model reply contains no recognizable verdict block."""


class BackendUnavailable(KgEvalError):
    pass


class RateLimited(KgEvalError):
    def __init__(self, message: str, retry_after: float | None = None):
        self.retry_after = retry_after
        super().__init__(message)


class ExhaustedRetries(KgEvalError):
    pass


# --- harness ----------------------------------------------------------------


class MissingImage(KgEvalError):
    pass


class MissingRegions(KgEvalError):
    pass


class EmptyManifest(KgEvalError):
    pass


class LengthMismatch(KgEvalError):
    pass


class ZeroVariance(KgEvalError):
    pass


class NoOverlap(KgEvalError):
    pass
