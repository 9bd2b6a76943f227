"""Exception types shared across the toolkit."""

from __future__ import annotations


class MincovError(Exception):
    """Base class for all toolkit errors."""


class CfgParseError(MincovError):
    """Malformed CFG text or profile file."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InvalidCfgError(MincovError):
    """Raised by solvers when the input graph fails structural validation."""

    def __init__(self, report):
        self.report = report
        super().__init__("invalid control-flow graph: "
                         + "; ".join(report.violations()))


class SizeGuardError(MincovError):
    """Brute-force enumeration refused because the instance is too large."""


class DomainMismatchError(MincovError):
    """Partial profile does not cover exactly the instrumented elements."""

    def __init__(self, missing=(), extra=()):
        self.missing = tuple(missing)
        self.extra = tuple(extra)
        parts = []
        if self.missing:
            parts.append(f"missing probe values: {list(self.missing)}")
        if self.extra:
            parts.append(f"unexpected values: {list(self.extra)}")
        super().__init__("; ".join(parts) or "profile domain mismatch")


class CyclicInferenceError(MincovError):
    """The inference dependencies contain a cycle; no evaluation order exists."""


class InternalConsistencyError(MincovError):
    """A structural guarantee was violated. This is a bug; please report it.

    `payload` carries the offending structure (e.g. a malformed component).
    """

    def __init__(self, message: str, payload=None):
        self.payload = payload
        super().__init__(message)
