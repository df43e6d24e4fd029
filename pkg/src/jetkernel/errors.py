"""Exception hierarchy. Every domain error carries a stable machine-readable ``code``."""

from __future__ import annotations


class JetKernelError(Exception):
    code = "error"

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details

    def to_json(self) -> dict:
        out = {"error": self.code, "message": str(self)}
        if self.details:
            out["details"] = self.details
        return out


class ParseError(JetKernelError):
    code = "parse-error"


class MissingVariableError(JetKernelError):
    code = "missing-variable"


class ResourceLimitError(JetKernelError):
    code = "resource-limit"


class NotNilpotentError(JetKernelError):
    code = "not-nilpotent"


class NotInIdealError(JetKernelError):
    code = "not-in-ideal"


class TypeMismatchError(JetKernelError):
    code = "type-mismatch"


class ShapeError(JetKernelError):
    code = "shape-error"


class UndecidableInputError(JetKernelError):
    code = "undecidable-input"


class RankDeficientError(JetKernelError):
    code = "rank-deficient"


class NonvanishingJetError(JetKernelError):
    code = "nonvanishing-jet"


class NotMonoError(JetKernelError):
    code = "not-mono"


class NotRectifiedError(JetKernelError):
    code = "not-rectified"


class IncompatibleConeError(JetKernelError):
    code = "incompatible-cone"


class VerificationError(JetKernelError):
    """A constructed object failed one of its defining identities.

    Raised only on internal inconsistency (or deliberate fault injection);
    ``details["identity"]`` names the violated equation.
    """

    code = "verification-failed"
