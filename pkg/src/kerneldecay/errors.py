"""Exception types shared across the package."""


class KernelDecayError(Exception):
    """Base class for all package errors."""


class FamilySpecError(KernelDecayError):
    """Malformed or unknown family specification string or parameters."""


class MomentDivergesError(KernelDecayError):
    """A requested absolute moment sum diverges for this family."""


class ClassInsufficientError(KernelDecayError):
    """The family's summability class does not support the operation."""


class PoleProximityError(KernelDecayError):
    """Evaluation point too close to a pole for a certified value."""


class EvaluationAtPoleError(KernelDecayError):
    """Exact pole hit in a partial-sum evaluation."""


class ToleranceUnreachableError(KernelDecayError):
    """The certified tail bound cannot be driven below the requested
    tolerance within the term budget."""


class SpecialDomainError(KernelDecayError):
    """Reference evaluation requested too close to a pole of the closed form."""


class InsufficientDataError(KernelDecayError):
    """Not enough converged records for a fit."""


class SignClaimViolation(KernelDecayError):
    """A sign-split part failed its claimed half-plane at a sample point."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness
