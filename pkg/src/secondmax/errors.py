"""Exception hierarchy shared by every module.

Two families matter to callers: ``ResourceError`` (a cap or budget was hit,
nothing was learned) and ``RefutedClaim`` (a computation contradicts a
mathematical statement the toolkit checks).  The CLI maps the first to exit
status 1 and the second to exit status 2.
"""


class SecondMaxError(Exception):
    """Base class for all errors raised by the package."""


class UsageError(SecondMaxError, ValueError):
    """Bad input: precondition on the arguments violated."""


class NotPrime(UsageError):
    pass


class NotCoprime(UsageError):
    pass


class NotADivisor(UsageError):
    pass


class NotPrimeIndex(UsageError):
    pass


class NotAPermutation(UsageError):
    pass


class DegreeMismatch(UsageError):
    pass


class FieldMismatch(UsageError):
    pass


class NotASubgroup(UsageError):
    pass


class NotApplicable(UsageError):
    pass


class NotMersenne(UsageError):
    pass


class Unsupported(UsageError):
    pass


class FamilyConstraintViolated(UsageError):
    pass


class ResourceError(SecondMaxError):
    """A configured cap or budget stopped the computation."""


class CapExceeded(ResourceError):
    pass


class ScaleExceeded(ResourceError):
    pass


class BudgetExhausted(ResourceError):
    """Raised with whatever partial result was available when time ran out."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class RefutedClaim(SecondMaxError):
    """A checked mathematical statement failed on a concrete instance."""


class TrichotomyViolated(RefutedClaim):
    pass


class BoundViolated(RefutedClaim):
    pass
