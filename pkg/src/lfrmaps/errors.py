"""Exception hierarchy shared by all modules.

CLI exit codes key off the two base classes: DomainError -> 1,
ExhaustionError -> 2.
"""


class LfrError(Exception):
    pass


class DomainError(LfrError, ValueError):
    pass


class ExhaustionError(LfrError, RuntimeError):
    pass


class InternalInconsistency(LfrError, AssertionError):
    """An identity that must hold exactly did not; indicates a bug."""


class DegenerateInput(DomainError):
    pass


class ExcludedParameter(DomainError):
    pass


class DegenerateParameter(DomainError):
    pass


class CycleDegenerate(DomainError):
    pass


class PreconditionFailed(DomainError):
    pass


class IndeterminateInput(DomainError):
    pass


class IOFailure(LfrError, OSError):
    pass


class PrecisionExhausted(ExhaustionError):
    pass


class ResourceExhausted(ExhaustionError):
    pass
