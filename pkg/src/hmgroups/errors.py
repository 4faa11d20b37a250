"""Exception hierarchy.

``InputError`` subclasses mean the caller handed us text or flags we could not
parse; everything else under ``DomainError`` means the input parsed fine but
violates a mathematical precondition.
"""


class HMGroupsError(Exception):
    pass


class InputError(HMGroupsError, ValueError):
    pass


class DomainError(HMGroupsError, ValueError):
    pass


class MalformedText(InputError):
    pass


class DigitOutOfRange(InputError):
    pass


class NotPrime(DomainError):
    pass


class PrimeMismatch(DomainError):
    pass


class NotAUnit(DomainError):
    pass


class LevelOutOfRange(DomainError):
    pass


class NotPrincipal(DomainError):
    pass


class ValuationTooSmall(DomainError):
    pass


class NotContinuousAction(DomainError):
    pass


class NotFaithful(DomainError):
    pass


class DescriptorMismatch(DomainError):
    pass


class InvalidElement(DomainError):
    pass


class UnsupportedDescriptor(DomainError):
    pass


class NotTorsion(DomainError):
    pass


class OrderMismatch(DomainError):
    pass


class TooLarge(DomainError):
    pass


class InvalidHandle(DomainError):
    pass
