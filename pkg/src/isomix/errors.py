"""Exception hierarchy shared by every module."""


class IsomixError(ValueError):
    """Base class; the CLI maps every subclass to exit status 2."""


class NotStochastic(IsomixError):
    pass


class Reducible(IsomixError):
    pass


class SingularStationary(IsomixError):
    pass


class ZeroReferenceMass(IsomixError):
    pass


class EmptySet(IsomixError):
    pass


class FullSet(IsomixError):
    pass


class NotLazy(IsomixError):
    pass


class NotReversible(IsomixError):
    pass


class TooLarge(IsomixError):
    pass


class TooBig(IsomixError):
    """A set with measure above 1/2 was passed where the bound needs pi(A) <= 1/2."""


class NoBoundaryEdge(IsomixError):
    pass


class DomainError(IsomixError):
    pass


class IterationCap(IsomixError):
    pass


class BadParam(IsomixError):
    pass
