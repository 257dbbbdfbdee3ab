"""Exception hierarchy shared by all modules."""


class CoarseError(Exception):
    """Base class for every error raised by this package."""


class UnknownKind(CoarseError):
    pass


class InvalidParameter(CoarseError):
    pass


class WindowTooLarge(CoarseError):
    pass


class WindowTooSmall(CoarseError):
    pass


class EmptyFamilyOnUnbounded(CoarseError):
    pass


class DisagreeingCharacterizations(CoarseError):
    """The two characterizations of a coarse cover returned different statuses.

    With two pieces the forms are equivalent, so this signals a bug. With
    three or more pieces the divergence form is strictly stronger: for
    U_i = Z minus (4Z + i), i = 1, 2, 3, every pair lies in some U_i^2 while
    4k + 2 is within distance 1 of all three complements.
    """


class DomainMismatch(CoarseError):
    pass


class IterateEscapesWindow(CoarseError):
    pass


class NoPlateau(CoarseError):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace or {}


class NotNested(CoarseError):
    pass


class AmbiguousAssignment(CoarseError):
    pass


class InfiniteEnds(CoarseError):
    pass


class InfiniteEndsInIntersection(InfiniteEnds):
    pass


class CoverNotVerified(CoarseError):
    pass


class NotARefinement(CoarseError):
    pass


class ConfigError(CoarseError):
    pass


class ConfigSyntaxError(ConfigError):
    def __init__(self, message, line, col):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


class UnknownName(ConfigError):
    def __init__(self, name):
        super().__init__(f"unknown name {name!r}")
        self.name = name


class ParamOutOfRange(ConfigError):
    pass
