"""Exception hierarchy shared by all modules."""


class ListColorError(Exception):
    """Base class for every error raised by this package."""


# graph_core
class DuplicateEdge(ListColorError, ValueError):
    pass


class IndexOutOfRange(ListColorError, IndexError):
    pass


class NonBipartiteEdge(ListColorError, ValueError):
    pass


class InfeasibleDegree(ListColorError, ValueError):
    pass


class RetryExhausted(ListColorError, RuntimeError):
    pass


class FormatError(ListColorError, ValueError):
    """A graph or list file violates its text format."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


# list_model / bias
class WrongPart(ListColorError, ValueError):
    pass


class PoolTooSmall(ListColorError, ValueError):
    pass


class DeltaTooSmall(ListColorError, ValueError):
    pass


class NotDivisibleBy10(ListColorError, ValueError):
    pass


# coupon_lab / oracle
class TooLargeToEnumerate(ListColorError, RuntimeError):
    pass


class CapViolated(ListColorError, ValueError):
    pass


class EmptySubset(ListColorError, ValueError):
    pass


# colorer
class SideAIncomplete(ListColorError, ValueError):
    pass


class NoAvailableColor(ListColorError, RuntimeError):
    pass


# optimizer
class SingularAtYOne(ListColorError, ZeroDivisionError):
    pass


class CertificateFailed(ListColorError, AssertionError):
    pass


# harness
class ConfigInvalid(ListColorError, ValueError):
    pass


class IoFailure(ListColorError, OSError):
    pass


class SchemaMismatch(ListColorError, ValueError):
    pass
