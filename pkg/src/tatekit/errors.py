"""Exception types shared by every layer of the toolkit."""


class InputError(ValueError):
    """Malformed or inconsistent input (bad degrees, mismatched rings, ...)."""


class PreconditionError(ValueError):
    """An operation's mathematical precondition fails on a named slice."""


class TruncationError(RuntimeError):
    """The requested depth or weight bound is too small for the computation."""


class UnsupportedIndexError(ValueError):
    """The index category has a shape the algorithms do not handle."""


class IntegrityError(RuntimeError):
    """A guaranteed property failed; signals a bug rather than bad input."""
