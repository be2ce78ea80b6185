"""Exception types shared across the package."""


class MelonError(Exception):
    """Base class for errors raised by :mod:`melons`."""


class ConvergenceError(MelonError):
    """A series, quadrature or tolerance target was not reached."""


class ResourceLimitError(MelonError):
    """The request is too large to be served (e.g. brute-force enumeration)."""


class PoleError(MelonError, ValueError):
    """A function was evaluated at one of its poles."""
