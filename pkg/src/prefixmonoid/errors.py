"""Exception types shared by the engines."""


class ResourceExceeded(RuntimeError):
    """A configured size cap was hit; the answer is unknown, never 'no'."""


class Unsupported(RuntimeError):
    """No decision procedure applies (missing capability or class)."""


class HerbstError(ValueError):
    """A word that should lie in the subgroup does not; the caller's precondition failed."""
