class InvalidArgument(ValueError):
    """Raised when an input violates an operation's preconditions."""


class ResourceLimit(RuntimeError):
    """Raised when a request exceeds the exhaustive-enumeration size caps."""
