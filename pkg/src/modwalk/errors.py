class ModwalkError(Exception):
    pass


class DomainError(ModwalkError, ValueError):
    """Input outside the domain of an operation (bad range, bad parse, ...)."""


class DegenerateInputError(DomainError):
    """Endpoint values (0, 1, inf) where an operation needs an interior point."""


class ResourceLimitError(ModwalkError, RuntimeError):
    """Requested enumeration or graph would exceed the configured budget."""
