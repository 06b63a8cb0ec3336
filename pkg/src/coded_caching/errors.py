"""Exception types shared across the package."""


class ParameterError(ValueError):
    """Raised when an argument violates an operation's preconditions."""


class IntegrityError(Exception):
    """Raised when a delivery transcript or cache is missing expected data."""


class ResourceLimitError(Exception):
    """Raised when a request exceeds a configured size guard."""


# Counts are kept within a signed 128-bit range; anything wider fails loudly.
INT128_MAX = (1 << 127) - 1


def checked(value: int) -> int:
    if not -INT128_MAX - 1 <= value <= INT128_MAX:
        raise OverflowError(f"integer {value} exceeds the signed 128-bit range")
    return value
