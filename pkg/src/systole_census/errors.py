"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class ResourceLimitError(RuntimeError):
    """A computation exceeded a configured work limit.

    The offending limit is named so callers can raise it deliberately.
    """

    def __init__(self, message: str, limit_name: str, limit_value=None):
        super().__init__(message)
        self.limit_name = limit_name
        self.limit_value = limit_value


class IncompleteEnumerationError(ResourceLimitError):
    """An enumeration hit its work limit before its result could be certified.

    Raised instead of returning a possibly short count; a silent undercount
    is never produced.
    """
