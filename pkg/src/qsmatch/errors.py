class QsmatchError(Exception):
    """Base class for library errors."""


class DomainError(QsmatchError, ValueError):
    """Inputs outside an operation's domain (bad symbol, k >= m, ...)."""


class ResourceLimitError(QsmatchError):
    """A simulator or circuit exceeds its configured qubit budget."""

    def __init__(self, message: str, required: int | None = None, limit: int | None = None):
        super().__init__(message)
        self.required = required
        self.limit = limit


class NonClassicalGateError(QsmatchError):
    """A gate without a basis-state semantics was given to the basis simulator."""

    def __init__(self, index: int, kind: str):
        super().__init__(f"non-classical gate {kind} at index {index}")
        self.index = index
        self.kind = kind
