"""Exception types shared across the package."""


class ParseError(SyntaxError):
    """Malformed process or formula text.

    ``position`` is the zero-based character offset where parsing stopped.
    """

    def __init__(self, message: str, text: str = "", position: int = 0):
        super().__init__(f"{message} at position {position}")
        self.text = text
        self.position = position


class UnknownAction(ValueError):
    """An action name that is not part of the declared alphabet."""

    def __init__(self, action: str, alphabet=()):
        known = ",".join(sorted(alphabet))
        super().__init__(f"unknown action {action!r} (alphabet: {{{known}}})")
        self.action = action


class BudgetExceeded(RuntimeError):
    """Raised when an enumeration would grow past the configured cap."""

    def __init__(self, what: str, projected: int | None, cap: int):
        size = "more than 2^4096" if projected is None else str(projected)
        super().__init__(f"{what}: projected size {size} exceeds cap {cap}")
        self.projected = projected
        self.cap = cap


class InvariantViolation(AssertionError):
    """A property that must hold by construction was found to fail."""
