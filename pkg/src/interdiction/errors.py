"""Exception types shared across the toolkit."""


class ParseError(ValueError):
    """Malformed input text or JSON."""


class ShapeError(ValueError):
    """An instance does not have the shape an operation requires."""


class SizeLimitError(RuntimeError):
    """Instance exceeds a desk-scale guard."""


class BudgetExceeded(RuntimeError):
    """A per-call wall-clock budget ran out."""
