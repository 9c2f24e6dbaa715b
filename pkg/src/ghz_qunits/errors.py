"""Exceptions shared across the package."""


class CapExceededError(ValueError):
    """A brute-force enumeration would exceed its size cap."""

    def __init__(self, size: int, cap: int, what: str = "enumeration"):
        self.size = size
        self.cap = cap
        super().__init__(f"{what} of {size} items exceeds the cap of {cap}")


class NoPerfectCorrelationError(ValueError):
    """The configuration is not perfectly correlated, so no outcome is certain."""


class SolverMismatchError(RuntimeError):
    """Algebraic and brute-force LHV results disagree (internal invariant)."""
