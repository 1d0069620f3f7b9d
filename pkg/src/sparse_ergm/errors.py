"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Malformed model, schedule or run configuration."""


class CapExceeded(RuntimeError):
    """An exact computation was asked for a size above its enumeration cap."""

    def __init__(self, n, cap, what="undirected enumeration"):
        super().__init__(
            f"{what} refused: n={n} exceeds cap n<={cap} "
            f"(pass override to force)"
        )
        self.n = n
        self.cap = cap


class NumericalDefect(RuntimeError):
    """A numerical routine failed in a way that should be impossible."""
