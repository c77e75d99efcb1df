"""Exception types raised across the package."""


class InvalidLawError(ValueError):
    """Set-size law parameters violate their invariants."""


class InvalidRegimeError(ValueError):
    """Power-law regime parameters are outside the admissible box."""


class ResourceLimitError(RuntimeError):
    """A configured work budget would be exceeded."""


class BudgetExceededError(RuntimeError):
    """The exact clique search ran out of node expansions."""

    def __init__(self, expansions: int):
        super().__init__(f"node budget exceeded after {expansions} expansions")
        self.expansions = expansions


class SizeLimitError(ValueError):
    """Input too large for an exhaustive or exact routine."""


class ConfigError(ValueError):
    """Experiment configuration is invalid."""
