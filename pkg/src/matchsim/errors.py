"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid user-supplied configuration (bad key, bad value, bad file)."""


class ContractViolation(ValueError):
    """A caller broke an operation's precondition (e.g. dimension mismatch)."""
