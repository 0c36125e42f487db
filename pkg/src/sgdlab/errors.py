"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid model/scenario/CLI configuration. CLI exit code 1."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class NumericError(RuntimeError):
    """A numeric procedure failed (bracketing, overflow on every run, ...). CLI exit code 2."""
