"""Exception types shared across the package."""


class MalformedInputError(ValueError):
    """Numeric input violates a contract (non-finite values, bad shapes)."""


class ConfigError(ValueError):
    """Invalid configuration, genome length mismatch, or layout-version mismatch."""


class EpisodeDoneError(RuntimeError):
    """step() was called on an environment whose episode already ended."""
