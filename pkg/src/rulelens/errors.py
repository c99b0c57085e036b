"""Exception hierarchy shared across the package."""


class RuleLensError(Exception):
    """Base class for all rulelens errors."""


class SchemaError(RuleLensError):
    """Schema definition is invalid or data contradicts it."""


class DataFormatError(RuleLensError):
    """A data or artifact file could not be parsed."""


class ConfigError(RuleLensError):
    """A configuration value is out of range or inconsistent."""


class VersionConflict(RuleLensError):
    """Optimistic-concurrency version check failed."""
