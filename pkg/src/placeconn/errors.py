class PlaceconnError(Exception):
    """Base class for errors raised by this package."""


class DataError(PlaceconnError, ValueError):
    """Input data violates a contract (bad file, unknown place, ...)."""


class ConfigError(PlaceconnError, ValueError):
    """Invalid run configuration or flags."""
