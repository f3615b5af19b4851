"""Exception types shared across the simulator."""


class SimulationError(Exception):
    """Base class for all simulator errors."""


class InvalidGeometryError(SimulationError, ValueError):
    """Non-physical scenario geometry (non-positive distance, bad angle, ...)."""


class InvalidProfileError(SimulationError, ValueError):
    """Surface profile violates its construction rules."""


class ModeMismatchError(SimulationError, ValueError):
    """Operation requested on a surface mode that does not support it."""


class SignalDomainError(SimulationError, ValueError):
    """Signal or operator parameter outside its valid domain."""


class UnsupportedOperatorError(SimulationError, ValueError):
    """Operator kind not in the analog-computing bank."""


class TrainingDivergedError(SimulationError, RuntimeError):
    """Training produced a non-finite loss; carries the offending epoch."""

    def __init__(self, epoch: int, message: str = ""):
        self.epoch = epoch
        super().__init__(message or f"training diverged at epoch {epoch}")


class ConfigError(SimulationError, ValueError):
    """Base class for configuration problems."""


class ConfigFileError(ConfigError):
    """Config file missing or unreadable."""


class ConfigSyntaxError(ConfigError):
    """Config file is not valid section/key=value text."""


class UnknownKeyError(ConfigError):
    """Config contains a section or key outside the schema."""

    def __init__(self, location: str):
        self.location = location
        super().__init__(f"unknown configuration key: {location}")


class ValueOutOfRangeError(ConfigError):
    """Config value parsed but outside its allowed range."""

    def __init__(self, location: str, value, reason: str):
        self.location = location
        self.value = value
        super().__init__(f"{location} = {value!r}: {reason}")
