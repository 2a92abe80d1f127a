from ._errors import (
    BobtailError,
    BountyError,
    ConfigError,
    ConvergenceError,
    DomainError,
    EventOrderError,
    SerializationError,
    SimulationError,
    require,
)
from ._settings import Settings, feature_flags, settings

__all__ = [
    "settings",
    "feature_flags",
    "Settings",
    "BobtailError",
    "BountyError",
    "ConfigError",
    "ConvergenceError",
    "DomainError",
    "EventOrderError",
    "SerializationError",
    "SimulationError",
    "require",
]
