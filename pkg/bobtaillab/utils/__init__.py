from ._compat import config, metadata
from ._logging import setup_logger

__all__ = [
    "config",
    "metadata",
    "setup_logger",
]
