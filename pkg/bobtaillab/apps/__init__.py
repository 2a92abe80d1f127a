from .cli import main, run
from .selfcheck import run_selfcheck

__all__ = [
    "main",
    "run",
    "run_selfcheck",
]
