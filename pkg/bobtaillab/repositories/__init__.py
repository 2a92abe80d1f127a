from .results import read_results, write_results

__all__ = [
    "read_results",
    "write_results",
]
