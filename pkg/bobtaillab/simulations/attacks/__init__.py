from .dor import simulate_dor
from .doublespend import shared_first_blocks, simulate_doublespend
from .selfish import simulate_selfish_mining
from .withholding import simulate_withholding
from .zczc import simulate_zczc

__all__ = [
    "shared_first_blocks",
    "simulate_dor",
    "simulate_doublespend",
    "simulate_selfish_mining",
    "simulate_withholding",
    "simulate_zczc",
]
