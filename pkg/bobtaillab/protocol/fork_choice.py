from collections.abc import Sequence

from bobtaillab.core import require
from bobtaillab.protocol.types import ChainView


def fork_choice(chains: Sequence[ChainView]) -> ChainView:
    """Chain with the most aggregate work, sum of S / w_k; the first seen wins exact ties"""
    require(len(chains) > 0, "fork choice needs at least one chain")
    best = chains[0]
    for chain in chains[1:]:
        if chain.aggregate_work > best.aggregate_work:
            best = chain
    return best
