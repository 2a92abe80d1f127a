from .assembly import (
    Candidate,
    MinedProof,
    ReceivedProof,
    assemble_proof_package,
    package_limit,
    select_package,
)
from .difficulty import retarget, target_from_difficulty
from .fork_choice import fork_choice
from .merkle import make_bounty, merkle_path, merkle_root, transaction_root, verify_bounty, verify_path
from .rewards import allocate_rewards, coinbase_outputs, implicated_proofs, total_payout
from .serialization import decode, decode_block, encode, encode_block
from .transactions import conflicts_any, select_canonical_tx
from .types import (
    Block,
    Bounty,
    ChainView,
    CoinbaseOutput,
    Header,
    NonceBody,
    ProofSet,
    RewardParams,
    Transaction,
    block_work,
    proof_value,
)
from .validation import BlockVerdict, RejectReason, sign_header, validate_block, verify_signature

__all__ = [
    "Block",
    "BlockVerdict",
    "Bounty",
    "Candidate",
    "ChainView",
    "CoinbaseOutput",
    "Header",
    "MinedProof",
    "NonceBody",
    "ProofSet",
    "ReceivedProof",
    "RejectReason",
    "RewardParams",
    "Transaction",
    "allocate_rewards",
    "assemble_proof_package",
    "block_work",
    "coinbase_outputs",
    "conflicts_any",
    "decode",
    "decode_block",
    "encode",
    "encode_block",
    "fork_choice",
    "implicated_proofs",
    "make_bounty",
    "merkle_path",
    "merkle_root",
    "package_limit",
    "proof_value",
    "retarget",
    "select_canonical_tx",
    "select_package",
    "sign_header",
    "target_from_difficulty",
    "total_payout",
    "transaction_root",
    "validate_block",
    "verify_bounty",
    "verify_path",
    "verify_signature",
]
