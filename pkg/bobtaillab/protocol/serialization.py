"""Binary wire format for the protocol types.

All integers are little-endian. Variable-length fields carry a u32 length
prefix, sequences a u32 count. Layouts, in order:

Transaction     u64 utxo_id, u64 fee, bytes payload
NonceBody       u32 version, u256 difficulty, u64 timestamp, u64 nonce, bytes extras
ProofSet        u256 prior, u256 merkle_root, str address, u256 support, u256 nonce_commitment
Header          u32 version, u256 prior, u256 difficulty, u64 timestamp, u64 subnonce,
                u256 transaction_root, u256 support, u256 proof_root, u256 bounty_root,
                bytes nonce_extras
Bounty          u256 target_merkle_root, Transaction, u32 leaf_index, seq[u256] path
CoinbaseOutput  str address, u64 amount in 1e-8 coin units
Block           Header, seq[Transaction], seq[ProofSet], seq[Bounty],
                seq[CoinbaseOutput], bytes signature
"""

import logging
from typing import Protocol, Self, TypeVar

from pydantic import ValidationError

from bobtaillab.core import SerializationError
from bobtaillab.protocol._codec import Reader, Writer
from bobtaillab.protocol.types import (
    Block,
    Bounty,
    CoinbaseOutput,
    Header,
    NonceBody,
    ProofSet,
    Transaction,
)

logger = logging.getLogger(__name__)


class WireType(Protocol):
    def write(self, w: Writer) -> None: ...

    @classmethod
    def read(cls, r: Reader) -> Self: ...


T = TypeVar("T", bound=WireType)

WIRE_TYPES: tuple[type, ...] = (Transaction, NonceBody, ProofSet, Header, Bounty, CoinbaseOutput, Block)


def encode(obj: WireType) -> bytes:
    if not isinstance(obj, WIRE_TYPES):
        raise SerializationError(f"{type(obj).__name__} has no wire encoding")
    w = Writer()
    obj.write(w)
    return w.getvalue()


def decode(cls: type[T], data: bytes) -> T:
    """Decode exactly one ``cls`` from ``data``; malformed or trailing bytes raise ``SerializationError``"""
    if cls not in WIRE_TYPES:
        raise SerializationError(f"{cls.__name__} has no wire encoding")
    r = Reader(data)
    try:
        obj = cls.read(r)
    except ValidationError as e:
        logger.debug(f"Rejected {cls.__name__} bytes: {e}")
        raise SerializationError(f"malformed {cls.__name__}: {e.error_count()} invalid field(s)") from e
    r.finish()
    return obj


def encode_block(block: Block) -> bytes:
    return encode(block)


def decode_block(data: bytes) -> Block:
    return decode(Block, data)
