"""Wire objects of a Bobtail block.

Hash-valued fields are unsigned integers below ``2^256``; coin amounts are
decimals with at most eight fractional digits. Each type writes itself with
the primitives of ``bobtaillab.protocol._codec``; field order on the wire is
the declaration order below.
"""

import math
from decimal import Decimal
from functools import cached_property
from typing import Annotated, Self

from pydantic import AfterValidator, Field, field_validator

from bobtaillab.core import settings
from bobtaillab.helpers.hashers import digest
from bobtaillab.helpers.pydantic import FrozenModel
from bobtaillab.protocol._codec import COIN, Reader, Writer

Hash = Annotated[int, Field(ge=0, lt=1 << 256)]
U32 = Annotated[int, Field(ge=0, lt=1 << 32)]
U64 = Annotated[int, Field(ge=0, lt=1 << 64)]
Address = Annotated[str, Field(min_length=1, max_length=255)]


def _whole_base_units(value: Decimal) -> Decimal:
    if value * COIN != (value * COIN).to_integral_value():
        raise ValueError(f"amount {value} has more than eight fractional digits")
    return value


Coin = Annotated[Decimal, Field(ge=0), AfterValidator(_whole_base_units)]


class Transaction(FrozenModel):
    """Opaque transaction spending ``utxo_id`` and paying ``fee`` base units"""

    utxo_id: U64
    fee: U64 = 0
    payload: bytes = b""

    def write(self, w: Writer) -> None:
        w.u64(self.utxo_id).u64(self.fee).raw(self.payload)

    @classmethod
    def read(cls, r: Reader) -> Self:
        return cls(utxo_id=r.u64(), fee=r.u64(), payload=r.raw())

    @cached_property
    def tx_hash(self) -> int:
        w = Writer()
        self.write(w)
        return digest.digest(w.getvalue())

    def conflicts_with(self, other: "Transaction") -> bool:
        """Two transactions conflict when they spend the same output differently"""
        return self.utxo_id == other.utxo_id and (self.fee, self.payload) != (other.fee, other.payload)


class NonceBody(FrozenModel):
    protocol_version: U32 = 1
    difficulty: Hash = Field(default=1, ge=1)
    timestamp: U64 = 0
    nonce: U64 = 0
    extras: bytes = b""

    def write(self, w: Writer) -> None:
        w.u32(self.protocol_version).u256(self.difficulty).u64(self.timestamp).u64(self.nonce).raw(self.extras)

    @classmethod
    def read(cls, r: Reader) -> Self:
        return cls(protocol_version=r.u32(), difficulty=r.u256(), timestamp=r.u64(), nonce=r.u64(), extras=r.raw())

    @cached_property
    def commitment(self) -> int:
        """N = digest of the encoded nonce body"""
        w = Writer()
        self.write(w)
        return digest.digest(w.getvalue())


class ProofSet(FrozenModel):
    """One miner's proof: prior header, transaction-set root, payout address, support, nonce commitment"""

    prior: Hash
    merkle_root: Hash
    address: Address
    support: Hash
    nonce_commitment: Hash

    def write(self, w: Writer) -> None:
        w.u256(self.prior).u256(self.merkle_root).text(self.address).u256(self.support).u256(self.nonce_commitment)

    @classmethod
    def read(cls, r: Reader) -> Self:
        return cls(prior=r.u256(), merkle_root=r.u256(), address=r.text(), support=r.u256(), nonce_commitment=r.u256())

    @cached_property
    def value(self) -> int:
        return proof_value(self)


def proof_value(proof: ProofSet) -> int:
    """V = digest(o, m, a, s, N)"""
    w = Writer()
    proof.write(w)
    return digest.digest(w.getvalue())


class Header(FrozenModel):
    protocol_version: U32
    prior: Hash
    difficulty: Hash = Field(ge=1)
    timestamp: U64
    subnonce: U64
    transaction_root: Hash
    support: Hash
    proof_root: Hash
    bounty_root: Hash
    nonce_extras: bytes = b""

    @classmethod
    def from_proof(cls, proof: ProofSet, nonce: NonceBody, *, proof_root: int, bounty_root: int) -> Self:
        """Header whose P_1 fields are copied from the lowest proof and its nonce body"""
        return cls(
            protocol_version=nonce.protocol_version,
            prior=proof.prior,
            difficulty=nonce.difficulty,
            timestamp=nonce.timestamp,
            subnonce=nonce.nonce,
            transaction_root=proof.merkle_root,
            support=proof.support,
            proof_root=proof_root,
            bounty_root=bounty_root,
            nonce_extras=nonce.extras,
        )

    def nonce_body(self) -> NonceBody:
        return NonceBody(
            protocol_version=self.protocol_version,
            difficulty=self.difficulty,
            timestamp=self.timestamp,
            nonce=self.subnonce,
            extras=self.nonce_extras,
        )

    def write(self, w: Writer) -> None:
        (
            w.u32(self.protocol_version)
            .u256(self.prior)
            .u256(self.difficulty)
            .u64(self.timestamp)
            .u64(self.subnonce)
            .u256(self.transaction_root)
            .u256(self.support)
            .u256(self.proof_root)
            .u256(self.bounty_root)
            .raw(self.nonce_extras)
        )

    @classmethod
    def read(cls, r: Reader) -> Self:
        return cls(
            protocol_version=r.u32(),
            prior=r.u256(),
            difficulty=r.u256(),
            timestamp=r.u64(),
            subnonce=r.u64(),
            transaction_root=r.u256(),
            support=r.u256(),
            proof_root=r.u256(),
            bounty_root=r.u256(),
            nonce_extras=r.raw(),
        )

    def signing_bytes(self) -> bytes:
        w = Writer()
        self.write(w)
        return w.getvalue()

    @cached_property
    def header_hash(self) -> int:
        return digest.digest(self.signing_bytes())


class Bounty(FrozenModel):
    """Merkle proof that the transaction set with root ``target_merkle_root`` holds ``transaction``"""

    target_merkle_root: Hash
    transaction: Transaction
    leaf_index: U32
    merkle_path: tuple[Hash, ...] = ()

    def write(self, w: Writer) -> None:
        w.u256(self.target_merkle_root)
        self.transaction.write(w)
        w.u32(self.leaf_index).seq(self.merkle_path, Writer.u256)

    @classmethod
    def read(cls, r: Reader) -> Self:
        return cls(
            target_merkle_root=r.u256(),
            transaction=Transaction.read(r),
            leaf_index=r.u32(),
            merkle_path=tuple(r.seq(Reader.u256)),
        )

    @cached_property
    def bounty_hash(self) -> int:
        w = Writer()
        self.write(w)
        return digest.digest(w.getvalue())


class CoinbaseOutput(FrozenModel):
    address: Address
    amount: Coin

    def write(self, w: Writer) -> None:
        w.text(self.address).coin(self.amount)

    @classmethod
    def read(cls, r: Reader) -> Self:
        return cls(address=r.text(), amount=r.coin())


class RewardParams(FrozenModel):
    """Primary reward ``R`` per proof and bonus ``B`` per proof supporting the 1OS.

    Not to be confused with the hash rate ``r`` of ``MiningParams``.
    """

    R: Coin
    B: Coin

    def expected_honest_total(self, x: float, k: int) -> float:
        """T_H = x k (R + B/2)"""
        return x * k * (float(self.R) + float(self.B) / 2)


class Block(FrozenModel):
    header: Header
    transactions: tuple[Transaction, ...] = ()
    proofs: tuple[ProofSet, ...] = Field(min_length=1)
    bounties: tuple[Bounty, ...] = ()
    coinbase: tuple[CoinbaseOutput, ...] = ()
    signature: bytes = b""

    def write(self, w: Writer) -> None:
        self.header.write(w)
        w.seq(self.transactions, lambda w_, tx: tx.write(w_))
        w.seq(self.proofs, lambda w_, p: p.write(w_))
        w.seq(self.bounties, lambda w_, b: b.write(w_))
        w.seq(self.coinbase, lambda w_, c: c.write(w_))
        w.raw(self.signature)

    @classmethod
    def read(cls, r: Reader) -> Self:
        return cls(
            header=Header.read(r),
            transactions=tuple(r.seq(Transaction.read)),
            proofs=tuple(r.seq(ProofSet.read)),
            bounties=tuple(r.seq(Bounty.read)),
            coinbase=tuple(r.seq(CoinbaseOutput.read)),
            signature=r.raw(),
        )

    @property
    def k(self) -> int:
        return len(self.proofs)

    @cached_property
    def values(self) -> tuple[int, ...]:
        return tuple(p.value for p in self.proofs)

    @property
    def w_k(self) -> float:
        return sum(self.values) / self.k

    @property
    def header_hash(self) -> int:
        return self.header.header_hash

    def payouts(self) -> dict[str, Decimal]:
        return {output.address: output.amount for output in self.coinbase}


def block_work(w_k: float, space: float | None = None) -> float:
    """Inferred hashes behind a block, S / w_k"""
    if space is None:
        space = float(settings.hash_space)
    return space / w_k


class ChainView(FrozenModel):
    """A chain from genesis to tip, summarised by its per-block w_k"""

    w_values: tuple[float, ...] = ()
    blocks: tuple[Block, ...] = ()
    space: float = Field(default_factory=lambda: float(settings.hash_space), gt=0)

    @field_validator("w_values")
    @classmethod
    def check_positive(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if any(w <= 0 for w in v):
            raise ValueError("w_k values must be positive")
        return v

    @property
    def height(self) -> int:
        return len(self.w_values)

    @cached_property
    def aggregate_work(self) -> float:
        return math.fsum(block_work(w, self.space) for w in self.w_values)

    @property
    def tip(self) -> Block | None:
        return self.blocks[-1] if self.blocks else None

    def extend(self, block: Block) -> Self:
        return type(self)(w_values=(*self.w_values, block.w_k), blocks=(*self.blocks, block), space=self.space)

    def extend_w(self, w_k: float) -> Self:
        return type(self)(w_values=(*self.w_values, w_k), blocks=self.blocks, space=self.space)
