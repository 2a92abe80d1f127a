from cryptography.hazmat.primitives import constant_time, hashes, hmac

from bobtaillab.core import DomainError, settings


class DigestBase:
    """Base class for proof-of-work digests over byte strings"""

    bits: int = 256

    def digest_bytes(self, *parts: bytes) -> bytes:
        """Digest the length-prefixed concatenation of ``parts``"""
        raise NotImplementedError

    def digest(self, *parts: bytes) -> int:
        """Digest as an unsigned integer in [0, 2^bits - 1]"""
        raw = int.from_bytes(self.digest_bytes(*parts), "little")
        return raw >> (8 * self.digest_size - self.bits)

    @property
    def digest_size(self) -> int:
        raise NotImplementedError

    @property
    def hash_space(self) -> int:
        return (1 << self.bits) - 1


class Sha256Digest(DigestBase):
    """SHA-256 digest, optionally truncated to fewer bits for small hash spaces"""

    def __init__(self, bits: int = 256, *, key: bytes = b""):
        if not 8 <= bits <= 256:
            raise DomainError(f"digest width must be in [8, 256] bits, got {bits}")
        self.bits = bits
        self.key = key

    @property
    def digest_size(self) -> int:
        return 32

    def digest_bytes(self, *parts: bytes) -> bytes:
        ctx = hashes.Hash(hashes.SHA256())
        if self.key:
            ctx.update(len(self.key).to_bytes(4, "little") + self.key)
        for part in parts:
            ctx.update(len(part).to_bytes(4, "little"))
            ctx.update(part)
        return ctx.finalize()


class SignerBase:
    """Base class for header signatures keyed by a payout address"""

    def sign(self, message: bytes, address: str) -> bytes:
        raise NotImplementedError

    def verify(self, message: bytes, address: str, signature: bytes) -> bool:
        raise NotImplementedError


class HmacStubSigner(SignerBase):
    """Stub signature: HMAC-SHA256 of the message under a secret derived from the address.

    Anyone can recompute the secret, so this only exercises the consensus rule
    that the 1OS author signs; it offers no authenticity.
    """

    def __init__(self, salt: bytes | None = None):
        if salt is None:
            salt = settings.signing_salt.get_secret_value().encode()
        self.salt = salt

    def _secret(self, address: str) -> bytes:
        ctx = hashes.Hash(hashes.SHA256())
        ctx.update(self.salt)
        ctx.update(address.encode("utf-8"))
        return ctx.finalize()

    def sign(self, message: bytes, address: str) -> bytes:
        mac = hmac.HMAC(self._secret(address), hashes.SHA256())
        mac.update(message)
        return mac.finalize()

    def verify(self, message: bytes, address: str, signature: bytes) -> bool:
        return constant_time.bytes_eq(self.sign(message, address), signature)


# Global backend instances
digest = Sha256Digest(bits=settings.hash_bits)
signer = HmacStubSigner()
