import pytest

from bobtaillab.core import DomainError
from bobtaillab.helpers.hashers import HmacStubSigner, Sha256Digest


def test_digest_is_length_prefixed() -> None:
    d = Sha256Digest()
    assert d.digest(b"ab", b"c") != d.digest(b"a", b"bc")
    assert d.digest(b"x") == d.digest(b"x")
    assert 0 <= d.digest(b"x") <= d.hash_space


def test_truncated_digest_width() -> None:
    d = Sha256Digest(bits=16)
    assert all(0 <= d.digest(bytes([i])) < 1 << 16 for i in range(64))
    assert d.hash_space == (1 << 16) - 1
    with pytest.raises(DomainError):
        Sha256Digest(bits=4)


def test_keyed_digest_differs() -> None:
    assert Sha256Digest(key=b"k").digest(b"x") != Sha256Digest().digest(b"x")


def test_stub_signature() -> None:
    signer = HmacStubSigner(salt=b"salt")
    sig = signer.sign(b"header", "alice")
    assert signer.verify(b"header", "alice", sig)
    assert not signer.verify(b"header", "bob", sig)
    assert not signer.verify(b"other", "alice", sig)
    assert not HmacStubSigner(salt=b"pepper").verify(b"header", "alice", sig)
