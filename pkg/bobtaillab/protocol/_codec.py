"""Little-endian, length-prefixed primitives shared by the wire types.

========  ===========================================
u8/u16    fixed width unsigned integers
u32/u64
u256      32 bytes, little-endian
bytes     u32 length followed by the raw bytes
str       ``bytes`` of the UTF-8 encoding
seq       u32 count followed by the encoded items
========  ===========================================
"""

from collections.abc import Callable, Iterable
from decimal import Decimal
from typing import TypeVar

from bobtaillab.core import SerializationError

T = TypeVar("T")

COIN = 100_000_000


class Writer:
    def __init__(self) -> None:
        self._parts: list[bytes] = []

    def uint(self, value: int, size: int) -> "Writer":
        try:
            self._parts.append(int(value).to_bytes(size, "little"))
        except OverflowError as e:
            raise SerializationError(f"value {value} does not fit in {size} bytes") from e
        return self

    def u32(self, value: int) -> "Writer":
        return self.uint(value, 4)

    def u64(self, value: int) -> "Writer":
        return self.uint(value, 8)

    def u256(self, value: int) -> "Writer":
        return self.uint(value, 32)

    def raw(self, data: bytes) -> "Writer":
        self.u32(len(data))
        self._parts.append(bytes(data))
        return self

    def text(self, value: str) -> "Writer":
        return self.raw(value.encode("utf-8"))

    def coin(self, amount: Decimal) -> "Writer":
        units = amount * COIN
        if units != units.to_integral_value():
            raise SerializationError(f"amount {amount} is not a whole number of base units")
        return self.u64(int(units))

    def seq(self, items: Iterable[T], write: Callable[["Writer", T], object]) -> "Writer":
        items = list(items)
        self.u32(len(items))
        for item in items:
            write(self, item)
        return self

    def getvalue(self) -> bytes:
        return b"".join(self._parts)


class Reader:
    def __init__(self, data: bytes):
        self._data = memoryview(data)
        self._pos = 0

    def take(self, size: int) -> bytes:
        end = self._pos + size
        if end > len(self._data):
            raise SerializationError(f"truncated input: need {size} bytes at offset {self._pos}")
        chunk = bytes(self._data[self._pos:end])
        self._pos = end
        return chunk

    def uint(self, size: int) -> int:
        return int.from_bytes(self.take(size), "little")

    def u32(self) -> int:
        return self.uint(4)

    def u64(self) -> int:
        return self.uint(8)

    def u256(self) -> int:
        return self.uint(32)

    def raw(self) -> bytes:
        return self.take(self.u32())

    def text(self) -> str:
        try:
            return self.raw().decode("utf-8")
        except UnicodeDecodeError as e:
            raise SerializationError(f"invalid UTF-8 string: {e}") from e

    def coin(self) -> Decimal:
        return Decimal(self.u64()) / COIN

    def seq(self, read: Callable[["Reader"], T]) -> list[T]:
        return [read(self) for _ in range(self.u32())]

    def finish(self) -> None:
        if self._pos != len(self._data):
            raise SerializationError(f"{len(self._data) - self._pos} trailing bytes after decoding")
