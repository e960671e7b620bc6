"""Structured state values: atoms, tuples and canonical multisets.

A structured value is one of

* an atom: ``int`` (``bool`` is treated as ``int``), ``str`` or ``bytes``;
* a ``tuple`` of structured values;
* a :class:`Multiset` of structured values.

Every value has a self-delimiting binary encoding. Multisets store their
elements sorted by encoding, so equality, hashing and serialization are
independent of the order in which elements were supplied.
"""
from __future__ import annotations

from typing import Any, Iterable, Iterator, Union

_TAG_INT = b"i"
_TAG_STR = b"s"
_TAG_BYTES = b"b"
_TAG_TUPLE = b"t"
_TAG_MULTISET = b"m"


def _varint(n: int) -> bytes:
    out = bytearray()
    while True:
        byte = n & 0x7F
        n >>= 7
        if n:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return bytes(out)


def _encode_int(x: int) -> bytes:
    # zigzag so negatives stay short
    z = (x << 1) if x >= 0 else ((-x << 1) - 1)
    return _TAG_INT + _varint(z)


class Multiset:
    """Immutable multiset in canonical (encoding-sorted) order."""

    __slots__ = ("_items", "_encoding", "_hash")

    def __init__(self, items: Iterable[Any] = ()) -> None:
        keyed = sorted(((encode(x), x) for x in items), key=lambda p: p[0])
        self._items = tuple(x for _, x in keyed)
        payload = b"".join(k for k, _ in keyed)
        self._encoding = _TAG_MULTISET + _varint(len(self._items)) + _varint(len(payload)) + payload
        self._hash = hash(self._encoding)

    @property
    def encoding(self) -> bytes:
        return self._encoding

    def __iter__(self) -> Iterator[Any]:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def count(self, value: Any) -> int:
        key = encode(value)
        return sum(1 for x in self._items if encode(x) == key)

    def items(self) -> tuple[Any, ...]:
        return self._items

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Multiset):
            return NotImplemented
        return self._encoding == other._encoding

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return "{{" + ", ".join(repr(x) for x in self._items) + "}}"


StructuredValue = Union[int, str, bytes, tuple, Multiset]


def encode(value: Any) -> bytes:
    """Canonical self-delimiting encoding of a structured value."""
    if isinstance(value, Multiset):
        return value.encoding
    if isinstance(value, bool):
        return _encode_int(int(value))
    if isinstance(value, int):
        return _encode_int(value)
    if isinstance(value, str):
        raw = value.encode("utf-8")
        return _TAG_STR + _varint(len(raw)) + raw
    if isinstance(value, (bytes, bytearray)):
        return _TAG_BYTES + _varint(len(value)) + bytes(value)
    if isinstance(value, tuple):
        payload = b"".join(encode(x) for x in value)
        return _TAG_TUPLE + _varint(len(value)) + _varint(len(payload)) + payload
    raise TypeError(f"not a structured value: {type(value).__name__}")


def size_bits(value: Any) -> int:
    """Bits used by the canonical encoding."""
    return 8 * len(encode(value))


def to_json(value: Any) -> Any:
    """JSON tree for a structured value (multisets and tuples are tagged)."""
    if isinstance(value, Multiset):
        return {"multiset": [to_json(x) for x in value]}
    if isinstance(value, tuple):
        return {"tuple": [to_json(x) for x in value]}
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, (bytes, bytearray)):
        return {"bytes": bytes(value).hex()}
    return value


def from_json(data: Any) -> Any:
    if isinstance(data, dict):
        if "multiset" in data:
            return Multiset(from_json(x) for x in data["multiset"])
        if "tuple" in data:
            return tuple(from_json(x) for x in data["tuple"])
        if "bytes" in data:
            return bytes.fromhex(data["bytes"])
    return data
