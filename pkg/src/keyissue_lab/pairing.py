"""Symmetric bilinear group e: G1 x G1 -> GT over a prime order q.

Only the *transparent* backend exists: a G1 element is stored as its discrete
log with respect to the generator P, and a GT element as its discrete log with
respect to g_T = e(P, P).  Pairing is then multiplication of exponents mod q.
This is deliberately insecure; it exists so that every algebraic identity a
protocol or attack relies on can be asserted with exact equality.

Protocol code never touches ``handle`` directly, it only uses the group
operations below, so a hard curve backend could be added behind
:class:`GroupParams` without changing callers.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

from sympy import isprime

from .errors import ConfigurationError, ParameterMismatchError, ScalarDomainError

__all__ = [
    "DEFAULT_Q",
    "DEFAULT_GROUP",
    "TRANSPARENT",
    "GroupParams",
    "Scalar",
    "G1Element",
    "GTElement",
    "pair",
    "g1_mul",
    "g1_add",
    "gt_pow",
    "hash_to_g1",
    "hash_gt_to_scalar",
    "scalar_inv",
    "scalar_random",
    "decode_element",
]

# order of the secp256k1 group, a well-known 256-bit prime
DEFAULT_Q = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141
TRANSPARENT = "transparent"

G1_TAG = 0x01
GT_TAG = 0x02

_H1_DST = b"keyissue-lab/H:{0,1}*->G1/v1"
_H2_DST = b"keyissue-lab/h:GT->Zq*/v1"


@lru_cache(maxsize=64)
def _is_prime(q: int) -> bool:
    return bool(isprime(q))


@dataclass(frozen=True)
class GroupParams:
    """Public description of a pairing group: prime order and backend tag."""

    q: int = DEFAULT_Q
    backend_id: str = TRANSPARENT

    def __post_init__(self):
        if self.backend_id != TRANSPARENT:
            raise ConfigurationError(f"unknown pairing backend {self.backend_id!r}")
        if self.q < 11 or not _is_prime(self.q):
            raise ConfigurationError(f"group order must be a prime >= 11, got {self.q}")

    def __repr__(self):
        return f"GroupParams(q={self.q}, backend_id={self.backend_id!r})"

    @property
    def scalar_len(self) -> int:
        return (self.q.bit_length() + 7) // 8

    @property
    def generator(self) -> G1Element:
        return G1Element(self, 1)

    @property
    def identity(self) -> G1Element:
        return G1Element(self, 0)

    @property
    def gt_generator(self) -> GTElement:
        return GTElement(self, 1)

    @property
    def gt_identity(self) -> GTElement:
        return GTElement(self, 0)

    def scalar(self, value: int) -> Scalar:
        return Scalar(self, value % self.q)

    def g1(self, exponent: int) -> G1Element:
        """The element ``exponent * P`` (transparent backend constructor)."""
        return G1Element(self, exponent % self.q)

    def gt(self, exponent: int) -> GTElement:
        return GTElement(self, exponent % self.q)

    def encode_int(self, value: int) -> bytes:
        return value.to_bytes(self.scalar_len, "big")

    def hash_to_g1(self, data: bytes) -> G1Element:
        return hash_to_g1(data, self)

    def random_scalar(self, rng: random.Random, nonzero: bool = True) -> Scalar:
        return scalar_random(rng, nonzero, self)


DEFAULT_GROUP = GroupParams()


def _check_same(a, b):
    if a.group != b.group:
        raise ParameterMismatchError(f"{a.group!r} vs {b.group!r}")


def _coerce(group: GroupParams, s) -> int:
    if isinstance(s, Scalar):
        if s.group != group:
            raise ParameterMismatchError(f"{s.group!r} vs {group!r}")
        return s.value
    if isinstance(s, int):
        return s % group.q
    return NotImplemented


@dataclass(frozen=True, repr=False)
class Scalar:
    """Element of Z_q."""

    group: GroupParams
    value: int

    def __post_init__(self):
        if not 0 <= self.value < self.group.q:
            raise ScalarDomainError(f"scalar {self.value} not reduced mod {self.group.q}")

    def __repr__(self):
        return f"Scalar({self.value})"

    def __int__(self):
        return self.value

    def __bool__(self):
        return self.value != 0

    def __add__(self, other):
        o = _coerce(self.group, other)
        if o is NotImplemented:
            return o
        return self.group.scalar(self.value + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce(self.group, other)
        if o is NotImplemented:
            return o
        return self.group.scalar(self.value - o)

    def __neg__(self):
        return self.group.scalar(-self.value)

    def __mul__(self, other):
        o = _coerce(self.group, other)
        if o is NotImplemented:
            return o
        return self.group.scalar(self.value * o)

    __rmul__ = __mul__

    def inverse(self) -> Scalar:
        return scalar_inv(self)

    def to_bytes(self) -> bytes:
        return self.group.encode_int(self.value)

    def hex(self) -> str:
        return self.to_bytes().hex()

    @classmethod
    def from_bytes(cls, group: GroupParams, data: bytes) -> Scalar:
        if len(data) != group.scalar_len:
            raise ValueError(f"scalar encoding must be {group.scalar_len} bytes")
        value = int.from_bytes(data, "big")
        if value >= group.q:
            raise ValueError("scalar encoding not reduced")
        return cls(group, value)


@dataclass(frozen=True, repr=False)
class G1Element:
    """Point of the additive source group G1."""

    group: GroupParams
    handle: int

    def __repr__(self):
        return f"G1({self.handle})"

    def __add__(self, other):
        if not isinstance(other, G1Element):
            return NotImplemented
        return g1_add(self, other)

    def __neg__(self):
        return G1Element(self.group, -self.handle % self.group.q)

    def __sub__(self, other):
        if not isinstance(other, G1Element):
            return NotImplemented
        return g1_add(self, -other)

    def __rmul__(self, s):
        if not isinstance(s, (Scalar, int)):
            return NotImplemented
        return g1_mul(s, self)

    __mul__ = __rmul__

    def is_identity(self) -> bool:
        return self.handle == 0

    def discrete_log(self) -> int:
        """Exponent d with self = d*P; only the transparent backend can answer this."""
        return self.handle

    def to_bytes(self) -> bytes:
        return bytes([G1_TAG]) + self.group.encode_int(self.handle)

    def hex(self) -> str:
        return self.to_bytes().hex()


@dataclass(frozen=True, repr=False)
class GTElement:
    """Element of the multiplicative target group GT."""

    group: GroupParams
    handle: int

    def __repr__(self):
        return f"GT({self.handle})"

    def __mul__(self, other):
        if not isinstance(other, GTElement):
            return NotImplemented
        _check_same(self, other)
        return GTElement(self.group, (self.handle + other.handle) % self.group.q)

    def __pow__(self, s):
        if not isinstance(s, (Scalar, int)):
            return NotImplemented
        return gt_pow(self, s)

    def is_identity(self) -> bool:
        return self.handle == 0

    def discrete_log(self) -> int:
        return self.handle

    def to_bytes(self) -> bytes:
        return bytes([GT_TAG]) + self.group.encode_int(self.handle)

    def hex(self) -> str:
        return self.to_bytes().hex()


Element = Union[G1Element, GTElement]


def decode_element(group: GroupParams, data: Union[bytes, str]) -> Element:
    """Inverse of ``to_bytes``/``hex`` for G1 and GT elements."""
    if isinstance(data, str):
        data = bytes.fromhex(data)
    if len(data) != 1 + group.scalar_len:
        raise ValueError(f"element encoding must be {1 + group.scalar_len} bytes")
    value = int.from_bytes(data[1:], "big")
    if value >= group.q:
        raise ValueError("element encoding not reduced")
    if data[0] == G1_TAG:
        return G1Element(group, value)
    if data[0] == GT_TAG:
        return GTElement(group, value)
    raise ValueError(f"unknown element tag 0x{data[0]:02x}")


def pair(a: G1Element, b: G1Element) -> GTElement:
    _check_same(a, b)
    return GTElement(a.group, a.handle * b.handle % a.group.q)


def g1_mul(s: Union[Scalar, int], a: G1Element) -> G1Element:
    k = _coerce(a.group, s)
    return G1Element(a.group, k * a.handle % a.group.q)


def g1_add(a: G1Element, b: G1Element) -> G1Element:
    _check_same(a, b)
    return G1Element(a.group, (a.handle + b.handle) % a.group.q)


def gt_pow(t: GTElement, s: Union[Scalar, int]) -> GTElement:
    k = _coerce(t.group, s)
    return GTElement(t.group, t.handle * k % t.group.q)


def hash_to_g1(data: bytes, group: GroupParams = DEFAULT_GROUP) -> G1Element:
    """Deterministic map {0,1}* -> G1 \\ {identity}.

    SHA-512 over (tag || counter || data) reduced mod q; the counter is bumped
    until the result is nonzero.
    """
    counter = 0
    while True:
        digest = hashlib.sha512(_H1_DST + counter.to_bytes(4, "big") + data).digest()
        d = int.from_bytes(digest, "big") % group.q
        if d:
            return G1Element(group, d)
        counter += 1


def hash_gt_to_scalar(t: GTElement) -> Scalar:
    """Deterministic map GT -> Z_q*; output is always in [1, q-1]."""
    digest = hashlib.sha512(_H2_DST + t.to_bytes()).digest()
    q = t.group.q
    return Scalar(t.group, int.from_bytes(digest, "big") % (q - 1) + 1)


def scalar_inv(s: Scalar) -> Scalar:
    if s.value == 0:
        raise ScalarDomainError("zero has no inverse mod q")
    return Scalar(s.group, pow(s.value, -1, s.group.q))


def scalar_random(
    rng: random.Random, nonzero: bool = True, group: GroupParams = DEFAULT_GROUP
) -> Scalar:
    """Uniform draw from Z_q (or Z_q* when ``nonzero``), reproducible per seed."""
    low = 1 if nonzero else 0
    return Scalar(group, rng.randrange(low, group.q))
