"""
Arithmetic in F_q, q = p^k, using a polynomial basis over F_p.

Two families are supported:
  - p = 2, 1 <= k <= 64: an element is a machine word, bit i holding the
    coefficient of t^i. Squaring is bit spreading (Frobenius) followed by
    reduction by a low-weight modulus; it never goes through multiplication.
  - odd prime p < 2^31, k = 1: an element is its residue mod p.

Elements are canonical on construction, so equality is integer comparison.
"""

import logging
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Optional, Sequence, Tuple

from arithmetic.number_theory import is_prime
from utils.errors import (
    FieldDivisionByZeroError,
    FieldSpecMismatchError,
    UnsupportedFieldError,
)

logger = logging.getLogger(__name__)

MAX_BINARY_DEGREE = 64
MAX_ODD_PRIME = 2 ** 31

# Lowest-weight irreducible x^k + x^a (+ x^b + x^c) + 1 over F_2, by degree k.
# Only the middle exponents are listed.
BINARY_MODULUS_TABLE = {
    2: (1,), 3: (1,), 4: (1,), 5: (2,), 6: (1,), 7: (1,), 8: (4, 3, 1),
    9: (1,), 10: (3,), 11: (2,), 12: (3,), 13: (4, 3, 1), 14: (5,), 15: (1,),
    16: (5, 3, 1), 17: (3,), 18: (3,), 19: (5, 2, 1), 20: (3,), 21: (2,),
    22: (1,), 23: (5,), 24: (4, 3, 1), 25: (3,), 26: (4, 3, 1), 27: (5, 2, 1),
    28: (1,), 29: (2,), 30: (1,), 31: (3,), 32: (7, 3, 2), 33: (10,), 34: (7,),
    35: (2,), 36: (9,), 37: (6, 4, 1), 38: (6, 5, 1), 39: (4,), 40: (5, 4, 3),
    41: (3,), 42: (7,), 43: (6, 4, 3), 44: (5,), 45: (4, 3, 1), 46: (1,),
    47: (5,), 48: (5, 3, 2), 49: (9,), 50: (4, 3, 2), 51: (6, 3, 1), 52: (3,),
    53: (6, 2, 1), 54: (9,), 55: (7,), 56: (7, 4, 2), 57: (4,), 58: (19,),
    59: (7, 4, 2), 60: (1,), 61: (5, 2, 1), 62: (29,), 63: (1,), 64: (4, 3, 1),
}


def _spread_byte(b: int) -> int:
    out = 0
    for i in range(8):
        if (b >> i) & 1:
            out |= 1 << (2 * i)
    return out


_SPREAD_TABLE = tuple(_spread_byte(b) for b in range(256))


def spread_bits(value: int) -> int:
    """Square a packed GF(2) polynomial: bit i moves to bit 2i"""
    if value < 256:
        return _SPREAD_TABLE[value]
    data = value.to_bytes((value.bit_length() + 7) // 8, 'little')
    out = bytearray(2 * len(data))
    for i, b in enumerate(data):
        s = _SPREAD_TABLE[b]
        out[2 * i] = s & 0xFF
        out[2 * i + 1] = s >> 8
    return int.from_bytes(out, 'little')


def clmul(a: int, b: int) -> int:
    """Carry-less product of packed GF(2) polynomials"""
    if a.bit_length() < b.bit_length():
        a, b = b, a
    result = 0
    shift = 0
    while b:
        if b & 1:
            result ^= a << shift
        b >>= 1
        shift += 1
    return result


def gf2_mod(a: int, m: int) -> int:
    dm = m.bit_length()
    while a.bit_length() >= dm:
        a ^= m << (a.bit_length() - dm)
    return a


def gf2_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, gf2_mod(a, b)
    return a


def gf2_inverse(a: int, m: int) -> int:
    """Inverse of a modulo m in GF(2)[t] by extended Euclid"""
    r0, r1 = m, a
    s0, s1 = 0, 1
    while r1:
        quotient = 0
        while r0 and r0.bit_length() >= r1.bit_length():
            shift = r0.bit_length() - r1.bit_length()
            quotient ^= 1 << shift
            r0 ^= r1 << shift
        r0, r1 = r1, r0
        s0, s1 = s1, s0 ^ clmul(quotient, s1)
    if r0 != 1:
        raise FieldDivisionByZeroError(f"{a:#x} not invertible modulo {m:#x}")
    return gf2_mod(s0, m)


@lru_cache(maxsize=256)
def gf2_is_irreducible(m: int) -> bool:
    """Rabin's test for a packed GF(2) polynomial"""
    n = m.bit_length() - 1
    if n < 1:
        return False
    if n == 1:
        return True
    powers = [2]  # x^(2^i) mod m
    for _ in range(n):
        powers.append(gf2_mod(spread_bits(powers[-1]), m))
    if powers[n] != gf2_mod(2, m):
        return False
    for r in range(2, n + 1):
        if n % r == 0 and is_prime(r):
            if gf2_gcd(m, powers[n // r] ^ 2) != 1:
                return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    """
    The ground field F_q.

    modulus is the coefficient list (constant term first) of the monic
    irreducible defining polynomial; it is empty for k = 1, where no
    reduction happens.
    """
    p: int
    k: int = 1
    modulus: Tuple[int, ...] = ()
    q: int = field(init=False, repr=False, compare=False)
    modulus_bits: int = field(init=False, repr=False, compare=False)
    nbytes: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not is_prime(self.p):
            raise UnsupportedFieldError(f"characteristic {self.p} is not prime")
        if self.p == 2:
            if not 1 <= self.k <= MAX_BINARY_DEGREE:
                raise UnsupportedFieldError(
                    f"binary fields need 1 <= k <= {MAX_BINARY_DEGREE}, got {self.k}"
                )
        else:
            if self.k != 1:
                raise UnsupportedFieldError(
                    f"odd characteristic supports k = 1 only, got k = {self.k}"
                )
            if self.p >= MAX_ODD_PRIME:
                raise UnsupportedFieldError(f"prime {self.p} exceeds 2^31")

        modulus_bits = 0
        if self.k == 1:
            if self.modulus:
                raise UnsupportedFieldError("prime fields carry no modulus")
        else:
            coeffs = tuple(self.modulus)
            if len(coeffs) != self.k + 1 or coeffs[-1] != 1:
                raise UnsupportedFieldError(
                    f"modulus must be monic of degree {self.k}: {coeffs}"
                )
            if any(c not in (0, 1) for c in coeffs):
                raise UnsupportedFieldError("binary modulus coefficients must be 0 or 1")
            modulus_bits = sum(c << i for i, c in enumerate(coeffs))
            if not gf2_is_irreducible(modulus_bits):
                raise UnsupportedFieldError(f"modulus {modulus_bits:#x} is reducible over F_2")
            object.__setattr__(self, 'modulus', coeffs)

        object.__setattr__(self, 'q', self.p ** self.k)
        object.__setattr__(self, 'modulus_bits', modulus_bits)
        object.__setattr__(
            self, 'nbytes', (self.k * (self.p - 1).bit_length() + 7) // 8
        )

    # Constructors

    @classmethod
    def binary(cls, k: int, modulus: Optional[Sequence[int]] = None) -> 'FieldSpec':
        """F_{2^k}, with the built-in lowest-weight modulus unless one is given"""
        if k == 1:
            return cls(2, 1)
        if modulus is None:
            if k not in BINARY_MODULUS_TABLE:
                raise UnsupportedFieldError(f"no built-in modulus for k = {k}")
            coeffs = [0] * (k + 1)
            coeffs[0] = coeffs[k] = 1
            for exponent in BINARY_MODULUS_TABLE[k]:
                coeffs[exponent] = 1
            modulus = coeffs
        return cls(2, k, tuple(modulus))

    @classmethod
    def prime(cls, p: int) -> 'FieldSpec':
        return cls(p, 1)

    @classmethod
    def from_q(cls, p: int, k: int, modulus: Optional[Sequence[int]] = None) -> 'FieldSpec':
        if p == 2:
            return cls.binary(k, modulus)
        if k != 1:
            raise UnsupportedFieldError(f"odd characteristic supports k = 1 only, got k = {k}")
        return cls.prime(p)

    @classmethod
    def from_modulus_bits(cls, k: int, bits: int) -> 'FieldSpec':
        if k == 1:
            return cls(2, 1)
        return cls(2, k, tuple((bits >> i) & 1 for i in range(k + 1)))

    # Raw integer arithmetic, used by the ring layers

    def add_raw(self, a: int, b: int) -> int:
        return a ^ b if self.p == 2 else (a + b) % self.p

    def sub_raw(self, a: int, b: int) -> int:
        return a ^ b if self.p == 2 else (a - b) % self.p

    def neg_raw(self, a: int) -> int:
        return a if self.p == 2 else (-a) % self.p

    def mul_raw(self, a: int, b: int) -> int:
        if self.p != 2:
            return a * b % self.p
        if self.k == 1:
            return a & b
        return self._reduce(clmul(a, b))

    def square_raw(self, a: int) -> int:
        if self.p != 2:
            return a * a % self.p
        if self.k == 1:
            return a
        return self._reduce(spread_bits(a))

    def inv_raw(self, a: int) -> int:
        if a == 0:
            raise FieldDivisionByZeroError("inverse of zero")
        if self.p != 2:
            return _int_inverse(a, self.p)
        if self.k == 1:
            return 1
        return gf2_inverse(a, self.modulus_bits)

    def pow_raw(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow_raw(self.inv_raw(a), -e)
        result = 1
        for bit in bin(e)[2:] if e else '':
            result = self.square_raw(result)
            if bit == '1':
                result = self.mul_raw(result, a)
        return result

    def from_int(self, n: int) -> int:
        """Image of the integer n in the prime subfield"""
        return n % self.p if self.p != 2 else n & 1

    def _reduce(self, v: int) -> int:
        # low-weight modulus: each step clears the top bit and flips a handful below it
        k = self.k
        m = self.modulus_bits
        while v.bit_length() > k:
            v ^= m << (v.bit_length() - 1 - k)
        return v

    # Element helpers

    def element(self, value: int) -> 'FieldElement':
        return FieldElement(self, value)

    @property
    def zero(self) -> 'FieldElement':
        return FieldElement(self, 0)

    @property
    def one(self) -> 'FieldElement':
        return FieldElement(self, 1)

    def random_raw(self, rng: random.Random) -> int:
        return rng.randrange(self.q)

    def elements(self) -> Iterator['FieldElement']:
        for value in range(self.q):
            yield FieldElement(self, value)

    def describe(self) -> str:
        if self.k == 1:
            return f"F_{self.p}"
        return f"F_{self.p}^{self.k} (modulus {self.modulus_bits:#x})"


def _int_inverse(a: int, p: int) -> int:
    r0, r1 = p, a % p
    s0, s1 = 0, 1
    while r1:
        quotient = r0 // r1
        r0, r1 = r1, r0 - quotient * r1
        s0, s1 = s1, s0 - quotient * s1
    if r0 != 1:
        raise FieldDivisionByZeroError(f"{a} not invertible modulo {p}")
    return s0 % p


@dataclass(frozen=True)
class FieldElement:
    """An element of F_q in canonical form"""
    spec: FieldSpec
    value: int

    def __post_init__(self):
        if not 0 <= self.value < self.spec.q:
            raise ValueError(f"{self.value} is not a canonical element of {self.spec.describe()}")

    @classmethod
    def from_coeffs(cls, spec: FieldSpec, coeffs: Sequence[int]) -> 'FieldElement':
        if len(coeffs) != spec.k:
            raise ValueError(f"expected {spec.k} coefficients, got {len(coeffs)}")
        if spec.p != 2:
            return cls(spec, coeffs[0] % spec.p)
        return cls(spec, sum((c & 1) << i for i, c in enumerate(coeffs)))

    @classmethod
    def from_bytes(cls, spec: FieldSpec, data: bytes) -> 'FieldElement':
        if len(data) != spec.nbytes:
            raise ValueError(f"expected {spec.nbytes} bytes, got {len(data)}")
        return cls(spec, int.from_bytes(data, 'big'))

    @property
    def coeffs(self) -> Tuple[int, ...]:
        if self.spec.p != 2:
            return (self.value,)
        return tuple((self.value >> i) & 1 for i in range(self.spec.k))

    def is_zero(self) -> bool:
        return self.value == 0

    def is_one(self) -> bool:
        return self.value == 1

    def to_bytes(self) -> bytes:
        return self.value.to_bytes(self.spec.nbytes, 'big')

    def hex(self) -> str:
        return self.to_bytes().hex()

    def __add__(self, other: 'FieldElement') -> 'FieldElement':
        return ff_add(self, other)

    def __sub__(self, other: 'FieldElement') -> 'FieldElement':
        return ff_sub(self, other)

    def __neg__(self) -> 'FieldElement':
        return FieldElement(self.spec, self.spec.neg_raw(self.value))

    def __mul__(self, other: 'FieldElement') -> 'FieldElement':
        return ff_mul(self, other)

    def __truediv__(self, other: 'FieldElement') -> 'FieldElement':
        return ff_mul(self, ff_inv(other))

    def __pow__(self, e: int) -> 'FieldElement':
        return ff_pow(self, e)

    def __str__(self) -> str:
        return str(self.value) if self.spec.k == 1 else f"0x{self.hex()}"


def random_element(spec: FieldSpec, rng: random.Random) -> FieldElement:
    return FieldElement(spec, spec.random_raw(rng))


def _check_same(a: FieldElement, b: FieldElement) -> FieldSpec:
    if a.spec != b.spec:
        raise FieldSpecMismatchError(
            f"operands in {a.spec.describe()} and {b.spec.describe()}"
        )
    return a.spec


def ff_add(a: FieldElement, b: FieldElement) -> FieldElement:
    spec = _check_same(a, b)
    return FieldElement(spec, spec.add_raw(a.value, b.value))


def ff_sub(a: FieldElement, b: FieldElement) -> FieldElement:
    spec = _check_same(a, b)
    return FieldElement(spec, spec.sub_raw(a.value, b.value))


def ff_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    spec = _check_same(a, b)
    return FieldElement(spec, spec.mul_raw(a.value, b.value))


def ff_inv(a: FieldElement) -> FieldElement:
    """Extended Euclid on (coefficient polynomial, modulus), or on integers for k = 1"""
    return FieldElement(a.spec, a.spec.inv_raw(a.value))


def ff_square(a: FieldElement) -> FieldElement:
    return FieldElement(a.spec, a.spec.square_raw(a.value))


def ff_pow(a: FieldElement, e: int) -> FieldElement:
    """Left-to-right square-and-multiply; 0^0 = 1"""
    if e < 0:
        raise ValueError("ff_pow takes a nonnegative exponent")
    return FieldElement(a.spec, a.spec.pow_raw(a.value, e))
