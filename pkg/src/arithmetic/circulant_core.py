"""
The circulant ring R = F_q[x]/(x^d - 1).

A Circulant is stored as its first row c_0 .. c_{d-1}, which is also the
coefficient list of its representer polynomial phi = c_0 + c_1 x + ... .
Matrix product of circulants is cyclic convolution of first rows.

For q = 2 rows are additionally packed into one integer (bit i = c_i):
products run as a 4-bit comb followed by folding mod x^d - 1, and squaring
at odd d is bit spreading followed by folding. Both paths are bit-identical
to the generic convolution.
"""

import logging
import random
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Optional, Sequence, Tuple

from arithmetic.field_core import FieldElement, FieldSpec, gf2_gcd, spread_bits
from arithmetic.polynomial import Poly, PolyRing, degree, trim
from monitoring.metrics import OpCounter, charge
from utils.errors import (
    DimensionMismatchError,
    FieldSpecMismatchError,
    InseparableModulusError,
    NotInvertibleError,
    UnsupportedDimensionError,
    UnsupportedFieldError,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Circulant:
    """d x d circulant over F_q, defined by its first row"""
    spec: FieldSpec
    coeffs: Tuple[int, ...]

    def __post_init__(self):
        coeffs = tuple(self.coeffs)
        if len(coeffs) < 2:
            raise UnsupportedDimensionError(f"circulants need d >= 2, got {len(coeffs)}")
        q = self.spec.q
        if any(not 0 <= c < q for c in coeffs):
            raise ValueError("circulant entries must be canonical field elements")
        object.__setattr__(self, 'coeffs', coeffs)

    @property
    def d(self) -> int:
        return len(self.coeffs)

    @property
    def row(self) -> Tuple[FieldElement, ...]:
        return tuple(FieldElement(self.spec, c) for c in self.coeffs)

    @cached_property
    def packed(self) -> int:
        if not _is_gf2(self.spec):
            raise UnsupportedFieldError("packed rows exist for q = 2 only")
        return int(''.join('1' if c else '0' for c in reversed(self.coeffs)), 2)

    @classmethod
    def from_row(cls, row: Sequence[FieldElement]) -> 'Circulant':
        if not row:
            raise UnsupportedDimensionError("empty row")
        spec = row[0].spec
        if any(e.spec != spec for e in row):
            raise FieldSpecMismatchError("row entries from different fields")
        return cls(spec, tuple(e.value for e in row))

    @classmethod
    def from_packed(cls, spec: FieldSpec, d: int, bits: int) -> 'Circulant':
        return cls(spec, tuple(1 if ch == '1' else 0 for ch in reversed(format(bits, f'0{d}b'))))

    @classmethod
    def identity(cls, spec: FieldSpec, d: int) -> 'Circulant':
        return cls(spec, (1,) + (0,) * (d - 1))

    @classmethod
    def zero(cls, spec: FieldSpec, d: int) -> 'Circulant':
        return cls(spec, (0,) * d)

    @classmethod
    def from_bytes(cls, spec: FieldSpec, data: bytes) -> 'Circulant':
        if len(data) < 4:
            raise ValueError("circulant serialization shorter than its header")
        d = int.from_bytes(data[:4], 'big')
        width = spec.nbytes
        if len(data) != 4 + d * width:
            raise ValueError(f"expected {4 + d * width} bytes for d = {d}, got {len(data)}")
        return cls.from_row([
            FieldElement.from_bytes(spec, data[4 + i * width:4 + (i + 1) * width])
            for i in range(d)
        ])

    def is_identity(self) -> bool:
        return self.coeffs[0] == 1 and not any(self.coeffs[1:])

    def to_bytes(self) -> bytes:
        return self.d.to_bytes(4, 'big') + b''.join(e.to_bytes() for e in self.row)

    def hex(self) -> str:
        return self.to_bytes().hex()

    def __mul__(self, other: 'Circulant') -> 'Circulant':
        return circ_mul(self, other)

    def __str__(self) -> str:
        return 'circ(' + ','.join(str(e) for e in self.row) + ')'


@dataclass(frozen=True)
class SquarePermutation:
    """table[j] = 2^-1 * j mod d: the index squared into slot j"""
    d: int
    table: Tuple[int, ...] = field(repr=False)


@dataclass(frozen=True)
class CrtPair:
    """(phi mod (x - 1), phi mod psi)"""
    at_one: FieldElement
    residue: Poly


def _is_gf2(spec: FieldSpec) -> bool:
    return spec.p == 2 and spec.k == 1


def _check_pair(a: Circulant, b: Circulant) -> None:
    if a.spec != b.spec:
        raise FieldSpecMismatchError(f"{a.spec.describe()} vs {b.spec.describe()}")
    if a.d != b.d:
        raise DimensionMismatchError(f"d = {a.d} vs d = {b.d}")


def _charge_mul(counter: Optional[OpCounter], d: int) -> None:
    charge(counter, field_mults=d * d, field_adds=d * (d - 1))


# Packed GF(2) kernels

def _fold(v: int, d: int) -> int:
    mask = (1 << d) - 1
    while v >> d:
        v = (v & mask) ^ (v >> d)
    return v


def _packed_mul(x: int, y: int, d: int) -> int:
    table = [0] * 16
    table[1], table[2], table[4], table[8] = y, y << 1, y << 2, y << 3
    for i in range(3, 16):
        table[i] = table[i & -i] ^ table[i & (i - 1)]
    acc = 0
    for idx, byte in enumerate(x.to_bytes((x.bit_length() + 7) // 8, 'little')):
        if byte & 15:
            acc ^= table[byte & 15] << (8 * idx)
        if byte >> 4:
            acc ^= table[byte >> 4] << (8 * idx + 4)
    return _fold(acc, d)


def _packed_square(x: int, d: int) -> int:
    return _fold(spread_bits(x), d)


# Ring operations

def circ_shift_matrix(d: int, spec: FieldSpec) -> Circulant:
    """W = circ(0, 1, 0, ..., 0); W^d = I"""
    if d < 2:
        raise UnsupportedDimensionError(f"d must be >= 2, got {d}")
    return Circulant(spec, (0, 1) + (0,) * (d - 2))


def circ_expand(a: Circulant) -> Tuple[Tuple[FieldElement, ...], ...]:
    """Full matrix; row i is row i-1 shifted right by one"""
    row = a.row
    d = a.d
    return tuple(tuple(row[(j - i) % d] for j in range(d)) for i in range(d))


def circ_add(a: Circulant, b: Circulant) -> Circulant:
    _check_pair(a, b)
    add = a.spec.add_raw
    return Circulant(a.spec, tuple(add(x, y) for x, y in zip(a.coeffs, b.coeffs)))


def circ_scale(a: Circulant, c: FieldElement) -> Circulant:
    if c.spec != a.spec:
        raise FieldSpecMismatchError("scalar from a different field")
    mul = a.spec.mul_raw
    return Circulant(a.spec, tuple(mul(x, c.value) for x in a.coeffs))


def circ_mul(a: Circulant, b: Circulant, counter: Optional[OpCounter] = None,
             packed: bool = True) -> Circulant:
    """Cyclic convolution: result[j] = sum_i a[i] * b[(j - i) mod d]"""
    _check_pair(a, b)
    d = a.d
    _charge_mul(counter, d)
    if packed and _is_gf2(a.spec):
        return Circulant.from_packed(a.spec, d, _packed_mul(a.packed, b.packed, d))

    spec = a.spec
    add, mul = spec.add_raw, spec.mul_raw
    out = [0] * d
    bc = b.coeffs
    for i, ai in enumerate(a.coeffs):
        if ai == 0:
            continue
        for j, bj in enumerate(bc):
            if bj:
                k = i + j
                if k >= d:
                    k -= d
                out[k] = add(out[k], mul(ai, bj))
    return Circulant(spec, tuple(out))


@lru_cache(maxsize=128)
def square_permutation(d: int) -> SquarePermutation:
    if d < 3 or d % 2 == 0:
        raise UnsupportedDimensionError(f"square permutation needs odd d >= 3, got {d}")
    inv2 = (d + 1) // 2
    return SquarePermutation(d, tuple(inv2 * j % d for j in range(d)))


def circ_square_char2(a: Circulant, counter: Optional[OpCounter] = None,
                      packed: bool = True) -> Circulant:
    """
    Squaring in characteristic 2 at odd d: d field squarings and a permutation.

    Cross terms a_i a_j x^(i+j) pair up and cancel; only the i = j terms remain,
    so result[j] = a[table[j]]^2.
    """
    if a.spec.p != 2:
        raise UnsupportedFieldError(f"fast squaring needs characteristic 2, got {a.spec.p}")
    d = a.d
    if d % 2 == 0:
        raise UnsupportedDimensionError(f"fast squaring needs odd d, got {d}")
    charge(counter, field_squares=d)
    if packed and _is_gf2(a.spec):
        return Circulant.from_packed(a.spec, d, _packed_square(a.packed, d))
    square = a.spec.square_raw
    c = a.coeffs
    return Circulant(a.spec, tuple(square(c[t]) for t in square_permutation(d).table))


def _uses_fast_square(a: Circulant) -> bool:
    return a.spec.p == 2 and a.d % 2 == 1


def circ_pow(a: Circulant, e: int, counter: Optional[OpCounter] = None) -> Circulant:
    """Left-to-right square-and-multiply; one squaring per bit below the top, one product per set bit"""
    if e < 0:
        raise ValueError("circ_pow takes a nonnegative exponent")
    if e == 0:
        return Circulant.identity(a.spec, a.d)
    d = a.d
    fast = _uses_fast_square(a)
    bits = bin(e)[3:]

    if _is_gf2(a.spec):
        base = a.packed
        acc = base
        for bit in bits:
            if fast:
                acc = _packed_square(acc, d)
                charge(counter, field_squares=d, group_squares=1)
            else:
                acc = _packed_mul(acc, acc, d)
                _charge_mul(counter, d)
                charge(counter, group_squares=1)
            if bit == '1':
                acc = _packed_mul(acc, base, d)
                _charge_mul(counter, d)
                charge(counter, group_mults=1)
        return Circulant.from_packed(a.spec, d, acc)

    result = a
    for bit in bits:
        if fast:
            result = circ_square_char2(result, counter)
        else:
            result = circ_mul(result, result, counter)
        charge(counter, group_squares=1)
        if bit == '1':
            result = circ_mul(result, a, counter)
            charge(counter, group_mults=1)
    return result


def representer_polynomial(a: Circulant) -> Poly:
    return trim(a.coeffs)


def circ_from_polynomial(spec: FieldSpec, d: int, f: Poly) -> Circulant:
    """Reduce f mod x^d - 1"""
    add = spec.add_raw
    out = [0] * d
    for i, c in enumerate(f):
        out[i % d] = add(out[i % d], c)
    return Circulant(spec, tuple(out))


def circ_random(spec: FieldSpec, d: int, rng: random.Random) -> Circulant:
    return Circulant(spec, tuple(spec.random_raw(rng) for _ in range(d)))


def circ_inverse(a: Circulant) -> Circulant:
    """Extended Euclid on (phi_a, x^d - 1)"""
    ring = PolyRing(a.spec)
    modulus = ring.x_power_minus_one(a.d)
    h, s, _ = ring.xgcd(representer_polynomial(a), modulus)
    if h != ring.one():
        raise NotInvertibleError(
            f"gcd(phi, x^{a.d} - 1) = {h} is nontrivial", gcd=h
        )
    return circ_from_polynomial(a.spec, a.d, ring.mod(s, modulus))


def is_unit(a: Circulant) -> bool:
    if _is_gf2(a.spec):
        return gf2_gcd((1 << a.d) | 1, a.packed) == 1
    ring = PolyRing(a.spec)
    return ring.gcd(representer_polynomial(a), ring.x_power_minus_one(a.d)) == ring.one()


def row_sum(a: Circulant) -> FieldElement:
    """phi_a(1): the common row sum, an eigenvalue in the ground field"""
    add = a.spec.add_raw
    total = 0
    for c in a.coeffs:
        total = add(total, c)
    return FieldElement(a.spec, total)


def circ_det(a: Circulant) -> FieldElement:
    """Determinant of the expansion by Gaussian elimination, O(d^3)"""
    spec = a.spec
    d = a.d
    sub, mul = spec.sub_raw, spec.mul_raw
    c = a.coeffs
    m = [[c[(j - i) % d] for j in range(d)] for i in range(d)]
    det = 1
    for col in range(d):
        pivot = next((r for r in range(col, d) if m[r][col]), None)
        if pivot is None:
            return spec.zero
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = spec.neg_raw(det)
        pivot_row = m[col]
        det = mul(det, pivot_row[col])
        inv = spec.inv_raw(pivot_row[col])
        for r in range(col + 1, d):
            target = m[r]
            factor = target[col]
            if factor == 0:
                continue
            factor = mul(factor, inv)
            for j in range(col, d):
                if pivot_row[j]:
                    target[j] = sub(target[j], mul(factor, pivot_row[j]))
    return FieldElement(spec, det)


def circ_det_resultant(a: Circulant) -> FieldElement:
    """det = Res(x^d - 1, phi_a), O(d^2) by Euclid"""
    spec = a.spec
    if _is_gf2(spec):
        return spec.one if is_unit(a) else spec.zero
    ring = PolyRing(spec)
    return FieldElement(spec, _resultant(ring, ring.x_power_minus_one(a.d), representer_polynomial(a)))


def _resultant(ring: PolyRing, f: Poly, g: Poly) -> int:
    spec = ring.spec
    if not f or not g:
        return 0
    res = 1
    while True:
        n, m = degree(f), degree(g)
        if m == 0:
            return spec.mul_raw(res, spec.pow_raw(g[0], n))
        r = ring.mod(f, g)
        if not r:
            return 0
        if (n * m) % 2:
            res = spec.neg_raw(res)
        res = spec.mul_raw(res, spec.pow_raw(g[-1], n - degree(r)))
        f, g = g, r


def circ_frobenius(a: Circulant, power: int = 1) -> Circulant:
    """a^(q^power): entries are Frobenius-fixed, so x^i moves to x^(i q^power mod d)"""
    d = a.d
    step = pow(a.spec.q, power, d)
    add = a.spec.add_raw
    out = [0] * d
    for i, c in enumerate(a.coeffs):
        if c:
            k = i * step % d
            out[k] = add(out[k], c)
    return Circulant(a.spec, tuple(out))


# CRT split F_q[x]/(x^d - 1) = F_q[x]/(x - 1) x F_q[x]/psi

def _require_separable(spec: FieldSpec, d: int) -> None:
    if d % spec.p == 0:
        raise InseparableModulusError(f"gcd(d = {d}, q = {spec.q}) != 1")


def _require_psi(psi: Optional[Poly], d: int) -> None:
    if psi is not None and tuple(psi) != (1,) * d:
        raise ValueError("psi must be (x^d - 1)/(x - 1) = 1 + x + ... + x^(d-1)")


def crt_split(a: Circulant, psi: Optional[Poly] = None) -> CrtPair:
    """(phi(1), phi mod psi); x^(d-1) = -(1 + ... + x^(d-2)) mod psi"""
    _require_psi(psi, a.d)
    _require_separable(a.spec, a.d)
    sub = a.spec.sub_raw
    top = a.coeffs[-1]
    residue = trim(sub(c, top) for c in a.coeffs[:-1])
    return CrtPair(row_sum(a), residue)


def crt_lift(pair: CrtPair, d: int, psi: Optional[Poly] = None) -> Circulant:
    """Unique preimage: beta + (a - beta(1)) * d^-1 * psi"""
    _require_psi(psi, d)
    spec = pair.at_one.spec
    _require_separable(spec, d)
    if degree(pair.residue) >= d - 1:
        raise ValueError(f"residue must have degree < {d - 1}")
    add, sub, mul = spec.add_raw, spec.sub_raw, spec.mul_raw
    beta = list(pair.residue) + [0] * (d - 1 - len(pair.residue))
    beta_at_one = 0
    for c in beta:
        beta_at_one = add(beta_at_one, c)
    t = mul(sub(pair.at_one.value, beta_at_one), spec.inv_raw(spec.from_int(d)))
    return Circulant(spec, tuple(add(c, t) for c in beta) + (t,))
