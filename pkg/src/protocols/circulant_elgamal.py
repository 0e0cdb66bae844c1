"""
Diffie-Hellman and textbook ElGamal over the unit group of circulants.

Decryption inverts c1^m with extended Euclid on (phi, x^d - 1); it never
relies on the group order. Ciphertexts are malleable (componentwise products
decrypt to products of blocks), so this is a demonstration scheme.
"""

import logging
import random
from dataclasses import dataclass
from typing import Optional, Tuple

from arithmetic.circulant_core import (
    Circulant,
    circ_inverse,
    circ_mul,
    circ_pow,
    is_unit,
)
from arithmetic.field_core import FieldElement, FieldSpec
from config.settings import config
from monitoring.metrics import OpCounter
from params.param_validator import ParamSet
from utils.errors import (
    InvalidParamsError,
    MessageDecodeError,
    MessageTooLargeError,
    NotInvertibleError,
    ParamMismatchError,
)

logger = logging.getLogger(__name__)

LONG_HEADER_BITS = 16
LONG_HEADER_THRESHOLD = 24


@dataclass(frozen=True)
class KeyPair:
    params: ParamSet
    secret_m: int
    public_B: Circulant

    def __post_init__(self):
        _require_same_params(self.params, self.public_B)
        if self.secret_m < 2:
            raise InvalidParamsError(f"secret exponent must be at least 2, got {self.secret_m}")

    def regenerate_public(self) -> Circulant:
        return circ_pow(self.params.generator, self.secret_m)


@dataclass(frozen=True)
class Ciphertext:
    c1: Circulant
    c2: Circulant

    def __post_init__(self):
        if self.c1.spec != self.c2.spec or self.c1.d != self.c2.d:
            raise ParamMismatchError("ciphertext components from different rings")

    @property
    def d(self) -> int:
        return self.c1.d

    def to_bytes(self) -> bytes:
        """4-byte big-endian d, then the rows of c1 and c2"""
        body = b''.join(e.to_bytes() for e in self.c1.row + self.c2.row)
        return self.d.to_bytes(4, 'big') + body

    @classmethod
    def from_bytes(cls, spec: FieldSpec, data: bytes) -> 'Ciphertext':
        if len(data) < 4:
            raise MessageDecodeError("ciphertext shorter than its header")
        d = int.from_bytes(data[:4], 'big')
        width = spec.nbytes
        if d < 2 or len(data) != 4 + 2 * d * width:
            raise MessageDecodeError(f"ciphertext length {len(data)} does not match d = {d}")
        try:
            row = [FieldElement.from_bytes(spec, data[4 + i * width:4 + (i + 1) * width])
                   for i in range(2 * d)]
        except ValueError as e:
            raise MessageDecodeError(f"ciphertext holds a non-canonical element: {e}") from e
        return cls(Circulant.from_row(row[:d]), Circulant.from_row(row[d:]))

    def hex(self) -> str:
        return self.to_bytes().hex()


def _require_same_params(params: ParamSet, c: Circulant) -> None:
    if c.spec != params.spec or c.d != params.d:
        raise ParamMismatchError(
            f"element over {c.spec.describe()}, d={c.d} does not belong to "
            f"{params.spec.describe()}, d={params.d}"
        )


def _require_validated(params: ParamSet) -> None:
    if not params.is_validated:
        failures = params.validation.failures() if params.validation else ['not validated']
        raise InvalidParamsError(f"parameter set {params.name} is unusable: {failures}")


def exponent_bound(params: ParamSet, exp_bits: Optional[int] = None) -> int:
    """Exclusive upper end for secrets: min(2^exp_bits, ord A) when the order is known"""
    bits = config.EXP_BITS if exp_bits is None else exp_bits
    bound = 2 ** bits
    if params.generator_order:
        bound = min(bound, params.generator_order)
    if bound <= 2:
        raise InvalidParamsError(f"exponent range [2, {bound}) is empty")
    return bound


def random_exponent(params: ParamSet, rng: random.Random, exp_bits: Optional[int] = None) -> int:
    return rng.randrange(2, exponent_bound(params, exp_bits))


def keygen(params: ParamSet, rng: random.Random, exp_bits: Optional[int] = None,
           counter: Optional[OpCounter] = None) -> KeyPair:
    _require_validated(params)
    m = random_exponent(params, rng, exp_bits)
    return KeyPair(params, m, circ_pow(params.generator, m, counter))


def is_degenerate_public(c: Circulant) -> bool:
    return c.is_identity()


def dh_shared(my_secret: int, their_public: Circulant,
              counter: Optional[OpCounter] = None) -> Circulant:
    """their_public^my_secret; the caller exposes the canonical bytes of the result"""
    if not is_unit(their_public):
        raise NotInvertibleError("peer public value is not a unit of the circulant ring")
    if is_degenerate_public(their_public):
        logger.warning("Peer public value is the identity; shared secret is degenerate")
    return circ_pow(their_public, my_secret, counter)


# Message codec

def _block_layout(spec: FieldSpec, d: int) -> Tuple[int, int, int]:
    """(total payload bits, header bits, capacity in bytes)"""
    # largest t with 2^t <= q^(d-1)
    total = (spec.q ** (d - 1)).bit_length() - 1
    if total >= LONG_HEADER_THRESHOLD:
        return total, LONG_HEADER_BITS, min(total // 8 - 2, 2 ** LONG_HEADER_BITS - 1)
    # compact header: bitlen(L) bits for lengths 0..L
    capacity = 0
    while 8 * (capacity + 1) + (capacity + 1).bit_length() <= total:
        capacity += 1
    return total, capacity.bit_length(), capacity


def message_capacity(spec: FieldSpec, d: int) -> int:
    return _block_layout(spec, d)[2]


def encode_message(spec: FieldSpec, d: int, message: bytes) -> Circulant:
    """
    Length header then payload as one big-endian integer, written as base-q
    digits into c_1 .. c_{d-1} (most significant first); c_0 = 0.
    """
    total, header_bits, capacity = _block_layout(spec, d)
    n = len(message)
    if n > capacity:
        raise MessageTooLargeError(f"{n} bytes exceed block capacity {capacity}")
    used = header_bits + 8 * n
    value = ((n << 8 * n) | int.from_bytes(message, 'big')) << (total - used)

    digits = [0] * (d - 1)
    for i in range(d - 2, -1, -1):
        value, digits[i] = divmod(value, spec.q)
    return Circulant(spec, (0, *digits))


def decode_message(block: Circulant) -> bytes:
    spec, d = block.spec, block.d
    total, header_bits, capacity = _block_layout(spec, d)
    if block.coeffs[0] != 0:
        raise MessageDecodeError("c_0 of a message block must be 0")

    value = 0
    for c in block.coeffs[1:]:
        value = value * spec.q + c
    if value >> total:
        raise MessageDecodeError(f"block value exceeds {total} bits")

    n = value >> (total - header_bits) if header_bits else 0
    if n > capacity:
        raise MessageDecodeError(f"header length {n} exceeds capacity {capacity}")
    pad_bits = total - header_bits - 8 * n
    if value & ((1 << pad_bits) - 1):
        raise MessageDecodeError("nonzero padding after payload")
    payload = (value >> pad_bits) & ((1 << 8 * n) - 1)
    return payload.to_bytes(n, 'big')


# ElGamal

def elgamal_encrypt_block(params: ParamSet, public_B: Circulant, block: Circulant,
                          rng: random.Random, exp_bits: Optional[int] = None,
                          counter: Optional[OpCounter] = None) -> Ciphertext:
    _require_validated(params)
    _require_same_params(params, public_B)
    _require_same_params(params, block)
    r = random_exponent(params, rng, exp_bits)
    c1 = circ_pow(params.generator, r, counter)
    c2 = circ_mul(block, circ_pow(public_B, r, counter), counter)
    return Ciphertext(c1, c2)


def elgamal_decrypt_block(keypair: KeyPair, ct: Ciphertext,
                          counter: Optional[OpCounter] = None) -> Circulant:
    _require_same_params(keypair.params, ct.c1)
    mask = circ_pow(ct.c1, keypair.secret_m, counter)
    return circ_mul(ct.c2, circ_inverse(mask), counter)


def elgamal_encrypt(params: ParamSet, public_B: Circulant, message: bytes,
                    rng: random.Random, exp_bits: Optional[int] = None,
                    counter: Optional[OpCounter] = None) -> Ciphertext:
    block = encode_message(params.spec, params.d, message)
    return elgamal_encrypt_block(params, public_B, block, rng, exp_bits, counter)


def elgamal_decrypt(keypair: KeyPair, ct: Ciphertext,
                    counter: Optional[OpCounter] = None) -> bytes:
    return decode_message(elgamal_decrypt_block(keypair, ct, counter))


def ciphertext_product(a: Ciphertext, b: Ciphertext) -> Ciphertext:
    """Componentwise product; decrypts to the product of the two blocks"""
    return Ciphertext(circ_mul(a.c1, b.c1), circ_mul(a.c2, b.c2))
