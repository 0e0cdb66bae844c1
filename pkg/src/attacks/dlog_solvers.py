"""
Generic discrete log machinery: group adapters with counted operations,
baby-step giant-step, Pohlig-Hellman and CRT recombination.
"""

import logging
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from math import isqrt
from typing import Any, Hashable, List, Optional, Sequence, Tuple

from arithmetic.circulant_core import Circulant, circ_inverse, circ_mul
from arithmetic.field_core import FieldSpec
from arithmetic.number_theory import Factorization, crt_all, factorization_product
from arithmetic.polynomial import Poly, PolyRing
from monitoring.metrics import OpCounter, charge
from utils.errors import InvalidInstanceError

logger = logging.getLogger(__name__)


class GroupOps(ABC):
    """Multiplicative group adapter; every mul and square is charged to the counter"""

    def __init__(self, counter: Optional[OpCounter] = None):
        self.counter = counter

    @abstractmethod
    def _mul(self, a: Any, b: Any) -> Any:
        ...

    @abstractmethod
    def inv(self, a: Any) -> Any:
        ...

    @abstractmethod
    def identity(self) -> Any:
        ...

    def key(self, a: Any) -> Hashable:
        return a

    def mul(self, a: Any, b: Any) -> Any:
        charge(self.counter, group_mults=1)
        return self._mul(a, b)

    def square(self, a: Any) -> Any:
        charge(self.counter, group_squares=1)
        return self._mul(a, a)

    def eq(self, a: Any, b: Any) -> bool:
        return self.key(a) == self.key(b)

    def is_identity(self, a: Any) -> bool:
        return self.eq(a, self.identity())

    def pow(self, a: Any, e: int) -> Any:
        if e < 0:
            a, e = self.inv(a), -e
        if e == 0:
            return self.identity()
        result = a
        for bit in bin(e)[3:]:
            result = self.square(result)
            if bit == '1':
                result = self.mul(result, a)
        return result


class FieldUnitGroup(GroupOps):
    """F_q^*, elements as raw field integers"""

    def __init__(self, spec: FieldSpec, counter: Optional[OpCounter] = None):
        super().__init__(counter)
        self.spec = spec

    def _mul(self, a: int, b: int) -> int:
        return self.spec.mul_raw(a, b)

    def inv(self, a: int) -> int:
        return self.spec.inv_raw(a)

    def identity(self) -> int:
        return 1


class QuotientFieldGroup(GroupOps):
    """(F_q[x]/f)^* for irreducible f, elements as reduced polynomials"""

    def __init__(self, ring: PolyRing, modulus: Poly, counter: Optional[OpCounter] = None):
        super().__init__(counter)
        self.ring = ring
        self.modulus = modulus

    def _mul(self, a: Poly, b: Poly) -> Poly:
        return self.ring.mulmod(a, b, self.modulus)

    def inv(self, a: Poly) -> Poly:
        return self.ring.inverse_mod(a, self.modulus)

    def identity(self) -> Poly:
        return self.ring.mod(self.ring.one(), self.modulus)

    def reduce(self, f: Poly) -> Poly:
        return self.ring.mod(f, self.modulus)


class CirculantGroup(GroupOps):
    """Units of F_q[x]/(x^d - 1)"""

    def __init__(self, spec: FieldSpec, d: int, counter: Optional[OpCounter] = None):
        super().__init__(counter)
        self.spec = spec
        self.d = d

    def _mul(self, a: Circulant, b: Circulant) -> Circulant:
        return circ_mul(a, b)

    def inv(self, a: Circulant) -> Circulant:
        return circ_inverse(a)

    def identity(self) -> Circulant:
        return Circulant.identity(self.spec, self.d)

    def key(self, a: Circulant) -> Hashable:
        return a.coeffs


def bsgs(g: Any, h: Any, order_bound: int, ops: GroupOps) -> Optional[int]:
    """Least x in [0, order_bound) with g^x = h, or None"""
    if order_bound < 1:
        return None
    m = isqrt(order_bound - 1) + 1
    table = {}
    baby = ops.identity()
    for j in range(m):
        table.setdefault(ops.key(baby), j)
        baby = ops.mul(baby, g)

    giant = ops.inv(ops.pow(g, m))
    gamma = h
    for i in range((order_bound + m - 1) // m):
        j = table.get(ops.key(gamma))
        if j is not None:
            x = i * m + j
            return x if x < order_bound else None
        gamma = ops.mul(gamma, giant)
    return None


def element_order(g: Any, group_order: int, factorization: Factorization, ops: GroupOps) -> int:
    """Order of g given the factored exponent of the group"""
    if factorization_product(factorization) != group_order:
        raise InvalidInstanceError("factorization does not multiply to the group order")
    order = group_order
    for p, _ in factorization:
        while order % p == 0 and ops.is_identity(ops.pow(g, order // p)):
            order //= p
    return order


def restrict_factorization(factorization: Factorization, n: int) -> Factorization:
    """Factorization of a divisor n, read off the parent's prime list"""
    out = []
    for p, _ in factorization:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e:
            out.append((p, e))
    if n != 1:
        raise InvalidInstanceError("order is not supported on the given primes")
    return out


def _prime_power_log(g: Any, h: Any, order: int, p: int, e: int, ops: GroupOps) -> Tuple[int, int]:
    """x mod p^e, digit by digit with BSGS in the order-p subgroup"""
    cofactor = order // p ** e
    g_i = ops.pow(g, cofactor)
    h_i = ops.pow(h, cofactor)
    gamma = ops.pow(g_i, p ** (e - 1))
    g_inv = ops.inv(g_i)
    x = 0
    for j in range(e):
        shifted = ops.mul(h_i, ops.pow(g_inv, x))
        digit = bsgs(gamma, ops.pow(shifted, p ** (e - 1 - j)), p, ops)
        if digit is None:
            raise InvalidInstanceError(f"target has no logarithm in the order-{p} subgroup")
        x += digit * p ** j
    return x, p ** e


def crt_combine(residues: Sequence[Tuple[int, int]]) -> Optional[Tuple[int, int]]:
    """Generalized CRT over possibly non-coprime moduli; None if incompatible"""
    return crt_all(residues)


def pohlig_hellman(g: Any, h: Any, order: int, factorization: Factorization,
                   ops: GroupOps, workers: int = 1) -> int:
    """x mod order with g^x = h; g must have exactly the stated order"""
    if factorization_product(factorization) != order:
        raise InvalidInstanceError("factorization does not multiply to the order")
    if order == 1:
        if not ops.is_identity(h):
            raise InvalidInstanceError("target is not the identity of the trivial subgroup")
        return 0

    if workers > 1 and len(factorization) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_prime_power_log, g, h, order, p, e, ops)
                       for p, e in factorization]
            parts: List[Tuple[int, int]] = [f.result() for f in futures]
    else:
        parts = [_prime_power_log(g, h, order, p, e, ops) for p, e in factorization]

    combined = crt_combine(parts)
    if combined is None:
        raise InvalidInstanceError("prime-power residues are inconsistent")
    x = combined[0] % order
    if not ops.eq(ops.pow(g, x), h):
        raise InvalidInstanceError("recovered logarithm fails verification")
    logger.debug(f"Pohlig-Hellman solved x = {x} mod {order}")
    return x
