"""
Integer helpers shared by the field, parameter and attack layers:
primality, multiplicative order, trial-division factoring and CRT.
"""

from functools import lru_cache
from math import gcd
from typing import Dict, Iterable, List, Optional, Tuple

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)

Factorization = List[Tuple[int, int]]


@lru_cache(maxsize=8)
def primes_up_to(bound: int) -> Tuple[int, ...]:
    """Sieve of Eratosthenes"""
    if bound < 2:
        return ()
    sieve = bytearray([1]) * (bound + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, int(bound ** 0.5) + 1):
        if sieve[p]:
            sieve[p * p::p] = bytearray(len(range(p * p, bound + 1, p)))
    return tuple(i for i, flag in enumerate(sieve) if flag)


def is_prime(n: int) -> bool:
    """
    Primality by trial division and Miller-Rabin.

    The witness set is deterministic far beyond 2^63; above that the verdict is
    a strong-probable-prime test on the same bases.
    """
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    s, t = 0, n - 1
    while t % 2 == 0:
        s += 1
        t //= 2
    for a in _MR_WITNESSES:
        x = pow(a, t, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factor_trial(n: int, bound: int) -> Tuple[Dict[int, int], int]:
    """Strip prime factors <= bound; return (factors, cofactor)"""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    factors: Dict[int, int] = {}
    for p in primes_up_to(bound):
        if p * p > n:
            break
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
    if 1 < n < bound * bound:
        # whatever remains below bound^2 has no factor <= bound, so it is prime
        factors[n] = factors.get(n, 0) + 1
        n = 1
    return factors, n


def factorize(n: int, bound: int) -> Optional[Factorization]:
    """Full factorization when trial division leaves 1 or a prime cofactor"""
    factors, cofactor = factor_trial(n, bound)
    if cofactor > 1:
        if not is_prime(cofactor):
            return None
        factors[cofactor] = factors.get(cofactor, 0) + 1
    return sorted(factors.items())


def multiplicative_order(q: int, d: int) -> int:
    """Least t > 0 with q^t = 1 (mod d)"""
    if d < 2:
        raise ValueError(f"modulus must be >= 2, got {d}")
    if gcd(q, d) != 1:
        raise ValueError(f"gcd({q}, {d}) != 1, order undefined")
    phi = _euler_phi(d)
    order = phi
    for p, _ in factorize(phi, max(2, int(phi ** 0.5) + 1)) or []:
        while order % p == 0 and pow(q, order // p, d) == 1:
            order //= p
    return order


def _euler_phi(n: int) -> int:
    result = n
    for p, _ in factorize(n, max(2, int(n ** 0.5) + 1)) or []:
        result -= result // p
    return result


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> Optional[Tuple[int, int]]:
    """Merge x = r1 (m1), x = r2 (m2); None when incompatible"""
    g = gcd(m1, m2)
    if (r2 - r1) % g:
        return None
    lcm = m1 // g * m2
    reduced = m2 // g
    if reduced == 1:
        return r1 % lcm, lcm
    step = (r2 - r1) // g * pow(m1 // g, -1, reduced) % reduced
    return (r1 + m1 * step) % lcm, lcm


def crt_all(pairs: Iterable[Tuple[int, int]]) -> Optional[Tuple[int, int]]:
    residue, modulus = 0, 1
    for r, m in pairs:
        merged = crt_pair(residue, modulus, r, m)
        if merged is None:
            return None
        residue, modulus = merged
    return residue, modulus


def factorization_product(factorization: Factorization) -> int:
    product = 1
    for p, e in factorization:
        product *= p ** e
    return product
