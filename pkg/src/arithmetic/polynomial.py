"""
Univariate polynomials over F_q.

A polynomial is a tuple of raw field integers, constant term first, with no
trailing zeros; the zero polynomial is the empty tuple.
"""

import random
from typing import Iterable, List, Sequence, Tuple

from arithmetic.field_core import FieldSpec
from utils.errors import FieldDivisionByZeroError

Poly = Tuple[int, ...]


def trim(coeffs: Iterable[int]) -> Poly:
    out = list(coeffs)
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def degree(f: Poly) -> int:
    return len(f) - 1


class PolyRing:
    """F_q[x] bound to one FieldSpec"""

    def __init__(self, spec: FieldSpec):
        self.spec = spec

    def one(self) -> Poly:
        return (1,)

    def x(self) -> Poly:
        return (0, 1)

    def const(self, c: int) -> Poly:
        return trim((c,))

    def from_ints(self, coeffs: Sequence[int]) -> Poly:
        return trim(self.spec.from_int(c) if self.spec.k == 1 else c for c in coeffs)

    def add(self, f: Poly, g: Poly) -> Poly:
        add = self.spec.add_raw
        if len(f) < len(g):
            f, g = g, f
        out = list(f)
        for i, c in enumerate(g):
            out[i] = add(out[i], c)
        return trim(out)

    def sub(self, f: Poly, g: Poly) -> Poly:
        return self.add(f, self.neg(g))

    def neg(self, f: Poly) -> Poly:
        neg = self.spec.neg_raw
        return tuple(neg(c) for c in f)

    def scale(self, f: Poly, c: int) -> Poly:
        mul = self.spec.mul_raw
        return trim(mul(a, c) for a in f)

    def mul(self, f: Poly, g: Poly) -> Poly:
        if not f or not g:
            return ()
        spec = self.spec
        add, mul = spec.add_raw, spec.mul_raw
        out = [0] * (len(f) + len(g) - 1)
        for i, a in enumerate(f):
            if a == 0:
                continue
            for j, b in enumerate(g):
                if b:
                    out[i + j] = add(out[i + j], mul(a, b))
        return trim(out)

    def divmod(self, f: Poly, g: Poly) -> Tuple[Poly, Poly]:
        if not g:
            raise FieldDivisionByZeroError("polynomial division by zero")
        spec = self.spec
        sub, mul = spec.sub_raw, spec.mul_raw
        lead_inv = spec.inv_raw(g[-1])
        rem = list(f)
        dg = len(g) - 1
        if len(rem) <= dg:
            return (), trim(rem)
        quot = [0] * (len(rem) - dg)
        for i in range(len(rem) - 1, dg - 1, -1):
            c = rem[i]
            if c == 0:
                continue
            factor = mul(c, lead_inv)
            quot[i - dg] = factor
            for j, b in enumerate(g):
                if b:
                    rem[i - dg + j] = sub(rem[i - dg + j], mul(factor, b))
        return trim(quot), trim(rem[:dg])

    def mod(self, f: Poly, g: Poly) -> Poly:
        return self.divmod(f, g)[1]

    def monic(self, f: Poly) -> Poly:
        if not f:
            return f
        return self.scale(f, self.spec.inv_raw(f[-1]))

    def gcd(self, f: Poly, g: Poly) -> Poly:
        while g:
            f, g = g, self.mod(f, g)
        return self.monic(f)

    def xgcd(self, f: Poly, g: Poly) -> Tuple[Poly, Poly, Poly]:
        """(h, s, t) with h = s*f + t*g monic"""
        r0, r1 = f, g
        s0, s1 = self.one(), ()
        t0, t1 = (), self.one()
        while r1:
            quot, rem = self.divmod(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, self.sub(s0, self.mul(quot, s1))
            t0, t1 = t1, self.sub(t0, self.mul(quot, t1))
        if not r0:
            return (), (), ()
        lead_inv = self.spec.inv_raw(r0[-1])
        return self.scale(r0, lead_inv), self.scale(s0, lead_inv), self.scale(t0, lead_inv)

    def inverse_mod(self, f: Poly, m: Poly) -> Poly:
        h, s, _ = self.xgcd(self.mod(f, m), m)
        if h != self.one():
            raise FieldDivisionByZeroError(f"polynomial not invertible, gcd {h}")
        return self.mod(s, m)

    def mulmod(self, f: Poly, g: Poly, m: Poly) -> Poly:
        return self.mod(self.mul(f, g), m)

    def powmod(self, f: Poly, e: int, m: Poly) -> Poly:
        if e < 0:
            return self.powmod(self.inverse_mod(f, m), -e, m)
        result = self.mod(self.one(), m)
        base = self.mod(f, m)
        for bit in bin(e)[2:] if e else '':
            result = self.mulmod(result, result, m)
            if bit == '1':
                result = self.mulmod(result, base, m)
        return result

    def evaluate(self, f: Poly, point: int) -> int:
        spec = self.spec
        acc = 0
        for c in reversed(f):
            acc = spec.add_raw(spec.mul_raw(acc, point), c)
        return acc

    def x_power_minus_one(self, n: int) -> Poly:
        """x^n - 1"""
        coeffs = [0] * (n + 1)
        coeffs[0] = self.spec.neg_raw(1)
        coeffs[n] = 1
        return tuple(coeffs)

    def frobenius_power(self, f: Poly, m: Poly) -> Poly:
        """f^q mod m"""
        return self.powmod(f, self.spec.q, m)

    def is_irreducible(self, f: Poly) -> bool:
        """Ben-Or: gcd(f, x^(q^i) - x) = 1 for every i <= deg(f)/2"""
        n = degree(f)
        if n < 1:
            return False
        if n == 1:
            return True
        f = self.monic(f)
        x = self.x()
        h = self.mod(x, f)
        for _ in range(n // 2):
            h = self.frobenius_power(h, f)
            if self.gcd(f, self.sub(h, x)) != self.one():
                return False
        return True

    def random_poly(self, rng: random.Random, deg_bound: int) -> Poly:
        """Uniform polynomial of degree < deg_bound"""
        return trim(self.spec.random_raw(rng) for _ in range(deg_bound))

    # Factorization helpers for squarefree polynomials

    def distinct_degree_factors(self, f: Poly) -> List[Tuple[Poly, int]]:
        """Split squarefree monic f into (product of all degree-t factors, t)"""
        out = []
        f = self.monic(f)
        x = self.x()
        h = self.mod(x, f)
        t = 0
        while degree(f) >= 2 * (t + 1):
            t += 1
            h = self.frobenius_power(h, f)
            g = self.gcd(f, self.sub(h, x))
            if g != self.one():
                out.append((g, t))
                f = self.divmod(f, g)[0]
                h = self.mod(h, f)
        if degree(f) > 0:
            out.append((self.monic(f), degree(f)))
        return out

    def equal_degree_split(self, f: Poly, t: int, rng: random.Random) -> List[Poly]:
        """Cantor-Zassenhaus; trace map in characteristic 2"""
        f = self.monic(f)
        if degree(f) == t:
            return [f]
        spec = self.spec
        while True:
            a = self.random_poly(rng, degree(f))
            if degree(a) < 1:
                continue
            if spec.p == 2:
                # Tr(a) = a + a^2 + ... + a^(2^(k t - 1))
                acc, term = a, a
                for _ in range(spec.k * t - 1):
                    term = self.mulmod(term, term, f)
                    acc = self.add(acc, term)
                candidate = acc
            else:
                candidate = self.sub(self.powmod(a, (spec.q ** t - 1) // 2, f), self.one())
            g = self.gcd(f, candidate)
            if 0 < degree(g) < degree(f):
                rest = self.divmod(f, g)[0]
                return (self.equal_degree_split(g, t, rng)
                        + self.equal_degree_split(rest, t, rng))

    def factor_squarefree(self, f: Poly, rng: random.Random) -> List[Poly]:
        factors: List[Poly] = []
        for block, t in self.distinct_degree_factors(f):
            factors.extend(self.equal_degree_split(block, t, rng))
        return sorted(factors)


def integer_cyclotomic(n: int) -> List[int]:
    """Phi_n over the integers via the Moebius product of (x^e - 1)^mu(n/e)"""
    numerator = [1]
    denominator = [1]
    for e in range(1, n + 1):
        if n % e:
            continue
        mu = _moebius(n // e)
        if mu == 0:
            continue
        factor = [-1] + [0] * (e - 1) + [1]
        if mu == 1:
            numerator = _int_poly_mul(numerator, factor)
        else:
            denominator = _int_poly_mul(denominator, factor)
    return _int_poly_exact_div(numerator, denominator)


def _moebius(n: int) -> int:
    result = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    if n > 1:
        result = -result
    return result


def _int_poly_mul(f: List[int], g: List[int]) -> List[int]:
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        for j, b in enumerate(g):
            out[i + j] += a * b
    return out


def _int_poly_exact_div(f: List[int], g: List[int]) -> List[int]:
    # g is monic up to sign
    rem = list(f)
    dg = len(g) - 1
    quot = [0] * (len(f) - dg)
    for i in range(len(rem) - 1, dg - 1, -1):
        c = rem[i] // g[-1]
        quot[i - dg] = c
        for j, b in enumerate(g):
            rem[i - dg + j] -= c * b
    if any(rem):
        raise ArithmeticError("inexact integer polynomial division")
    return quot

