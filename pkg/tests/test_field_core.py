import random

import pytest

from arithmetic.field_core import (
    BINARY_MODULUS_TABLE,
    FieldElement,
    FieldSpec,
    ff_add,
    ff_inv,
    ff_mul,
    ff_pow,
    ff_square,
    gf2_is_irreducible,
    random_element,
)
from utils.errors import FieldDivisionByZeroError, FieldSpecMismatchError, UnsupportedFieldError


FIELDS = [
    FieldSpec.binary(1),
    FieldSpec.binary(2),
    FieldSpec.binary(8),
    FieldSpec.binary(64),
    FieldSpec.prime(3),
    FieldSpec.prime(65537),
]


class TestFieldSpec:
    def test_builtin_moduli_are_irreducible(self):
        for k, middle in BINARY_MODULUS_TABLE.items():
            bits = (1 << k) | 1
            for e in middle:
                bits |= 1 << e
            assert gf2_is_irreducible(bits), k

    def test_reducible_modulus_rejected(self):
        # x^2 + 1 = (x + 1)^2
        with pytest.raises(UnsupportedFieldError):
            FieldSpec.binary(2, (1, 0, 1))

    def test_unsupported_families(self):
        with pytest.raises(UnsupportedFieldError):
            FieldSpec(4, 1)
        with pytest.raises(UnsupportedFieldError):
            FieldSpec.from_q(3, 2)
        with pytest.raises(UnsupportedFieldError):
            FieldSpec.binary(65)

    def test_q_and_width(self):
        assert FieldSpec.binary(8).q == 256
        assert FieldSpec.binary(8).nbytes == 1
        assert FieldSpec.binary(9).nbytes == 2
        assert FieldSpec.prime(7).nbytes == 1
        assert FieldSpec.binary(1).nbytes == 1


class TestFieldExamples:
    def test_addition(self):
        f2, f3 = FieldSpec.binary(1), FieldSpec.prime(3)
        f4 = FieldSpec.binary(2)
        assert ff_add(f2.element(1), f2.element(1)).value == 0
        assert ff_add(f4.element(2), f4.zero).value == 2
        assert ff_add(f3.element(2), f3.element(2)).value == 1

    def test_multiplication(self):
        f4, f3 = FieldSpec.binary(2), FieldSpec.prime(3)
        t = f4.element(0b10)
        assert ff_mul(t, t).value == 0b11
        assert ff_mul(f3.element(2), f3.element(2)).value == 1
        for spec in FIELDS:
            a = random_element(spec, random.Random(1))
            assert ff_mul(a, spec.one) == a

    def test_inverse(self):
        f4 = FieldSpec.binary(2)
        assert ff_inv(FieldSpec.binary(1).one).value == 1
        assert ff_inv(f4.element(0b10)).value == 0b11
        assert ff_inv(FieldSpec.prime(7).element(3)).value == 5

    def test_inverse_of_zero(self):
        with pytest.raises(FieldDivisionByZeroError):
            ff_inv(FieldSpec.prime(7).zero)
        with pytest.raises(ZeroDivisionError):
            ff_inv(FieldSpec.binary(8).zero)

    def test_square_and_pow(self):
        f4 = FieldSpec.binary(2)
        t = f4.element(0b10)
        assert ff_square(t).value == 0b11
        assert ff_square(FieldSpec.prime(3).element(2)).value == 1
        assert ff_pow(t, 3).is_one()
        assert ff_pow(t, 1) == t
        assert ff_pow(FieldSpec.binary(1).one, 10 ** 9).is_one()
        assert ff_pow(f4.zero, 0).is_one()

    def test_spec_mismatch(self):
        with pytest.raises(FieldSpecMismatchError):
            ff_add(FieldSpec.binary(2).one, FieldSpec.binary(3).one)

    def test_non_canonical_rejected(self):
        with pytest.raises(ValueError):
            FieldElement(FieldSpec.prime(5), 5)


class TestFieldProperties:
    @pytest.mark.parametrize("spec", FIELDS, ids=lambda s: s.describe())
    def test_axioms_on_random_triples(self, spec):
        rng = random.Random(spec.q)
        for _ in range(10000):
            a, b, c = (random_element(spec, rng) for _ in range(3))
            assert (a + b) + c == a + (b + c)
            assert (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c
            assert a * b == b * a
            assert a + b == b + a
            assert ff_square(a) == a * a
            if not a.is_zero():
                assert (a * ff_inv(a)).is_one()

    @pytest.mark.parametrize("k", [1, 4, 8, 12, 16])
    def test_frobenius_is_bijection(self, k):
        spec = FieldSpec.binary(k)
        images = {spec.square_raw(v) for v in range(spec.q)}
        assert len(images) == spec.q

    @pytest.mark.parametrize("spec", [FieldSpec.binary(k) for k in range(1, 11)] + [FieldSpec.prime(1021)],
                             ids=lambda s: s.describe())
    def test_fermat_little(self, spec):
        for a in spec.elements():
            if not a.is_zero():
                assert ff_pow(a, spec.q - 1).is_one()

    def test_serialization(self):
        spec = FieldSpec.binary(16)
        a = spec.element(0xbeef)
        assert a.to_bytes() == b'\xbe\xef'
        assert a.hex() == 'beef'
        assert FieldElement.from_bytes(spec, a.to_bytes()) == a
        assert a.coeffs[0] == 1  # constant term is bit 0
