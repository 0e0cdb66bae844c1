import random

import pytest

from arithmetic.circulant_core import (
    Circulant,
    CrtPair,
    circ_det,
    circ_shift_matrix,
    crt_lift,
    row_sum,
)
from arithmetic.field_core import FieldSpec
from arithmetic.polynomial import PolyRing
from params.param_validator import (
    ParamSet,
    build_psi,
    charpoly_quotient_irreducible,
    cyclotomic_polynomial,
    generate_generator,
    generate_param_set,
    is_irreducible,
    is_prime,
    is_q_primitive_mod_d,
    multiplicative_order,
    validate_params,
)
from utils.errors import GeneratorGenerationError, InvalidParamsError


class TestNumberTheory:
    def test_is_prime(self):
        assert is_prime(5)
        assert not is_prime(21)
        assert is_prime(1019)
        assert not is_prime(0) and not is_prime(1)
        assert is_prime(2 ** 61 - 1)
        assert not is_prime(3215031751)  # strong pseudoprime to bases 2, 3, 5, 7

    def test_is_prime_against_trial_division(self):
        def slow(n):
            return n >= 2 and all(n % k for k in range(2, int(n ** 0.5) + 1))
        assert all(is_prime(n) == slow(n) for n in range(5000))

    def test_multiplicative_order(self):
        assert multiplicative_order(2, 5) == 4
        assert multiplicative_order(2, 7) == 3
        assert multiplicative_order(12, 11) == 1
        with pytest.raises(ValueError):
            multiplicative_order(4, 6)

    def test_primitivity(self):
        assert is_q_primitive_mod_d(2, 5)
        assert not is_q_primitive_mod_d(2, 7)
        assert is_q_primitive_mod_d(2, 11)
        assert is_q_primitive_mod_d(2, 13)
        assert is_q_primitive_mod_d(2, 1019)
        with pytest.raises(ValueError):
            is_q_primitive_mod_d(2, 9)


class TestPolynomials:
    def test_build_psi(self, gf2):
        assert build_psi(3, gf2) == (1, 1, 1)
        assert build_psi(2, gf2) == (1, 1)
        assert build_psi(5, gf2) == (1, 1, 1, 1, 1)

    def test_psi_times_x_minus_one(self):
        for spec in (FieldSpec.binary(1), FieldSpec.prime(3)):
            ring = PolyRing(spec)
            x_minus_one = (spec.neg_raw(1), 1)
            for d in range(2, 201):
                assert ring.mul(build_psi(d, spec), x_minus_one) == ring.x_power_minus_one(d)

    def test_irreducibility_examples(self, gf2):
        assert is_irreducible((1, 1, 1), gf2)
        assert not is_irreducible((1, 0, 1), gf2)
        assert is_irreducible((0, 1), gf2)
        assert is_irreducible((2, 1), FieldSpec.prime(5))

    def test_psi_irreducible_iff_primitive(self, gf2):
        for d in range(3, 100):
            if is_prime(d):
                assert is_irreducible(build_psi(d, gf2), gf2) == is_q_primitive_mod_d(2, d), d

    @pytest.mark.parametrize("spec", [FieldSpec.binary(1), FieldSpec.prime(3)], ids=lambda s: s.describe())
    def test_cyclotomic_product(self, spec):
        ring = PolyRing(spec)
        for d in range(2, 31):
            product = ring.one()
            for d1 in range(1, d + 1):
                if d % d1 == 0:
                    product = ring.mul(product, cyclotomic_polynomial(d1, spec))
            assert product == ring.x_power_minus_one(d)

    def test_cyclotomic_prime_is_psi(self, gf2):
        assert cyclotomic_polynomial(7, gf2) == build_psi(7, gf2)


class TestValidation:
    def test_presets_pass(self, preset_d5, preset_d11, preset_d13):
        for ps in (preset_d5, preset_d11, preset_d13):
            assert ps.is_validated, ps.validation.failures()
            assert ps.checks.all_passed
            assert row_sum(ps.generator).is_one()
            assert circ_det(ps.generator).is_one()
        assert preset_d5.generator_order == 15
        assert preset_d11.generator_order == 1023
        assert preset_d13.generator_order == 4095

    def test_non_primitive_dimension(self, gf2):
        from params.presets import load_preset
        ps = load_preset('d7')
        report = ps.validation
        assert not report.passed
        assert not report.checks.q_primitive
        assert report.checks.d_prime
        assert 'vi' in report.checks.failed()
        assert 'condition (vi)' in report.failures()

    def test_identity_fails_order(self, gf2):
        ps = ParamSet.build(gf2, 5, Circulant.identity(gf2, 5), min_order_bits=3)
        report = validate_params(ps)
        assert not report.order_ok
        assert report.generator_order == 1
        assert report.checks.d_prime and report.checks.q_primitive
        assert not report.checks.charpoly_irreducible

    def test_shift_matrix_d5(self, gf2):
        # W has order 5 mod psi: conditions (iv) and (vi) hold, order 5 < 2^3 fails
        ps = ParamSet.build(gf2, 5, circ_shift_matrix(5, gf2), min_order_bits=3)
        report = validate_params(ps)
        assert report.checks.d_prime and report.checks.q_primitive
        assert report.checks.det_one and report.checks.row_sum_one
        assert report.generator_order == 5
        assert not report.order_ok

    def test_row_sum_violation(self, gf16):
        a = crt_lift(CrtPair(gf16.element(2), (0, 1)), 5)
        report = validate_params(ParamSet.build(gf16, 5, a, min_order_bits=2))
        assert not report.checks.row_sum_one
        assert not report.checks.phi_at_one
        assert not report.checks.charpoly_irreducible

    def test_inseparable_dimension(self, gf2):
        ps = ParamSet.build(gf2, 4, circ_shift_matrix(4, gf2), min_order_bits=1)
        report = validate_params(ps)
        assert not report.gcd_ok
        assert not report.checks.d_prime
        assert not report.passed

    def test_report_serializes(self, preset_d11):
        data = preset_d11.validation.to_dict()
        assert data['passed'] is True
        assert data['checks']['vi_q_primitive'] is True
        assert data['generator_order'] == 1023


class TestGeneration:
    @pytest.mark.parametrize("spec,d,bits", [
        (FieldSpec.binary(1), 5, 3),
        (FieldSpec.binary(1), 11, 9),
        (FieldSpec.prime(3), 5, 5),
        (FieldSpec.binary(3), 5, 9),
    ], ids=['q2d5', 'q2d11', 'q3d5', 'q8d5'])
    def test_generated_generators_validate(self, spec, d, bits):
        rng = random.Random(d)
        for _ in range(5):
            a = generate_generator(spec, d, rng, min_order_bits=bits)
            assert row_sum(a).is_one()
            assert circ_det(a).is_one()
            assert charpoly_quotient_irreducible(a)
            report = validate_params(ParamSet.build(spec, d, a, min_order_bits=bits))
            assert report.passed
            assert report.checks.all_passed

    def test_preconditions(self, gf2):
        rng = random.Random(0)
        with pytest.raises(InvalidParamsError):
            generate_generator(gf2, 7, rng)
        with pytest.raises(InvalidParamsError):
            generate_generator(gf2, 9, rng)
        with pytest.raises(InvalidParamsError):
            generate_generator(FieldSpec.prime(5), 5, rng)

    def test_retry_budget(self, gf2):
        # order of any element of F_16^* is at most 15 < 2^10
        with pytest.raises(GeneratorGenerationError):
            generate_generator(gf2, 5, random.Random(1), min_order_bits=10, retries=8)

    def test_deterministic_in_seed(self, gf2):
        a = generate_param_set(gf2, 11, random.Random(42), min_order_bits=9)
        b = generate_param_set(gf2, 11, random.Random(42), min_order_bits=9)
        assert a.generator == b.generator

    def test_fully_factored_group_order(self, gf2):
        # 2^60 - 1 splits completely below the trial-division bound
        ps = generate_param_set(gf2, 61, random.Random(3), min_order_bits=40)
        assert ps.is_validated
        assert ps.validation.order_lower_bound > 2 ** 40
