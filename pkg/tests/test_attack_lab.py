import random

import pytest

from arithmetic.circulant_core import (
    Circulant,
    CrtPair,
    circ_det,
    circ_pow,
    circ_random,
    circ_shift_matrix,
    crt_lift,
    is_unit,
    row_sum,
)
from arithmetic.field_core import FieldSpec
from arithmetic.polynomial import PolyRing
from attacks.attack_lab import (
    DETERMINANT,
    PROJECTION,
    ROW_SUM,
    DlogInstance,
    LeakStatus,
    char_poly,
    charpoly_quotient_check,
    detect_determinant_leak,
    detect_rowsum_leak,
    evaluate_at_matrix,
    full_attack,
    make_known_answer_instance,
    projection_attack,
)
from attacks.dlog_solvers import (
    CirculantGroup,
    FieldUnitGroup,
    QuotientFieldGroup,
    bsgs,
    crt_combine,
    element_order,
    pohlig_hellman,
)
from monitoring.metrics import OpCounter
from params.param_validator import ParamSet, generate_generator
from utils.errors import InvalidInstanceError


def gf16_as_quotient():
    """F_16 as F_2[x]/(x^4 + x^3 + x^2 + x + 1) with all fifteen units"""
    ops = QuotientFieldGroup(PolyRing(FieldSpec.binary(1)), (1, 1, 1, 1, 1), OpCounter())
    units = [ops.reduce(tuple((v >> i) & 1 for i in range(4))) for v in range(1, 16)]
    return ops, units


def powers(g, n, ops):
    out = [ops.identity()]
    for _ in range(n - 1):
        out.append(ops.mul(out[-1], g))
    return out


def random_unit(spec, d, rng):
    while True:
        a = circ_random(spec, d, rng)
        if is_unit(a):
            return a


def make_instance(spec, d, base, m):
    params = ParamSet.build(spec, d, base, min_order_bits=1)
    return DlogInstance(params, base, circ_pow(base, m), true_m=m)


class TestCharPoly:
    def test_small_examples(self, gf2, gf3):
        assert char_poly(Circulant.identity(gf2, 3)) == (1, 1, 1, 1)
        assert char_poly(circ_shift_matrix(3, gf2)) == (1, 0, 0, 1)
        assert char_poly(circ_shift_matrix(3, gf3)) == (2, 0, 0, 1)

    @pytest.mark.parametrize("spec,d", [
        (FieldSpec.binary(1), 11),
        (FieldSpec.binary(1), 13),
        (FieldSpec.binary(4), 5),
        (FieldSpec.prime(3), 7),
        (FieldSpec.prime(5), 6),
    ], ids=['q2d11', 'q2d13', 'q16d5', 'q3d7', 'q5d6'])
    def test_cayley_hamilton(self, spec, d):
        rng = random.Random(d * spec.q)
        for _ in range(30):
            a = circ_random(spec, d, rng)
            chi = char_poly(a)
            assert len(chi) == d + 1 and chi[-1] == 1
            assert evaluate_at_matrix(chi, a) == Circulant.zero(spec, d)

    def test_constant_term_is_signed_determinant(self, gf3):
        rng = random.Random(4)
        for d in (4, 5):
            for _ in range(20):
                a = circ_random(gf3, d, rng)
                det = circ_det(a).value
                assert char_poly(a)[0] == (det if d % 2 == 0 else gf3.neg_raw(det))

    def test_one_is_a_root_when_row_sum_is_one(self, preset_d11, preset_d13):
        for ps in (preset_d11, preset_d13):
            ring = PolyRing(ps.spec)
            _, rem = ring.divmod(char_poly(ps.generator), (1, 1))
            assert rem == ()
            assert charpoly_quotient_check(ps.generator) is True

    def test_reducible_quotient_detected(self, gf2):
        assert charpoly_quotient_check(circ_shift_matrix(7, gf2)) is False


class TestSolvers:
    def test_bsgs_exhaustive(self):
        ops, units = gf16_as_quotient()
        for g in units:
            table = powers(g, 15, ops)
            for h in units:
                expected = next((x for x, p in enumerate(table) if ops.eq(p, h)), None)
                assert bsgs(g, h, 15, ops) == expected

    def test_bsgs_respects_bound(self):
        ops, units = gf16_as_quotient()
        x = ops.reduce((0, 1))  # order 5
        assert bsgs(x, ops.pow(x, 4), 4, ops) is None
        assert bsgs(x, ops.pow(x, 4), 5, ops) == 4
        assert bsgs(x, x, 0, ops) is None

    def test_element_order_matches_brute_force(self):
        ops, units = gf16_as_quotient()
        for g in units:
            brute = next(n for n in range(1, 16) if ops.is_identity(ops.pow(g, n)))
            assert element_order(g, 15, [(3, 1), (5, 1)], ops) == brute

    @pytest.mark.parametrize("workers", [1, 2])
    def test_pohlig_hellman_exhaustive(self, workers):
        ops, units = gf16_as_quotient()
        g = next(u for u in units if element_order(u, 15, [(3, 1), (5, 1)], ops) == 15)
        for x in range(15):
            assert pohlig_hellman(g, ops.pow(g, x), 15, [(3, 1), (5, 1)], ops, workers) == x

    def test_pohlig_hellman_prime_powers(self):
        # F_17^* is cyclic of order 16 = 2^4, generated by 3
        ops = FieldUnitGroup(FieldSpec.prime(17))
        for x in range(16):
            assert pohlig_hellman(3, ops.pow(3, x), 16, [(2, 4)], ops) == x

    def test_pohlig_hellman_rejects_bad_input(self):
        ops = FieldUnitGroup(FieldSpec.prime(17))
        with pytest.raises(InvalidInstanceError):
            pohlig_hellman(3, 5, 16, [(2, 3)], ops)
        # 2 has order 8, so 3 is not in its subgroup
        with pytest.raises(InvalidInstanceError):
            pohlig_hellman(2, 3, 8, [(2, 3)], ops)

    def test_circulant_group(self, preset_d5):
        ops = CirculantGroup(preset_d5.spec, 5)
        a = preset_d5.generator
        assert element_order(a, 15, [(3, 1), (5, 1)], ops) == 15
        assert pohlig_hellman(a, circ_pow(a, 13), 15, [(3, 1), (5, 1)], ops) == 13

    def test_operations_are_counted(self):
        counter = OpCounter()
        ops = FieldUnitGroup(FieldSpec.prime(17), counter)
        ops.pow(3, 5)
        snap = counter.snapshot()
        assert snap.group_squares == 2
        assert snap.group_mults == 1

    def test_crt_combine(self):
        assert crt_combine([(1, 4), (3, 6)]) == (9, 12)
        assert crt_combine([(1, 2), (0, 4)]) is None
        assert crt_combine([]) == (0, 1)


class TestGroundFieldLeaks:
    def test_determinant_leak_fires(self, gf3):
        # circ(0, 1) has det -1 and row sum 1
        a = Circulant(gf3, (0, 1))
        for m in range(6):
            inst = make_instance(gf3, 2, a, m)
            leak = detect_determinant_leak(inst)
            assert leak.status is LeakStatus.FIRED
            assert (leak.residue, leak.modulus) == (m % 2, 2)
            assert detect_rowsum_leak(inst).status is LeakStatus.BLOCKED

    def test_determinant_leak_over_random_units(self, gf3):
        rng = random.Random(350)
        fired = 0
        for _ in range(50):
            a = random_unit(gf3, 5, rng)
            m = rng.randrange(10 ** 6)
            leak = detect_determinant_leak(make_instance(gf3, 5, a, m))
            if circ_det(a).is_one():
                assert leak.status is LeakStatus.BLOCKED
            else:
                fired += 1
                assert leak.fired
                assert (leak.residue, leak.modulus) == (m % 2, 2)
        assert fired > 10

    def test_rowsum_leak_fires(self, gf16):
        a = crt_lift(CrtPair(gf16.element(2), (0, 1)), 5)
        inst = make_instance(gf16, 5, a, 11)
        leak = detect_rowsum_leak(inst)
        assert leak.fired
        assert (leak.residue, leak.modulus) == (11, 15)
        assert leak.group_ops > 0

    def test_compliant_generators_block_both(self, gf3):
        rng = random.Random(31)
        for _ in range(50):
            a = generate_generator(gf3, 5, rng, min_order_bits=5)
            inst = make_instance(gf3, 5, a, rng.randrange(40))
            det_leak, row_leak = detect_determinant_leak(inst), detect_rowsum_leak(inst)
            assert det_leak.status is LeakStatus.BLOCKED and det_leak.modulus == 1
            assert row_leak.status is LeakStatus.BLOCKED and row_leak.group_ops == 0

    def test_non_compliant_instances_leak(self, gf16):
        rng = random.Random(77)
        fired = 0
        for _ in range(50):
            a = random_unit(gf16, 5, rng)
            m = rng.randrange(10 ** 6)
            inst = make_instance(gf16, 5, a, m)
            for leak in (detect_determinant_leak(inst), detect_rowsum_leak(inst)):
                if leak.fired:
                    fired += 1
                    assert (m - leak.residue) % leak.modulus == 0
                else:
                    assert leak.status is LeakStatus.BLOCKED
        assert fired > 50


class TestProjection:
    def test_factorization_sources(self, preset_d11, rng):
        inst = make_known_answer_instance(preset_d11, rng)
        leak = projection_attack(inst)
        assert leak.fired and 'preset' in leak.detail
        leak = projection_attack(inst, factorization=[(3, 1), (11, 1), (31, 1)])
        assert leak.fired and 'instance' in leak.detail
        assert (inst.true_m - leak.residue) % leak.modulus == 0

    def test_work_stays_far_below_the_group_order(self, preset_d11, rng):
        # 1023 = 3 * 11 * 31; each step is a 10-bit power or a short BSGS walk
        for _ in range(20):
            inst = make_known_answer_instance(preset_d11, rng)
            leak = projection_attack(inst)
            assert leak.fired
            assert leak.modulus == 1023
            assert 0 < leak.group_ops <= 600

    def test_reducible_psi_splits(self):
        from params.presets import load_preset
        ps = load_preset('d7')
        for m in range(20):
            inst = DlogInstance(ps, ps.generator, circ_pow(ps.generator, m), true_m=m)
            leak = projection_attack(inst)
            assert leak.fired
            assert (leak.residue, leak.modulus) == (m % 7, 7)
            assert '2 factor field(s)' in leak.detail

    def test_inseparable_dimension_unsupported(self, gf2):
        w = circ_shift_matrix(4, gf2)
        inst = make_instance(gf2, 4, w, 3)
        assert projection_attack(inst).status is LeakStatus.UNSUPPORTED


class TestFullAttack:
    @pytest.mark.parametrize("preset", ['d5', 'd11', 'd13'])
    def test_known_answer_instances(self, preset):
        from params.presets import load_preset
        ps = load_preset(preset)
        rng = random.Random(preset)
        for _ in range(50):
            inst = make_known_answer_instance(ps, rng)
            report = full_attack(inst)
            assert report.success
            assert report.base_order == ps.generator_order
            assert report.combined[0] % ps.generator_order == inst.true_m % ps.generator_order
            assert report.leak(DETERMINANT).status is LeakStatus.BLOCKED
            assert report.leak(ROW_SUM).status is LeakStatus.BLOCKED
            assert report.psi_irreducible
            assert report.charpoly_quotient_irreducible

    def test_identity_target(self, preset_d11, rng):
        report = full_attack(make_known_answer_instance(preset_d11, rng, m=0))
        assert report.success
        assert report.combined[0] == 0

    def test_parallel_workers(self, preset_d13, rng):
        inst = make_known_answer_instance(preset_d13, rng)
        report = full_attack(inst, workers=2)
        assert report.success
        assert report.work_counts[PROJECTION] > 0
        assert report.work_counts[DETERMINANT] == 0

    def test_non_compliant_instances(self, gf16):
        rng = random.Random(5)
        for _ in range(50):
            a = random_unit(gf16, 5, rng)
            report = full_attack(make_instance(gf16, 5, a, rng.randrange(10 ** 6)))
            assert report.success
            assert not report.psi_irreducible

    def test_caller_counter_accumulates_every_leak(self, gf16):
        rng = random.Random(12)
        several = 0
        for _ in range(20):
            a = random_unit(gf16, 5, rng)
            counter = OpCounter()
            report = full_attack(make_instance(gf16, 5, a, rng.randrange(10 ** 6)), counter)
            total = counter.snapshot().group_ops
            assert total == sum(report.work_counts.values())
            assert report.op_metrics['group']['total'] == total
            assert report.to_dict()['op_metrics'] == counter.track_metrics()
            if sum(1 for ops in report.work_counts.values() if ops) >= 2:
                several += 1
        assert several > 0

    def test_report_serializes(self, preset_d5, rng):
        data = full_attack(make_known_answer_instance(preset_d5, rng)).to_dict()
        assert data['success'] is True
        assert [l['name'] for l in data['leaks']] == [DETERMINANT, ROW_SUM, PROJECTION]
        assert data['leaks'][0]['status'] == 'blocked'
        assert data['combined']['modulus'] == 15


class TestInstances:
    def test_inconsistent_known_answer(self, preset_d11):
        a = preset_d11.generator
        with pytest.raises(InvalidInstanceError):
            DlogInstance(preset_d11, a, circ_pow(a, 5), true_m=6)

    def test_non_unit_base(self, gf2):
        a = Circulant(gf2, (1, 1, 0, 0, 0))
        ps = ParamSet.build(gf2, 5, circ_shift_matrix(5, gf2))
        with pytest.raises(InvalidInstanceError):
            DlogInstance(ps, a, a)

    def test_mismatched_ring(self, preset_d11, preset_d13):
        a = preset_d13.generator
        with pytest.raises(InvalidInstanceError):
            DlogInstance(preset_d11, a, a)

    def test_known_answer_exponent_range(self, preset_d5):
        rng = random.Random(0)
        assert all(0 <= make_known_answer_instance(preset_d5, rng).true_m < 15 for _ in range(30))
        assert row_sum(preset_d5.generator).is_one()
