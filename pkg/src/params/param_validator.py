"""
Parameter sets (q, d, psi, A) and the six conditions that keep the discrete
log in the circulant unit group as hard as in F_{q^(d-1)}:

  (i)   det A = 1
  (ii)  row sum of A is 1
  (iii) chi_A / (x - 1) irreducible
  (iv)  d prime
  (v)   phi_A mod (x - 1) is 1          (the same value as (ii))
  (vi)  q primitive mod d               (psi = Phi_d irreducible)

plus gcd(d, q) = 1 and a lower bound on the order of A mod psi.
"""

import logging
import random
from dataclasses import asdict, dataclass, field, replace
from typing import Dict, List, Optional, Tuple

from arithmetic.circulant_core import (
    Circulant,
    circ_det,
    circ_det_resultant,
    circ_frobenius,
    circ_pow,
    crt_lift,
    crt_split,
    CrtPair,
    row_sum,
)
from arithmetic.field_core import FieldSpec
from arithmetic.number_theory import (
    Factorization,
    factor_trial,
    factorization_product,
    is_prime,
    multiplicative_order,
)
from arithmetic.polynomial import Poly, PolyRing, integer_cyclotomic, trim
from config.settings import config
from utils.errors import GeneratorGenerationError, InvalidParamsError

logger = logging.getLogger(__name__)

__all__ = [
    'ConditionChecks', 'ValidationReport', 'ParamSet',
    'is_prime', 'multiplicative_order', 'is_q_primitive_mod_d', 'build_psi',
    'is_irreducible', 'cyclotomic_polynomial', 'validate_params',
    'generate_generator', 'generate_param_set', 'charpoly_quotient_irreducible',
]


@dataclass(frozen=True)
class ConditionChecks:
    det_one: bool                 # (i)
    row_sum_one: bool             # (ii)
    charpoly_irreducible: bool    # (iii)
    d_prime: bool                 # (iv)
    phi_at_one: bool              # (v)
    q_primitive: bool             # (vi)

    LABELS = {
        'det_one': 'i', 'row_sum_one': 'ii', 'charpoly_irreducible': 'iii',
        'd_prime': 'iv', 'phi_at_one': 'v', 'q_primitive': 'vi',
    }

    @property
    def all_passed(self) -> bool:
        return all(asdict(self).values())

    def failed(self) -> List[str]:
        return [self.LABELS[name] for name, ok in asdict(self).items() if not ok]

    def to_dict(self) -> Dict[str, bool]:
        return {f"{self.LABELS[name]}_{name}": ok for name, ok in asdict(self).items()}

    @classmethod
    def from_dict(cls, data: Dict[str, bool]) -> 'ConditionChecks':
        return cls(**{name: bool(data[f"{label}_{name}"]) for name, label in cls.LABELS.items()})


@dataclass(frozen=True)
class ValidationReport:
    checks: ConditionChecks
    gcd_ok: bool
    order_ok: bool
    order_lower_bound: int
    generator_order: Optional[int] = None
    cofactor_bits: int = 0
    details: Dict[str, str] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.checks.all_passed and self.gcd_ok and self.order_ok

    def failures(self) -> List[str]:
        out = [f"condition ({label})" for label in self.checks.failed()]
        if not self.gcd_ok:
            out.append('gcd(d, q) = 1')
        if not self.order_ok:
            out.append('generator order')
        return out

    def to_dict(self) -> Dict:
        return {
            'passed': self.passed,
            'checks': self.checks.to_dict(),
            'gcd_ok': self.gcd_ok,
            'order_ok': self.order_ok,
            'order_lower_bound': self.order_lower_bound,
            'generator_order': self.generator_order,
            'cofactor_bits': self.cofactor_bits,
            'failures': self.failures(),
            'details': dict(sorted(self.details.items())),
        }


@dataclass(frozen=True)
class ParamSet:
    spec: FieldSpec
    d: int
    psi: Poly
    generator: Circulant
    min_order_bits: int = config.MIN_ORDER_BITS
    name: str = 'custom'
    group_order_factorization: Optional[Tuple[Tuple[int, int], ...]] = None
    validation: Optional[ValidationReport] = None

    @classmethod
    def build(cls, spec: FieldSpec, d: int, generator: Circulant, **kwargs) -> 'ParamSet':
        return cls(spec, d, build_psi(d, spec), generator, **kwargs)

    @property
    def q(self) -> int:
        return self.spec.q

    @property
    def checks(self) -> Optional[ConditionChecks]:
        return self.validation.checks if self.validation else None

    @property
    def is_validated(self) -> bool:
        return self.validation is not None and self.validation.passed

    @property
    def generator_order(self) -> Optional[int]:
        return self.validation.generator_order if self.validation else None

    def with_validation(self, report: ValidationReport) -> 'ParamSet':
        return replace(self, validation=report)

    def summary(self) -> Dict:
        return {
            'name': self.name,
            'field': self.spec.describe(),
            'q': self.q,
            'd': self.d,
            'min_order_bits': self.min_order_bits,
            'generator_order': self.generator_order,
        }


def is_q_primitive_mod_d(q: int, d: int) -> bool:
    """Phi_d is irreducible over F_q iff q has order d - 1 mod the prime d"""
    if not is_prime(d):
        raise ValueError(f"{d} is not prime")
    return multiplicative_order(q, d) == d - 1


def build_psi(d: int, spec: FieldSpec) -> Poly:
    """(x^d - 1)/(x - 1) = 1 + x + ... + x^(d-1)"""
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    return (1,) * d


def is_irreducible(f: Poly, spec: FieldSpec) -> bool:
    return PolyRing(spec).is_irreducible(trim(f))


def cyclotomic_polynomial(n: int, spec: FieldSpec) -> Poly:
    """Phi_n reduced into F_q, built from its integer Moebius product"""
    return trim(spec.from_int(c) for c in integer_cyclotomic(n))


def _psi_irreducible(spec: FieldSpec, d: int) -> bool:
    return is_prime(d) and d % spec.p != 0 and is_q_primitive_mod_d(spec.q, d)


def charpoly_quotient_irreducible(a: Circulant) -> bool:
    """
    Condition (iii) without forming chi_A.

    With row sum 1 and psi irreducible, chi_A/(x - 1) is the characteristic
    polynomial of multiplication by beta = A mod psi on F_q[x]/psi. It is
    irreducible iff beta lies in no proper subfield, i.e. beta^(q^((d-1)/r))
    differs from beta for every prime r | d - 1.
    """
    spec, d = a.spec, a.d
    if not row_sum(a).is_one() or not _psi_irreducible(spec, d):
        return False
    beta = crt_split(a).residue
    n = d - 1
    for r in range(2, n + 1):
        if n % r == 0 and is_prime(r):
            if crt_split(circ_frobenius(a, n // r)).residue == beta:
                return False
    return True


def _projects_to_one(a: Circulant, exponent: int) -> bool:
    return crt_split(circ_pow(a, exponent)).residue == (1,)


def _order_bounds(ps: ParamSet, min_bits: int) -> Tuple[bool, int, Optional[int], int, str]:
    """(order_ok, lower_bound, exact_order, cofactor_bits, detail) for A mod psi"""
    spec, d, a = ps.spec, ps.d, ps.generator
    n = spec.q ** (d - 1) - 1
    if ps.group_order_factorization:
        factorization = list(ps.group_order_factorization)
        if factorization_product(factorization) != n:
            return False, 0, None, 0, 'supplied factorization does not multiply to q^(d-1) - 1'
        cofactor = 1
    else:
        factors, cofactor = factor_trial(n, config.TRIAL_DIVISION_BOUND)
        if cofactor > 1 and is_prime(cofactor):
            factors[cofactor] = factors.get(cofactor, 0) + 1
            cofactor = 1
        factorization = sorted(factors.items())

    small = n // cofactor
    order = small
    for p, _ in factorization:
        while order % p == 0 and _projects_to_one(a, cofactor * (order // p)):
            order //= p

    if cofactor == 1:
        ok = order > 2 ** min_bits
        return ok, order, order, 0, f"exact order {order}"

    cofactor_hit = not _projects_to_one(a, small)
    lower = order * (config.TRIAL_DIVISION_BOUND + 1 if cofactor_hit else 1)
    ok = cofactor_hit and cofactor > 2 ** min_bits
    detail = (f"unfactored cofactor of {cofactor.bit_length()} bits "
              f"{'reached' if cofactor_hit else 'not reached'} by the generator")
    return ok, lower, None, cofactor.bit_length(), detail


def validate_params(ps: ParamSet, min_order_bits: Optional[int] = None) -> ValidationReport:
    """Evaluate every condition independently; failures are report entries"""
    spec, d, a = ps.spec, ps.d, ps.generator
    min_bits = ps.min_order_bits if min_order_bits is None else min_order_bits
    details: Dict[str, str] = {}

    if a.spec != spec or a.d != d:
        raise InvalidParamsError("generator does not match the parameter field or dimension")

    d_prime = is_prime(d)
    gcd_ok = d % spec.p != 0
    q_primitive = d_prime and gcd_ok and is_q_primitive_mod_d(spec.q, d)
    if gcd_ok and d >= 2:
        details['ord_d(q)'] = str(multiplicative_order(spec.q, d))

    if d <= config.ELIMINATION_LIMIT:
        det = circ_det(a)
        details['det_method'] = 'elimination'
    else:
        det = circ_det_resultant(a)
        details['det_method'] = 'resultant'
    details['det'] = str(det)

    rs = row_sum(a)
    details['row_sum'] = str(rs)
    phi_at_one = crt_split(a).at_one.is_one() if gcd_ok else rs.is_one()

    charpoly_ok = charpoly_quotient_irreducible(a) if gcd_ok else False

    checks = ConditionChecks(
        det_one=det.is_one(),
        row_sum_one=rs.is_one(),
        charpoly_irreducible=charpoly_ok,
        d_prime=d_prime,
        phi_at_one=phi_at_one,
        q_primitive=q_primitive,
    )

    if q_primitive and det.value != 0:
        order_ok, lower, exact, cofactor_bits, order_detail = _order_bounds(ps, min_bits)
    else:
        order_ok, lower, exact, cofactor_bits = False, 0, None, 0
        order_detail = 'order check needs psi irreducible and A invertible'
    details['order'] = order_detail

    report = ValidationReport(
        checks=checks,
        gcd_ok=gcd_ok,
        order_ok=order_ok,
        order_lower_bound=lower,
        generator_order=exact,
        cofactor_bits=cofactor_bits,
        details=details,
    )
    if report.passed:
        logger.info(f"Parameter set {ps.name} (q={spec.q}, d={d}) passed validation")
    else:
        logger.info(f"Parameter set {ps.name} failed: {', '.join(report.failures())}")
    return report


def generate_generator(spec: FieldSpec, d: int, rng: random.Random,
                       min_order_bits: Optional[int] = None,
                       group_order_factorization: Optional[Factorization] = None,
                       retries: Optional[int] = None) -> Circulant:
    """Sample beta in F_q[x]/psi, force norm 1 via gamma^(q-1) for q > 2, lift (1, beta)"""
    return generate_param_set(
        spec, d, rng, min_order_bits=min_order_bits,
        group_order_factorization=group_order_factorization, retries=retries,
    ).generator


def generate_param_set(spec: FieldSpec, d: int, rng: random.Random,
                       min_order_bits: Optional[int] = None,
                       group_order_factorization: Optional[Factorization] = None,
                       retries: Optional[int] = None,
                       name: str = 'custom') -> ParamSet:
    if not is_prime(d):
        raise InvalidParamsError(f"d = {d} is not prime")
    if d % spec.p == 0:
        raise InvalidParamsError(f"gcd(d = {d}, q = {spec.q}) != 1")
    if not is_q_primitive_mod_d(spec.q, d):
        raise InvalidParamsError(f"q = {spec.q} is not primitive mod d = {d}")

    bits = config.MIN_ORDER_BITS if min_order_bits is None else min_order_bits
    budget = config.GENERATOR_RETRIES if retries is None else retries
    ring = PolyRing(spec)
    psi = build_psi(d, spec)
    factorization = tuple(group_order_factorization) if group_order_factorization else None

    for attempt in range(1, budget + 1):
        gamma = ring.random_poly(rng, d - 1)
        if not gamma:
            continue
        candidate = crt_lift(CrtPair(spec.one, gamma), d, psi)
        if spec.q > 2:
            candidate = circ_pow(candidate, spec.q - 1)
        ps = ParamSet(spec, d, psi, candidate, min_order_bits=bits, name=name,
                      group_order_factorization=factorization)
        report = validate_params(ps)
        if report.passed:
            logger.info(f"Generator accepted after {attempt} attempt(s) for q={spec.q}, d={d}")
            return ps.with_validation(report)
        logger.debug(f"Attempt {attempt} rejected: {report.failures()}")

    logger.warning(f"Generator search exhausted {budget} attempts for q={spec.q}, d={d}")
    raise GeneratorGenerationError(f"no valid generator after {budget} attempts")
