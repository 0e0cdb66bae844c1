"""
Reduction chain against the circulant discrete log.

The determinant and the row sum are multiplicative maps into F_q^*, so either
one leaks m modulo its order unless it is 1. Through the CRT split the rest of
the problem lives in F_q[x]/psi; when psi is irreducible that is one field
F_{q^(d-1)}, otherwise each irreducible factor gives its own smaller field.
full_attack runs every stage and glues the residues back together.
"""

import logging
import random
from dataclasses import dataclass, field
from enum import Enum
from math import lcm
from typing import Dict, List, Optional, Tuple

from arithmetic.circulant_core import (
    Circulant,
    circ_add,
    circ_det,
    circ_det_resultant,
    circ_expand,
    circ_mul,
    circ_pow,
    circ_scale,
    crt_split,
    is_unit,
    representer_polynomial,
    row_sum,
)
from arithmetic.field_core import FieldElement, FieldSpec
from arithmetic.number_theory import Factorization, factorization_product, factorize, is_prime
from arithmetic.polynomial import Poly, PolyRing, degree
from attacks.dlog_solvers import (
    FieldUnitGroup,
    QuotientFieldGroup,
    crt_combine,
    element_order,
    pohlig_hellman,
    restrict_factorization,
)
from config.settings import config
from monitoring.metrics import OpCounter
from params.param_validator import ParamSet, build_psi, is_q_primitive_mod_d
from utils.errors import InvalidInstanceError

logger = logging.getLogger(__name__)

DETERMINANT = 'determinant'
ROW_SUM = 'row_sum'
PROJECTION = 'projection'


class LeakStatus(Enum):
    BLOCKED = "blocked"
    FIRED = "fired"
    UNSUPPORTED = "unsupported"
    FAILED = "failed"


@dataclass(frozen=True)
class DlogInstance:
    """B = A^m over a parameter set; true_m only in known-answer mode"""
    params: ParamSet
    base: Circulant
    target: Circulant
    true_m: Optional[int] = None
    group_order_factorization: Optional[Tuple[Tuple[int, int], ...]] = None

    def __post_init__(self):
        for name, c in (('base', self.base), ('target', self.target)):
            if c.spec != self.params.spec or c.d != self.params.d:
                raise InvalidInstanceError(f"{name} does not match the parameter set")
        if not is_unit(self.base):
            raise InvalidInstanceError("base is not invertible")
        if self.true_m is not None and circ_pow(self.base, self.true_m) != self.target:
            raise InvalidInstanceError("target != base^true_m")


@dataclass(frozen=True)
class LeakResult:
    name: str
    status: LeakStatus
    residue: int = 0
    modulus: int = 1
    detail: str = ''
    group_ops: int = 0

    @property
    def fired(self) -> bool:
        return self.status is LeakStatus.FIRED

    def to_dict(self) -> Dict:
        return {
            'name': self.name,
            'status': self.status.value,
            'residue': self.residue,
            'modulus': self.modulus,
            'detail': self.detail,
            'group_ops': self.group_ops,
        }


@dataclass
class AttackReport:
    leaks: List[LeakResult]
    combined: Optional[Tuple[int, int]]
    success: bool
    base_order: Optional[int] = None
    psi_irreducible: Optional[bool] = None
    charpoly_quotient_irreducible: Optional[bool] = None
    true_m: Optional[int] = None
    work_counts: Dict[str, int] = field(default_factory=dict)
    op_metrics: Dict[str, Dict[str, int]] = field(default_factory=dict)

    def leak(self, name: str) -> LeakResult:
        return next(l for l in self.leaks if l.name == name)

    def to_dict(self) -> Dict:
        return {
            'success': self.success,
            'combined': (
                {'residue': self.combined[0], 'modulus': self.combined[1]}
                if self.combined else None
            ),
            'base_order': self.base_order,
            'leaks': [l.to_dict() for l in self.leaks],
            'psi_irreducible': self.psi_irreducible,
            'charpoly_quotient_irreducible': self.charpoly_quotient_irreducible,
            'true_m': self.true_m,
            'work_counts': dict(sorted(self.work_counts.items())),
            'op_metrics': self.op_metrics,
        }


# Characteristic polynomial

def char_poly(a: Circulant) -> Poly:
    """
    Monic chi_A of the expanded matrix: similarity reduction to upper
    Hessenberg form, then the determinant recurrence on its leading minors.
    """
    spec = a.spec
    n = a.d
    add, sub, mul = spec.add_raw, spec.sub_raw, spec.mul_raw
    h = [[e.value for e in row] for row in circ_expand(a)]

    for m in range(1, n - 1):
        pivot = next((i for i in range(m, n) if h[i][m - 1]), None)
        if pivot is None:
            continue
        if pivot != m:
            h[m], h[pivot] = h[pivot], h[m]
            for row in h:
                row[m], row[pivot] = row[pivot], row[m]
        inv = spec.inv_raw(h[m][m - 1])
        for i in range(m + 1, n):
            u = h[i][m - 1]
            if u == 0:
                continue
            u = mul(u, inv)
            # row_i -= u row_m, then col_m += u col_i keeps the matrix similar
            for j in range(n):
                h[i][j] = sub(h[i][j], mul(u, h[m][j]))
            for r in range(n):
                h[r][m] = add(h[r][m], mul(u, h[r][i]))

    ring = PolyRing(spec)
    polys: List[Poly] = [ring.one()]
    for m in range(n):
        p = ring.mul((spec.neg_raw(h[m][m]), 1), polys[m])
        t = 1
        for i in range(m - 1, -1, -1):
            t = mul(t, h[i + 1][i])
            if t == 0:
                break
            coeff = mul(h[i][m], t)
            if coeff:
                p = ring.sub(p, ring.scale(polys[i], coeff))
        polys.append(p)
    return polys[n]


def evaluate_at_matrix(f: Poly, a: Circulant) -> Circulant:
    """f(A) by Horner in the circulant ring"""
    acc = Circulant.zero(a.spec, a.d)
    identity = Circulant.identity(a.spec, a.d)
    for c in reversed(f):
        acc = circ_add(circ_mul(acc, a), circ_scale(identity, FieldElement(a.spec, c)))
    return acc


def charpoly_quotient_check(a: Circulant) -> Optional[bool]:
    """chi_A/(x - 1) irreducible, computed directly; None above the charpoly limit"""
    if a.d > config.CHARPOLY_LIMIT:
        return None
    ring = PolyRing(a.spec)
    quot, rem = ring.divmod(char_poly(a), (a.spec.neg_raw(1), 1))
    if rem:
        return False
    return ring.is_irreducible(quot)


# Ground-field leaks

def _determinant(a: Circulant) -> FieldElement:
    return circ_det(a) if a.d <= config.ELIMINATION_LIMIT else circ_det_resultant(a)


def _ground_field_leak(name: str, spec: FieldSpec, base: FieldElement, target: FieldElement,
                       counter: OpCounter, workers: int) -> LeakResult:
    if base.is_one():
        return LeakResult(name, LeakStatus.BLOCKED, detail='value is 1, trivial subgroup')
    if base.is_zero():
        return LeakResult(name, LeakStatus.FAILED, detail='base value is 0')
    factorization = factorize(spec.q - 1, config.TRIAL_DIVISION_BOUND)
    if factorization is None:
        return LeakResult(name, LeakStatus.UNSUPPORTED, detail=f"cannot factor q - 1 = {spec.q - 1}")
    with counter.child() as local:
        ops = FieldUnitGroup(spec, local)
        try:
            order = element_order(base.value, spec.q - 1, factorization, ops)
            x = pohlig_hellman(base.value, target.value, order,
                               restrict_factorization(factorization, order), ops, workers)
        except InvalidInstanceError as e:
            return LeakResult(name, LeakStatus.FAILED, detail=str(e),
                              group_ops=local.snapshot().group_ops)
        work = local.snapshot().group_ops
    logger.info(f"{name} leak fired: m = {x} mod {order}")
    return LeakResult(name, LeakStatus.FIRED, x, order, f"solved in F_{spec.q}^*", work)


def detect_determinant_leak(inst: DlogInstance, counter: Optional[OpCounter] = None,
                            workers: Optional[int] = None) -> LeakResult:
    """det is multiplicative into F_q^*; blocked exactly when det A = 1"""
    return _ground_field_leak(
        DETERMINANT, inst.params.spec, _determinant(inst.base), _determinant(inst.target),
        counter or OpCounter(), workers or config.ATTACK_WORKERS,
    )


def detect_rowsum_leak(inst: DlogInstance, counter: Optional[OpCounter] = None,
                       workers: Optional[int] = None) -> LeakResult:
    """The row-sum eigenvalue lies in F_q; blocked exactly when it is 1"""
    return _ground_field_leak(
        ROW_SUM, inst.params.spec, row_sum(inst.base), row_sum(inst.target),
        counter or OpCounter(), workers or config.ATTACK_WORKERS,
    )


# Projection to F_q[x]/psi

def _psi_is_irreducible(spec: FieldSpec, d: int) -> bool:
    return is_prime(d) and d % spec.p != 0 and is_q_primitive_mod_d(spec.q, d)


def _field_factorization(inst: DlogInstance, t: int) -> Tuple[Optional[Factorization], str]:
    """Factorization of q^t - 1: instance, then preset, then trial division"""
    spec, d = inst.params.spec, inst.params.d
    n = spec.q ** t - 1
    if t == d - 1:
        for source, supplied in (('instance', inst.group_order_factorization),
                                 ('preset', inst.params.group_order_factorization)):
            if supplied and factorization_product(supplied) == n:
                return list(supplied), source
    found = factorize(n, config.TRIAL_DIVISION_BOUND)
    return found, 'trial division' if found else 'none'


def _psi_factors(spec: FieldSpec, d: int) -> Optional[List[Poly]]:
    psi = build_psi(d, spec)
    if _psi_is_irreducible(spec, d):
        return [psi]
    if d - 1 > config.SPLITTING_DEGREE_LIMIT:
        return None
    return PolyRing(spec).factor_squarefree(psi, random.Random(d))


def projection_attack(inst: DlogInstance, factorization: Optional[Factorization] = None,
                      counter: Optional[OpCounter] = None,
                      workers: Optional[int] = None) -> LeakResult:
    """
    Solve A mod f, B mod f for each irreducible factor f of psi and combine.
    The resulting modulus is the order of A mod psi.
    """
    params = inst.params
    spec, d = params.spec, params.d
    counter = counter or OpCounter()
    workers = workers or config.ATTACK_WORKERS
    if factorization is not None:
        inst = DlogInstance(params, inst.base, inst.target, inst.true_m, tuple(factorization))
    if d % spec.p == 0:
        return LeakResult(PROJECTION, LeakStatus.UNSUPPORTED, detail='gcd(d, q) != 1, no CRT split')

    factors = _psi_factors(spec, d)
    if factors is None:
        return LeakResult(PROJECTION, LeakStatus.UNSUPPORTED,
                          detail=f"psi reducible with degree {d - 1} above the splitting limit")

    ring = PolyRing(spec)
    phi_a = representer_polynomial(inst.base)
    phi_b = representer_polynomial(inst.target)
    parts: List[Tuple[int, int]] = []
    sources: List[str] = []
    with counter.child() as local:
        for f in factors:
            t = degree(f)
            group_order = spec.q ** t - 1
            fac, source = _field_factorization(inst, t)
            if fac is None:
                return LeakResult(PROJECTION, LeakStatus.UNSUPPORTED,
                                  detail=f"no factorization of q^{t} - 1")
            sources.append(source)
            ops = QuotientFieldGroup(ring, f, local)
            if len(factors) == 1:
                g, h = crt_split(inst.base).residue, crt_split(inst.target).residue
            else:
                g, h = ops.reduce(phi_a), ops.reduce(phi_b)
            try:
                order = element_order(g, group_order, fac, ops)
                x = pohlig_hellman(g, h, order, restrict_factorization(fac, order), ops, workers)
            except InvalidInstanceError as e:
                return LeakResult(PROJECTION, LeakStatus.FAILED, detail=str(e),
                                  group_ops=local.snapshot().group_ops)
            parts.append((x, order))
        work = local.snapshot().group_ops

    combined = crt_combine(parts)
    if combined is None:
        return LeakResult(PROJECTION, LeakStatus.FAILED, detail='factor residues inconsistent',
                          group_ops=work)
    residue, modulus = combined
    detail = (f"{len(factors)} factor field(s) of degree "
              f"{sorted({degree(f) for f in factors})}, factorization from {', '.join(sorted(set(sources)))}")
    logger.info(f"Projection attack: m = {residue} mod {modulus}")
    return LeakResult(PROJECTION, LeakStatus.FIRED, residue, modulus, detail, work)


# Orchestration

def _base_order(inst: DlogInstance, rowsum: LeakResult, projection: LeakResult) -> Optional[int]:
    # ord A = lcm(ord of the row sum, ord of A mod psi) under the CRT split
    if projection.fired and rowsum.status in (LeakStatus.BLOCKED, LeakStatus.FIRED):
        return lcm(rowsum.modulus, projection.modulus)
    if inst.base == inst.params.generator:
        return inst.params.generator_order
    return None


def full_attack(inst: DlogInstance, counter: Optional[OpCounter] = None,
                workers: Optional[int] = None) -> AttackReport:
    counter = counter or OpCounter()
    leaks = [
        detect_determinant_leak(inst, counter, workers),
        detect_rowsum_leak(inst, counter, workers),
        projection_attack(inst, counter=counter, workers=workers),
    ]
    fired = [(l.residue, l.modulus) for l in leaks if l.fired]
    combined = crt_combine(fired) if fired else None
    base_order = _base_order(inst, leaks[1], leaks[2])

    success = False
    if combined is not None and base_order is not None and combined[1] >= base_order:
        success = circ_pow(inst.base, combined[0]) == inst.target

    spec, d = inst.params.spec, inst.params.d
    report = AttackReport(
        leaks=leaks,
        combined=combined,
        success=success,
        base_order=base_order,
        psi_irreducible=_psi_is_irreducible(spec, d),
        charpoly_quotient_irreducible=charpoly_quotient_check(inst.base),
        true_m=inst.true_m,
        work_counts={l.name: l.group_ops for l in leaks},
        op_metrics=counter.track_metrics(),
    )
    logger.info(f"Full attack finished: success={success}, combined={combined}")
    return report


def make_known_answer_instance(params: ParamSet, rng: random.Random, m: Optional[int] = None,
                               base: Optional[Circulant] = None) -> DlogInstance:
    """B = A^m for a known m, drawn below the generator order when it is known"""
    base = base or params.generator
    if m is None:
        bound = params.generator_order if base == params.generator and params.generator_order \
            else 2 ** config.EXP_BITS
        m = rng.randrange(bound)
    return DlogInstance(params, base, circ_pow(base, m), true_m=m)
