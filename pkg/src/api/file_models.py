"""
JSON file formats for parameter sets, key pairs and discrete log instances.

Hex fields are lowercase big-endian in the canonical element and circulant
serializations. KeyPair and DlogInstance files extend the ParamSet fields.
"""

import json
from typing import Dict, List, Optional, Type, TypeVar

from pydantic import BaseModel, Field, ValidationError, field_validator

from arithmetic.circulant_core import Circulant
from arithmetic.field_core import FieldSpec
from attacks.attack_lab import DlogInstance
from config.settings import config
from params.param_validator import ParamSet, build_psi
from protocols.circulant_elgamal import KeyPair
from utils.errors import CirculantCryptoError, FileFormatError

ModelT = TypeVar('ModelT', bound=BaseModel)


def _check_hex(value: str) -> str:
    if value and (len(value) % 2 or any(c not in '0123456789abcdef' for c in value)):
        raise ValueError(f"expected lowercase even-length hex, got {value!r}")
    return value


class ParamSetFile(BaseModel):
    name: str = 'custom'
    q_p: int
    q_k: int = 1
    modulus_hex: str = ''
    d: int
    generator_hex: str
    min_order_bits: int = Field(default_factory=lambda: config.MIN_ORDER_BITS)
    group_order_factorization: Optional[List[List[int]]] = None
    checks: Optional[Dict[str, bool]] = None
    validation: Optional[Dict] = None

    @field_validator('modulus_hex', 'generator_hex')
    @classmethod
    def check_param_hex(cls, value: str) -> str:
        return _check_hex(value)

    @classmethod
    def from_param_set(cls, ps: ParamSet, **extra) -> 'ParamSetFile':
        spec = ps.spec
        return cls(
            name=ps.name,
            q_p=spec.p,
            q_k=spec.k,
            modulus_hex=format(spec.modulus_bits, 'x').zfill(2 * ((spec.k + 8) // 8)) if spec.k > 1 else '',
            d=ps.d,
            generator_hex=ps.generator.hex(),
            min_order_bits=ps.min_order_bits,
            group_order_factorization=(
                [list(pair) for pair in ps.group_order_factorization]
                if ps.group_order_factorization else None
            ),
            checks=ps.checks.to_dict() if ps.checks else None,
            validation=ps.validation.to_dict() if ps.validation else None,
            **extra,
        )

    def field_spec(self) -> FieldSpec:
        try:
            if self.q_p == 2 and self.q_k > 1 and self.modulus_hex:
                return FieldSpec.from_modulus_bits(self.q_k, int(self.modulus_hex, 16))
            return FieldSpec.from_q(self.q_p, self.q_k)
        except CirculantCryptoError as e:
            raise FileFormatError(f"bad field description: {e}") from e

    def circulant(self, spec: FieldSpec, value: str, what: str) -> Circulant:
        try:
            c = Circulant.from_bytes(spec, bytes.fromhex(value))
        except ValueError as e:
            raise FileFormatError(f"bad {what}: {e}") from e
        if c.d != self.d:
            raise FileFormatError(f"{what} has d = {c.d}, file says d = {self.d}")
        return c

    def to_param_set(self) -> ParamSet:
        """Unvalidated ParamSet; callers run validate_params"""
        spec = self.field_spec()
        factorization = None
        if self.group_order_factorization:
            if any(len(pair) != 2 for pair in self.group_order_factorization):
                raise FileFormatError("group_order_factorization entries must be [prime, exponent]")
            factorization = tuple((p, e) for p, e in self.group_order_factorization)
        return ParamSet(
            spec=spec,
            d=self.d,
            psi=build_psi(self.d, spec),
            generator=self.circulant(spec, self.generator_hex, 'generator'),
            min_order_bits=self.min_order_bits,
            name=self.name,
            group_order_factorization=factorization,
        )


class KeyPairFile(ParamSetFile):
    secret_m_hex: str
    public_hex: str

    @field_validator('secret_m_hex', 'public_hex')
    @classmethod
    def check_key_hex(cls, value: str) -> str:
        return _check_hex(value)

    @classmethod
    def from_key_pair(cls, kp: KeyPair) -> 'KeyPairFile':
        return cls.from_param_set(
            kp.params,
            secret_m_hex=format(kp.secret_m, 'x').zfill(2 * ((kp.secret_m.bit_length() + 7) // 8 or 1)),
            public_hex=kp.public_B.hex(),
        )

    def to_key_pair(self, params: ParamSet) -> KeyPair:
        public = self.circulant(params.spec, self.public_hex, 'public key')
        try:
            kp = KeyPair(params, int(self.secret_m_hex, 16), public)
        except CirculantCryptoError as e:
            raise FileFormatError(str(e)) from e
        if kp.regenerate_public() != public:
            raise FileFormatError("public key is not generator^secret_m")
        return kp


class DlogInstanceFile(ParamSetFile):
    base_hex: str
    target_hex: str
    true_m: Optional[int] = None

    @field_validator('base_hex', 'target_hex')
    @classmethod
    def check_instance_hex(cls, value: str) -> str:
        return _check_hex(value)

    @classmethod
    def from_instance(cls, inst: DlogInstance) -> 'DlogInstanceFile':
        model = cls.from_param_set(
            inst.params,
            base_hex=inst.base.hex(),
            target_hex=inst.target.hex(),
            true_m=inst.true_m,
        )
        if inst.group_order_factorization:
            model.group_order_factorization = [list(p) for p in inst.group_order_factorization]
        return model

    def to_instance(self, params: ParamSet) -> DlogInstance:
        try:
            return DlogInstance(
                params,
                self.circulant(params.spec, self.base_hex, 'base'),
                self.circulant(params.spec, self.target_hex, 'target'),
                true_m=self.true_m,
                group_order_factorization=params.group_order_factorization,
            )
        except CirculantCryptoError as e:
            raise FileFormatError(str(e)) from e


def load_model(path: str, model: Type[ModelT]) -> ModelT:
    try:
        with open(path, 'r') as f:
            return model.model_validate_json(f.read())
    except ValidationError as e:
        raise FileFormatError(f"{path}: {e.error_count()} invalid field(s): {e}") from e
    except OSError as e:
        raise FileFormatError(f"cannot read {path}: {e}") from e


def dump_model(model: BaseModel) -> str:
    return json.dumps(model.model_dump(), indent=2, sort_keys=True) + '\n'
