"""Named parameter sets loaded from configs/presets.yaml"""

import logging
import random
from functools import lru_cache
from typing import Dict, List, Optional

import yaml

from arithmetic.circulant_core import Circulant
from arithmetic.field_core import FieldSpec
from config.settings import config
from params.param_validator import ParamSet, generate_param_set, validate_params
from utils.errors import InvalidParamsError

logger = logging.getLogger(__name__)


@lru_cache(maxsize=4)
def load_preset_table(path: Optional[str] = None) -> Dict[str, Dict]:
    path = path or config.PRESETS_FILE
    with open(path, 'r') as f:
        data = yaml.safe_load(f) or {}
    presets = data.get('presets')
    if not isinstance(presets, dict):
        raise InvalidParamsError(f"{path} has no 'presets' mapping")
    return presets


def preset_names() -> List[str]:
    return sorted(load_preset_table(), key=lambda name: load_preset_table()[name]['d'])


@lru_cache(maxsize=16)
def load_preset(name: str) -> ParamSet:
    """Build (and validate) a preset; generation is deterministic in the preset seed"""
    table = load_preset_table()
    if name not in table:
        raise InvalidParamsError(f"unknown preset {name!r}; known: {', '.join(preset_names())}")
    entry = table[name]
    spec = FieldSpec.from_q(int(entry['q_p']), int(entry.get('q_k', 1)))
    d = int(entry['d'])
    min_bits = int(entry.get('min_order_bits', config.MIN_ORDER_BITS))
    factorization = entry.get('group_order_factorization')
    if factorization is not None:
        factorization = tuple((int(p), int(e)) for p, e in factorization)

    if 'generator_row' in entry:
        generator = Circulant(spec, tuple(int(c) for c in entry['generator_row']))
        ps = ParamSet.build(spec, d, generator, min_order_bits=min_bits, name=name,
                            group_order_factorization=factorization)
        ps = ps.with_validation(validate_params(ps))
    else:
        ps = generate_param_set(spec, d, random.Random(int(entry['seed'])),
                                min_order_bits=min_bits,
                                group_order_factorization=factorization, name=name)
    logger.info(f"Loaded preset {name}: {spec.describe()}, d={d}, "
                f"validated={ps.is_validated}")
    return ps
