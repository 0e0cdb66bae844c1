import os
import random
import sys

import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.append(ROOT)
sys.path.append(os.path.join(ROOT, 'src'))


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: runs at demo dimension d=1019")


@pytest.fixture
def rng():
    return random.Random(20240101)


@pytest.fixture
def gf2():
    from arithmetic.field_core import FieldSpec
    return FieldSpec.binary(1)


@pytest.fixture
def gf16():
    from arithmetic.field_core import FieldSpec
    return FieldSpec.binary(4)


@pytest.fixture
def gf256():
    from arithmetic.field_core import FieldSpec
    return FieldSpec.binary(8)


@pytest.fixture
def gf3():
    from arithmetic.field_core import FieldSpec
    return FieldSpec.prime(3)


@pytest.fixture(scope='session')
def preset_d5():
    from params.presets import load_preset
    return load_preset('d5')


@pytest.fixture(scope='session')
def preset_d11():
    from params.presets import load_preset
    return load_preset('d11')


@pytest.fixture(scope='session')
def preset_d13():
    from params.presets import load_preset
    return load_preset('d13')
