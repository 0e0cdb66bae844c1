# config/settings.py
import os
from dotenv import load_dotenv

load_dotenv()

_PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


class Config:
    # Parameter generation
    MIN_ORDER_BITS = int(os.getenv('CIRC_MIN_ORDER_BITS', '40'))
    TRIAL_DIVISION_BOUND = int(os.getenv('CIRC_TRIAL_DIVISION_BOUND', '1000000'))
    GENERATOR_RETRIES = int(os.getenv('CIRC_GENERATOR_RETRIES', '64'))
    PRESETS_FILE = os.getenv(
        'CIRC_PRESETS_FILE',
        os.path.join(_PROJECT_ROOT, 'configs', 'presets.yaml')
    )

    # Protocol
    EXP_BITS = int(os.getenv('CIRC_EXP_BITS', '160'))  # secret exponent size

    # Cost limits for the O(d^3) paths
    ELIMINATION_LIMIT = int(os.getenv('CIRC_ELIMINATION_LIMIT', '128'))
    CHARPOLY_LIMIT = int(os.getenv('CIRC_CHARPOLY_LIMIT', '64'))
    SPLITTING_DEGREE_LIMIT = int(os.getenv('CIRC_SPLITTING_DEGREE_LIMIT', '32'))

    # Attack / bench
    ATTACK_WORKERS = int(os.getenv('CIRC_ATTACK_WORKERS', '1'))
    BENCH_REPS = int(os.getenv('CIRC_BENCH_REPS', '5'))

    # Logging
    LOG_LEVEL = os.getenv('CIRC_LOG_LEVEL', 'WARNING')
    LOG_FILE = os.getenv('CIRC_LOG_FILE')  # optional rotating file log


config = Config()
