"""
Circulant DLP toolkit - command line surface

Subcommands: gen-params, validate, keygen, dh-demo, encrypt, decrypt,
attack, bench, square-perm. Reports go to stdout (or --out) as JSON;
logs go to stderr and, when CIRC_LOG_FILE is set, to a rotating file.
Exit status: 0 success, 1 failed validation or library error, 2 usage error.
"""

import argparse
import json
import logging
import os
import random
import sys
from contextlib import contextmanager
from logging.handlers import RotatingFileHandler
from typing import Dict, Iterator, List, Optional, Tuple

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from config.settings import config
from arithmetic.circulant_core import square_permutation
from arithmetic.field_core import FieldSpec
from api.file_models import (
    DlogInstanceFile,
    KeyPairFile,
    ParamSetFile,
    dump_model,
    load_model,
)
from attacks.attack_lab import full_attack, make_known_answer_instance
from optimization.performance import bench_exponentiation
from params.param_validator import ParamSet, generate_param_set, validate_params
from params.presets import load_preset, preset_names
from protocols.circulant_elgamal import (
    Ciphertext,
    dh_shared,
    elgamal_decrypt,
    elgamal_encrypt,
    is_degenerate_public,
    keygen,
)
from utils.errors import CirculantCryptoError

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

logger = logging.getLogger(__name__)


class LoggerSetup:
    """Centralized logging configuration"""

    FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(funcName)s:%(lineno)d - %(message)s'

    @staticmethod
    def configure_logging(level: Optional[str] = None, log_file: Optional[str] = None) -> logging.Logger:
        """stderr console handler, plus a rotating file when configured"""
        root = logging.getLogger()
        root.setLevel(logging.DEBUG)
        root.handlers.clear()

        detailed_formatter = logging.Formatter(LoggerSetup.FORMAT)

        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(getattr(logging, (level or config.LOG_LEVEL).upper()))
        console_handler.setFormatter(detailed_formatter)
        root.addHandler(console_handler)

        log_file = log_file or config.LOG_FILE
        if log_file:
            try:
                file_handler = RotatingFileHandler(
                    log_file,
                    maxBytes=10*1024*1024,  # 10MB
                    backupCount=5
                )
                file_handler.setLevel(logging.DEBUG)
                file_handler.setFormatter(detailed_formatter)
                root.addHandler(file_handler)
            except (OSError, IOError) as e:
                root.warning(f"Could not create log file handler: {e}")

        return root


class ConfigValidator:
    """Validates configuration settings"""

    POSITIVE_INTS = [
        'MIN_ORDER_BITS',
        'EXP_BITS',
        'TRIAL_DIVISION_BOUND',
        'GENERATOR_RETRIES',
        'ELIMINATION_LIMIT',
        'SPLITTING_DEGREE_LIMIT',
        'CHARPOLY_LIMIT',
        'BENCH_REPS',
        'ATTACK_WORKERS',
    ]

    @staticmethod
    def validate_config() -> None:
        invalid = [
            attr for attr in ConfigValidator.POSITIVE_INTS
            if not isinstance(getattr(config, attr, None), int) or getattr(config, attr) < 1
        ]
        if not isinstance(logging.getLevelName(str(config.LOG_LEVEL).upper()), int):
            invalid.append('LOG_LEVEL')
        if not os.path.isfile(config.PRESETS_FILE):
            invalid.append('PRESETS_FILE')
        if invalid:
            raise ValueError(f"Invalid configuration: {invalid}")


@contextmanager
def _error_context(operation: str) -> Iterator[None]:
    """Log library failures with the subcommand that raised them"""
    try:
        yield
    except CirculantCryptoError as e:
        logger.error(f"{operation} failed: {type(e).__name__}: {e}")
        raise


# Shared helpers

def _emit(report: Dict, out: Optional[str]) -> None:
    text = json.dumps(report, indent=2, sort_keys=True) + '\n'
    _write(text, out)


def _write(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, 'w') as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _resolve_seed(seed: Optional[int]) -> int:
    return seed if seed is not None else random.SystemRandom().getrandbits(32)


def _validated(ps: ParamSet) -> ParamSet:
    return ps.with_validation(validate_params(ps))


def _load_params(args: argparse.Namespace) -> ParamSet:
    if getattr(args, 'params', None):
        return _validated(load_model(args.params, ParamSetFile).to_param_set())
    return load_preset(args.preset or 'd11')


def _add_params_source(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument('--preset', help='named preset (default d11)')
    group.add_argument('--params', metavar='FILE', help='ParamSet JSON file')


def _load_key(path: str) -> Tuple[ParamSet, KeyPairFile]:
    model = load_model(path, KeyPairFile)
    return _validated(model.to_param_set()), model


# Subcommands

def cmd_gen_params(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args.seed)
    if args.preset:
        ps = load_preset(args.preset)
    else:
        if args.d is None:
            print("gen-params needs --d or --preset", file=sys.stderr)
            return EXIT_USAGE
        spec = FieldSpec.from_q(args.q_p, args.q_k)
        ps = generate_param_set(spec, args.d, random.Random(seed),
                                min_order_bits=args.min_order_bits, name=args.name)
    model = ParamSetFile.from_param_set(ps)
    _write(dump_model(model), args.out)
    logger.info(f"Generated parameter set {ps.name} with seed {seed}")
    return EXIT_OK if ps.is_validated else EXIT_FAILURE


def cmd_validate(args: argparse.Namespace) -> int:
    if args.params:
        ps = load_model(args.params, ParamSetFile).to_param_set()
    else:
        ps = load_preset(args.preset or 'd11')
    report = validate_params(ps, args.min_order_bits)
    ps = ps.with_validation(report)
    _write(dump_model(ParamSetFile.from_param_set(ps)), args.out)
    if not report.passed:
        print(f"validation failed: {', '.join(report.failures())}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAILURE


def cmd_keygen(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args.seed)
    params = _load_params(args)
    kp = keygen(params, random.Random(seed), args.exp_bits)
    _write(dump_model(KeyPairFile.from_key_pair(kp)), args.out)
    return EXIT_OK


def cmd_dh_demo(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args.seed)
    params = _load_params(args)
    rng = random.Random(seed)
    alice = keygen(params, rng, args.exp_bits)
    bob = keygen(params, rng, args.exp_bits)
    shared_alice = dh_shared(alice.secret_m, bob.public_B)
    shared_bob = dh_shared(bob.secret_m, alice.public_B)
    match = shared_alice.to_bytes() == shared_bob.to_bytes()
    _emit({
        'params': params.summary(),
        'seed': seed,
        'alice_public_hex': alice.public_B.hex(),
        'bob_public_hex': bob.public_B.hex(),
        'alice_shared_hex': shared_alice.hex(),
        'bob_shared_hex': shared_bob.hex(),
        'shared_match': match,
        'degenerate_public': is_degenerate_public(alice.public_B) or is_degenerate_public(bob.public_B),
    }, args.out)
    return EXIT_OK if match else EXIT_FAILURE


def _message_bytes(args: argparse.Namespace) -> bytes:
    if args.message_hex is not None:
        return bytes.fromhex(args.message_hex)
    return (args.message or '').encode('utf-8')


def cmd_encrypt(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args.seed)
    params, model = _load_key(args.key)
    public = model.circulant(params.spec, model.public_hex, 'public key')
    ct = elgamal_encrypt(params, public, _message_bytes(args), random.Random(seed), args.exp_bits)
    _emit({'params': params.summary(), 'seed': seed, 'ciphertext_hex': ct.hex()}, args.out)
    return EXIT_OK


def cmd_decrypt(args: argparse.Namespace) -> int:
    params, model = _load_key(args.key)
    kp = model.to_key_pair(params)
    if args.ciphertext:
        ct_hex = args.ciphertext
    else:
        with open(args.in_file, 'r') as f:
            ct_hex = json.load(f)['ciphertext_hex']
    ct = Ciphertext.from_bytes(params.spec, bytes.fromhex(ct_hex))
    message = elgamal_decrypt(kp, ct)
    try:
        text = message.decode('utf-8')
    except UnicodeDecodeError:
        text = None
    _emit({'message_hex': message.hex(), 'message_text': text}, args.out)
    return EXIT_OK


def cmd_attack(args: argparse.Namespace) -> int:
    if args.instance:
        model = load_model(args.instance, DlogInstanceFile)
        inst = model.to_instance(_validated(model.to_param_set()))
        seed = None
    else:
        seed = _resolve_seed(args.seed)
        inst = make_known_answer_instance(_load_params(args), random.Random(seed), args.m)
    report = full_attack(inst, workers=args.workers)
    out = report.to_dict()
    out['seed'] = seed
    out['instance'] = json.loads(dump_model(DlogInstanceFile.from_instance(inst)))
    _emit(out, args.out)
    return EXIT_OK if report.success else EXIT_FAILURE


def cmd_bench(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args.seed)
    params = _load_params(args)
    report = bench_exponentiation(params, args.exp_bits, args.reps, seed=seed)
    _emit(report.to_dict(include_timings=not args.no_timings), args.out)
    return EXIT_OK if report.model_ok else EXIT_FAILURE


def cmd_square_perm(args: argparse.Namespace) -> int:
    perm = square_permutation(args.d)
    _write(' '.join(str(i) for i in perm.table) + '\n', args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='circulant-dlp',
        description='Circulant-matrix discrete log cryptosystem toolkit',
    )
    parser.add_argument('--log-level', help=f"console log level (default {config.LOG_LEVEL})")
    sub = parser.add_subparsers(dest='command', metavar='COMMAND')

    def add(name: str, handler, help_text: str, params_source: bool = True,
            seed: bool = True) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        if params_source:
            _add_params_source(p)
        if seed:
            p.add_argument('--seed', type=int, help='seed for all randomness (echoed in reports)')
        p.add_argument('--out', metavar='FILE', help='write the report here instead of stdout')
        p.set_defaults(handler=handler)
        return p

    p = add('gen-params', cmd_gen_params, 'generate and validate a parameter set', params_source=False)
    p.add_argument('--preset', help=f"export a preset ({', '.join(preset_names())})")
    p.add_argument('--q-p', type=int, default=2)
    p.add_argument('--q-k', type=int, default=1)
    p.add_argument('--d', type=int, required=False)
    p.add_argument('--min-order-bits', type=int)
    p.add_argument('--name', default='custom')

    p = add('validate', cmd_validate, 'check conditions (i)-(vi) for a parameter set', seed=False)
    p.add_argument('--min-order-bits', type=int)

    p = add('keygen', cmd_keygen, 'generate a key pair')
    p.add_argument('--exp-bits', type=int)

    p = add('dh-demo', cmd_dh_demo, 'two-party key agreement round')
    p.add_argument('--exp-bits', type=int)

    p = add('encrypt', cmd_encrypt, 'ElGamal-encrypt one block', params_source=False)
    p.add_argument('--key', required=True, metavar='FILE', help='KeyPair JSON file')
    msg = p.add_mutually_exclusive_group()
    msg.add_argument('--message', help='UTF-8 text')
    msg.add_argument('--message-hex', help='raw bytes as hex')
    p.add_argument('--exp-bits', type=int)

    p = add('decrypt', cmd_decrypt, 'ElGamal-decrypt one block', params_source=False, seed=False)
    p.add_argument('--key', required=True, metavar='FILE', help='KeyPair JSON file')
    ct = p.add_mutually_exclusive_group(required=True)
    ct.add_argument('--ciphertext', metavar='HEX')
    ct.add_argument('--in', dest='in_file', metavar='FILE', help='encrypt report JSON')

    p = add('attack', cmd_attack, 'run the reduction chain on a discrete log instance')
    p.add_argument('--instance', metavar='FILE', help='DlogInstance JSON file')
    p.add_argument('--m', type=int, help='known answer for a generated instance')
    p.add_argument('--workers', type=int, default=config.ATTACK_WORKERS)

    p = add('bench', cmd_bench, 'operation counts and timings of exponentiation')
    p.add_argument('--exp-bits', type=int, default=config.EXP_BITS)
    p.add_argument('--reps', type=int, default=config.BENCH_REPS)
    p.add_argument('--no-timings', action='store_true', help='omit wall-clock medians')

    p = add('square-perm', cmd_square_perm, 'print the characteristic-2 squaring permutation',
            params_source=False, seed=False)
    p.add_argument('--d', type=int, required=True)

    return parser


def cli_dispatch(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    LoggerSetup.configure_logging(args.log_level)
    if not args.command:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE

    try:
        ConfigValidator.validate_config()
    except ValueError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_FAILURE

    try:
        with _error_context(args.command):
            return args.handler(args)
    except CirculantCryptoError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except (OSError, ValueError, KeyError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE


def main() -> None:
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
