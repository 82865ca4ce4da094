"""Command-line front end.

Exit codes: 0 ok, 2 usage or validation error, 3 key error (including a bad
seed), 4 input error, 5 selftest failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import warnings
from typing import Sequence

from . import __version__
from .batch import decrypt_batch, encrypt_batch
from .cipher import SEED_BYTES, key_parse, key_serialize, keygen
from .codec import factorization_build, parse_factors
from .errors import JonqError, KeyFormatError, OutOfRange, TooLarge
from .jonquieres import WeakMixingWarning
from .keyspace import (
    count_triangular_autos,
    decimal_digits,
    distinctness_census,
    floor_log2,
    format_lines,
    keyspace_lower_bound,
    count_exponents,
    paper_comparison_report,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_KEY = 3
EXIT_INPUT = 4
EXIT_SELFTEST = 5

KEY_ENV = "JONQFPE_KEY"
DEFAULT_DEGREE = 5
SELFTEST_GUARD = 10**6

PRESETS = {
    # 16-digit decimal numbers, e.g. card numbers
    "pan16": [(2, 16), (5, 16)],
    # block size slightly below 2^128
    "n128": [(163, 5), (509, 5), (613, 5)],
}


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _factorization(args):
    if args.preset and args.factors:
        raise CliError(EXIT_USAGE, "give either --preset or --factors, not both")
    if args.preset:
        factors = PRESETS[args.preset]
    elif args.factors:
        try:
            factors = parse_factors(args.factors)
        except ValueError as exc:
            raise CliError(EXIT_USAGE, str(exc)) from None
    else:
        raise CliError(EXIT_USAGE, "a modulus is required: --factors p^r,... or --preset NAME")
    try:
        return factorization_build(args.N, factors)
    except JonqError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from None


def _seed(text: str | None) -> bytes | None:
    if text is None:
        return None
    try:
        seed = bytes.fromhex(text)
    except ValueError:
        raise CliError(EXIT_KEY, "seed must be hexadecimal") from None
    if len(seed) != SEED_BYTES:
        raise CliError(EXIT_KEY, f"seed must be {SEED_BYTES} bytes ({2 * SEED_BYTES} hex chars)")
    return seed


def _load_key(path: str | None):
    path = path or os.environ.get(KEY_ENV)
    if not path:
        raise CliError(EXIT_KEY, f"no key: pass --key or set {KEY_ENV}")
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise CliError(EXIT_KEY, f"cannot read key {path}: {exc.strerror}") from None
    try:
        return key_parse(data)
    except KeyFormatError as exc:
        raise CliError(EXIT_KEY, f"invalid key {path}: {exc}") from None


def _parse_format(text: str | None) -> tuple[int, int] | None:
    if text is None or text == "decimal":
        return None
    parts = text.split(":")
    if len(parts) != 3 or parts[0] != "digits":
        raise CliError(EXIT_USAGE, f"unknown format {text!r}; use decimal or digits:<base>:<width>")
    try:
        base, width = int(parts[1]), int(parts[2])
    except ValueError:
        raise CliError(EXIT_USAGE, f"bad format {text!r}") from None
    if not 2 <= base <= 36 or width < 1:
        raise CliError(EXIT_USAGE, f"bad format {text!r}: base must be 2..36, width >= 1")
    return base, width


def _read_inputs(args) -> list[str]:
    if args.values:
        return list(args.values)
    return [line.strip() for line in sys.stdin.read().splitlines() if line.strip()]


def _to_ints(tokens: Sequence[str], fmt: tuple[int, int] | None, N: int) -> list[int]:
    out = []
    for tok in tokens:
        if fmt is None:
            if not tok.isdigit():
                raise CliError(EXIT_INPUT, f"not a decimal message unit: {tok!r}")
            v = int(tok)
        else:
            base, width = fmt
            if len(tok) != width:
                raise CliError(EXIT_INPUT, f"{tok!r} is not exactly {width} base-{base} digits")
            try:
                v = int(tok, base)
            except ValueError:
                raise CliError(EXIT_INPUT, f"{tok!r} is not a base-{base} numeral") from None
        if not 0 <= v < N:
            raise CliError(EXIT_INPUT, f"value {tok} outside [0, {N})")
        out.append(v)
    return out


def _from_ints(values: Sequence[int], fmt: tuple[int, int] | None) -> list[str]:
    if fmt is None:
        return [str(v) for v in values]
    base, width = fmt
    alphabet = "0123456789abcdefghijklmnopqrstuvwxyz"[:base]
    out = []
    for v in values:
        chars = []
        for _ in range(width):
            v, d = divmod(v, base)
            chars.append(alphabet[d])
        if v:
            # ciphertext outside the format's range; N exceeds base**width
            raise CliError(EXIT_INPUT, f"result does not fit in {width} base-{base} digits")
        out.append("".join(reversed(chars)))
    return out


def cmd_keygen(args) -> int:
    F = _factorization(args)
    seed = _seed(args.seed)
    if args.degree < 0:
        raise CliError(EXIT_USAGE, "--degree must be >= 0")
    data = key_serialize(keygen(F, args.degree, seed))
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return EXIT_OK


def _crypt(args, forward: bool) -> int:
    K = _load_key(args.key)
    fmt = _parse_format(args.format)
    if fmt is not None and fmt[0] ** fmt[1] < K.N:
        raise CliError(EXIT_USAGE, f"format {args.format} cannot hold every value below N={K.N}")
    values = _to_ints(_read_inputs(args), fmt, K.N)
    try:
        run = encrypt_batch if forward else decrypt_batch
        results = run(K, values, workers=args.workers)
    except OutOfRange as exc:
        raise CliError(EXIT_INPUT, str(exc)) from None
    text = _from_ints(results, fmt)
    sys.stdout.write("".join(v + "\n" for v in text))
    return EXIT_OK


def cmd_encrypt(args) -> int:
    return _crypt(args, True)


def cmd_decrypt(args) -> int:
    return _crypt(args, False)


def cmd_selftest(args) -> int:
    F = _factorization(args)
    if F.N > args.max_n:
        raise CliError(
            EXIT_USAGE,
            f"N = {F.N} exceeds the exhaustive-check guard {args.max_n}; raise --max-n to force",
        )
    seed = _seed(args.seed)
    K = keygen(F, args.degree, seed)
    domain = list(range(F.N))
    cipher = encrypt_batch(K, domain, workers=args.workers)
    seen: dict[int, int] = {}
    for m, c in enumerate(cipher):
        if not 0 <= c < F.N:
            print(f"FAIL: E({m}) = {c} is outside [0, {F.N})")
            return EXIT_SELFTEST
        if c in seen:
            print(f"FAIL: collision E({seen[c]}) = E({m}) = {c}")
            return EXIT_SELFTEST
        seen[c] = m
    plain = decrypt_batch(K, cipher, workers=args.workers)
    bad = next((m for m, back in zip(domain, plain) if m != back), None)
    if bad is not None:
        print(f"FAIL: D(E({bad})) = {plain[bad]}")
        return EXIT_SELFTEST
    print(f"N {F.N}")
    print(F.text())
    print(f"degree-bound {args.degree}")
    print(f"permutation {len(seen)}/{F.N}")
    print(f"round-trip {F.N}/{F.N}")
    print("result pass")
    return EXIT_OK


def _emit(pairs, machine: bool) -> None:
    sys.stdout.write(format_lines(pairs, aligned=not machine))


def cmd_analyze(args) -> int:
    if args.report == "count":
        value = count_triangular_autos(args.prime, args.dim, args.degree)
        E, r = count_exponents(args.dim, min(args.degree, args.prime - 1))
        pairs = [
            ("prime", str(args.prime)),
            ("dimension", str(args.dim)),
            ("degree-bound", str(args.degree)),
            ("effective-degree", str(min(args.degree, args.prime - 1))),
            ("count", f"{args.prime}^{E}*{args.prime - 1}^{r}"),
            ("value", _decimal(value)),
            ("log2", str(floor_log2(value))),
            ("bits", str(value.bit_length())),
        ]
    elif args.report == "census":
        try:
            syn, fun = distinctness_census(args.prime, args.dim, args.degree)
        except TooLarge as exc:
            raise CliError(EXIT_USAGE, str(exc)) from None
        print(f"syntactic={syn} functional={fun}")
        pairs = [
            ("prime", str(args.prime)),
            ("dimension", str(args.dim)),
            ("degree-bound", str(args.degree)),
            ("syntactic", str(syn)),
            ("functional", str(fun)),
            ("distinct", "yes" if syn == fun else "no"),
        ]
    elif args.report == "keyspace":
        pairs = keyspace_lower_bound(_factorization(args), args.degree).lines()
    else:
        pairs = paper_comparison_report().lines()
    _emit(pairs, args.machine)
    return EXIT_OK


def _decimal(x: int) -> str:
    digits = decimal_digits(x)
    if hasattr(sys, "set_int_max_str_digits"):
        limit = sys.get_int_max_str_digits()
        if limit and digits > limit:
            sys.set_int_max_str_digits(0)
            try:
                return str(x)
            finally:
                sys.set_int_max_str_digits(limit)
    return str(x)


def _add_modulus(p: argparse.ArgumentParser) -> None:
    p.add_argument("--factors", help="prime powers, e.g. 2^3,5^4")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--N", type=int, help="block size to check the factors against")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jonqfpe", description="Format-preserving block cipher for arbitrary block sizes."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    kg = sub.add_parser("keygen", help="generate a key file")
    _add_modulus(kg)
    kg.add_argument("--degree", type=int, default=DEFAULT_DEGREE)
    kg.add_argument("--seed", help=f"{2 * SEED_BYTES} hex chars for a reproducible key")
    kg.add_argument("--out", help="write the key here instead of stdout")
    kg.set_defaults(func=cmd_keygen)

    for name, func in (("encrypt", cmd_encrypt), ("decrypt", cmd_decrypt)):
        p = sub.add_parser(name, help=f"{name} message units (arguments or stdin lines)")
        p.add_argument("values", nargs="*")
        p.add_argument("--key", help=f"key file (default: ${KEY_ENV})")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--format", help="decimal (default) or digits:<base>:<width>")
        p.set_defaults(func=func)

    st = sub.add_parser("selftest", help="exhaustive permutation and round-trip check")
    _add_modulus(st)
    st.add_argument("--degree", type=int, default=DEFAULT_DEGREE)
    st.add_argument("--seed")
    st.add_argument("--workers", type=int, default=1)
    st.add_argument("--max-n", type=int, default=SELFTEST_GUARD)
    st.set_defaults(func=cmd_selftest)

    an = sub.add_parser("analyze", help="keyspace reports")
    an_sub = an.add_subparsers(dest="report", required=True)
    for name in ("count", "census"):
        p = an_sub.add_parser(name)
        p.add_argument("--prime", type=int, required=True)
        p.add_argument("--dim", type=int, required=True)
        p.add_argument("--degree", type=int, required=True)
    ks = an_sub.add_parser("keyspace")
    _add_modulus(ks)
    ks.add_argument("--degree", type=int, default=DEFAULT_DEGREE)
    an_sub.add_parser("paper-comparison")
    for p in an_sub.choices.values():
        p.add_argument("--machine", action="store_true", help="plain 'key value' lines")
    an.set_defaults(func=cmd_analyze)
    return parser


def _show_warning(message, category, filename, lineno, file=None, line=None):
    print(f"jonqfpe: warning: {message}", file=sys.stderr)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("once", WeakMixingWarning)
            warnings.showwarning = _show_warning
            return args.func(args)
    except CliError as exc:
        print(f"jonqfpe: error: {exc}", file=sys.stderr)
        return exc.code
    except JonqError as exc:
        print(f"jonqfpe: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
