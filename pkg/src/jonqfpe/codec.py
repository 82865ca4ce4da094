"""Message <-> digit-vector codec.

A message ``m`` in ``[0, N)`` is split into residues modulo each prime power
factor of ``N`` and each residue is written as little-endian base-p digits.
Recombination uses CRT idempotents computed once per :class:`Factorization`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from math import prod
from typing import Iterable, Sequence

from .errors import DigitOverflow, DuplicatePrime, FactorMismatch, NotPrimeError, OutOfRange
from .field import egcd, prime_modulus

__all__ = [
    "CompositeFactor",
    "Factorization",
    "factorization_build",
    "parse_factors",
    "crt_split",
    "crt_combine",
    "to_digits",
    "from_digits",
]


class CompositeFactor(NotPrimeError):
    pass


@dataclass(frozen=True)
class Factorization:
    """Block size ``N`` with its prime-power factors and CRT idempotents.

    Build instances with :func:`factorization_build`; it validates the
    factors and precomputes ``idempotents``.
    """

    N: int
    factors: tuple[tuple[int, int], ...]
    idempotents: tuple[int, ...] = field(repr=False)
    moduli: tuple[int, ...] = field(repr=False)

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    @property
    def exponents(self) -> tuple[int, ...]:
        return tuple(r for _, r in self.factors)

    def __len__(self) -> int:
        return len(self.factors)

    def text(self) -> str:
        """``factors 2^3 5^4`` form used in key files."""
        return "factors " + " ".join(f"{p}^{r}" for p, r in self.factors)

    def spec(self) -> str:
        """Comma-separated ``2^3,5^4`` form used on the command line."""
        return ",".join(f"{p}^{r}" for p, r in self.factors)


def factorization_build(N: int | None, factors: Iterable[tuple[int, int]]) -> Factorization:
    """Validate ``factors`` as the prime factorization of ``N``.

    ``N=None`` takes the product of the factors. Factors are sorted by prime.

    Raises:
        CompositeFactor: a claimed prime is not prime.
        DuplicatePrime: the same prime appears twice.
        FactorMismatch: the product differs from ``N``, or an exponent is < 1.
    """
    factors = sorted((int(p), int(r)) for p, r in factors)
    if not factors:
        raise FactorMismatch("at least one prime power factor is required")
    for p, r in factors:
        try:
            prime_modulus(p)
        except NotPrimeError as exc:
            raise CompositeFactor(str(exc)) from None
        if r < 1:
            raise FactorMismatch(f"exponent of {p} must be >= 1, got {r}")
    primes = [p for p, _ in factors]
    if len(set(primes)) != len(primes):
        dup = next(p for p in primes if primes.count(p) > 1)
        raise DuplicatePrime(f"prime {dup} listed more than once")
    moduli = tuple(p**r for p, r in factors)
    total = prod(moduli)
    if N is None:
        N = total
    elif total != N:
        raise FactorMismatch(f"factors multiply to {total}, not {N}")

    idempotents = []
    for q in moduli:
        rest = N // q
        g, _, v = egcd(q, rest)
        assert g == 1
        # rest * v == 1 (mod q), and rest == 0 modulo every other factor
        idempotents.append(rest * v % N)
    assert sum(idempotents) % N == 1 % N
    return Factorization(N, tuple(factors), tuple(idempotents), moduli)


_FACTOR_RE = re.compile(r"^(\d+)(?:\^(\d+))?$")


def parse_factors(text: str) -> list[tuple[int, int]]:
    """Parse ``"2^3,5^4"`` (commas or spaces) into ``[(2, 3), (5, 4)]``."""
    out = []
    for tok in re.split(r"[,\s]+", text.strip()):
        if not tok:
            continue
        m = _FACTOR_RE.match(tok)
        if not m:
            raise ValueError(f"malformed factor {tok!r}; expected p^r")
        out.append((int(m.group(1)), int(m.group(2) or 1)))
    return out


def crt_split(m: int, F: Factorization) -> list[int]:
    if not 0 <= m < F.N:
        raise OutOfRange(f"message {m} outside [0, {F.N})")
    return [m % q for q in F.moduli]


def crt_combine(residues: Sequence[int], F: Factorization) -> int:
    if len(residues) != len(F.moduli):
        raise ValueError(f"expected {len(F.moduli)} residues, got {len(residues)}")
    acc = 0
    for m_i, q, e in zip(residues, F.moduli, F.idempotents):
        if not 0 <= m_i < q:
            raise OutOfRange(f"residue {m_i} outside [0, {q})")
        acc += m_i * e
    return acc % F.N


def to_digits(a: int, p: int, r: int) -> list[int]:
    """Exactly ``r`` little-endian base-``p`` digits of ``a``."""
    if not 0 <= a < p**r:
        raise OutOfRange(f"{a} does not fit in {r} base-{p} digits")
    digits = []
    for _ in range(r):
        a, d = divmod(a, p)
        digits.append(d)
    return digits


def from_digits(digits: Sequence[int], p: int) -> int:
    acc = 0
    for d in reversed(digits):
        if not 0 <= d < p:
            raise DigitOverflow(f"digit {d} is not below base {p}")
        acc = acc * p + d
    return acc
