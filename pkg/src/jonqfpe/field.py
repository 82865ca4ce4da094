"""Prime-field arithmetic and sparse triangular polynomials over F_p.

Field elements are plain ``int`` values kept in ``[0, p)``. Moduli are
validated once with :func:`prime_modulus` and are plain ints afterwards.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from math import comb
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import ArityError, DegreeError, NotPrimeError, VariableError, ZeroInverseError

__all__ = [
    "MAX_MODULUS",
    "is_prime",
    "prime_modulus",
    "egcd",
    "mod_inverse",
    "monomials",
    "monomial_count",
    "TriangularPolynomial",
    "poly_eval",
]

MAX_MODULUS = 1 << 64

# Deterministic Miller-Rabin witnesses; sufficient for n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_modulus(p: int) -> int:
    """Validate ``p`` as a supported prime modulus and return it."""
    if isinstance(p, bool) or not isinstance(p, int):
        raise NotPrimeError(f"modulus must be an int, got {p!r}")
    if p >= MAX_MODULUS:
        raise NotPrimeError(f"{p} exceeds the supported modulus range (< 2^64)")
    if not is_prime(p):
        raise NotPrimeError(f"{p} is not prime")
    return p


def egcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``a*x + b*y == g == gcd(a, b)``."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def mod_inverse(a: int, p: int) -> int:
    """Inverse of ``a`` modulo ``p``, in ``[1, p-1]``.

    Raises:
        ZeroInverseError: if ``a`` is divisible by ``p``.
    """
    a %= p
    if a == 0:
        raise ZeroInverseError(f"0 has no inverse modulo {p}")
    g, x, _ = egcd(a, p)
    if g != 1:
        raise ZeroInverseError(f"{a} is not invertible modulo {p}")
    return x % p


def _order_key(exps: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    return sum(exps), exps


@lru_cache(maxsize=256)
def monomials(nvars: int, degree: int) -> tuple[tuple[int, ...], ...]:
    """All exponent tuples in ``nvars`` variables of total degree <= ``degree``.

    Canonical order: ascending total degree, then ascending exponent tuple.
    """
    out = []
    for total in range(degree + 1):
        out.extend(sorted(_compositions(total, nvars)))
    return tuple(out)


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    # stars and bars
    for bars in itertools.combinations(range(total + parts - 1), parts - 1):
        prev = -1
        exps = []
        for b in bars:
            exps.append(b - prev - 1)
            prev = b
        exps.append(total + parts - 2 - prev)
        yield tuple(exps)


def monomial_count(nvars: int, degree: int) -> int:
    """Number of monomials of total degree <= ``degree`` in ``nvars`` variables."""
    if nvars < 0 or degree < 0:
        return 0
    return comb(nvars + degree, degree)


class TriangularPolynomial:
    """Sparse polynomial over F_p in the variables ``x_1 .. x_index``.

    ``coeffs`` maps exponent tuples (length ``index``) to coefficients; zero
    coefficients are dropped so that equality is equality of polynomials.

    Every monomial must have total degree <= ``degree`` and, for ordinary
    key material, ``degree < p``. Polynomials produced by symbolic inversion
    are built with ``reduced=True``: the total-degree bound is then relaxed
    to ``index * (p - 1)`` and instead every individual exponent stays below
    ``p`` (the x^p = x normal form).
    """

    __slots__ = ("p", "index", "degree", "reduced", "_terms", "_hash", "_compiled", "_max_exps")

    def __init__(
        self,
        p: int,
        index: int,
        degree: int,
        coeffs: Mapping[Sequence[int], int] | Iterable[tuple[Sequence[int], int]] = (),
        *,
        reduced: bool = False,
    ):
        if index < 1:
            raise VariableError(f"polynomial index must be >= 1, got {index}")
        if degree < 0:
            raise DegreeError(f"degree bound must be >= 0, got {degree}")
        if reduced:
            if degree > index * (p - 1):
                raise DegreeError(f"degree bound {degree} exceeds {index}*(p-1) for reduced form")
        elif degree >= p:
            raise DegreeError(f"degree bound {degree} is not below p={p}")
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        terms: dict[tuple[int, ...], int] = {}
        for exps, c in items:
            exps = tuple(int(e) for e in exps)
            if len(exps) != index:
                raise VariableError(
                    f"monomial {exps} does not match the {index} allowed variables"
                )
            if any(e < 0 for e in exps):
                raise DegreeError(f"negative exponent in {exps}")
            tot = sum(exps)
            if tot > degree:
                raise DegreeError(f"monomial {exps} has degree {tot} > bound {degree}")
            if reduced and any(e >= p for e in exps):
                raise DegreeError(f"monomial {exps} has an exponent >= p={p}")
            c %= p
            if c:
                terms[exps] = (terms.get(exps, 0) + c) % p
        self.p = p
        self.index = index
        self.degree = degree
        self.reduced = reduced
        self._terms = tuple(
            sorted(((e, c) for e, c in terms.items() if c), key=lambda t: _order_key(t[0]))
        )
        self._hash = None
        self._compiled = tuple(
            (c, tuple((j, e) for j, e in enumerate(exps) if e)) for exps, c in self._terms
        )
        self._max_exps = tuple(
            max((exps[j] for exps, _ in self._terms), default=0) for j in range(index)
        )

    @classmethod
    def zero(cls, p: int, index: int, degree: int = 0) -> TriangularPolynomial:
        return cls(p, index, degree)

    @classmethod
    def from_dense(
        cls, p: int, index: int, degree: int, coefficients: Sequence[int]
    ) -> TriangularPolynomial:
        """Build from a coefficient list in canonical monomial order."""
        mons = monomials(index, degree)
        if len(coefficients) != len(mons):
            raise ValueError(
                f"expected {len(mons)} coefficients for index={index}, degree={degree}, "
                f"got {len(coefficients)}"
            )
        for c in coefficients:
            if not 0 <= c < p:
                raise ValueError(f"coefficient {c} is not a canonical element of F_{p}")
        return cls(p, index, degree, zip(mons, coefficients))

    def dense(self) -> list[int]:
        """Coefficients of every monomial up to ``degree``, canonical order."""
        terms = dict(self._terms)
        return [terms.get(m, 0) for m in monomials(self.index, self.degree)]

    @property
    def terms(self) -> tuple[tuple[tuple[int, ...], int], ...]:
        return self._terms

    def as_dict(self) -> dict[tuple[int, ...], int]:
        return dict(self._terms)

    @property
    def total_degree(self) -> int:
        """Actual degree (-1 for the zero polynomial)."""
        return max((sum(e) for e, _ in self._terms), default=-1)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __call__(self, point: Sequence[int]) -> int:
        if len(point) < self.index:
            raise ArityError(
                f"point has {len(point)} coordinates, polynomial reads {self.index}"
            )
        p = self.p
        powers = []
        for j, top in enumerate(self._max_exps):
            row = [1] * (top + 1)
            for e in range(1, top + 1):
                row[e] = row[e - 1] * point[j] % p
            powers.append(row)
        acc = 0
        for c, factors in self._compiled:
            for j, e in factors:
                c = c * powers[j][e]
            acc += c % p
        return acc % p

    def __add__(self, other: TriangularPolynomial) -> TriangularPolynomial:
        if not isinstance(other, TriangularPolynomial):
            return NotImplemented
        if (self.p, self.index) != (other.p, other.index):
            raise ValueError("polynomials live over different fields or variable sets")
        terms = dict(self._terms)
        for e, c in other._terms:
            terms[e] = (terms.get(e, 0) + c) % self.p
        return TriangularPolynomial(
            self.p,
            self.index,
            max(self.degree, other.degree),
            terms,
            reduced=self.reduced or other.reduced,
        )

    def scaled(self, c: int) -> TriangularPolynomial:
        """Coefficient-wise multiplication by the field element ``c``."""
        return TriangularPolynomial(
            self.p,
            self.index,
            self.degree,
            ((e, v * c) for e, v in self._terms),
            reduced=self.reduced,
        )

    def __neg__(self) -> TriangularPolynomial:
        return self.scaled(-1)

    def __eq__(self, other: object) -> bool:
        # equality of polynomials; the degree bound is a constraint, not identity
        if not isinstance(other, TriangularPolynomial):
            return NotImplemented
        return (self.p, self.index, self._terms) == (other.p, other.index, other._terms)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.p, self.index, self._terms))
        return self._hash

    def __repr__(self) -> str:
        if not self._terms:
            body = "0"
        else:
            parts = []
            for exps, c in self._terms:
                factors = [
                    f"x{j + 1}" if e == 1 else f"x{j + 1}^{e}" for j, e in enumerate(exps) if e
                ]
                if not factors:
                    parts.append(str(c))
                else:
                    parts.append("*".join(([str(c)] if c != 1 else []) + factors))
            body = " + ".join(parts)
        return f"TriangularPolynomial(F_{self.p}, i={self.index}, d<={self.degree}: {body})"


def poly_eval(P: TriangularPolynomial, point: Sequence[int], p: int | None = None) -> int:
    """Evaluate ``P`` at ``point`` over F_p (``p`` defaults to ``P.p``)."""
    if p is not None and p != P.p:
        raise ValueError(f"polynomial is over F_{P.p}, not F_{p}")
    return P(point)
