"""Triangular (de Jonquieres) automorphisms of the affine space F_p^n.

An automorphism is ``n`` nonzero scalars ``a_1..a_n`` and ``n-1`` polynomials
``P_1..P_{n-1}`` where ``P_i`` reads only ``x_1..x_i``::

    y_1 = a_1 x_1
    y_i = a_i x_i + P_{i-1}(x_1, ..., x_{i-1})      (i >= 2)

Inversion is forward substitution, one coordinate at a time.
"""

from __future__ import annotations

import warnings
from typing import Mapping, Sequence, Union

from .errors import DimensionMismatch, InvalidAutomorphism
from .field import TriangularPolynomial, mod_inverse, prime_modulus

__all__ = [
    "WeakMixingWarning",
    "JonquieresAutomorphism",
    "jonq_validate",
    "jonq_apply",
    "jonq_invert_apply",
    "jonq_inverse_key",
    "reversal",
]

RawPoly = Union[TriangularPolynomial, Mapping[Sequence[int], int]]


class WeakMixingWarning(UserWarning):
    """Issued when a prime forces the polynomials down to degree <= 1 (p = 2)."""


def jonq_validate(p: int, scalars: Sequence[int], polys: Sequence[RawPoly]) -> list[str]:
    """Check the automorphism hypotheses and return every violation found.

    ``polys`` may hold :class:`TriangularPolynomial` objects or raw
    ``{exponent tuple: coefficient}`` mappings; raw mappings are what lets
    this report problems that the polynomial constructor would reject.
    An empty list means the data is valid.
    """
    problems: list[str] = []
    n = len(scalars)
    if n < 1:
        problems.append("dimension must be at least 1")
    if len(polys) != max(n - 1, 0):
        problems.append(f"arity mismatch: {n} scalars need {max(n - 1, 0)} polynomials, got {len(polys)}")
    for i, a in enumerate(scalars, start=1):
        if not isinstance(a, int) or not 0 <= a < p:
            problems.append(f"scalar a_{i}={a!r} is not a canonical element of F_{p}")
        elif a == 0:
            problems.append(f"zero scalar: a_{i} = 0")
    for i, P in enumerate(polys, start=1):
        if isinstance(P, TriangularPolynomial):
            if P.p != p:
                problems.append(f"P_{i} is over F_{P.p}, expected F_{p}")
            if P.index != i:
                problems.append(f"arity mismatch: P_{i} reads {P.index} variables, expected {i}")
            for exps, _ in P.terms:
                if not P.reduced and sum(exps) >= p:
                    problems.append(f"degree overflow: P_{i} has degree {sum(exps)} >= p={p}")
                    break
            continue
        for exps, c in P.items():
            exps = tuple(exps)
            beyond = [j + 1 for j, e in enumerate(exps) if e and j >= i]
            if beyond:
                problems.append(
                    f"variable overflow: P_{i} uses x_{beyond[0]} beyond the prefix x_1..x_{i}"
                )
            if any(e < 0 for e in exps):
                problems.append(f"negative exponent in P_{i}: {exps}")
            elif c % p and sum(exps) >= p:
                problems.append(f"degree overflow: P_{i} monomial {exps} has degree {sum(exps)} >= p={p}")
    return problems


class JonquieresAutomorphism:
    """Validated, immutable triangular automorphism of F_p^n."""

    __slots__ = ("p", "n", "scalars", "polys", "_inv_scalars")

    def __init__(self, p: int, scalars: Sequence[int], polys: Sequence[RawPoly] = ()):
        p = prime_modulus(p)
        scalars = tuple(scalars)
        problems = jonq_validate(p, scalars, polys)
        if problems:
            raise InvalidAutomorphism(problems)
        built = []
        for i, P in enumerate(polys, start=1):
            if not isinstance(P, TriangularPolynomial):
                deg = max((sum(e) for e, c in P.items() if c % p), default=0)
                P = TriangularPolynomial(
                    p, i, deg, {(tuple(e) + (0,) * i)[:i]: c for e, c in P.items()}
                )
            built.append(P)
        self.p = p
        self.n = len(scalars)
        self.scalars = scalars
        self.polys = tuple(built)
        self._inv_scalars = tuple(mod_inverse(a, p) for a in scalars)

    @classmethod
    def identity(cls, p: int, n: int) -> JonquieresAutomorphism:
        return cls(p, (1,) * n, [TriangularPolynomial.zero(p, i) for i in range(1, n)])

    @property
    def inverse_scalars(self) -> tuple[int, ...]:
        return self._inv_scalars

    @property
    def degree(self) -> int:
        """Largest degree bound among the polynomials (0 when n = 1)."""
        return max((P.degree for P in self.polys), default=0)

    def __call__(self, x: Sequence[int]) -> list[int]:
        return jonq_apply(self, x)

    def inverse(self, y: Sequence[int]) -> list[int]:
        return jonq_invert_apply(self, y)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, JonquieresAutomorphism):
            return NotImplemented
        return (self.p, self.scalars, self.polys) == (other.p, other.scalars, other.polys)

    def __hash__(self) -> int:
        return hash((self.p, self.scalars, self.polys))

    def __repr__(self) -> str:
        return f"JonquieresAutomorphism(p={self.p}, n={self.n}, scalars={self.scalars}, polys={list(self.polys)})"


def _check_dim(J: JonquieresAutomorphism, v: Sequence[int]) -> None:
    if len(v) != J.n:
        raise DimensionMismatch(f"expected a vector of length {J.n}, got {len(v)}")


def jonq_apply(J: JonquieresAutomorphism, x: Sequence[int]) -> list[int]:
    _check_dim(J, x)
    p = J.p
    y = [J.scalars[0] * x[0] % p]
    for i in range(1, J.n):
        y.append((J.scalars[i] * x[i] + J.polys[i - 1](x)) % p)
    return y


def jonq_invert_apply(J: JonquieresAutomorphism, y: Sequence[int]) -> list[int]:
    """Solve ``jonq_apply(J, x) == y`` for ``x`` front to back."""
    _check_dim(J, y)
    p = J.p
    b = J.inverse_scalars
    x = [b[0] * y[0] % p]
    for i in range(1, J.n):
        x.append(b[i] * (y[i] - J.polys[i - 1](x)) % p)
    return x


def reversal(x: Sequence[int]) -> list[int]:
    return list(reversed(x))


# -- symbolic inversion -------------------------------------------------------

# Sparse polynomials in n variables as {exponent tuple (length n): coeff},
# kept in x^p = x normal form so that they stay finite.


def _reduce_exp(e: int, p: int) -> int:
    return e if e < p else (e - 1) % (p - 1) + 1


def _mul(f: dict, g: dict, p: int) -> dict:
    out: dict = {}
    for ef, cf in f.items():
        for eg, cg in g.items():
            e = tuple(_reduce_exp(a + b, p) for a, b in zip(ef, eg))
            out[e] = (out.get(e, 0) + cf * cg) % p
    return {e: c for e, c in out.items() if c}


def _power(f: dict, k: int, cache: dict, p: int) -> dict:
    if k in cache:
        return cache[k]
    result = _mul(_power(f, k - 1, cache, p), f, p)
    cache[k] = result
    return result


def jonq_inverse_key(J: JonquieresAutomorphism) -> JonquieresAutomorphism:
    """Return the inverse as an explicit triangular automorphism.

    Each recovered coordinate ``x_i`` is expanded as a polynomial in
    ``y_1..y_i`` and substituted into ``P_i``. Composition can raise the
    total degree past ``p - 1``; such polynomials are returned in reduced
    form (every exponent below ``p``), which is the same function. The
    expansion is exponential in ``n`` for dense keys, so this is meant for
    small dimensions; decryption does not depend on it.
    """
    p, n = J.p, J.n
    b = J.inverse_scalars
    one = (0,) * n

    def unit(j: int) -> tuple[int, ...]:
        return tuple(1 if k == j else 0 for k in range(n))

    # xs[j]: x_{j+1} as a polynomial in y
    xs: list[dict] = [{unit(0): b[0]}]
    power_caches: list[dict] = [{0: {one: 1}, 1: xs[0]}]
    new_polys = []
    for i in range(1, n):
        P = J.polys[i - 1]
        comp: dict = {}
        for exps, c in P.terms:
            term = {one: c}
            for j, e in enumerate(exps):
                if e:
                    term = _mul(term, _power(xs[j], e, power_caches[j], p), p)
            for e, v in term.items():
                comp[e] = (comp.get(e, 0) + v) % p
        q = {e[:i]: (-b[i] * c) % p for e, c in comp.items() if c}
        q = {e: c for e, c in q.items() if c}
        actual = max((sum(e) for e in q), default=0)
        degree = max(P.degree, actual)
        if degree >= p:
            new_polys.append(TriangularPolynomial(p, i, actual, q, reduced=True))
        else:
            new_polys.append(TriangularPolynomial(p, i, degree, q))
        xi = {unit(i): b[i]}
        for e, c in q.items():
            full = e + (0,) * (n - i)
            xi[full] = (xi.get(full, 0) + c) % p
        xs.append({e: c for e, c in xi.items() if c})
        power_caches.append({0: {one: 1}, 1: xs[i]})
    return JonquieresAutomorphism(p, b, new_polys)


def warn_if_weak(p: int) -> None:
    if p == 2:
        warnings.warn(
            "p = 2 limits every polynomial to degree <= 1, so the binary digit "
            "block is mixed only affinely",
            WeakMixingWarning,
            stacklevel=3,
        )
