import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jonqfpe.errors import ArityError, DegreeError, NotPrimeError, VariableError, ZeroInverseError
from jonqfpe.field import (
    TriangularPolynomial,
    egcd,
    is_prime,
    mod_inverse,
    monomial_count,
    monomials,
    poly_eval,
    prime_modulus,
)


def brute_inverse(a, p):
    return next(b for b in range(1, p) if a * b % p == 1)


def sieve(limit):
    flags = [True] * (limit + 1)
    flags[0] = flags[1] = False
    for i in range(2, int(limit**0.5) + 1):
        if flags[i]:
            flags[i * i :: i] = [False] * len(flags[i * i :: i])
    return flags


def test_is_prime_matches_sieve():
    flags = sieve(20000)
    assert [n for n in range(20001) if is_prime(n)] == [n for n, f in enumerate(flags) if f]


@pytest.mark.parametrize(
    "n, expected",
    [
        (2**61 - 1, True),
        (2**64 - 59, True),
        (3215031751, False),  # strong pseudoprime to bases 2, 3, 5, 7
        (3825123056546413051, False),  # strong pseudoprime to the first 9 prime bases
        (603, False),
        (613, True),
    ],
)
def test_is_prime_hard_cases(n, expected):
    assert is_prime(n) is expected


def test_prime_modulus_rejects():
    with pytest.raises(NotPrimeError, match="6 is not prime"):
        prime_modulus(6)
    with pytest.raises(NotPrimeError):
        prime_modulus(2**64 + 13)
    assert prime_modulus(163) == 163


@pytest.mark.parametrize("a, p, expected", [(1, 7, 1), (3, 5, 2), (7, 11, 8)])
def test_mod_inverse_examples(a, p, expected):
    assert mod_inverse(a, p) == expected
    assert brute_inverse(a, p) == expected


def test_mod_inverse_exhaustive_small_primes():
    for p in (q for q in range(2, 1000) if is_prime(q)):
        for a in range(1, p):
            b = mod_inverse(a, p)
            assert 1 <= b <= p - 1 and a * b % p == 1


def test_mod_inverse_zero():
    with pytest.raises(ZeroInverseError):
        mod_inverse(0, 7)
    with pytest.raises(ZeroInverseError):
        mod_inverse(14, 7)


@given(st.integers(0, 10**30), st.integers(0, 10**30))
def test_egcd_bezout(a, b):
    g, x, y = egcd(a, b)
    assert a * x + b * y == g
    if a or b:
        assert a % g == 0 and b % g == 0


def term_oracle(coeffs, point, p):
    total = 0
    for exps, c in coeffs.items():
        v = c
        for x, e in zip(point, exps):
            v *= x**e
        total += v
    return total % p


def test_poly_eval_zero():
    P = TriangularPolynomial(7, 3, 2)
    assert poly_eval(P, (1, 2, 3), 7) == 0


def test_poly_eval_examples():
    P = TriangularPolynomial(5, 2, 2, {(2, 0): 1, (0, 1): 3})
    assert term_oracle(P.as_dict(), (2, 4), 5) == 1
    assert poly_eval(P, (2, 4), 5) == 1
    Q = TriangularPolynomial(5, 1, 2, {(2,): 1, (0,): 1})
    assert poly_eval(Q, (1,), 5) == 2


def test_poly_eval_reads_only_prefix():
    P = TriangularPolynomial(5, 2, 2, {(1, 1): 2})
    assert P((3, 4, 0, 1)) == P((3, 4)) == 24 % 5


def test_poly_eval_arity():
    P = TriangularPolynomial(5, 3, 1, {(0, 0, 1): 1})
    with pytest.raises(ArityError):
        P((1, 2))


def test_poly_eval_wrong_field():
    with pytest.raises(ValueError):
        poly_eval(TriangularPolynomial(5, 1, 1), (1,), 7)


def random_poly(rng, p, i, d):
    return TriangularPolynomial.from_dense(
        p, i, d, [rng.randrange(p) for _ in range(monomial_count(i, d))]
    )


def test_poly_eval_linear_in_coefficients():
    rng = random.Random(1)
    for _ in range(200):
        p = rng.choice([2, 3, 5, 7, 11, 163])
        i = rng.randint(1, 4)
        d = rng.randint(0, min(4, p - 1))
        P, Q = random_poly(rng, p, i, d), random_poly(rng, p, i, d)
        x = [rng.randrange(p) for _ in range(i)]
        assert (P + Q)(x) == (P(x) + Q(x)) % p
        assert P.scaled(3)(x) == 3 * P(x) % p
        assert (-P)(x) == -P(x) % p
        assert P(x) == term_oracle(P.as_dict(), x, p)


def enumerate_exponents(i, d):
    return [e for e in itertools.product(range(d + 1), repeat=i) if sum(e) <= d]


@pytest.mark.parametrize("i", range(1, 7))
@pytest.mark.parametrize("d", range(0, 7))
def test_monomial_count_matches_enumeration(i, d):
    brute = enumerate_exponents(i, d)
    assert monomial_count(i, d) == len(brute)
    assert sorted(monomials(i, d)) == sorted(brute)


def test_monomial_count_examples():
    assert monomial_count(1, 3) == 4
    assert [monomial_count(i, 3) for i in (1, 2, 3)] == [4, 10, 20]
    assert sum(monomial_count(i, 3) for i in (1, 2, 3)) == 34
    assert monomial_count(4, 5) == 126
    assert sum(monomial_count(i, 5) for i in (1, 2, 3, 4)) == 209


def test_monomial_order_is_graded_lex():
    assert monomials(2, 2) == ((0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0))
    for i, d in [(3, 3), (4, 2)]:
        mons = monomials(i, d)
        keys = [(sum(e), e) for e in mons]
        assert keys == sorted(keys) and len(set(mons)) == len(mons)


def test_constructor_rejects_degree_at_least_p():
    with pytest.raises(DegreeError):
        TriangularPolynomial(2, 1, 2, {(2,): 1})
    with pytest.raises(DegreeError):
        TriangularPolynomial(5, 2, 3, {(2, 2): 1})


def test_constructor_rejects_variable_outside_prefix():
    with pytest.raises(VariableError):
        TriangularPolynomial(5, 2, 2, {(0, 0, 1): 1})


def test_coefficients_are_canonical():
    P = TriangularPolynomial(7, 1, 2, {(1,): -1, (2,): 14})
    assert P.as_dict() == {(1,): 6}


def test_dense_roundtrip():
    rng = random.Random(5)
    for _ in range(50):
        P = random_poly(rng, 11, 3, 3)
        assert TriangularPolynomial.from_dense(11, 3, 3, P.dense()) == P


@settings(max_examples=50)
@given(st.data())
def test_equality_ignores_degree_bound(data):
    c = data.draw(st.integers(0, 6))
    assert TriangularPolynomial(7, 2, 1, {(0, 1): c}) == TriangularPolynomial(7, 2, 5, {(0, 1): c})
