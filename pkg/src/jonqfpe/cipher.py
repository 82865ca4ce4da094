"""Keyed permutation of ``[0, N)`` built from two layers of triangular automorphisms.

For every prime power ``p^r`` dividing ``N`` the message residue is written as
``r`` base-p digits, pushed through a first automorphism, reversed, pushed
through a second automorphism and reassembled; CRT glues the factors back
together. Decryption runs the same pipeline backwards.
"""

from __future__ import annotations

import hashlib
import re
import secrets
from dataclasses import dataclass
from functools import lru_cache

from .codec import Factorization, crt_combine, crt_split, factorization_build, from_digits, to_digits
from .errors import (
    JonqError,
    KeySyntaxError,
    KeyValidationError,
    KeyVersionError,
    OutOfRange,
)
from .field import TriangularPolynomial, monomial_count, monomials
from .jonquieres import (
    JonquieresAutomorphism,
    jonq_apply,
    jonq_invert_apply,
    jonq_inverse_key,
    reversal,
    warn_if_weak,
)

__all__ = [
    "KEY_HEADER",
    "SEED_BYTES",
    "CipherKey",
    "effective_degree",
    "keygen",
    "identity_key",
    "encrypt",
    "decrypt",
    "key_serialize",
    "key_parse",
]

KEY_HEADER = "JONQFPE-KEY v1"
SEED_BYTES = 32


def effective_degree(d: int, p: int) -> int:
    """Degree cap actually used over F_p: ``min(d, p - 1)``."""
    return min(d, p - 1)


@dataclass(frozen=True)
class CipherKey:
    """Two automorphisms (stage 1 and stage 2) per prime-power factor."""

    factorization: Factorization
    degree: int
    stage1: tuple[JonquieresAutomorphism, ...]
    stage2: tuple[JonquieresAutomorphism, ...]

    def __post_init__(self):
        F = self.factorization
        if self.degree < 0:
            raise KeyValidationError(f"degree bound must be >= 0, got {self.degree}")
        for name in ("stage1", "stage2"):
            stage = tuple(getattr(self, name))
            object.__setattr__(self, name, stage)
            if len(stage) != len(F.factors):
                raise KeyValidationError(
                    f"{name} has {len(stage)} automorphisms for {len(F.factors)} factors"
                )
            for f, (J, (p, r)) in enumerate(zip(stage, F.factors), start=1):
                if J.p != p or J.n != r:
                    raise KeyValidationError(
                        f"{name}[{f}] acts on F_{J.p}^{J.n}, expected F_{p}^{r}"
                    )
                cap = effective_degree(self.degree, p)
                for i, P in enumerate(J.polys, start=1):
                    if P.reduced or P.total_degree > cap:
                        raise KeyValidationError(
                            f"{name}[{f}] P_{i} has degree {P.total_degree} > cap {cap}"
                        )

    @property
    def N(self) -> int:
        return self.factorization.N

    def encrypt(self, m: int) -> int:
        return encrypt(self, m)

    def decrypt(self, c: int) -> int:
        return decrypt(self, c)


def identity_key(F: Factorization, degree: int = 0) -> CipherKey:
    """Key whose automorphisms are all the identity; encryption is pure digit reversal."""
    ident = tuple(JonquieresAutomorphism.identity(p, r) for p, r in F.factors)
    return CipherKey(F, degree, ident, ident)


class _SeedStream:
    """SHA-256 in counter mode over a 32-byte seed."""

    def __init__(self, seed: bytes):
        self._seed = seed
        self._counter = 0
        self._buf = b""

    def read(self, n: int) -> bytes:
        while len(self._buf) < n:
            block = hashlib.sha256(self._seed + self._counter.to_bytes(8, "big")).digest()
            self._counter += 1
            self._buf += block
        out, self._buf = self._buf[:n], self._buf[n:]
        return out

    def below(self, bound: int) -> int:
        """Uniform integer in ``[0, bound)`` by rejection sampling."""
        if bound == 1:
            return 0
        bits = (bound - 1).bit_length()
        nbytes = (bits + 7) // 8
        mask = (1 << bits) - 1
        while True:
            v = int.from_bytes(self.read(nbytes), "big") & mask
            if v < bound:
                return v


def keygen(F: Factorization, degree: int, seed: bytes | None = None) -> CipherKey:
    """Draw a key deterministically from ``seed`` (fresh entropy if omitted).

    Draw order matches the key file: for each factor, stage 1 then stage 2,
    scalars first, then the coefficients of ``P_1 .. P_{n-1}`` in canonical
    monomial order.
    """
    if degree < 0:
        raise ValueError(f"degree bound must be >= 0, got {degree}")
    if seed is None:
        seed = secrets.token_bytes(SEED_BYTES)
    if len(seed) != SEED_BYTES:
        raise ValueError(f"seed must be {SEED_BYTES} bytes, got {len(seed)}")
    stream = _SeedStream(bytes(seed))
    stages: list[list[JonquieresAutomorphism]] = [[], []]
    for p, r in F.factors:
        warn_if_weak(p)
        d_eff = effective_degree(degree, p)
        for stage in stages:
            scalars = [1 + stream.below(p - 1) for _ in range(r)]
            polys = []
            for i in range(1, r):
                coeffs = [stream.below(p) for _ in range(monomial_count(i, d_eff))]
                polys.append(TriangularPolynomial.from_dense(p, i, d_eff, coeffs))
            stage.append(JonquieresAutomorphism(p, scalars, polys))
    return CipherKey(F, degree, tuple(stages[0]), tuple(stages[1]))


def encrypt(K: CipherKey, m: int) -> int:
    F = K.factorization
    if not 0 <= m < F.N:
        raise OutOfRange(f"message {m} outside [0, {F.N})")
    out = []
    for (p, r), res, J1, J2 in zip(F.factors, crt_split(m, F), K.stage1, K.stage2):
        digits = jonq_apply(J2, reversal(jonq_apply(J1, to_digits(res, p, r))))
        out.append(from_digits(digits, p))
    return crt_combine(out, F)


@lru_cache(maxsize=64)
def _inverse_automorphism(J: JonquieresAutomorphism) -> JonquieresAutomorphism:
    return jonq_inverse_key(J)


def decrypt(K: CipherKey, c: int, *, method: str = "sequential") -> int:
    """Invert :func:`encrypt`.

    ``method="sequential"`` solves each triangular system by forward
    substitution. ``method="inverse-key"`` first expands explicit inverse
    automorphisms and then applies them forwards; it gives the same result
    but the expansion is only practical for small digit blocks.
    """
    F = K.factorization
    if not 0 <= c < F.N:
        raise OutOfRange(f"ciphertext {c} outside [0, {F.N})")
    if method == "sequential":
        undo = jonq_invert_apply
    elif method == "inverse-key":
        def undo(J, v):
            return jonq_apply(_inverse_automorphism(J), v)
    else:
        raise ValueError(f"unknown decryption method {method!r}")
    out = []
    for (p, r), res, J1, J2 in zip(F.factors, crt_split(c, F), K.stage1, K.stage2):
        digits = undo(J1, reversal(undo(J2, to_digits(res, p, r))))
        out.append(from_digits(digits, p))
    return crt_combine(out, F)


# -- key files ----------------------------------------------------------------


def key_serialize(K: CipherKey) -> bytes:
    F = K.factorization
    lines = [KEY_HEADER, f"N {F.N}", F.text(), f"degree-bound {K.degree}"]
    for f, (p, _) in enumerate(F.factors, start=1):
        d_eff = effective_degree(K.degree, p)
        for s, J in ((1, K.stage1[f - 1]), (2, K.stage2[f - 1])):
            lines.append(f"scalars {f} {s} " + " ".join(map(str, J.scalars)))
            for i, P in enumerate(J.polys, start=1):
                terms = P.as_dict()
                coeffs = [terms.get(m, 0) for m in monomials(i, d_eff)]
                lines.append(f"poly {f} {s} {i} " + " ".join(map(str, coeffs)))
    return ("\n".join(lines) + "\n").encode("ascii")


_NUM = r"(?:0|[1-9][0-9]*)"
_NUMS = rf"{_NUM}(?: {_NUM})*"
_N_RE = re.compile(rf"N ({_NUM})")
_FACTORS_RE = re.compile(rf"factors ({_NUM}\^{_NUM}(?: {_NUM}\^{_NUM})*)")
_DEGREE_RE = re.compile(rf"degree-bound ({_NUM})")
_SCALARS_RE = re.compile(rf"scalars ({_NUM}) ([12]) ({_NUMS})")
_POLY_RE = re.compile(rf"poly ({_NUM}) ([12]) ({_NUM}) ({_NUMS})")


def _fullmatch(rx: re.Pattern, line: str, lineno: int) -> re.Match:
    m = rx.fullmatch(line)
    if m is None:
        raise KeySyntaxError(f"line {lineno}: malformed {line[:40]!r}")
    return m


def key_parse(data: bytes | str) -> CipherKey:
    """Parse and validate a key file produced by :func:`key_serialize`.

    Raises:
        KeyVersionError: missing or unknown header.
        KeySyntaxError: a line does not follow the format, or trailing data.
        KeyValidationError: well-formed lines that describe an invalid key.
    """
    if isinstance(data, bytes):
        try:
            text = data.decode("ascii")
        except UnicodeDecodeError as exc:
            raise KeySyntaxError(f"key file is not ASCII: {exc}") from None
    else:
        text = data
    lines = text.split("\n")
    if lines[0] != KEY_HEADER:
        if lines[0].startswith("JONQFPE-KEY "):
            raise KeyVersionError(f"unsupported key version {lines[0][12:]!r}")
        raise KeyVersionError(f"missing {KEY_HEADER!r} header")
    if len(lines) < 2 or lines[-1] != "":
        raise KeySyntaxError("key file must end with a single newline")
    lines = lines[:-1]
    if len(lines) < 4:
        raise KeySyntaxError("truncated key file")

    N = int(_fullmatch(_N_RE, lines[1], 2).group(1))
    fac_text = _fullmatch(_FACTORS_RE, lines[2], 3).group(1)
    degree = int(_fullmatch(_DEGREE_RE, lines[3], 4).group(1))
    claimed = [tuple(map(int, tok.split("^"))) for tok in fac_text.split(" ")]
    if claimed != sorted(claimed) or len({p for p, _ in claimed}) != len(claimed):
        raise KeyValidationError("factors must be listed by strictly ascending prime")
    try:
        F = factorization_build(N, claimed)
    except JonqError as exc:
        raise KeyValidationError(f"invalid factorization: {exc}") from None

    pos = 4
    stages: list[list[JonquieresAutomorphism]] = [[], []]
    for f, (p, r) in enumerate(F.factors, start=1):
        d_eff = effective_degree(degree, p)
        for s in (1, 2):
            if pos >= len(lines):
                raise KeySyntaxError(f"missing scalars line for factor {f} stage {s}")
            m = _fullmatch(_SCALARS_RE, lines[pos], pos + 1)
            if (int(m.group(1)), int(m.group(2))) != (f, s):
                raise KeySyntaxError(f"line {pos + 1}: expected scalars for factor {f} stage {s}")
            scalars = [int(v) for v in m.group(3).split(" ")]
            pos += 1
            if len(scalars) != r:
                raise KeyValidationError(
                    f"line {pos}: factor {f} needs {r} scalars, got {len(scalars)}"
                )
            for a in scalars:
                if not 0 < a < p:
                    raise KeyValidationError(f"line {pos}: scalar {a} not in [1, {p - 1}]")
            polys = []
            for i in range(1, r):
                if pos >= len(lines):
                    raise KeySyntaxError(f"missing poly {i} for factor {f} stage {s}")
                m = _fullmatch(_POLY_RE, lines[pos], pos + 1)
                pos += 1
                if tuple(int(m.group(k)) for k in (1, 2, 3)) != (f, s, i):
                    raise KeySyntaxError(f"line {pos}: expected poly {f} {s} {i}")
                coeffs = [int(v) for v in m.group(4).split(" ")]
                want = monomial_count(i, d_eff)
                if len(coeffs) != want:
                    raise KeyValidationError(
                        f"line {pos}: poly {f} {s} {i} needs {want} coefficients, got {len(coeffs)}"
                    )
                if any(c >= p for c in coeffs):
                    raise KeyValidationError(f"line {pos}: coefficient not below p={p}")
                polys.append(TriangularPolynomial.from_dense(p, i, d_eff, coeffs))
            stages[s - 1].append(JonquieresAutomorphism(p, scalars, polys))
    if pos != len(lines):
        raise KeySyntaxError(f"line {pos + 1}: trailing data after the last factor")
    return CipherKey(F, degree, tuple(stages[0]), tuple(stages[1]))

