"""Vectorized and parallel batch encryption.

Every message is encrypted independently of the others, so a batch is
processed column-wise with numpy and, optionally, split into chunks that run
in worker processes. Output order always matches input order.

The polynomial stage evaluates all monomials of an automorphism once per
batch: monomials are ordered by the highest variable they use, so that each
is its parent monomial times one coordinate, and ``P_i`` is a dot product
over a prefix of that table. The inverse fills the table column block by
column block as coordinates are recovered.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from typing import Sequence

import numpy as np

from .cipher import CipherKey
from .errors import OutOfRange
from .jonquieres import JonquieresAutomorphism

__all__ = ["encrypt_batch", "decrypt_batch", "AutomorphismPlan"]

# floats hold every integer below these bounds exactly
_FLOAT32_EXACT = 1 << 24
_FLOAT_EXACT = 1 << 53
_INT64_MAX = (1 << 63) - 1
# cap on elements of one monomial table (rows * columns)
_TABLE_BUDGET = 1 << 22


class AutomorphismPlan:
    """Precomputed monomial table layout and coefficient matrix for one automorphism."""

    def __init__(self, J: JonquieresAutomorphism):
        self.p = p = J.p
        self.n = n = J.n
        width = max(n - 1, 1)
        wanted = {(0,) * width}
        for P in J.polys:
            for exps, _ in P.terms:
                wanted.add(exps + (0,) * (width - len(exps)))
        # close under "divide by the last variable used" so every entry has a parent
        stack = list(wanted)
        while stack:
            e = stack.pop()
            v = _last_var(e)
            if v >= 0:
                parent = e[:v] + (e[v] - 1,) + e[v + 1 :]
                if parent not in wanted:
                    wanted.add(parent)
                    stack.append(parent)
        mons = sorted(wanted, key=lambda e: (_last_var(e), sum(e), e))
        index = {e: k for k, e in enumerate(mons)}
        self.degrees = np.array([sum(e) for e in mons], dtype=np.intp)
        self._level_cache: dict = {}
        self.parents = np.zeros(len(mons), dtype=np.intp)
        self.vars = np.zeros(len(mons), dtype=np.intp)
        for k, e in enumerate(mons[1:], start=1):
            v = _last_var(e)
            self.parents[k] = index[e[:v] + (e[v] - 1,) + e[v + 1 :]]
            self.vars[k] = v
        # prefix[i]: number of table columns that only involve x_1..x_i
        last = [_last_var(e) + 1 for e in mons]
        self.prefix = [sum(1 for v in last if v <= i) for i in range(n)]
        K = len(mons)
        self.size = K
        # Without reduction a degree-g monomial is at most (p-1)^g; if even the
        # unreduced dot products stay exact, the table is filled mod-free.
        top = int(self.degrees.max()) if K else 0
        unreduced = K * (p - 1) ** (top + 1) + p
        reduced = K * (p - 1) ** 2 + p
        self.reduce_fill = True
        if unreduced < _FLOAT32_EXACT:
            self.dtype, self.reduce_fill = np.float32, False
        elif unreduced < _FLOAT_EXACT:
            self.dtype, self.reduce_fill = np.float64, False
        elif p * p < _FLOAT_EXACT and reduced < _FLOAT_EXACT:
            self.dtype = np.float64
        else:
            self.dtype = object
        C = np.zeros((max(n - 1, 0), K), dtype=self.dtype)
        if self.dtype is object:
            C[...] = 0
        for i, P in enumerate(J.polys):
            for exps, c in P.terms:
                C[i, index[exps + (0,) * (width - len(exps))]] = c
        self.coeffs = C
        self.scalars = np.array(J.scalars, dtype=self.dtype)
        self.inv_scalars = np.array(J.inverse_scalars, dtype=self.dtype)

    def _table(self, rows: int) -> np.ndarray:
        T = np.empty((self.size, rows), dtype=self.dtype)
        T[0] = 1
        return T

    def _levels(self, start: int, stop: int) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
        key = (start, stop)
        if key not in self._level_cache:
            ks = np.arange(start, stop)
            deg = self.degrees[ks]
            self._level_cache[key] = [
                (ks[deg == d], self.parents[ks[deg == d]], self.vars[ks[deg == d]])
                for d in np.unique(deg)
            ]
        return self._level_cache[key]

    def _fill(self, T: np.ndarray, X: np.ndarray, start: int, stop: int) -> None:
        # a column's parent has degree one lower, so whole degree levels go at once
        p = self.p
        for ks, parents, vs in self._levels(start, stop):
            if self.reduce_fill:
                T[ks] = T[parents] * X[vs] % p
            else:
                T[ks] = T[parents] * X[vs]

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Forward map on a ``(n, rows)`` array of coordinates."""
        p, n = self.p, self.n
        Y = np.empty_like(X)
        Y[0] = self.scalars[0] * X[0] % p
        if n > 1:
            T = self._table(X.shape[1])
            self._fill(T, X, 1, self.prefix[n - 1])
            PV = self.coeffs[:, : self.prefix[n - 1]] @ T[: self.prefix[n - 1]] % p
            Y[1:] = (self.scalars[1:, None] * X[1:] + PV) % p
        return Y

    def invert(self, Y: np.ndarray) -> np.ndarray:
        """Inverse map, one coordinate at a time."""
        p, n = self.p, self.n
        X = np.empty_like(Y)
        X[0] = self.inv_scalars[0] * Y[0] % p
        if n > 1:
            T = self._table(Y.shape[1])
            for i in range(1, n):
                self._fill(T, X, self.prefix[i - 1], self.prefix[i])
                k = self.prefix[i]
                pv = self.coeffs[i - 1, :k] @ T[:k] % p
                X[i] = self.inv_scalars[i] * ((Y[i] - pv) % p) % p
        return X


def _last_var(e: tuple[int, ...]) -> int:
    for j in range(len(e) - 1, -1, -1):
        if e[j]:
            return j
    return -1


@lru_cache(maxsize=64)
def _plan(J: JonquieresAutomorphism) -> AutomorphismPlan:
    return AutomorphismPlan(J)


def _digits(residues: np.ndarray, p: int, r: int, dtype) -> np.ndarray:
    out = np.empty((r, residues.shape[0]), dtype=dtype)
    rest = residues
    for j in range(r):
        out[j] = rest % p
        rest = rest // p
    return out


def _undigits(D: np.ndarray, p: int) -> np.ndarray:
    # integer-valued columns back to one Python-int residue per message
    if D.dtype != object:
        D = D.astype(np.int64).astype(object)
    acc = np.zeros(D.shape[1], dtype=object)
    for row in D[::-1]:
        acc = acc * p + row
    return acc


def _run_chunk(K: CipherKey, values: Sequence[int], forward: bool) -> list[int]:
    F = K.factorization
    N = F.N
    arr = np.array(values, dtype=object)
    out = np.zeros(arr.shape[0], dtype=object)
    for (p, r), q, e, J1, J2 in zip(F.factors, F.moduli, F.idempotents, K.stage1, K.stage2):
        plan1, plan2 = _plan(J1), _plan(J2)
        res = arr % q
        if q <= _INT64_MAX and plan1.dtype is not object:
            res = res.astype(np.int64)
        D = _digits(res, p, r, plan1.dtype)
        if forward:
            D = plan2.apply(plan1.apply(D)[::-1].copy())
        else:
            D = plan1.invert(plan2.invert(D)[::-1].copy())
        out = out + _undigits(D, p) * e
    return [int(v) for v in out % N]


def _chunks(values: Sequence[int], size: int) -> list[Sequence[int]]:
    return [values[i : i + size] for i in range(0, len(values), size)]


def _chunk_size(K: CipherKey) -> int:
    widest = max(_plan(J).size for J in K.stage1 + K.stage2)
    return max(256, _TABLE_BUDGET // widest)


_worker_key: CipherKey | None = None


def _init_worker(K: CipherKey) -> None:
    global _worker_key
    _worker_key = K


def _worker_chunk(args: tuple[Sequence[int], bool]) -> list[int]:
    values, forward = args
    return _run_chunk(_worker_key, values, forward)


def _run(K: CipherKey, values: Sequence[int], forward: bool, workers: int) -> list[int]:
    values = [int(v) for v in values]
    if not values:
        return []
    N = K.factorization.N
    for v in values:
        if not 0 <= v < N:
            raise OutOfRange(f"value {v} outside [0, {N})")
    if workers <= 1:
        out: list[int] = []
        for chunk in _chunks(values, _chunk_size(K)):
            out.extend(_run_chunk(K, chunk, forward))
        return out
    size = min(_chunk_size(K), -(-len(values) // workers))
    tasks = [(chunk, forward) for chunk in _chunks(values, size)]
    with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=(K,)) as ex:
        out = []
        for part in ex.map(_worker_chunk, tasks):
            out.extend(part)
    return out


def encrypt_batch(K: CipherKey, messages: Sequence[int], workers: int = 1) -> list[int]:
    """Encrypt many messages; ``workers > 1`` spreads chunks over processes."""
    return _run(K, messages, True, workers)


def decrypt_batch(K: CipherKey, ciphertexts: Sequence[int], workers: int = 1) -> list[int]:
    return _run(K, ciphertexts, False, workers)


def default_workers() -> int:
    return os.cpu_count() or 1
