"""Counting one-norm shells of congruence lattices.

For a lattice ``{a in Z^n : sum(a_i s_i) = 0 mod q}`` the shell counts are

    N(k) = (1/q) sum_h [z^k] prod_i (1 - z^2) / ((1 - w^(h s_i) z)(1 - w^(-h s_i) z))

with ``w`` a primitive q-th root of unity.  We evaluate this in prime fields
F_p with ``p = 1 mod q`` (so ``w`` exists in F_p), which turns every factor
into a first-order recurrence that numpy can run as a prefix sum.  Residues
modulo several such primes pin the exact integer down by CRT once the product
of the primes exceeds the full-lattice count, which bounds every N(k).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .modarith import inverse_mod, is_prime, primitive_root

PRIME_CEILING = 1 << 28  # p^2 < 2^56 keeps products inside int64
_ELEMENT_BUDGET = 1 << 22


def full_lattice_count(n: int, k: int) -> int:
    """Number of points of Z^n with one-norm exactly ``k``."""
    if k == 0:
        return 1
    return sum((1 << j) * math.comb(n, j) * math.comb(k - 1, j - 1) for j in range(1, min(n, k) + 1))


@dataclass(frozen=True)
class FieldData:
    p: int
    powers: np.ndarray  # powers[j] = w^j mod p, j in [0, q)
    q_inv: int


@lru_cache(maxsize=None)
def _primes_for(q: int, count: int) -> tuple[int, ...]:
    found = []
    m = (PRIME_CEILING - 2) // q
    while len(found) < count:
        if m <= 0:
            raise ValueError(f"ran out of primes = 1 mod {q} below 2^28")
        p = m * q + 1
        if is_prime(p):
            found.append(p)
        m -= 1
    return tuple(found)


@lru_cache(maxsize=None)
def field_data(q: int, p: int) -> FieldData:
    g = primitive_root(p)
    w = pow(g, (p - 1) // q, p)
    powers = np.empty(q, dtype=np.int64)
    acc = 1
    for j in range(q):
        powers[j] = acc
        acc = acc * w % p
    return FieldData(p, powers, inverse_mod(q % p, p))


def primes_for_bound(q: int, bound: int) -> tuple[int, ...]:
    """Primes ``= 1 mod q`` whose product exceeds ``bound``."""
    count = 1
    while True:
        primes = _primes_for(q, count)
        if math.prod(primes) > bound:
            return primes
        count += 1


def counts_mod_p(q: int, rows, K: int, p: int) -> np.ndarray:
    """N(0..K) mod ``p`` for each parameter row; returns shape (B, K+1)."""
    rows = np.asarray(rows, dtype=np.int64) % q
    if rows.ndim == 1:
        rows = rows[None, :]
    B, n = rows.shape
    fd = field_data(q, p)
    pw = fd.powers
    hs = np.arange(q // 2 + 1, dtype=np.int64)
    weights = np.where((hs == 0) | (2 * hs == q), 1, 2).astype(np.int64)
    karr = np.arange(K + 1, dtype=np.int64)
    out = np.zeros((B, K + 1), dtype=np.int64)

    per_pair = K + 1
    h_chunk = max(1, min(len(hs), _ELEMENT_BUDGET // per_pair))
    b_chunk = max(1, _ELEMENT_BUDGET // (per_pair * h_chunk))
    for b0 in range(0, B, b_chunk):
        block = rows[b0:b0 + b_chunk]
        acc = np.zeros((len(block), K + 1), dtype=np.int64)
        for h0 in range(0, len(hs), h_chunk):
            h = hs[h0:h0 + h_chunk]
            mult = (h[None, :, None] * block[:, None, :]) % q  # (b, h, n)
            y = np.zeros((len(block), len(h), K + 1), dtype=np.int64)
            y[..., 0] = 1
            for i in range(n):
                for sign in (1, -1):
                    e = (sign * mult[:, :, i, None] * karr) % q
                    y *= pw[(q - e) % q]
                    y %= p
                    np.cumsum(y, axis=-1, out=y)
                    y %= p
                    y *= pw[e]
                    y %= p
            for _ in range(n):
                y[..., 2:] = y[..., 2:] - y[..., :-2]
                y %= p
            acc += np.einsum("bhk,h->bk", y, weights[h0:h0 + h_chunk]) % p
            acc %= p
        out[b0:b0 + len(block)] = acc * fd.q_inv % p
    return out


def residue_signature(q: int, rows, K: int, primes) -> np.ndarray:
    """Stacked residues, shape (B, len(primes), K+1)."""
    return np.stack([counts_mod_p(q, rows, K, p) for p in primes], axis=1)


def crt(residues, primes) -> int:
    x, m = 0, 1
    for r, p in zip(residues, primes):
        r = int(r)
        t = (r - x) * inverse_mod(m % p, p) % p
        x += m * t
        m *= p
    return x


def shell_counts(q: int, s, K: int) -> list[int]:
    """Exact N(0..K) for the congruence lattice of ``(q; s)``."""
    n = len(s)
    if q == 1:
        return [full_lattice_count(n, k) for k in range(K + 1)]
    primes = primes_for_bound(q, full_lattice_count(n, K))
    sig = residue_signature(q, [list(s)], K, primes)[0]
    return [crt(sig[:, k], primes) for k in range(K + 1)]
