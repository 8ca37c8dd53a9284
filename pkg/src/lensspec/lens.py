"""Lens spaces and lens orbifolds ``L(q; s_1, ..., s_n)``.

Spectra are computed from the one-norm shell counts of the congruence lattice
``{a in Z^n : a.s = 0 mod q}``; the multiplicity of ``lambda_k = k(k+2n-2)`` is

    dim H_k = sum_{r=0}^{k//2} C(r+n-2, n-2) N(k-2r).
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import theta
from .modarith import gcd_all, normalize_sign, units


class LensError(ValueError):
    pass


@dataclass(frozen=True)
class LensParams:
    q: int
    s: tuple[int, ...]
    manifold_flag: bool = field(compare=False)
    effective_order: int = field(compare=False)

    @property
    def n(self) -> int:
        return len(self.s)

    @property
    def dimension(self) -> int:
        return 2 * self.n - 1

    def __str__(self):
        return f"L({self.q};{','.join(map(str, self.s))})"

    def reduced(self) -> "LensParams":
        """Same group written with modulus ``effective_order``."""
        g = self.q // self.effective_order
        if g == 1:
            return self
        return make_lens(self.effective_order, [x // g for x in self.s])


@dataclass(frozen=True, order=True)
class IsometryClassKey:
    q: int
    canonical_s: tuple[int, ...]

    def __str__(self):
        return f"L({self.q};{','.join(map(str, self.canonical_s))})"

    def lens(self) -> LensParams:
        return make_lens(self.q, self.canonical_s)


@dataclass(frozen=True)
class SpectrumSlice:
    q: int
    n: int
    K: int
    lattice_counts: tuple[int, ...]
    multiplicities: tuple[int, ...]

    @property
    def eigenvalues(self) -> tuple[int, ...]:
        return tuple(k * (k + 2 * self.n - 2) for k in range(self.K + 1))

    def to_dict(self) -> dict:
        return {"q": self.q, "n": self.n, "K": self.K,
                "counts": list(self.lattice_counts), "mults": list(self.multiplicities)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, data) -> "SpectrumSlice":
        d = json.loads(data) if isinstance(data, str) else data
        return cls(d["q"], d["n"], d["K"], tuple(d["counts"]), tuple(d["mults"]))


def make_lens(q: int, s) -> LensParams:
    s = [int(x) for x in s]
    if q < 1:
        raise LensError("q must be positive")
    if len(s) < 2:
        raise LensError("dimension below 3 unsupported")
    s = tuple(x % q for x in s)
    manifold = all(math.gcd(q, x) == 1 for x in s)
    g = gcd_all(q, *s)
    return LensParams(q, s, manifold, q // g)


_LITERAL = re.compile(r"^\s*L\s*\(\s*(-?\d+)\s*;\s*(-?\d+(?:\s*,\s*-?\d+)*)\s*\)\s*$")


def parse_lens(text: str) -> LensParams:
    m = _LITERAL.match(text)
    if not m:
        raise LensError(f"malformed lens literal: {text!r}")
    q = int(m.group(1))
    return make_lens(q, [int(x) for x in m.group(2).split(",")])


def canonical_key(L: LensParams) -> IsometryClassKey:
    q = L.q
    best = None
    for t in units(q):
        cand = tuple(sorted(normalize_sign(t * x, q) for x in L.s))
        if best is None or cand < best:
            best = cand
    return IsometryClassKey(q, best)


def are_isometric(L1: LensParams, L2: LensParams) -> bool:
    if L1.n != L2.n or L1.effective_order != L2.effective_order:
        return False
    return canonical_key(L1.reduced()) == canonical_key(L2.reduced())


def isospectral_cutoff(q: int, n: int) -> int:
    """Last degree needed to certify equality of spectra for groups of order dividing q."""
    return q * (n * (n - 1) + 1) - 1


@lru_cache(maxsize=4096)
def _counts_cached(q: int, s: tuple[int, ...], K: int) -> tuple[int, ...]:
    return tuple(theta.shell_counts(q, s, K))


def lattice_counts(L: LensParams, K: int) -> tuple[int, ...]:
    key = canonical_key(L)
    return _counts_cached(key.q, key.canonical_s, K)


def lattice_count(L: LensParams, k: int) -> int:
    return lattice_counts(L, k)[k]


def multiplicities_from_counts(counts, n: int) -> list[int]:
    weights = [math.comb(r + n - 2, n - 2) for r in range(len(counts) // 2 + 1)]
    return [sum(weights[r] * counts[k - 2 * r] for r in range(k // 2 + 1)) for k in range(len(counts))]


def harmonic_invariant_dim(L: LensParams, k: int) -> int:
    counts = lattice_counts(L, k)
    return sum(math.comb(r + L.n - 2, L.n - 2) * counts[k - 2 * r] for r in range(k // 2 + 1))


def spectrum_slice(L: LensParams, K: int) -> SpectrumSlice:
    counts = lattice_counts(L, K)
    return SpectrumSlice(L.q, L.n, K, counts, tuple(multiplicities_from_counts(counts, L.n)))


def spectral_signature(L: LensParams, K: int) -> np.ndarray:
    """Residues of N(0..K) modulo enough primes to make equality exact."""
    key = canonical_key(L)
    primes = theta.primes_for_bound(key.q, theta.full_lattice_count(L.n, K))
    return theta.residue_signature(key.q, [key.canonical_s], K, primes)[0]


@dataclass(frozen=True)
class IsospectralityResult:
    isospectral: bool
    cutoff: int
    theorem_cutoff: int
    reason: str

    @property
    def heuristic(self) -> bool:
        return self.cutoff < self.theorem_cutoff

    def __bool__(self):
        return self.isospectral


def isospectrality(L1: LensParams, L2: LensParams, cutoff: int | None = None) -> IsospectralityResult:
    """Decide isospectrality; ``cutoff`` below the theorem value makes the answer heuristic."""
    if L1.n != L2.n:
        return IsospectralityResult(False, 0, 0, "dimensions differ")
    if L1.effective_order != L2.effective_order:
        return IsospectralityResult(False, 0, 0, "group orders differ")
    A, B = L1.reduced(), L2.reduced()
    full = isospectral_cutoff(A.q, A.n)
    K = full if cutoff is None else cutoff
    if canonical_key(A) == canonical_key(B):
        return IsospectralityResult(True, K, full, "isometric")
    # shell counts and multiplicities determine each other (unit-triangular transform)
    same = np.array_equal(spectral_signature(A, K), spectral_signature(B, K))
    return IsospectralityResult(bool(same), K, full, "shell counts compared")


def are_isospectral(L1: LensParams, L2: LensParams) -> bool:
    return isospectrality(L1, L2).isospectral


ORACLE_BUDGET = 40


def monomial_oracle_dim(L: LensParams, k: int) -> int:
    """dim H_k^Gamma from a direct count of invariant monomials z^alpha zbar^beta.

    Independent of the lattice machinery: monomials of degree j are tallied by
    the residue of sum (alpha_i - beta_i) s_i, one variable at a time.
    """
    if k > ORACLE_BUDGET or L.n > 4:
        raise LensError("oracle budget exceeded (k <= 40, n <= 4)")
    q = L.q
    # table[d][r] = number of monomials of degree d with weight residue r
    table = [[0] * q for _ in range(k + 1)]
    table[0][0] = 1
    for x in L.s:
        for w in (x, -x):
            new = [[0] * q for _ in range(k + 1)]
            for d in range(k + 1):
                row = table[d]
                for e in range(k - d + 1):
                    shift = (e * w) % q
                    target = new[d + e]
                    for r in range(q):
                        if row[r]:
                            target[(r + shift) % q] += row[r]
            table = new
    invariant = [table[d][0] for d in range(k + 1)]
    return invariant[k] - (invariant[k - 2] if k >= 2 else 0)
