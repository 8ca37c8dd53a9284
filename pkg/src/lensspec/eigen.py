"""Eigenvalue sets (multiplicities ignored) of lens spaces and related checks."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction

from .lens import (
    LensParams,
    are_isometric,
    are_isospectral,
    lattice_counts,
    make_lens,
    multiplicities_from_counts,
)


@dataclass(frozen=True)
class EigenvalueSpectrumDescriptor:
    n: int
    k0: int | None

    def contains_degree(self, k: int) -> bool:
        """Whether ``lambda_k = k(k+2n-2)`` is an eigenvalue."""
        if k % 2 == 0:
            return True
        return self.k0 is not None and k >= self.k0


def congruence_lattice_basis(q: int, s) -> list[list[int]]:
    """A Z-basis of ``{a in Z^n : sum a_i s_i = 0 mod q}``.

    Column-reduce the row ``(s_1, ..., s_n, q)`` by unimodular moves; the
    columns that end up over a zero entry span the kernel in Z^(n+1), and
    projecting away the last coordinate is injective on that kernel.
    """
    n = len(s)
    row = [x % q for x in s] + [q]
    cols = [[int(i == j) for i in range(n + 1)] for j in range(n + 1)]
    while sum(1 for x in row if x) > 1:
        piv = min((j for j in range(n + 1) if row[j]), key=lambda j: abs(row[j]))
        for j in range(n + 1):
            if j != piv and row[j]:
                c = row[j] // row[piv]
                row[j] -= c * row[piv]
                cols[j] = [a - c * b for a, b in zip(cols[j], cols[piv])]
    return [col[:n] for j, col in enumerate(cols) if row[j] == 0]


def k0(L: LensParams) -> int | None:
    """Smallest odd one-norm in the congruence lattice, or None if all norms are even."""
    basis = congruence_lattice_basis(L.q, L.s)
    odd = [b for b in basis if sum(b) % 2]
    if not odd:
        return None
    bound = min(sum(abs(x) for x in b) for b in odd)
    K = min(bound, 16)
    while True:
        counts = lattice_counts(L, K)
        for k in range(1, K + 1, 2):
            if counts[k]:
                return k
        if K >= bound:
            raise AssertionError("odd lattice vector missed below its basis bound")
        K = min(2 * K, bound)


def eigenvalue_spectrum(L: LensParams) -> EigenvalueSpectrumDescriptor:
    return EigenvalueSpectrumDescriptor(L.n, k0(L))


def are_eigenvalue_equivalent(L1: LensParams, L2: LensParams) -> bool:
    return eigenvalue_spectrum(L1) == eigenvalue_spectrum(L2)


def eigenvalue_equivalent_family(n: int, qmax: int) -> list[LensParams]:
    """``L(q; 1, ..., 1, 2)`` for ``3 <= q <= qmax``: all share k0 = 3."""
    if n < 2:
        raise ValueError("n must be at least 2")
    return [make_lens(q, [1] * (n - 1) + [2]) for q in range(3, qmax + 1)]


def sphere_quarter_vs_projective_check(bound: int) -> bool:
    """Eigenvalues up to ``bound`` of S^2 with metric g/4 versus P^3(R)."""
    first = set()
    k = 0
    while 4 * k * (k + 1) <= bound:
        first.add(4 * k * (k + 1))
        k += 1
    second = set()
    k = 0
    while k * (k + 2) <= bound:
        second.add(k * (k + 2))
        k += 2
    return first == second


@dataclass(frozen=True)
class FinitePartCertificate:
    epsilon: Fraction
    q: int
    K: int
    N: int


FACTORIAL_GUARD = 8


def sphere_harmonic_total(d: int, K: int) -> int:
    """sum_{k <= K} dim H_k(S^d), telescoped from dim H_k = C(k+d,d) - C(k+d-2,d)."""
    return math.comb(K + d, d) + math.comb(K + d - 1, d)


def finite_part_bound(n: int, epsilon) -> FinitePartCertificate:
    eps = Fraction(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    m = math.floor(1 / eps)
    if m > FACTORIAL_GUARD:
        raise ValueError(f"bound astronomically large: floor(1/epsilon)! with floor(1/epsilon)={m} > {FACTORIAL_GUARD}")
    q = math.factorial(m)
    K = q * (n * (n - 1) + 1)
    return FinitePartCertificate(eps, q, K, 1 + sphere_harmonic_total(2 * n - 1, K))


def first_eigenvalues(L: LensParams, N: int) -> list[int]:
    """The N smallest eigenvalues, repeated according to multiplicity."""
    out: list[int] = []
    K = 8
    while True:
        mults = multiplicities_from_counts(lattice_counts(L, K), L.n)
        out = []
        for k, m in enumerate(mults):
            lam = k * (k + 2 * L.n - 2)
            out.extend([lam] * min(m, N - len(out)))
            if len(out) == N:
                return out
        K *= 2


@dataclass(frozen=True)
class Example54Report:
    N: int
    q: int
    L1: str
    L2: str
    agree_count: int
    guaranteed: int
    isospectral: bool
    isometric: bool

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _common_prefix(a, b) -> int:
    i = 0
    while i < min(len(a), len(b)) and a[i] == b[i]:
        i += 1
    return i


def example_5_4(N: int) -> Example54Report:
    """Lens orbifolds ``L(q;0,1)``, ``L(q;0,2)`` sharing their first N eigenvalues."""
    if N < 1:
        raise ValueError("N must be positive")
    q = 4
    while q * (q + 4) // 16 < N:
        q += 4
    L1, L2 = make_lens(q, [0, 1]), make_lens(q, [0, 2])
    # the sequences separate at degree q/2; one degree past it is enough to see that
    length = sum(multiplicities_from_counts(lattice_counts(L1, q // 2 + 1), 2))
    agree = _common_prefix(first_eigenvalues(L1, length), first_eigenvalues(L2, length))
    return Example54Report(N, q, str(L1), str(L2), agree, q * (q + 4) // 16,
                           are_isospectral(L1, L2), are_isometric(L1, L2))
