"""Small exact number-theoretic helpers shared by the rest of the package."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache


@dataclass(frozen=True)
class Residue:
    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be positive")
        if not 0 <= self.value < self.modulus:
            raise ValueError(f"{self.value} is not reduced mod {self.modulus}")

    @classmethod
    def of(cls, x: int, q: int) -> "Residue":
        return cls(x % q, q)


@dataclass(frozen=True)
class UnitRepresentatives:
    """One representative of each pair {t, -t} of units mod ``q``."""

    q: int
    reps: tuple[int, ...]

    def __len__(self):
        return len(self.reps)

    def __iter__(self):
        return iter(self.reps)


@lru_cache(maxsize=None)
def totient(q: int) -> int:
    if q < 1:
        raise ValueError("totient needs q >= 1")
    result, m, p = q, q, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def normalize_sign(x: int, q: int) -> int:
    """Smaller of ``x mod q`` and ``-x mod q``."""
    r = x % q
    return min(r, q - r) if r else 0


@lru_cache(maxsize=None)
def unit_representatives(q: int) -> UnitRepresentatives:
    if q < 3:
        raise ValueError(f"unit representatives undefined for q={q} (phi(q) is odd)")
    reps = tuple(t for t in range(1, q // 2 + 1) if math.gcd(t, q) == 1)
    return UnitRepresentatives(q, reps)


def units(q: int) -> list[int]:
    """Units of Z_q; for q in {1, 2} this is [1] by convention."""
    if q <= 2:
        return [1]
    return [t for t in range(1, q) if math.gcd(t, q) == 1]


@lru_cache(maxsize=None)
def divisors(q: int) -> tuple[int, ...]:
    if q < 1:
        raise ValueError("divisors needs q >= 1")
    small, large = [], []
    d = 1
    while d * d <= q:
        if q % d == 0:
            small.append(d)
            if d != q // d:
                large.append(q // d)
        d += 1
    return tuple(small + large[::-1])


def prime_factors(m: int) -> list[int]:
    out, p = [], 2
    while p * p <= m:
        if m % p == 0:
            out.append(p)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        out.append(m)
    return out


def is_prime(m: int) -> bool:
    if m < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if m % p == 0:
            return m == p
    # deterministic Miller-Rabin for m < 3.3e24
    d, s = m - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, m)
        if x in (1, m - 1):
            continue
        for _ in range(s - 1):
            x = x * x % m
            if x == m - 1:
                break
        else:
            return False
    return True


def inverse_mod(a: int, m: int) -> int:
    return pow(a, -1, m)


def gcd_all(*xs: int) -> int:
    g = 0
    for x in xs:
        g = math.gcd(g, x)
    return g


def primitive_root(p: int) -> int:
    factors = prime_factors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // f, p) != 1 for f in factors):
            return g
    raise ValueError(f"{p} has no primitive root")
