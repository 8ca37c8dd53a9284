"""Tuple predicates mod r, the lens spaces L(r,t,a), and descending isospectral towers."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .lens import LensParams, are_isometric, isospectrality, make_lens
from .modarith import divisors, inverse_mod, is_prime


@dataclass(frozen=True)
class TupleModR:
    a: tuple[int, ...]
    r: int

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(int(x) for x in self.a))
        if self.r < 1:
            raise ValueError("modulus must be positive")

    @property
    def n(self) -> int:
        return len(self.a)

    def reduced(self) -> tuple[int, ...]:
        return tuple(x % self.r for x in self.a)

    def negated(self) -> "TupleModR":
        return TupleModR(tuple(-x % self.r for x in self.a), self.r)


def _ms(a: Sequence[int], r: int) -> Counter:
    return Counter(x % r for x in a)


def is_univalent(a: Sequence[int], r: int) -> bool:
    return len(set(x % r for x in a)) == len(a)


def is_self_reversing(a: Sequence[int], r: int) -> bool:
    return _ms(a, r) == _ms([-x for x in a], r)


def reversing_shift(a: Sequence[int], r: int) -> int | None:
    """Smallest c with a + c equal to -a as multisets mod r, or None."""
    target = _ms([-x for x in a], r)
    for c in range(r):
        if _ms([x + c for x in a], r) == target:
            return c
    return None


def is_reversible(a: Sequence[int], r: int) -> bool:
    return reversing_shift(a, r) is not None


def is_good(a: Sequence[int], r: int) -> bool:
    return is_univalent(a, r) or is_reversible(a, r)


def is_hereditarily_good(a: Sequence[int], r: int) -> bool:
    return all(is_good(a, d) for d in divisors(r))


def is_useful(a: Sequence[int], r: int) -> bool:
    return is_hereditarily_good(a, r) and not is_reversible(a, r)


def build_dd_lens(r: int, t: int, a: Sequence[int]) -> LensParams:
    """L(r^2 t; r t a_1 + 1, ..., r t a_n + 1), entries of a reduced mod r first."""
    if r <= 2 or t < 1:
        raise ValueError("need r > 2 and t >= 1")
    q = r * r * t
    return make_lens(q, [r * t * (x % r) + 1 for x in a])


@dataclass(frozen=True)
class DDPairReport:
    r: int
    t: int
    a: tuple[int, ...]
    isospectral: bool
    isometric: bool
    cutoff: int
    hereditarily_good: bool
    reversible: bool

    @property
    def consistent(self) -> bool:
        """False when the outcome contradicts what the predicates guarantee."""
        if self.hereditarily_good and not self.isospectral:
            return False
        if self.reversible != self.isometric:
            return False
        return True

    def to_dict(self) -> dict:
        return {"r": self.r, "t": self.t, "a": list(self.a), "isospectral": self.isospectral,
                "isometric": self.isometric, "cutoff": self.cutoff,
                "hereditarily_good": self.hereditarily_good, "reversible": self.reversible,
                "consistent": self.consistent}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def dd_pair_check(r: int, t: int, a: Sequence[int]) -> DDPairReport:
    M = build_dd_lens(r, t, a)
    N = build_dd_lens(r, t, [-x for x in a])
    res = isospectrality(M, N)
    return DDPairReport(r, t, tuple(a), res.isospectral, are_isometric(M, N), res.cutoff,
                        is_hereditarily_good(a, r), is_reversible(a, r))


def useful_tuple(n: int, r: int) -> TupleModR:
    """(1, 2, ..., n-1, r - n(n-1)/2): univalent, entry sum r, not self-reversing."""
    if n < 3:
        raise ValueError("n must be at least 3")
    if not is_prime(r) or r <= n * n:
        raise ValueError("r must be a prime exceeding n^2")
    a = tuple(range(1, n)) + (r - n * (n - 1) // 2,)
    assert sum(a) == r and not is_self_reversing(a, r) and is_useful(a, r)
    return TupleModR(a, r)


def shift_to_zero_sum(a: Sequence[int], r: int, n: int | None = None) -> TupleModR:
    """Translate a by c = -S/n mod r so the entries sum to zero mod r."""
    n = len(a) if n is None else n
    if n != len(a):
        raise ValueError("n must equal the tuple length")
    try:
        m = inverse_mod(n, r)
    except ValueError:
        raise ValueError("n must be invertible mod r") from None
    c = -m * sum(a) % r
    b = tuple((x + c) % r for x in a)
    return TupleModR(b, r)


# ---------------------------------------------------------------- towers

@dataclass(frozen=True)
class TowerLevel:
    j: int
    t_j: int
    M: LensParams
    N: LensParams

    @property
    def q(self) -> int:
        return self.M.q


@dataclass(frozen=True)
class TowerSpec:
    r: int
    t: int
    k: int
    a: tuple[int, ...]
    depth: int
    levels: tuple[TowerLevel, ...]


def build_tower(r: int, t: int, k: int, a: Sequence[int], depth: int) -> TowerSpec:
    a = tuple(a)
    if k <= 1 or k % r != 1:
        raise ValueError("k must exceed 1 and satisfy k = 1 mod r")
    if not is_prime(r) or r <= len(a) ** 2:
        raise ValueError("r must be a prime exceeding n^2")
    if not is_useful(a, r):
        raise ValueError("tuple is not useful mod r")
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    return _assemble(r, t, k, a, depth)


def _assemble(r, t, k, a, depth) -> TowerSpec:
    levels = []
    for j in range(depth + 1):
        tj = t * k ** j
        levels.append(TowerLevel(j, tj, build_dd_lens(r, tj, a), build_dd_lens(r, tj, [-x for x in a])))
    return TowerSpec(r, t, k, tuple(a), depth, tuple(levels))


@dataclass(frozen=True)
class TowerFailure:
    level: int
    check: str
    witness: str


@dataclass
class TowerReport:
    spec: TowerSpec
    checks: list[dict] = field(default_factory=list)
    failures: list[TowerFailure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        s = self.spec
        return {
            "r": s.r, "t": s.t, "k": s.k, "a": list(s.a),
            "levels": [
                {"j": lv.j, "t_j": lv.t_j, "q": lv.q, "M": str(lv.M), "N": str(lv.N), "checks": c}
                for lv, c in zip(s.levels, self.checks)
            ],
            "ok": self.ok,
            "failures": [f.__dict__ for f in self.failures],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def verify_tower(T: TowerSpec, full_check_depth: int = 1) -> TowerReport:
    """Check every level: predicates, covering congruences, and (shallow levels) the full spectrum."""
    rep = TowerReport(T)
    r, a = T.r, T.a
    for lv in T.levels:
        j = lv.j
        checks = {}
        useful = is_useful(a, r)
        checks["predicate"] = useful
        if not useful:
            rep.failures.append(TowerFailure(j, "predicate", f"{list(a)} is not useful mod {r}"))
        if lv.M != build_dd_lens(r, lv.t_j, a) or lv.N != build_dd_lens(r, lv.t_j, [-x for x in a]):
            rep.failures.append(TowerFailure(j, "structure", f"level {j} is not L(r,t_j,+-a)"))
        congruent = True
        qj = r * r * lv.t_j
        for upper in T.levels[j + 1:]:
            for x in a:
                hi, lo = r * upper.t_j * x + 1, r * lv.t_j * x + 1
                if (hi - lo) % qj:
                    congruent = False
                    rep.failures.append(TowerFailure(
                        j, "congruence", f"level {upper.j} entry {x}: {hi} != {lo} mod {qj}"))
                    break
            image = make_lens(qj, [r * upper.t_j * x + 1 for x in a])
            if congruent and not are_isometric(image, lv.M):
                congruent = False
                rep.failures.append(TowerFailure(j, "congruence", f"{image} not isometric to {lv.M}"))
        checks["congruence"] = congruent
        if j <= full_check_depth:
            res = isospectrality(lv.M, lv.N)
            iso = are_isometric(lv.M, lv.N)
            checks["full"] = {"isospectral": res.isospectral, "isometric": iso, "cutoff": res.cutoff}
            if not res.isospectral:
                rep.failures.append(TowerFailure(j, "full", f"spectra differ below {res.cutoff}"))
            if iso:
                rep.failures.append(TowerFailure(j, "full", f"{lv.M} and {lv.N} are isometric"))
        else:
            checks["full"] = None
        rep.checks.append(checks)
    return rep
