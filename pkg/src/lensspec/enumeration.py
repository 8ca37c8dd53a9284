"""Isometry classes of lens spaces, isospectral families, and the tables built from them."""

from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from itertools import combinations_with_replacement
from pathlib import Path

import numpy as np

from . import theta
from .lens import (
    IsometryClassKey,
    LensError,
    LensParams,
    canonical_key,
    isospectral_cutoff,
    make_lens,
)
from .modarith import gcd_all, normalize_sign, totient, unit_representatives

MANIFOLD = "manifold"
ORBIFOLD = "orbifold"
_MAX_CODE = 1 << 62


def default_prefix(n: int) -> int:
    return 2 * n + 10


def _value_set(q: int, mode: str) -> list[int]:
    if q <= 2:
        return [q - 1] if mode == MANIFOLD else list(range(q // 2 + 1))
    if mode == MANIFOLD:
        return list(unit_representatives(q).reps)
    return list(range(q // 2 + 1))


def multisets(m: int, n: int) -> np.ndarray:
    """All non-decreasing index tuples of length n over range(m), in lex order."""
    rows = np.arange(m, dtype=np.int16)[:, None]
    for _ in range(n - 1):
        last = rows[:, -1].astype(np.int64)
        reps = m - last
        parent = np.repeat(np.arange(len(rows)), reps)
        offsets = np.arange(reps.sum()) - np.repeat(np.cumsum(reps) - reps, reps)
        new_last = (last[parent] + offsets).astype(np.int16)
        rows = np.concatenate([rows[parent], new_last[:, None]], axis=1)
    return rows


def _encode(idx: np.ndarray, base: int) -> np.ndarray:
    code = np.zeros(len(idx), dtype=np.int64)
    for j in range(idx.shape[1]):
        code = code * base + idx[:, j]
    return code


def enumerate_classes(n: int, q: int, mode: str = MANIFOLD) -> list[IsometryClassKey]:
    """Canonical keys of all isometry classes, sorted lexicographically."""
    if n < 2:
        raise LensError("dimension below 3 unsupported")
    if mode not in (MANIFOLD, ORBIFOLD):
        raise ValueError(f"unknown mode {mode!r}")
    values = _value_set(q, mode)
    m = len(values)
    if m ** n >= _MAX_CODE:
        return _enumerate_slow(n, q, mode, values)
    idx = multisets(m, n)
    if mode == ORBIFOLD and q > 1:
        vals = np.array(values, dtype=np.int64)
        g = np.full(len(idx), q, dtype=np.int64)
        for j in range(n):
            g = np.gcd(g, vals[idx[:, j]])
        idx = idx[g == 1]
    position = {v: i for i, v in enumerate(values)}
    own = _encode(idx.astype(np.int64), m)
    best = own.copy()
    for t in _scalings(q):
        perm = np.array([position[normalize_sign(t * v, q)] for v in values], dtype=np.int16)
        image = np.sort(perm[idx], axis=1)
        np.minimum(best, _encode(image.astype(np.int64), m), out=best)
    keep = idx[own == best]
    return [IsometryClassKey(q, tuple(values[i] for i in row)) for row in keep.tolist()]


def _scalings(q: int) -> list[int]:
    return [1] if q <= 2 else list(unit_representatives(q).reps)


def _enumerate_slow(n, q, mode, values):
    seen = set()
    for combo in combinations_with_replacement(values, n):
        if mode == ORBIFOLD and gcd_all(q, *combo) != 1:
            continue
        seen.add(canonical_key(make_lens(q, combo)))
    return sorted(seen)


# ---------------------------------------------------------------- families

@dataclass
class FamilyReport:
    n: int
    q: int
    mode: str
    classes: int
    families: list[list[IsometryClassKey]]
    prefix: int = 0
    cutoff: int = 0

    @property
    def members(self) -> int:
        return sum(len(f) for f in self.families)

    @property
    def minimal_pair(self) -> tuple[IsometryClassKey, IsometryClassKey] | None:
        if not self.families:
            return None
        fam = min(self.families, key=lambda f: f[0])
        return fam[0], fam[1]

    def minimal_pair_where(self, pred) -> tuple[IsometryClassKey, IsometryClassKey] | None:
        """Smallest key satisfying ``pred`` with its smallest partner also satisfying it."""
        best = None
        for fam in self.families:
            ok = [k for k in fam if pred(k)]
            if len(ok) >= 2 and (best is None or ok[0] < best[0]):
                best = (ok[0], ok[1])
        return best

    def to_dict(self) -> dict:
        return {
            "n": self.n, "q": self.q, "mode": self.mode, "classes": self.classes,
            "prefix": self.prefix, "cutoff": self.cutoff,
            "families": [[list(k.canonical_s) for k in fam] for fam in self.families],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FamilyReport":
        fams = [[IsometryClassKey(d["q"], tuple(s)) for s in fam] for fam in d["families"]]
        return cls(d["n"], d["q"], d["mode"], d["classes"], fams, d.get("prefix", 0), d.get("cutoff", 0))


def _split(groups: list[np.ndarray], sig: np.ndarray) -> list[np.ndarray]:
    out = []
    for g in groups:
        buckets: dict[bytes, list[int]] = {}
        for i in g.tolist():
            buckets.setdefault(sig[i].tobytes(), []).append(i)
        out.extend(np.array(b) for b in buckets.values() if len(b) > 1)
    return out


def group_isospectral(q: int, n: int, keys: list[IsometryClassKey], prefix: int | None = None,
                      cutoff: int | None = None) -> list[list[IsometryClassKey]]:
    """Partition ``keys`` (all with effective order q) into isospectral families of size >= 2.

    A cheap shell-count prefix modulo one prime buckets the classes; a split
    there is already a spectral difference.  Buckets with several members are
    then compared at ``cutoff`` (default: the certified cutoff) modulo a set of
    primes whose product exceeds every possible shell count.
    """
    if len(keys) < 2:
        return []
    rows = np.array([k.canonical_s for k in keys], dtype=np.int64)
    K = isospectral_cutoff(q, n) if cutoff is None else cutoff
    P = min(default_prefix(n) if prefix is None else prefix, K)
    p0 = theta.primes_for_bound(q, 1)[0]
    groups = _split([np.arange(len(keys))], theta.counts_mod_p(q, rows, P, p0))
    for p in theta.primes_for_bound(q, theta.full_lattice_count(n, K)):
        if not groups:
            break
        members = np.concatenate(groups)
        sig = np.zeros((len(keys), K + 1), dtype=np.int64)
        sig[members] = theta.counts_mod_p(q, rows[members], K, p)
        groups = _split(groups, sig)
    fams = [sorted(keys[i] for i in g.tolist()) for g in groups]
    return sorted(fams)


def find_isospectral_families(n: int, q: int, mode: str = MANIFOLD, prefix: int | None = None,
                              cutoff: int | None = None) -> FamilyReport:
    keys = enumerate_classes(n, q, mode)
    fams = group_isospectral(q, n, keys, prefix, cutoff)
    return FamilyReport(n, q, mode, len(keys), fams, prefix or default_prefix(n),
                        isospectral_cutoff(q, n) if cutoff is None else cutoff)


class ReportCache:
    """Per-(mode, n, q) family reports stored as JSON files; reruns reuse them."""

    def __init__(self, workdir: str | Path | None):
        self.workdir = Path(workdir) if workdir else None
        if self.workdir:
            self.workdir.mkdir(parents=True, exist_ok=True)

    def _path(self, mode, n, q):
        return self.workdir / f"{mode}_n{n}_q{q}.json"

    def get(self, n: int, q: int, mode: str = MANIFOLD) -> FamilyReport:
        if self.workdir:
            path = self._path(mode, n, q)
            if path.exists():
                return FamilyReport.from_dict(json.loads(path.read_text()))
        rep = find_isospectral_families(n, q, mode)
        if self.workdir:
            tmp = self._path(mode, n, q).with_suffix(".tmp")
            tmp.write_text(json.dumps(rep.to_dict()))
            tmp.replace(self._path(mode, n, q))
        return rep


def _report_job(args):
    n, q, mode, workdir = args
    return ReportCache(workdir).get(n, q, mode)


def family_reports(cells, mode: str = MANIFOLD, jobs: int = 1, workdir=None) -> dict[tuple[int, int], FamilyReport]:
    """Reports for every (n, q) cell; order of evaluation never affects the result."""
    cells = sorted(set(cells))
    args = [(n, q, mode, workdir) for n, q in cells]
    if jobs > 1 and len(args) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_report_job, args))
    else:
        reports = [_report_job(a) for a in args]
    return dict(zip(cells, reports))


# ---------------------------------------------------------------- irreducibility, extension

def is_irreducible(L: LensParams) -> bool:
    """True iff some unit m avoids every +-s_i, i.e. L is not L(q; s0 + t(q))."""
    if L.q < 3:
        raise LensError("irreducibility undefined for q < 3")
    hit = {normalize_sign(x, L.q) for x in L.s}
    return any(t not in hit for t in unit_representatives(L.q).reps)


def extend_params(L: LensParams, r: int) -> LensParams:
    if L.q < 3:
        raise LensError("extension needs q >= 3")
    if r < 0:
        raise ValueError("r must be nonnegative")
    return make_lens(L.q, list(L.s) + list(unit_representatives(L.q).reps) * r)


# ---------------------------------------------------------------- tables

@dataclass(frozen=True)
class Table1Row:
    q: int
    q0: int
    n: int
    first: IsometryClassKey
    second: IsometryClassKey


def table1_row(report: FamilyReport) -> Table1Row | None:
    """Lexicographically minimal irreducible class with an irreducible isospectral partner."""
    pair = report.minimal_pair_where(lambda k: is_irreducible(k.lens()))
    if pair is None:
        return None
    return Table1Row(report.q, totient(report.q) // 2, report.n, *pair)


def table1(nmax: int = 14, qmax: int = 23, nmin: int = 3, qmin: int = 3, jobs: int = 1, workdir=None) -> list[Table1Row]:
    cells = [(n, q) for q in range(qmin, qmax + 1) for n in range(nmin, nmax + 1)]
    reports = family_reports(cells, MANIFOLD, jobs, workdir)
    rows = [table1_row(reports[c]) for c in sorted(cells, key=lambda c: (c[1], c[0]))]
    return [r for r in rows if r is not None]


NONE, PAIR, PAIR_HIGHEST = "none", "pair", "pair_highest"
LOW_ORDER_BOUND = 24  # below this every space form with an isospectral partner is a lens space


def existence_table(n_range, q_range, mode: str = MANIFOLD, jobs: int = 1, workdir=None) -> dict[tuple[int, int], str]:
    """Grid cell per (n, q): none, pair, or pair_highest.

    ``pair_highest`` marks the smallest q with a pair in row n, provided every
    smaller order was part of the sweep and q is below 24.
    """
    n_range, q_range = list(n_range), sorted(q_range)
    cells = [(n, q) for n in n_range for q in q_range]
    reports = family_reports(cells, mode, jobs, workdir)
    grid = {c: PAIR if reports[c].families else NONE for c in cells}
    swept = set(q_range)
    for n in n_range:
        with_pair = [q for q in q_range if grid[(n, q)] == PAIR]
        if with_pair:
            q = with_pair[0]
            if q < LOW_ORDER_BOUND and all(p in swept for p in range(1, q)):
                grid[(n, q)] = PAIR_HIGHEST
    return grid


def congruence_condition(n: int) -> bool:
    """Whether n falls in one of the six residue families covered by known small pairs."""
    if n < 3:
        raise ValueError("n must be at least 3")
    return (n % 4 == 1
            or n % 5 in (1, 2, 3)
            or n % 6 in (1, 2, 3, 4)
            or n % 8 in (2, 3, 4, 5, 6)
            or n % 9 in (2, 3, 4, 5, 6, 7)
            or n % 11 in (2, 3, 4, 5, 6, 7, 8, 9))


@dataclass(frozen=True)
class DensityReport:
    n: int
    x: int
    unique_count: int
    nonunique_count: int
    total_count: int
    qmin: int

    @property
    def density(self) -> Fraction:
        return Fraction(self.unique_count, self.total_count)

    def density_str(self, places: int = 5) -> str:
        d = Decimal(self.density.numerator) / Decimal(self.density.denominator)
        return str(d.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP))

    def csv_row(self) -> str:
        # third column carries the non-unique count, as in the published table
        return f"{self.n},{self.x},{self.nonunique_count},{self.total_count},{self.density_str()}"


DENSITY_QMIN = 1


def density(n: int, x: int, jobs: int = 1, workdir=None, qmin: int = DENSITY_QMIN) -> DensityReport:
    reports = family_reports([(n, q) for q in range(qmin, x + 1)], MANIFOLD, jobs, workdir)
    total = sum(r.classes for r in reports.values())
    non_unique = sum(r.members for r in reports.values())
    return DensityReport(n, x, total - non_unique, non_unique, total, qmin)
