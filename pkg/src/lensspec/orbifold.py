"""Finite integer matrix groups acting on spheres: closure, characteristic data, spectra."""

from __future__ import annotations

import itertools
import random
import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Matrix = tuple[tuple[int, ...], ...]


class InvariantViolation(RuntimeError):
    """An internal consistency check failed; this indicates a bug, not bad input."""


# ---------------------------------------------------------------- matrices

def identity(m: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(m)) for i in range(m))


def matmul(A: Matrix, B: Matrix) -> Matrix:
    cols = list(zip(*B))
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in cols) for row in A)


def transpose(A: Matrix) -> Matrix:
    return tuple(zip(*A))


def block_diag(*blocks: Sequence[Sequence[int]]) -> Matrix:
    m = sum(len(b) for b in blocks)
    out = [[0] * m for _ in range(m)]
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, v in enumerate(row):
                out[off + i][off + j] = int(v)
        off += len(b)
    return tuple(tuple(r) for r in out)


def is_orthogonal(A: Matrix) -> bool:
    return matmul(A, transpose(A)) == identity(len(A))


def charpoly(A: Matrix) -> tuple[int, ...]:
    """Coefficients of det(xI - A), constant term first (Faddeev-LeVerrier, exact)."""
    m = len(A)
    coeffs = [0] * (m + 1)
    coeffs[m] = 1
    M = identity(m)
    for k in range(1, m + 1):
        AM = matmul(A, M)
        tr = sum(AM[i][i] for i in range(m))
        c, rem = divmod(-tr, k)
        if rem:
            raise InvariantViolation("non-integral characteristic polynomial")
        coeffs[m - k] = c
        M = tuple(tuple(AM[i][j] + (c if i == j else 0) for j in range(m)) for i in range(m))
    return tuple(coeffs)


def determinant(A: Matrix) -> int:
    c = charpoly(A)[0]
    return c if len(A) % 2 == 0 else -c


def rank(rows: Iterable[Sequence]) -> int:
    mat = [[Fraction(x) for x in r] for r in rows]
    rk, col = 0, 0
    ncols = len(mat[0]) if mat else 0
    while rk < len(mat) and col < ncols:
        piv = next((i for i in range(rk, len(mat)) if mat[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        mat[rk], mat[piv] = mat[piv], mat[rk]
        for i in range(len(mat)):
            if i != rk and mat[i][col] != 0:
                f = mat[i][col] / mat[rk][col]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[rk])]
        rk += 1
        col += 1
    return rk


# ---------------------------------------------------------------- signed permutations

@dataclass(frozen=True)
class SignedPermMatrix:
    """Row i has its single nonzero entry sign[i] in column perm[i] (0-based)."""

    perm: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.perm) != list(range(len(self.perm))) or len(self.signs) != len(self.perm):
            raise ValueError("not a signed permutation")
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError("signs must be +-1")

    @property
    def size(self) -> int:
        return len(self.perm)

    @classmethod
    def from_matrix(cls, A: Matrix) -> "SignedPermMatrix":
        perm, signs = [], []
        for row in A:
            nz = [(j, v) for j, v in enumerate(row) if v]
            if len(nz) != 1 or nz[0][1] not in (1, -1):
                raise ValueError("not a signed permutation matrix")
            perm.append(nz[0][0])
            signs.append(nz[0][1])
        return cls(tuple(perm), tuple(signs))

    @classmethod
    def identity(cls, m: int) -> "SignedPermMatrix":
        return cls(tuple(range(m)), (1,) * m)

    def matrix(self) -> Matrix:
        m = self.size
        return tuple(tuple(self.signs[i] if j == self.perm[i] else 0 for j in range(m)) for i in range(m))

    def __matmul__(self, other: "SignedPermMatrix") -> "SignedPermMatrix":
        return SignedPermMatrix.from_matrix(matmul(self.matrix(), other.matrix()))

    def inverse(self) -> "SignedPermMatrix":
        return SignedPermMatrix.from_matrix(transpose(self.matrix()))

    def __str__(self) -> str:
        vals = [str(s * (p + 1)) for p, s in zip(self.perm, self.signs)]
        pairs = [" ".join(vals[i:i + 2]) for i in range(0, len(vals), 2)]
        return "(" + " | ".join(pairs) + ")"

    @classmethod
    def parse(cls, text: str) -> "SignedPermMatrix":
        """Inverse of str(): signed 1-based column images, '|' separators optional."""
        body = text.strip()
        if not (body.startswith("(") and body.endswith(")")):
            raise ValueError(f"malformed signed permutation {text!r}")
        toks = re.findall(r"-?\d+", body.replace("|", " "))
        vals = [int(t) for t in toks]
        if not vals or 0 in vals:
            raise ValueError(f"malformed signed permutation {text!r}")
        return cls(tuple(abs(v) - 1 for v in vals), tuple(1 if v > 0 else -1 for v in vals))


def _as_matrix(g) -> Matrix:
    if isinstance(g, SignedPermMatrix):
        return g.matrix()
    return tuple(tuple(int(x) for x in row) for row in g)


# ---------------------------------------------------------------- groups

@dataclass(frozen=True)
class FiniteOrthogonalGroup:
    """A finite matrix group, elements in canonical (sorted) order, identity first."""

    elements: tuple[Matrix, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def size(self) -> int:
        return len(self.elements[0])

    def __contains__(self, A) -> bool:
        return _as_matrix(A) in set(self.elements)

    def is_signed_permutation_group(self) -> bool:
        try:
            for g in self.elements:
                SignedPermMatrix.from_matrix(g)
        except ValueError:
            return False
        return True

    def serialize(self) -> list[str]:
        return [str(SignedPermMatrix.from_matrix(g)) for g in self.elements]

    @classmethod
    def deserialize(cls, items: Sequence[str]) -> "FiniteOrthogonalGroup":
        gens = [SignedPermMatrix.parse(s) for s in items]
        return generate_group(gens, max_order=max(len(gens), 1) * 64)


def generate_group(generators: Sequence, max_order: int = 10_000) -> FiniteOrthogonalGroup:
    gens = [_as_matrix(g) for g in generators]
    if not gens:
        raise ValueError("need at least one generator")
    m = len(gens[0])
    if any(len(g) != m or any(len(r) != m for r in g) for g in gens):
        raise ValueError("generators must be square and of one size")
    e = identity(m)
    seen = {e}
    frontier = [e]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = matmul(x, g)
                if y not in seen:
                    seen.add(y)
                    if len(seen) > max_order:
                        raise ValueError("group too large")
                    nxt.append(y)
        frontier = nxt
    rest = sorted(seen - {e})
    return FiniteOrthogonalGroup((e, *rest))


def trivial_group(m: int) -> FiniteOrthogonalGroup:
    return FiniteOrthogonalGroup((identity(m),))


def _perm_matrix(images: Sequence[int], m: int) -> Matrix:
    """Permutation matrix sending e_j to e_images[j] (0-based), on the first len(images) coordinates."""
    full = list(images) + list(range(len(images), m))
    return tuple(tuple(int(full[j] == i) for j in range(m)) for i in range(m))


def gassmann_pair(d: int) -> tuple[FiniteOrthogonalGroup, FiniteOrthogonalGroup]:
    """The two Klein four-groups of double transpositions, on 4 and on 6 letters, inside SO(d+1)."""
    if d < 5:
        raise ValueError("d must be at least 5")
    m = d + 1
    g1 = [_perm_matrix(p, m) for p in ([1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0])]
    g2 = [_perm_matrix(p, m) for p in ([1, 0, 3, 2, 4, 5], [1, 0, 2, 3, 5, 4], [0, 1, 3, 2, 5, 4])]
    return generate_group(g1, 4), generate_group(g2, 4)


# ---------------------------------------------------------------- invariants

@dataclass(frozen=True)
class ConjugacyFingerprint:
    polys: tuple[tuple[tuple[int, ...], int], ...]

    @property
    def size(self) -> int:
        return sum(c for _, c in self.polys)

    def as_counter(self) -> Counter:
        return Counter(dict(self.polys))


def char_fingerprint(G: FiniteOrthogonalGroup) -> ConjugacyFingerprint:
    counts = Counter(charpoly(g) for g in G.elements)
    return ConjugacyFingerprint(tuple(sorted(counts.items())))


def almost_conjugate(G1: FiniteOrthogonalGroup, G2: FiniteOrthogonalGroup) -> bool:
    if G1.size != G2.size:
        raise ValueError("groups act on spaces of different dimension")
    return char_fingerprint(G1) == char_fingerprint(G2)


def fixed_space_dim(G: FiniteOrthogonalGroup) -> int:
    """Dimension of the subspace fixed pointwise by every element."""
    m = G.size
    rows = [tuple(g[i][j] - (i == j) for j in range(m)) for g in G.elements for i in range(m)]
    return m - rank(rows)


def fixed_coordinate_count(G: FiniteOrthogonalGroup) -> int:
    """Number of standard basis vectors fixed by every element.

    Basis dependent, so it is not a conjugacy invariant; two conjugate groups
    can give different values.
    """
    return sum(all(g[i][j] == (i == j) for g in G.elements for i in range(G.size)) for j in range(G.size))


# ---------------------------------------------------------------- conjugacy

def _generating_set(G: FiniteOrthogonalGroup) -> list[Matrix]:
    gens: list[Matrix] = []
    span = {G.elements[0]}
    for g in G.elements[1:]:
        if g not in span:
            gens.append(g)
            span = set(generate_group(gens, G.order).elements)
        if len(span) == G.order:
            break
    return gens


def _isomorphisms(G1: FiniteOrthogonalGroup, G2: FiniteOrthogonalGroup):
    """Yield char-poly preserving isomorphisms G1 -> G2 as dicts."""
    gens = _generating_set(G1)
    if not gens:
        yield {G1.elements[0]: G2.elements[0]}
        return
    cp2 = {g: charpoly(g) for g in G2.elements}
    choices = [[h for h in G2.elements if cp2[h] == charpoly(g)] for g in gens]
    for images in itertools.product(*choices):
        phi = {G1.elements[0]: G2.elements[0]}
        frontier = [G1.elements[0]]
        ok = True
        while frontier and ok:
            nxt = []
            for x in frontier:
                for g, h in zip(gens, images):
                    y, z = matmul(x, g), matmul(phi[x], h)
                    if y in phi:
                        if phi[y] != z:
                            ok = False
                            break
                    else:
                        phi[y] = z
                        nxt.append(y)
                if not ok:
                    break
            frontier = nxt
        if ok and len(set(phi.values())) == G1.order and all(charpoly(k) == cp2[v] for k, v in phi.items()):
            yield phi


def _inverse(A: Matrix) -> Matrix:
    # group elements have finite order, so the inverse is a positive power
    P, prev = A, identity(len(A))
    while P != identity(len(A)):
        prev, P = P, matmul(P, A)
    return prev


@dataclass(frozen=True)
class ConjugacyCertificate:
    """An invertible integer T with T g = phi(g) T for every g in the first group."""

    T: Matrix
    images: tuple[tuple[Matrix, Matrix], ...]
    orientation_adjustable: bool

    def verify(self) -> bool:
        return rank(self.T) == len(self.T) and all(matmul(self.T, g) == matmul(h, self.T) for g, h in self.images)


def conjugacy_certificate(G1: FiniteOrthogonalGroup, G2: FiniteOrthogonalGroup,
                          probes: int = 8) -> ConjugacyCertificate | None:
    """Search for an intertwiner built by group averaging.

    Returns None when no char-poly preserving isomorphism admits an invertible
    averaged intertwiner among the probes tried.  For orthogonal groups an
    invertible intertwiner implies conjugacy by an orthogonal matrix; if the
    first group fixes a nonzero vector, the reflection in it commutes with the
    group, so the conjugator may also be chosen with determinant +1.
    """
    if G1.order != G2.order or G1.size != G2.size or not almost_conjugate(G1, G2):
        return None
    m = G1.size
    for phi in _isomorphisms(G1, G2):
        rng = random.Random(m)
        for _ in range(probes):
            X = tuple(tuple(rng.randint(-3, 3) for _ in range(m)) for _ in range(m))
            T = [[0] * m for _ in range(m)]
            for g, h in phi.items():
                term = matmul(matmul(h, X), _inverse(g))
                for i in range(m):
                    for j in range(m):
                        T[i][j] += term[i][j]
            T = tuple(tuple(r) for r in T)
            if rank(T) == m:
                cert = ConjugacyCertificate(T, tuple(sorted(phi.items())), fixed_space_dim(G1) > 0)
                if not cert.verify():
                    raise InvariantViolation("averaged matrix failed to intertwine")
                return cert
    return None


DISTINGUISHED, CONJUGATE, UNDECIDED = "distinguished", "conjugate", "undecided"


def conjugacy_status(G1: FiniteOrthogonalGroup, G2: FiniteOrthogonalGroup) -> tuple[str, str]:
    """Classify a pair as distinguished (with the separating invariant), conjugate, or undecided."""
    if G1.size != G2.size:
        return DISTINGUISHED, "dimension"
    if G1.order != G2.order:
        return DISTINGUISHED, "order"
    if char_fingerprint(G1) != char_fingerprint(G2):
        return DISTINGUISHED, "characteristic polynomials"
    if fixed_space_dim(G1) != fixed_space_dim(G2):
        return DISTINGUISHED, "fixed space dimension"
    cert = conjugacy_certificate(G1, G2)
    if cert is not None:
        return CONJUGATE, "special orthogonal" if cert.orientation_adjustable else "orthogonal"
    return UNDECIDED, ""


# ---------------------------------------------------------------- spectra

def _inverse_series(den: Sequence[int], K: int) -> list[int]:
    """Power series of 1/den up to z^K; den[0] must be 1."""
    if den[0] != 1:
        raise InvariantViolation("denominator must have constant term 1")
    out = [0] * (K + 1)
    for k in range(K + 1):
        acc = int(k == 0)
        for i in range(1, min(k, len(den) - 1) + 1):
            acc -= den[i] * out[k - i]
        out[k] = acc
    return out


def orbifold_spectrum_slice(G: FiniteOrthogonalGroup, K: int) -> list[int]:
    """dim H_k^G for k = 0..K, from (1 - z^2)/|G| * sum_g 1/det(I - g z)."""
    if K < 0:
        raise ValueError("K must be nonnegative")
    total = [0] * (K + 1)
    for poly, count in char_fingerprint(G).polys:
        # det(I - g z) is the reversed characteristic polynomial
        series = _inverse_series(tuple(reversed(poly)), K)
        for k in range(K + 1):
            total[k] += count * series[k]
    out = []
    for k in range(K + 1):
        num = total[k] - (total[k - 2] if k >= 2 else 0)
        dim, rem = divmod(num, G.order)
        if rem or dim < 0:
            raise InvariantViolation(f"non-integral or negative multiplicity at degree {k}")
        out.append(dim)
    return out


# ---------------------------------------------------------------- cyclic rotation groups

_BLOCKS = {
    1: ((1, 0), (0, 1)),
    2: ((-1, 0), (0, -1)),
    3: ((0, -1), (1, -1)),
    4: ((0, -1), (1, 0)),
    6: ((1, -1), (1, 0)),
}


def rotation_block(q: int, s: int) -> Matrix:
    """Integer 2x2 matrix with the eigenvalues of rotation by 2 pi s / q, for q in 1, 2, 3, 4, 6."""
    if q not in _BLOCKS:
        raise ValueError("q must be one of 1, 2, 3, 4, 6")
    M = identity(2)
    for _ in range(s % q):
        M = matmul(M, _BLOCKS[q])
    return M


def lens_group(q: int, s: Sequence[int]) -> FiniteOrthogonalGroup:
    """The cyclic group generated by the block rotation diag(R^{s_1}, ..., R^{s_n})."""
    gen = block_diag(*(rotation_block(q, x) for x in s))
    return generate_group([gen], max_order=q)


def small_order_groups(d: int, order: int) -> list[tuple[int, FiniteOrthogonalGroup]]:
    """One group per O(d+1)-conjugacy class of subgroups of order 2 or 3, keyed by m."""
    m_total = d + 1
    out = []
    if order == 2:
        for m in range(1, m_total + 1):
            gen = block_diag(*([((-1,),)] * m), *([((1,),)] * (m_total - m)))
            out.append((m, generate_group([gen], 2)))
    elif order == 3:
        for m in range(1, m_total // 2 + 1):
            gen = block_diag(*([_BLOCKS[3]] * m), *([((1,),)] * (m_total - 2 * m)))
            out.append((m, generate_group([gen], 3)))
    else:
        raise ValueError("order must be 2 or 3")
    return out


def small_order_uniqueness(d: int, order: int, K: int) -> bool:
    """True iff the spectrum slices up to K separate all conjugacy classes of subgroups of this order."""
    if d < 1:
        raise ValueError("d must be positive")
    slices = [tuple(orbifold_spectrum_slice(G, K)) for _, G in small_order_groups(d, order)]
    return len(set(slices)) == len(slices)
