"""Exact integer and rational lattice kernels: Smith and Hermite forms, integer
kernels, Fourier-Motzkin feasibility, rational polyhedral cones, faces,
goodness and lens-space arithmetic.

Everything here uses Python ints and ``fractions.Fraction``; no floating point
enters a goodness decision.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Optional

from ..errors import EmptyInterior, NotCoprime, NotPrimitive


def _copy(A):
    return [[int(v) for v in row] for row in A]


def _shape(A):
    return len(A), (len(A[0]) if A else 0)


def transpose(A):
    return [list(col) for col in zip(*A)]


def matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


# Smith normal form

def smith_invariants(A):
    """Invariant factors ``d_1 | d_2 | ...`` of an integer matrix.

    Returns ``min(rows, cols)`` nonnegative entries; zeros mark rank deficiency.
    """
    M = _copy(A)
    m, n = _shape(M)
    out = []
    for t in range(min(m, n)):
        while True:
            piv = _min_entry(M, t, m, n)
            if piv is None:
                out += [0] * (min(m, n) - t)
                return out
            i, j = piv
            M[t], M[i] = M[i], M[t]
            for row in M:
                row[t], row[j] = row[j], row[t]
            p = M[t][t]
            dirty = False
            for i in range(t + 1, m):
                q = M[i][t] // p
                if q:
                    M[i] = [a - q * b for a, b in zip(M[i], M[t])]
                dirty |= M[i][t] != 0
            for j in range(t + 1, n):
                q = M[t][j] // p
                if q:
                    for row in M:
                        row[j] -= q * row[t]
                dirty |= M[t][j] != 0
            if dirty:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if M[i][j] % p), None)
            if bad is None:
                break
            M[t] = [a + b for a, b in zip(M[t], M[bad[0]])]
        out.append(abs(M[t][t]))
    return out


def _min_entry(M, t, m, n):
    best = None
    for i in range(t, m):
        for j in range(t, n):
            v = abs(M[i][j])
            if v and (best is None or v < best[0]):
                best = (v, i, j)
    return None if best is None else best[1:]


def _egcd(a, b):
    """``(g, s, t)`` with ``s a + t b = g = gcd(a, b) >= 0``."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def column_hermite(A):
    """``(H, U, rank)`` with ``A U = H`` for unimodular ``U``.

    The first ``rank`` columns of ``H`` are in column echelon form with positive
    pivots taken at the smallest possible row indices; the remaining columns are
    zero, so the last ``cols - rank`` columns of ``U`` span the integer kernel.
    """
    H = _copy(A)
    m, n = _shape(H)
    U = identity(n)
    col = 0
    for i in range(m):
        if col == n:
            break
        for j in range(col + 1, n):
            a, b = H[i][col], H[i][j]
            if b == 0:
                continue
            g, s, t = _egcd(a, b)
            x, y = a // g, b // g
            for M in (H, U):
                for row in M:
                    c, d = row[col], row[j]
                    row[col], row[j] = s * c + t * d, -y * c + x * d
        if H[i][col] == 0:
            continue
        if H[i][col] < 0:
            for M in (H, U):
                for row in M:
                    row[col] = -row[col]
        p = H[i][col]
        for j in range(col):
            q = H[i][j] // p
            if q:
                for M in (H, U):
                    for row in M:
                        row[j] -= q * row[col]
        col += 1
    return H, U, col


def row_hermite(B):
    """Row-style Hermite normal form (positive pivots, reduced above), zero rows dropped."""
    H, _, r = column_hermite(transpose(B))
    return transpose(H)[:r]


def integer_kernel(A):
    """Canonical integer basis of ``{x in Z^n : A x = 0}`` as a list of row vectors."""
    _, U, r = column_hermite(A)
    n = _shape(A)[1] if A else 0
    basis = [[U[i][j] for i in range(n)] for j in range(r, n)]
    return row_hermite(basis) if basis else []


def rank(A):
    return column_hermite(A)[2] if A and A[0] else 0


def rational_inverse(H):
    n = len(H)
    M = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(H)]
    for c in range(n):
        p = next(r for r in range(c, n) if M[r][c] != 0)
        M[c], M[p] = M[p], M[c]
        pv = M[c][c]
        M[c] = [v / pv for v in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return [row[n:] for row in M]


def is_zbasis(vectors) -> tuple:
    """Whether ``vectors`` form a Z-basis of the lattice of their real span.

    Returns ``(flag, invariant factors)`` of the matrix with the vectors as columns.
    """
    cols = transpose([list(v) for v in vectors])
    inv = smith_invariants(cols)
    return all(d == 1 for d in inv), tuple(inv)


# rational feasibility

def feasible_point(equalities, inequalities, nvars):
    """A rational ``x`` with ``a.x = b`` for each ``(a, b)`` in ``equalities`` and
    ``a.x >= b`` for each ``(a, b)`` in ``inequalities``, or None.

    Equalities are eliminated by exact Gaussian elimination; the remaining
    inequalities by Fourier-Motzkin with a back-substituted witness.
    """
    eqs = [([Fraction(v) for v in a], Fraction(b)) for a, b in equalities]
    ineqs = [([Fraction(v) for v in a], Fraction(b)) for a, b in inequalities]
    # x_p = c + sum coef_f x_f for pivot variables
    subst = {}
    for a, b in eqs:
        a, b = _substitute(a, b, subst)
        p = next((i for i, v in enumerate(a) if v != 0), None)
        if p is None:
            if b != 0:
                return None
            continue
        expr = ([-v / a[p] if i != p else Fraction(0) for i, v in enumerate(a)], b / a[p])
        for q, (coef, c) in list(subst.items()):
            if coef[p] != 0:
                k = coef[p]
                subst[q] = ([u + k * w if i != p else Fraction(0) for i, (u, w) in enumerate(zip(coef, expr[0]))],
                            c + k * expr[1])
        subst[p] = expr
    reduced = [_substitute(a, b, subst) for a, b in ineqs]
    free = [i for i in range(nvars) if i not in subst]
    x = _fourier_motzkin(reduced, free, nvars)
    if x is None:
        return None
    for p, (coef, c) in subst.items():
        x[p] = c + sum(k * x[i] for i, k in enumerate(coef) if k != 0)
    return x


def _substitute(a, b, subst):
    a = list(a)
    for p, (coef, c) in subst.items():
        k = a[p]
        if k != 0:
            a[p] = Fraction(0)
            a = [u + k * w for u, w in zip(a, coef)]
            b = b - k * c
    return a, b


def _fourier_motzkin(ineqs, order, nvars):
    stages = []
    system = _dedupe(ineqs)
    for var in reversed(order):
        stages.append((var, system))
        pos = [(a, b) for a, b in system if a[var] > 0]
        neg = [(a, b) for a, b in system if a[var] < 0]
        rest = [(a, b) for a, b in system if a[var] == 0]
        for ap, bp in pos:
            for an, bn in neg:
                kp, kn = ap[var], -an[var]
                a = [kn * u + kp * w for u, w in zip(ap, an)]
                a[var] = Fraction(0)
                rest.append((a, kn * bp + kp * bn))
        system = _dedupe(rest)
    if any(b > 0 for a, b in system):  # all coefficients are zero here
        return None
    x = [Fraction(0)] * nvars
    for var, sysv in reversed(stages):
        lo, hi = None, None
        for a, b in sysv:
            k = a[var]
            if k == 0:
                continue
            rhs = (b - sum(u * x[i] for i, u in enumerate(a) if i != var)) / k
            if k > 0:
                lo = rhs if lo is None else max(lo, rhs)
            else:
                hi = rhs if hi is None else min(hi, rhs)
        if lo is not None and hi is not None:
            x[var] = (lo + hi) / 2
        elif lo is not None:
            x[var] = lo
        elif hi is not None:
            x[var] = hi
    return x


def _dedupe(system):
    seen, out = set(), []
    for a, b in system:
        if all(v == 0 for v in a):
            if b > 0:
                return [(a, b)]
            continue
        # scale so the first nonzero coefficient has absolute value 1
        k = abs(next(v for v in a if v != 0))
        key = (tuple(v / k for v in a), b / k)
        if key not in seen:
            seen.add(key)
            out.append((list(key[0]), key[1]))
    return out


# cones

@dataclass(frozen=True)
class ConeSpec:
    """``C = {eta : <eta, v_i> >= 0 for all i}`` for primitive integer normals ``v_i``."""

    normals: tuple

    def __post_init__(self):
        normals = tuple(tuple(int(v) for v in vec) for vec in self.normals)
        if not normals:
            raise ValueError("a cone needs at least one normal")
        if len({len(v) for v in normals}) != 1:
            raise ValueError("normals must have equal length")
        for v in normals:
            g = 0
            for c in v:
                g = gcd(g, c)
            if g != 1:
                raise NotPrimitive(f"normal {v} is not primitive (gcd {g})")
        object.__setattr__(self, "normals", normals)

    @property
    def n(self):
        return len(self.normals[0])

    @property
    def d(self):
        return len(self.normals)

    def contains(self, eta, tol=0):
        return all(sum(a * b for a, b in zip(eta, v)) >= -tol for v in self.normals)

    def interior_point(self):
        return feasible_point([], [(v, 1) for v in self.normals], self.n)

    def redundant_normals(self):
        """Indices of normals implied by the others (so the set is not minimal)."""
        out = []
        for i, v in enumerate(self.normals):
            others = [(w, 0) for j, w in enumerate(self.normals) if j != i]
            if feasible_point([], others + [([-c for c in v], 1)], self.n) is None:
                out.append(i)
        return out

    @property
    def is_minimal(self):
        return not self.redundant_normals()


@dataclass
class FaceReport:
    active_set: tuple  # 0-based indices of the normals vanishing on the face
    dimension: int
    invariants: tuple
    zbasis: bool
    witness: tuple  # rational point in the relative interior of the face

    @property
    def codimension(self):
        return len(self.witness) - self.dimension

    def label(self):
        return "{" + ",".join(str(i + 1) for i in self.active_set) + "}"


def cone_faces(C: ConeSpec, include_apex=False):
    """All faces of ``C`` of codimension ``0 < k < n``, found by exact feasibility."""
    if C.interior_point() is None:
        raise EmptyInterior(f"cone with normals {C.normals} has empty interior")
    faces = []
    for size in range(1, C.d + 1):
        for J in combinations(range(C.d), size):
            vecs = [C.normals[j] for j in J]
            r = rank(transpose(vecs))
            if r >= C.n and not include_apex:
                continue
            eqs = [(v, 0) for v in vecs]
            ineqs = [(C.normals[i], 1) for i in range(C.d) if i not in J]
            w = feasible_point(eqs, ineqs, C.n)
            if w is None:
                continue
            flag, inv = is_zbasis(vecs)
            faces.append(FaceReport(J, C.n - r, inv, flag, tuple(w)))
    return faces


@dataclass
class GoodReport:
    good: bool
    witness: Optional[FaceReport]
    faces: list = field(default_factory=list)


def is_good(C: ConeSpec) -> GoodReport:
    faces = cone_faces(C)
    bad = next((f for f in faces if not f.zbasis), None)
    return GoodReport(bad is None, bad, faces)


def extreme_rays(C: ConeSpec):
    """Rational generators of the one-dimensional faces (the interior point when n = 1)."""
    if C.n == 1:
        return [tuple(C.interior_point())]
    return [f.witness for f in cone_faces(C) if f.dimension == 1]


# lens spaces

@dataclass(frozen=True)
class LensSpace:
    p: int
    q: int
    normalized: tuple
    aliases: tuple


KNOWN_LENS = {
    (0, 1): ("S^1 x S^2", "𝕊¹×𝕊²"),
    (1, 0): ("S^3", "𝕊³"),
    (2, 1): ("RP^3", "ℝP³"),
}


def lens_space_info(p: int, q: int) -> LensSpace:
    """Normalised representative of ``L(p, q)`` (``q`` up to sign and inversion mod ``p``)."""
    p, q = int(p), int(q)
    if gcd(p, q) != 1:
        raise NotCoprime(f"gcd({p}, {q}) = {gcd(p, q)}")
    P = abs(p)
    if P == 0:
        norm = (0, 1)
    elif P == 1:
        norm = (1, 0)
    else:
        r = q % P
        inv = pow(r, -1, P)
        norm = (P, min(r, (-r) % P, inv, (-inv) % P))
    return LensSpace(p, q, norm, KNOWN_LENS.get(norm, ()))
