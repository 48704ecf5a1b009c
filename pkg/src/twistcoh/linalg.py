"""Exact dense linear algebra over the rationals and the integers.

Matrices are plain lists of rows.  Rational entries are ``Fraction``;
integer routines (Smith and Hermite normal forms, integer kernels) work on
Python ints.  Everything here is small-scale and exact, no pivoting
heuristics beyond "first nonzero".
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

Vector = list
Matrix = list

ZERO = Fraction(0)
ONE = Fraction(1)


def frac_matrix(rows: Sequence[Sequence], ncols: Optional[int] = None) -> Matrix:
    rows = [[Fraction(x) for x in row] for row in rows]
    if ncols is not None and not rows:
        return []
    return rows


def zeros(m: int, n: int, value=ZERO) -> Matrix:
    return [[value] * n for _ in range(m)]


def identity(n: int, one=ONE, zero=ZERO) -> Matrix:
    out = [[zero] * n for _ in range(n)]
    for i in range(n):
        out[i][i] = one
    return out


def transpose(M: Matrix, nrows: Optional[int] = None) -> Matrix:
    if not M:
        return [[] for _ in range(nrows or 0)]
    return [list(col) for col in zip(*M)]


def matmul(A: Matrix, B: Matrix, inner: Optional[int] = None, ncols: Optional[int] = None) -> Matrix:
    """A (m x k) times B (k x n).  ``ncols`` is needed when k == 0."""
    if not A:
        return []
    k = len(A[0])
    if k == 0:
        return [[ZERO] * (ncols or 0) for _ in A]
    n = len(B[0])
    Bt = list(zip(*B))
    out = []
    for row in A:
        nz = [(j, a) for j, a in enumerate(row) if a]
        out.append([sum((a * col[j] for j, a in nz), ZERO) if nz else ZERO for col in Bt])
    return out


def matvec(A: Matrix, v: Sequence) -> Vector:
    nz = [(j, x) for j, x in enumerate(v) if x]
    return [sum((row[j] * x for j, x in nz), ZERO) for row in A]


def is_zero_matrix(M: Matrix) -> bool:
    return all(not x for row in M for x in row)


def vec_add(u, v):
    return [a + b for a, b in zip(u, v)]


def vec_sub(u, v):
    return [a - b for a, b in zip(u, v)]


def vec_scale(c, v):
    return [c * a for a in v]


def hstack(*blocks: Matrix) -> Matrix:
    blocks = [b for b in blocks if b is not None]
    m = len(blocks[0])
    return [sum((list(b[i]) for b in blocks), []) for i in range(m)]


def vstack(*blocks: Matrix) -> Matrix:
    out = []
    for b in blocks:
        out.extend([list(r) for r in b])
    return out


def block_matrix(blocks, row_sizes, col_sizes) -> Matrix:
    """Assemble from a grid of blocks; ``None`` entries are zero blocks."""
    out = []
    for bi, m in enumerate(row_sizes):
        for i in range(m):
            row = []
            for bj, n in enumerate(col_sizes):
                blk = blocks[bi][bj]
                row.extend(blk[i] if blk is not None else [ZERO] * n)
            out.append(row)
    return out


# --------------------------------------------------------------------------
# rational elimination

def rref(M: Matrix, ncols: Optional[int] = None):
    """Reduced row echelon form.  Returns (nonzero rows, pivot columns)."""
    A = [[Fraction(x) for x in row] for row in M]
    if not A:
        return [], []
    n = len(A[0]) if ncols is None else ncols
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(A)) if A[i][c]), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        pv = A[r][c]
        if pv != 1:
            A[r] = [x / pv for x in A[r]]
        prow = A[r]
        nzc = [j for j in range(c, n) if prow[j]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                row = A[i]
                for j in nzc:
                    row[j] -= f * prow[j]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    return A[:r], pivots


def rank(M: Matrix) -> int:
    return len(rref(M)[1]) if M and M[0] else 0


def nullspace(M: Matrix, ncols: Optional[int] = None) -> list:
    """Basis of {x : Mx = 0}, one vector per free column (canonical)."""
    n = ncols if ncols is not None else (len(M[0]) if M else 0)
    if not M:
        return [[ONE if i == j else ZERO for i in range(n)] for j in range(n)]
    R, piv = rref(M, n)
    pset = set(piv)
    basis = []
    for f in range(n):
        if f in pset:
            continue
        v = [ZERO] * n
        v[f] = ONE
        for row, pc in zip(R, piv):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def solve(M: Matrix, b: Sequence, ncols: Optional[int] = None) -> Optional[Vector]:
    """One solution of Mx = b or None."""
    n = ncols if ncols is not None else (len(M[0]) if M else 0)
    if not M:
        return [ZERO] * n if all(not x for x in b) else None
    aug = [list(row) + [Fraction(bi)] for row, bi in zip(M, b)]
    R, piv = rref(aug, n + 1)
    if n in piv:
        return None
    x = [ZERO] * n
    for row, pc in zip(R, piv):
        x[pc] = row[n]
    return x


def solve_many(M: Matrix, B_cols: Sequence[Sequence], ncols: int):
    return [solve(M, b, ncols) for b in B_cols]


def inverse(M: Matrix) -> Matrix:
    n = len(M)
    aug = [list(map(Fraction, row)) + [ONE if i == j else ZERO for j in range(n)] for i, row in enumerate(M)]
    R, piv = rref(aug, 2 * n)
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in R]


def span_basis(vectors: Sequence[Sequence], dim: int) -> list:
    """RREF basis of the span (canonical)."""
    if not vectors:
        return []
    return rref([list(v) for v in vectors], dim)[0]


def reduce_mod(v: Sequence, basis_rref: Sequence, pivots: Sequence[int]) -> Vector:
    """Eliminate the pivot coordinates of an RREF basis from v."""
    v = list(v)
    for row, pc in zip(basis_rref, pivots):
        c = v[pc]
        if c:
            v = [a - c * b for a, b in zip(v, row)]
    return v


def pivots_of(rref_rows) -> list:
    out = []
    for row in rref_rows:
        out.append(next(j for j, x in enumerate(row) if x))
    return out


def in_span(v: Sequence, basis_rref, pivots) -> bool:
    return all(not x for x in reduce_mod(v, basis_rref, pivots))


def complement_basis(sub_rref, sub_pivots, vectors, dim) -> list:
    """Vectors from ``vectors`` extending sub to a basis of sub + span(vectors).

    Returned vectors are reduced modulo ``sub`` and jointly in RREF, so the
    choice is canonical given the two spans.
    """
    reduced = [reduce_mod(v, sub_rref, sub_pivots) for v in vectors]
    R, _ = rref(reduced, dim) if reduced else ([], [])
    return R


def common_denominator(rows) -> int:
    d = 1
    for row in rows:
        for x in row:
            x = Fraction(x)
            d = d * x.denominator // gcd(d, x.denominator)
    return d


# --------------------------------------------------------------------------
# integer normal forms

def _ext_gcd(a: int, b: int):
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _elim_coeffs(a: int, b: int):
    # plain elimination when a | b, so the pivot row is left untouched
    if a and b % a == 0:
        return a, 1, 0
    return _ext_gcd(a, b)


def smith_normal_form(M: Sequence[Sequence[int]], nrows: Optional[int] = None, ncols: Optional[int] = None):
    """Return (U, D, V) with U*M*V = D, U and V unimodular.

    D is diagonal with nonnegative entries d1 | d2 | ... followed by zeros.
    """
    A = [[int(x) for x in row] for row in M]
    m = len(A) if nrows is None else nrows
    n = (len(A[0]) if A else 0) if ncols is None else ncols
    if not A:
        A = [[0] * n for _ in range(m)]
    U = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    V = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    t = 0
    while t < min(m, n):
        # smallest nonzero entry in the trailing block as pivot
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            done = True
            # clear column t
            for i in range(t + 1, m):
                if A[i][t]:
                    a, b = A[t][t], A[i][t]
                    g, s, u = _elim_coeffs(a, b)
                    ag, bg = a // g, b // g
                    rt, ri = A[t], A[i]
                    A[t] = [s * x + u * y for x, y in zip(rt, ri)]
                    A[i] = [-bg * x + ag * y for x, y in zip(rt, ri)]
                    ut, ui = U[t], U[i]
                    U[t] = [s * x + u * y for x, y in zip(ut, ui)]
                    U[i] = [-bg * x + ag * y for x, y in zip(ut, ui)]
            # clear row t
            for j in range(t + 1, n):
                if A[t][j]:
                    done = False
                    a, b = A[t][t], A[t][j]
                    g, s, u = _elim_coeffs(a, b)
                    ag, bg = a // g, b // g
                    for row in A:
                        x, y = row[t], row[j]
                        row[t], row[j] = s * x + u * y, -bg * x + ag * y
                    for row in V:
                        x, y = row[t], row[j]
                        row[t], row[j] = s * x + u * y, -bg * x + ag * y
            if done and all(A[i][t] == 0 for i in range(t + 1, m)):
                break
        # divisibility: if some later entry is not divisible, add its row and retry
        bad = None
        piv = A[t][t]
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if A[i][j] % piv:
                    bad = i
                    break
            if bad is not None:
                break
        if bad is not None:
            A[t] = [x + y for x, y in zip(A[t], A[bad])]
            U[t] = [x + y for x, y in zip(U[t], U[bad])]
            continue
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return U, A, V


def invariant_factors(M, nrows=None, ncols=None) -> list:
    _, D, _ = smith_normal_form(M, nrows, ncols)
    out = []
    for i in range(min(len(D), len(D[0]) if D else 0)):
        if D[i][i]:
            out.append(D[i][i])
    return out


def integer_kernel(M: Sequence[Sequence[int]], ncols: int) -> list:
    """Z-basis of {x in Z^n : Mx = 0}."""
    m = len(M)
    if m == 0:
        return [[1 if i == j else 0 for i in range(ncols)] for j in range(ncols)]
    _, D, V = smith_normal_form(M, m, ncols)
    r = sum(1 for i in range(min(m, ncols)) if D[i][i])
    return [[V[i][j] for i in range(ncols)] for j in range(r, ncols)]


def hermite_normal_form(rows: Sequence[Sequence[int]], ncols: int) -> list:
    """Canonical row-style HNF of the Z-row-lattice (zero rows removed).

    Pivots positive, entries above a pivot reduced into [0, pivot).
    """
    A = [[int(x) for x in row] for row in rows if any(row)]
    r = 0
    for c in range(ncols):
        if r >= len(A):
            break
        while True:
            nz = [i for i in range(r, len(A)) if A[i][c]]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(A[i][c]))
            A[r], A[p] = A[p], A[r]
            if A[r][c] < 0:
                A[r] = [-x for x in A[r]]
            pv = A[r][c]
            clean = True
            for i in range(r + 1, len(A)):
                if A[i][c]:
                    q = A[i][c] // pv
                    A[i] = [x - q * y for x, y in zip(A[i], A[r])]
                    if A[i][c]:
                        clean = False
            if clean:
                break
        if r < len(A) and A[r][c]:
            pv = A[r][c]
            for i in range(r):
                q = A[i][c] // pv
                if q:
                    A[i] = [x - q * y for x, y in zip(A[i], A[r])]
            r += 1
    return [row for row in A[:r] if any(row)]


def rational_hnf(rows: Sequence[Sequence], ncols: int) -> list:
    """HNF of the Z-span of rational rows; canonical for the lattice."""
    rows = [list(map(Fraction, r)) for r in rows]
    rows = [r for r in rows if any(r)]
    if not rows:
        return []
    D = common_denominator(rows)
    H = hermite_normal_form([[int(x * D) for x in r] for r in rows], ncols)
    return [[Fraction(x, D) for x in r] for r in H]
