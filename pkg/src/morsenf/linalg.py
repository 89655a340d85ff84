"""Small dense linear algebra over exact fields (Fraction, GaussianRational).

Matrices are lists of row lists.  Everything here is fraction-exact unless a
nonzero tolerance is passed, in which case entries may be floats and the
pivot test uses magnitude.
"""
from __future__ import annotations

from fractions import Fraction

from .coeffs import coeff_abs


def mat_zeros(r, c):
    return [[Fraction(0)] * c for _ in range(r)]


def identity(k):
    return [[Fraction(1) if i == j else Fraction(0) for j in range(k)]
            for i in range(k)]


def mat_mul(A, B):
    rb = len(B)
    cb = len(B[0]) if rb else 0
    out = []
    for row in A:
        new = []
        for j in range(cb):
            s = 0
            for k in range(rb):
                if row[k] != 0:
                    s = s + row[k] * B[k][j]
            new.append(s)
        out.append(new)
    return out


def mat_vec(A, v):
    out = []
    for row in A:
        s = 0
        for a, x in zip(row, v):
            if a != 0:
                s = s + a * x
        out.append(s)
    return out


def transpose(A):
    return [list(col) for col in zip(*A)]


def mat_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def _nonzero(x, tol):
    if tol == 0:
        return x != 0
    return coeff_abs(x) > tol


def rref(A, tol=0):
    """Reduced row echelon form; returns (R, pivot_column_list)."""
    R = [list(row) for row in A]
    rows = len(R)
    cols = len(R[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        pivot = None
        best = None
        for i in range(r, rows):
            if _nonzero(R[i][c], tol):
                if tol == 0:
                    pivot = i
                    break
                mag = coeff_abs(R[i][c])
                if best is None or mag > best:
                    best, pivot = mag, i
        if pivot is None:
            continue
        R[r], R[pivot] = R[pivot], R[r]
        pv = R[r][c]
        R[r] = [x / pv for x in R[r]]
        for i in range(rows):
            if i != r and _nonzero(R[i][c], 0 if tol == 0 else tol * 1e-6):
                f = R[i][c]
                R[i] = [x - f * y for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
    return R, pivots


def rank(A, tol=0):
    return len(rref(A, tol)[1])


def nullspace(A, tol=0):
    """Basis of the right null space, as a list of column vectors."""
    rows = len(A)
    cols = len(A[0]) if rows else 0
    if rows == 0:
        return [[Fraction(1) if i == j else Fraction(0) for i in range(cols)]
                for j in range(cols)]
    R, pivots = rref(A, tol)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * cols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -R[r][fc]
        basis.append(v)
    return basis


def solve(A, b, tol=0):
    """One solution of A x = b, or None if inconsistent."""
    rows = len(A)
    cols = len(A[0]) if rows else 0
    aug = [list(A[i]) + [b[i]] for i in range(rows)]
    R, pivots = rref(aug, tol)
    if cols in pivots:
        return None
    x = [Fraction(0)] * cols
    for r, pc in enumerate(pivots):
        x[pc] = R[r][cols]
    return x


def invert(A, tol=0):
    """Inverse of a square matrix; raises ValueError if singular."""
    k = len(A)
    aug = [list(A[i]) + identity(k)[i] for i in range(k)]
    R, pivots = rref(aug, tol)
    if pivots != list(range(k)):
        raise ValueError("matrix is singular")
    return [row[k:] for row in R]


def det(A, tol=0):
    """Determinant by fraction-exact elimination."""
    M = [list(row) for row in A]
    k = len(M)
    sign = 1
    d = 1
    for c in range(k):
        pivot = None
        for i in range(c, k):
            if _nonzero(M[i][c], tol):
                pivot = i
                break
        if pivot is None:
            return 0 * (M[0][0] if k else Fraction(0))
        if pivot != c:
            M[c], M[pivot] = M[pivot], M[c]
            sign = -sign
        d = d * M[c][c]
        inv = M[c][c]
        for i in range(c + 1, k):
            if M[i][c] != 0:
                f = M[i][c] / inv
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return sign * d
