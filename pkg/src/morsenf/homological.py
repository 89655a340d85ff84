"""Graded inversion of ad_q: the formal critical Poincare lemma.

For a standard basis q_1..q_n of model quadratics, the operator
ad_{q_i} f = {q_i, f} preserves each homogeneous component P_k and is
semisimple there, so P_k splits as kernel + image.  The joint kernel is
exactly the span of products of the q_j, and a compatible system

    {q_i, f} = g_i - F_i          (F_i in the kernel algebra)

has a solution f, unique once its kernel component is set to zero.

The solver reduces to a single generic combination q_lambda = sum l_i q_i
with nonresonant integer weights, inverts its ad on small invariant cells
of the monomial basis, and recovers every F_i as g_i - {q_i, f}.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .brackets import poisson
from .linalg import invert, mat_vec, nullspace, rref
from .poly import FLOAT, RATIONAL, PolySymbol, monomial_basis

FLOAT_TOL = 1e-9


class IncompatibleSystem(ValueError):
    """Right-hand sides violate the closedness condition."""


class ResonanceDetected(RuntimeError):
    """Internal weights produced a kernel/image overlap (should not occur)."""


class NotStandardBasis(ValueError):
    """q_list is not a standard model basis."""


def nonresonant_lambda(n, N):
    """Integer weights l_i = (N+1)^(i-1).

    A base-(N+1) digits argument shows sum l_i d_i != 0 whenever
    0 < max|d_i| <= N, so the generic combination has no accidental
    kernel on degrees up to N.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    return [(N + 1) ** i for i in range(n)]


def blocks_from_models(q_list):
    """Recover the block structure (kind, positions) of a standard basis."""
    n = len(q_list)
    for q in q_list:
        if q.n != n:
            raise NotStandardBasis("need n forms in n degrees of freedom")

    def mono(q, xpos, xipos):
        xe = [0] * n
        se = [0] * n
        for p in xpos:
            xe[p] += 1
        for p in xipos:
            se[p] += 1
        return q.coefficient(xe, se)

    blocks = []
    i = 0
    while i < n:
        q = q_list[i].h_coefficient(0)
        nterms = len(q.terms)
        if nterms == 1 and mono(q, [i], [i]) == 1:
            blocks.append(("hyperbolic", (i,)))
            i += 1
        elif nterms == 2 and mono(q, [i, i], []) == 1 \
                and mono(q, [], [i, i]) == 1:
            blocks.append(("elliptic", (i,)))
            i += 1
        elif i + 1 < n and nterms == 2 \
                and mono(q, [i], [i + 1]) == 1 and mono(q, [i + 1], [i]) == -1:
            q2 = q_list[i + 1].h_coefficient(0)
            if not (len(q2.terms) == 2 and mono(q2, [i], [i]) == 1
                    and mono(q2, [i + 1], [i + 1]) == 1):
                raise NotStandardBasis(
                    f"form {i + 1} does not complete the focus-focus pair")
            blocks.append(("focus", (i, i + 1)))
            i += 2
        else:
            raise NotStandardBasis(f"form {i} is not a model quadratic")
    return blocks


def _cell_key(blocks, xe, se):
    """Invariant grading data of a monomial under every ad_{q_i}."""
    key = []
    for kind, pos in blocks:
        if kind == "hyperbolic":
            (p,) = pos
            key.append((xe[p], se[p]))
        elif kind == "elliptic":
            (p,) = pos
            key.append(xe[p] + se[p])
        else:
            p, p2 = pos
            key.append((xe[p] + xe[p2], se[p] + se[p2]))
    return tuple(key)


_CELL_CACHE = {}


class _Cell:
    """One ad-invariant subspace of P_k, with precomputed solve data."""

    __slots__ = ("monos", "index", "T", "K", "U", "Uinv", "dim_ker")

    def __init__(self, q_lambda, monos, mode, tol):
        n = q_lambda.n
        self.monos = monos
        self.index = {m: i for i, m in enumerate(monos)}
        m = len(monos)
        T = [[Fraction(0) if mode == RATIONAL else 0.0] * m for _ in range(m)]
        for j, (xe, se) in enumerate(monos):
            img = poisson(q_lambda, PolySymbol.monomial(
                n, xe, se, 0, 1, q_lambda.deg_cut, q_lambda.h_cut, mode))
            for (xe2, se2, _h), c in img.terms.items():
                T[self.index[(xe2, se2)]][j] = c
        self.T = T
        self.K = nullspace(T, tol)          # kernel columns
        R, pivots = rref(T, tol)
        im_cols = [[T[i][c] for i in range(m)] for c in pivots]
        cols = self.K + im_cols
        if len(cols) != m:
            raise ResonanceDetected("kernel/image do not split the cell")
        U = [[cols[j][i] for j in range(m)] for i in range(m)]
        try:
            self.Uinv = invert(U, tol)
        except ValueError:
            raise ResonanceDetected("kernel meets image: resonant weights")
        self.U = U
        self.dim_ker = len(self.K)

    def solve(self, g_vec, tol):
        """f with T f = image-part of g, zero kernel component."""
        y = mat_vec(self.Uinv, g_vec)
        m = len(self.monos)
        g_im = [sum(self.U[i][self.dim_ker + j] * y[self.dim_ker + j]
                    for j in range(m - self.dim_ker)) for i in range(m)]
        from .linalg import solve as lin_solve
        f0 = lin_solve(self.T, g_im, tol)
        if f0 is None:
            raise ResonanceDetected("image projection failed to solve")
        # remove any kernel component of the particular solution
        z = mat_vec(self.Uinv, f0)
        for j in range(self.dim_ker):
            z[j] = 0
        return mat_vec(self.U, z)

    def kernel_coords(self, g_vec):
        return mat_vec(self.Uinv, g_vec)[:self.dim_ker]

    def in_kernel(self, g_vec, tol):
        y = mat_vec(self.Uinv, g_vec)
        scale = max((abs(complex(c)) for c in g_vec), default=0.0)
        for c in y[self.dim_ker:]:
            bad = (c != 0) if tol == 0 else abs(complex(c)) > tol * max(1.0, scale)
            if bad:
                return False
        return True


def _cells_for_degree(blocks, q_lambda, k, mode, tol):
    key = (tuple(blocks), tuple(sorted(q_lambda.terms.items(),
                                       key=lambda kv: kv[0])), k, mode)
    if key not in _CELL_CACHE:
        groups = {}
        for xe, se in monomial_basis(q_lambda.n, k):
            groups.setdefault(_cell_key(blocks, xe, se), []).append((xe, se))
        _CELL_CACHE[key] = {ck: _Cell(q_lambda, monos, mode, tol)
                            for ck, monos in groups.items()}
    return _CELL_CACHE[key]


def _grade_symbol(p, k):
    """The degree-k hbar^0 terms of p, kept as a symbol."""
    terms = {key: c for key, c in p.terms.items()
             if key[2] == 0 and sum(key[0]) + sum(key[1]) == k}
    return PolySymbol(p.n, terms, p.deg_cut, p.h_cut, p.mode)


def kernel_basis(q_list, k):
    """Exact basis of the joint kernel of all ad_{q_i} on P_k.

    Asserted to match the count of degree-k products of the q_j: the
    kernel algebra has one basis element per monomial in q of degree k/2.
    """
    blocks = blocks_from_models(q_list)
    n = len(q_list)
    mode = q_list[0].mode
    tol = 0 if mode == RATIONAL else FLOAT_TOL
    lam = nonresonant_lambda(n, max(k, 1))
    q_lambda = PolySymbol.zero(n, q_list[0].deg_cut, q_list[0].h_cut, mode)
    for li, qi in zip(lam, q_list):
        q_lambda = q_lambda + qi.scale(li if mode == RATIONAL else float(li))
    cells = _cells_for_degree(blocks, q_lambda, k, mode, tol)
    out = []
    for ck in sorted(cells):
        cell = cells[ck]
        for col in cell.K:
            terms = {(xe, se, 0): c
                     for (xe, se), c in zip(cell.monos, col) if c != 0}
            out.append(PolySymbol(n, terms, q_list[0].deg_cut,
                                  q_list[0].h_cut, mode))
    expected = 0
    if k % 2 == 0:
        expected = len([1 for xe, se in monomial_basis(n, k // 2) if not any(se)])
    if len(out) != expected:
        raise ResonanceDetected(
            f"joint kernel dimension {len(out)} != q-algebra count {expected} "
            f"at degree {k}")
    for b in out:
        for qi in q_list:
            br = poisson(qi, b)
            if mode == RATIONAL:
                ok = br.is_zero()
            else:
                ok = br.max_norm() <= FLOAT_TOL * max(1.0, b.max_norm())
            if not ok:
                raise ResonanceDetected("kernel element does not commute")
    return out


def check_compatibility(g_list, q_list, tol=None):
    """True iff {g_i, q_j} = {g_j, q_i} for all pairs, up to the cuts."""
    mode = q_list[0].mode
    if tol is None:
        tol = 0 if mode == RATIONAL else FLOAT_TOL
    n = len(q_list)
    for i in range(n):
        for j in range(i + 1, n):
            d = poisson(g_list[i], q_list[j]) - poisson(g_list[j], q_list[i])
            if tol == 0:
                if not d.is_zero():
                    return False
            else:
                scale = max(1.0, g_list[i].max_norm(), g_list[j].max_norm())
                if d.max_norm() > tol * scale:
                    return False
    return True


@dataclass
class HomologicalSolution:
    f: PolySymbol
    F_list: list
    residuals: list = field(default_factory=list)

    def max_residual(self):
        return max((r.max_norm() for r in self.residuals), default=0.0)


def solve_homological(q_list, g_list, N, lambda_base=None) -> HomologicalSolution:
    """Solve {q_i, f} = g_i - F_i for all i, degrees 0..N.

    F_i is the kernel-algebra projection of g_i and f carries no kernel
    component (the deterministic gauge).  The q_i must be a standard model
    basis; the g_i must satisfy check_compatibility.
    """
    blocks = blocks_from_models(q_list)
    n = len(q_list)
    mode = q_list[0].mode
    tol = 0 if mode == RATIONAL else FLOAT_TOL
    if not check_compatibility(g_list, q_list):
        raise IncompatibleSystem("right-hand sides are not closed: "
                                 "{g_i,q_j} != {g_j,q_i}")
    deg_cut = q_list[0].deg_cut
    h_cut = q_list[0].h_cut
    lam = nonresonant_lambda(n, max(N, 1) if lambda_base is None
                             else lambda_base - 1)
    q_lambda = PolySymbol.zero(n, deg_cut, h_cut, mode)
    g_lambda = PolySymbol.zero(n, deg_cut, h_cut, mode)
    for li, qi, gi in zip(lam, q_list, g_list):
        c = li if mode == RATIONAL else float(li)
        q_lambda = q_lambda + qi.scale(c)
        g_lambda = g_lambda + gi.scale(c)
    f = PolySymbol.zero(n, deg_cut, h_cut, mode)
    for k in range(0, min(N, deg_cut) + 1):
        gk = _grade_symbol(g_lambda, k)
        if gk.is_zero():
            continue
        cells = _cells_for_degree(blocks, q_lambda, k, mode, tol)
        fk_terms = {}
        for ck, cell in cells.items():
            g_vec = [gk.terms.get((xe, se, 0), 0) for xe, se in cell.monos]
            if all(c == 0 for c in g_vec):
                continue
            f_vec = cell.solve(g_vec, tol)
            for (xe, se), c in zip(cell.monos, f_vec):
                if c != 0:
                    fk_terms[(xe, se, 0)] = c
        f = f + PolySymbol(n, fk_terms, deg_cut, h_cut, mode)
    F_list = []
    residuals = []
    for qi, gi in zip(q_list, g_list):
        Fi = gi - poisson(qi, f)
        _assert_in_kernel(Fi, blocks, q_lambda, N, mode, tol)
        F_list.append(Fi)
        residuals.append(poisson(qi, f) - gi + Fi)
    return HomologicalSolution(f, F_list, residuals)


def _assert_in_kernel(Fi, blocks, q_lambda, N, mode, tol):
    for k in range(0, min(N, Fi.deg_cut) + 1):
        fk = _grade_symbol(Fi, k)
        if fk.is_zero():
            continue
        cells = _cells_for_degree(blocks, q_lambda, k, mode, tol)
        for ck, cell in cells.items():
            vec = [fk.terms.get((xe, se, 0), 0) for xe, se in cell.monos]
            if all(c == 0 for c in vec):
                continue
            if not cell.in_kernel(vec, tol):
                raise IncompatibleSystem(
                    f"degree-{k} remainder is not in the kernel algebra; "
                    "the system is not jointly solvable")
