"""Example systems: the C. Neumann problem and seeded round-trip fixtures.

The Neumann Hamiltonian on the cotangent bundle of the sphere has exactly
one fixed point per coordinate axis; in a graph chart around the i-th one
the Hamiltonian is polynomial and its Hessian splits into n planar blocks,
elliptic for eigenvalues above lambda_i and hyperbolic below, giving the
critical-point type (n-i, i, 0).

The fixture generators build systems of any prescribed type by dressing a
standard basis with seeded symplectic frames, recombinations, Lie
transforms, and star-commuting hbar-series terms, so every normal-form
round trip has a known answer.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .brackets import lie_transform, moyal_lie_transform
from .linalg import identity, invert, mat_mul
from .nf_classical import IntegrableSystem
from .poly import FLOAT, RATIONAL, PolySymbol, monomial_basis
from .symplectic import (Block, CartanType, QuadraticForm, check_symplectic,
                         model_symbols, williamson_classify)


# ------------------------------------------------------------------ Neumann


@dataclass
class NeumannSpec:
    """Diagonal Neumann problem data: A = diag(eigenvalues), chart at p_i."""

    eigenvalues: list
    chart_center: int
    chart_sign: int = 1

    def __post_init__(self):
        vals = list(self.eigenvalues)
        if sorted(vals) != vals:
            raise ValueError("eigenvalues must be listed in increasing order")
        if len(set(vals)) != len(vals):
            raise ValueError("eigenvalues must be distinct")
        if any(v <= 0 for v in vals):
            raise ValueError("eigenvalues must be positive")
        if not 0 <= self.chart_center < len(vals):
            raise ValueError("chart center out of range")
        if self.chart_sign not in (1, -1):
            raise ValueError("chart sign must be +1 or -1")


def neumann_hamiltonian(spec: NeumannSpec, deg_cut=6) -> PolySymbol:
    """The Neumann Hamiltonian in the graph chart at fixed point p_i.

    With y the sphere coordinates orthogonal to e_i and eta their conjugate
    momenta, the chart expression is exactly polynomial:

        H = lam_i/2 + 1/2 sum_j (lam_j - lam_i) y_j^2
            + 1/2 (sum_j eta_j^2 - <y, eta>^2).

    The chart sign (antipodal chart choice) cancels out of H entirely.
    """
    vals = spec.eigenvalues
    i = spec.chart_center
    n = len(vals) - 1
    exact = all(isinstance(v, (int, Fraction)) for v in vals)
    mode = RATIONAL if exact else FLOAT
    lam = [Fraction(v) if exact else float(v) for v in vals]
    others = [lam[j] for j in range(n + 1) if j != i]
    half = Fraction(1, 2) if exact else 0.5
    H = PolySymbol.constant(n, lam[i] * half, deg_cut, 0, mode)
    t = PolySymbol.zero(n, deg_cut, 0, mode)
    for j in range(n):
        y = PolySymbol.variable(n, j, deg_cut, 0, mode)
        eta = PolySymbol.variable(n, n + j, deg_cut, 0, mode)
        H = H + (y * y).scale((others[j] - lam[i]) * half) \
            + (eta * eta).scale(half)
        t = t + y * eta
    return H - (t * t).scale(half)


def _resonance_heuristic(deltas, bound=50):
    """Heuristic check that the sqrt-gaps are independent over Z.

    Flags any ratio sqrt(d_j)/sqrt(d_k) lying within 1e-9 of a rational
    with denominator <= bound.  Reported only, never asserted: no finite
    procedure certifies irrational independence.
    """
    import math
    roots = [math.sqrt(abs(float(d))) for d in deltas]
    suspicious = []
    for j in range(len(roots)):
        for k in range(j + 1, len(roots)):
            if roots[k] == 0:
                continue
            ratio = roots[j] / roots[k]
            approx = Fraction(ratio).limit_denominator(bound)
            if abs(ratio - float(approx)) < 1e-9:
                suspicious.append((j, k, str(approx)))
    return suspicious


def neumann_local_system(spec: NeumannSpec, deg_cut=6):
    """Chart Hamiltonian, split Hessian blocks, and the classified type.

    Returns (H, basis, report) where H is the chart symbol, basis the
    CartanBasis of the n planar Hessian blocks, and report a dict with the
    expected type and the nonresonance heuristic.
    """
    vals = spec.eigenvalues
    i = spec.chart_center
    n = len(vals) - 1
    H = neumann_hamiltonian(spec, deg_cut)
    from .symplectic import hessian_at
    hess = hessian_at(H, [0] * (2 * n)).Q
    forms = []
    for j in range(n):
        zero = Fraction(0) if isinstance(hess[0][0], Fraction) else 0.0
        Q = [[zero] * (2 * n) for _ in range(2 * n)]
        for a in (j, n + j):
            for b in (j, n + j):
                Q[a][b] = hess[a][b]
        forms.append(QuadraticForm(Q))
    # off-block entries must vanish: the chart Hessian is planar-diagonal
    for a in range(2 * n):
        for b in range(2 * n):
            if (a % n) != (b % n) and hess[a][b] != 0:
                raise AssertionError("Neumann chart Hessian is not "
                                     "block-diagonal")
    basis = williamson_classify(forms)
    below = sum(1 for j in range(n + 1) if vals[j] < vals[i])
    deltas = [vals[j] - vals[i] for j in range(n + 1) if j != i]
    report = {
        "expected_type": {"m_e": n - below, "m_h": below, "m_f": 0},
        "classified_type": basis.ctype.to_json(),
        "matches": (basis.ctype.m_e, basis.ctype.m_h, basis.ctype.m_f)
        == (n - below, below, 0),
        "resonance_suspects": _resonance_heuristic(deltas),
    }
    return H, basis, report


# ----------------------------------------------------------------- fixtures


def cartan_type_from_counts(m_e, m_h, m_f) -> CartanType:
    """Standard block layout: hyperbolic, then elliptic, then focus pairs."""
    blocks = []
    pos = 0
    for _ in range(m_h):
        blocks.append(Block("hyperbolic", (pos,)))
        pos += 1
    for _ in range(m_e):
        blocks.append(Block("elliptic", (pos,)))
        pos += 1
    for _ in range(m_f):
        blocks.append(Block("focus", (pos, pos + 1)))
        pos += 2
    return CartanType(m_e, m_h, m_f, blocks)


def random_symplectic(n, rng, steps=6, spread=2):
    """A random rational symplectic matrix, as a product of elementary ones."""
    S = identity(2 * n)
    for _ in range(steps):
        kind = rng.randrange(3)
        if kind == 0:
            A = [[Fraction(rng.randint(-spread, spread)) for _ in range(n)]
                 for _ in range(n)]
            for i in range(n):
                A[i][i] += 1
            try:
                Ainv = invert(A)
            except ValueError:
                continue
            M = [[Fraction(0)] * (2 * n) for _ in range(2 * n)]
            for i in range(n):
                for j in range(n):
                    M[i][j] = A[i][j]
                    M[n + i][n + j] = Ainv[j][i]
        elif kind == 1:
            B = [[Fraction(0)] * n for _ in range(n)]
            for i in range(n):
                for j in range(i, n):
                    B[i][j] = B[j][i] = Fraction(rng.randint(-spread, spread))
            M = identity(2 * n)
            for i in range(n):
                for j in range(n):
                    M[i][n + j] = B[i][j]
        else:
            M = [[Fraction(0)] * (2 * n) for _ in range(2 * n)]
            for i in range(n):
                M[i][n + i] = Fraction(1)
                M[n + i][i] = Fraction(-1)
        S = mat_mul(S, M)
    assert check_symplectic(S)
    return S


def random_invertible(n, rng, spread=3):
    while True:
        C = [[Fraction(rng.randint(-spread, spread)) for _ in range(n)]
             for _ in range(n)]
        try:
            invert(C)
            return C
        except ValueError:
            continue


def _random_generator(n, degree, rng, deg_cut, h_cut, density=0.3,
                      x_only=False):
    """Random homogeneous generator.

    With x_only=True all monomials are free of xi: the star-adjoint of such
    a generator strictly lowers the xi-degree, so its exponential
    terminates exactly inside the truncation cuts.  Quantum fixtures need
    this -- a generic generator's flow only commutes modulo degrees beyond
    the cut, which the hbar^2 Moyal corrections fold back below it.
    """
    terms = {}
    for xe, se in monomial_basis(n, degree):
        if x_only and any(se):
            continue
        if rng.random() < density or (x_only and not terms):
            terms[(xe, se, 0)] = Fraction(rng.randint(-3, 3),
                                          rng.randint(1, 3))
    return PolySymbol(n, terms, deg_cut, h_cut)


def _random_kernel_series(q_list, rng, deg_cut, h_cut, max_q_degree=2):
    """A random hbar-series in the kernel algebra (star-commutes with q)."""
    n = len(q_list)
    out = PolySymbol.zero(n, deg_cut, h_cut)
    for level in range(1, h_cut + 1):
        piece = PolySymbol.constant(
            n, Fraction(rng.randint(-3, 3), rng.randint(1, 2)),
            deg_cut, h_cut)
        for d in range(1, max_q_degree + 1):
            for gamma in _q_exponents(n, d):
                if rng.random() < 0.3:
                    mono = PolySymbol.constant(
                        n, Fraction(rng.randint(-2, 2)), deg_cut, h_cut)
                    for j, e in enumerate(gamma):
                        for _ in range(e):
                            mono = mono * q_list[j]
                    piece = piece + mono
        out = out + piece.times_h(level)
    return out


def _q_exponents(n, d):
    import itertools
    return [g for g in itertools.product(range(d + 1), repeat=n)
            if sum(g) == d]


def model_system(ctype, seed=0, N=6, h_cut=0, generators=2) -> IntegrableSystem:
    """A seeded system of the requested type with a known normal form.

    Seed 0 returns the bare standard basis.  Otherwise the basis is dressed
    with kernel-algebra hbar-series (h_cut > 0), recombined by a random
    invertible constant matrix, transformed by random Lie generators, and
    moved to a random rational symplectic frame.  All operations preserve
    (star-)commutation exactly, so the output self-validates.
    """
    if not isinstance(ctype, CartanType):
        ctype = cartan_type_from_counts(*ctype)
    n = ctype.n
    q_list = model_symbols(ctype, N, h_cut, RATIONAL)
    if seed == 0:
        return IntegrableSystem(q_list)
    rng = random.Random(seed)
    symbols = list(q_list)
    if h_cut > 0:
        # linear-in-q series keep the xi-degree budget at 2, so the x-only
        # flows below stay exactly polynomial within deg_cut = N >= 6
        symbols = [p + _random_kernel_series(q_list, rng, N, h_cut,
                                             max_q_degree=1)
                   for p in symbols]
    C0 = random_invertible(n, rng)
    symbols = [sum((symbols[k].scale(C0[j][k]) for k in range(n)),
                   start=PolySymbol.zero(n, N, h_cut))
               for j in range(n)]
    for _ in range(generators):
        degree = rng.choice([3, 4])
        a = _random_generator(n, degree, rng, N, h_cut, x_only=h_cut > 0)
        if a.is_zero():
            continue
        if h_cut > 0:
            symbols = [moyal_lie_transform(p, a) for p in symbols]
        else:
            symbols = [lie_transform(p, a) for p in symbols]
    S0 = random_symplectic(n, rng)
    symbols = [p.substitute_linear(S0) for p in symbols]
    return IntegrableSystem(symbols)
