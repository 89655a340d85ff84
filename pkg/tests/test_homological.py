"""Homological equation solver: exactness, gauges, and an independent
complex-coordinates oracle for the elliptic block."""
import random
from fractions import Fraction

import pytest

from morsenf.brackets import poisson
from morsenf.coeffs import GaussianRational, I
from morsenf.homological import (IncompatibleSystem, check_compatibility,
                                 kernel_basis, nonresonant_lambda,
                                 solve_homological)
from morsenf.poly import PolySymbol
from morsenf.symplectic import model_symbols
from morsenf.systems import cartan_type_from_counts

ALL_TYPES = [(1, 0, 0), (0, 1, 0), (2, 0, 0), (1, 1, 0), (0, 2, 0),
             (0, 0, 1)]


def models(counts, deg_cut=8):
    return model_symbols(cartan_type_from_counts(*counts), deg_cut, 0)


def mono(n, xe, se, c=1, deg_cut=8):
    return PolySymbol(n, {(tuple(xe), tuple(se), 0): Fraction(c)}, deg_cut, 0)


def residual(q_list, g_list, sol):
    out = []
    for qi, gi, Fi in zip(q_list, g_list, sol.F_list):
        out.append(poisson(qi, sol.f) - gi + Fi)
    return out


def test_hyperbolic_eigenvector_case():
    # q = x xi, g = x^2 xi has ad-eigenvalue 1: f = g, F = 0
    q = models((0, 1, 0))
    g = mono(1, (2,), (1,))
    sol = solve_homological(q, [g], 6)
    assert sol.f == g
    assert sol.F_list[0].is_zero()
    assert all(r.is_zero() for r in residual(q, [g], sol))


def test_hyperbolic_kernel_case():
    # g = x^2 xi^2 = q^2 is entirely in the kernel: f = 0, F = q^2
    q = models((0, 1, 0))
    g = mono(1, (2,), (2,))
    sol = solve_homological(q, [g], 6)
    assert sol.f.is_zero()
    assert sol.F_list[0] == q[0] * q[0]


def test_elliptic_split_case():
    # q = x^2 + xi^2, g = x^2: f = -x xi / 4, F = q / 2
    q = models((1, 0, 0))
    g = mono(1, (2,), (0,))
    sol = solve_homological(q, [g], 6)
    assert sol.f == mono(1, (1,), (1,), Fraction(-1, 4))
    assert sol.F_list[0] == q[0].scale(Fraction(1, 2))
    assert all(r.is_zero() for r in residual(q, [g], sol))


def _to_z_basis(p):
    """Rewrite a 1-dof symbol in z = x + i xi, zbar = x - i xi monomials."""
    from math import comb

    def gr_pow(base, k):
        out = GaussianRational(1, 0)
        for _ in range(k):
            out = out * base
        return out

    minus_half_i = GaussianRational(0, Fraction(-1, 2))
    out = {}
    for (xe, se, _h), c in p.terms.items():
        jx, jxi = xe[0], se[0]
        # x = (z + zbar)/2, xi = (z - zbar)/(2i)
        for a1 in range(jx + 1):
            for a2 in range(jxi + 1):
                coeff = c * comb(jx, a1) * comb(jxi, a2) \
                    * Fraction(1, 2 ** jx) * gr_pow(minus_half_i, jxi) \
                    * (-1) ** (jxi - a2)
                key = (a1 + a2, jx + jxi - a1 - a2)
                out[key] = out.get(key, 0) + coeff
    return {k: v for k, v in out.items() if v != 0}


def _from_z_basis(zc, deg_cut=8):
    """Expand z^a zbar^b monomials back into (x, xi)."""
    x = PolySymbol.variable(1, 0, deg_cut, 0)
    xi = PolySymbol.variable(1, 1, deg_cut, 0)
    # complex coefficients force the Gaussian-rational scalar ring
    z = x + xi.scale(I)
    zb = x - xi.scale(I)
    out = PolySymbol.zero(1, deg_cut, 0)
    for (a, b), c in zc.items():
        out = out + (z ** a * zb ** b).scale(c)
    return out


def elliptic_oracle(g, deg_cut=8):
    """Diagonal solve of {q, f} = g - F for q = x^2 + xi^2.

    In z-coordinates ad_q is diagonal: {q, z^a zbar^b} = 2i(b - a) z^a
    zbar^b, so f divides coefficient-wise and F collects the a = b part.
    """
    zc = _to_z_basis(g)
    f_z, F_z = {}, {}
    for (a, b), c in zc.items():
        if a == b:
            F_z[(a, b)] = c
        else:
            f_z[(a, b)] = c / (GaussianRational(0, 2) * (b - a))
    return _from_z_basis(f_z, deg_cut), _from_z_basis(F_z, deg_cut)


def test_elliptic_complex_oracle():
    rng = random.Random(21)
    q = models((1, 0, 0))
    for _ in range(15):
        g = PolySymbol(1, {
            ((rng.randrange(4),), (rng.randrange(4),), 0):
            Fraction(rng.randint(-5, 5), rng.randint(1, 4))
            for _ in range(4)}, 8, 0)
        sol = solve_homological(q, [g], 8)
        f_ref, F_ref = elliptic_oracle(g)
        assert sol.F_list[0] == F_ref
        # the solver's f is gauged kernel-free; so is the oracle's
        assert sol.f == f_ref


def test_kernel_basis_dimensions():
    import itertools
    for counts in ALL_TYPES:
        q = models(counts)
        n = q[0].n
        for k in (2, 4, 6):
            basis = kernel_basis(q, k)
            # kernel at even degree k = span of q^gamma with |gamma| = k/2
            expect = len([g for g in itertools.product(range(k // 2 + 1),
                                                       repeat=n)
                          if sum(g) == k // 2])
            assert len(basis) == expect
            for b in basis:
                assert all(poisson(qi, b).is_zero() for qi in q)
        assert kernel_basis(q, 3) == []


def test_incompatible_rhs_detected():
    q = models((1, 1, 0))
    n = 2
    g1 = mono(n, (1, 0), (1, 1))
    g2 = mono(n, (2, 0), (1, 0))
    assert not check_compatibility([g1, g2], q)
    with pytest.raises(IncompatibleSystem):
        solve_homological(q, [g1, g2], 6)


def test_lambda_base_uniqueness():
    """F is independent of the nonresonant weights (bit-identical)."""
    rng = random.Random(33)
    for counts in ALL_TYPES:
        q = models(counts)
        n = q[0].n
        f_true = PolySymbol(n, {
            (tuple(rng.randrange(3) for _ in range(n)),
             tuple(rng.randrange(3) for _ in range(n)), 0):
            Fraction(rng.randint(-4, 4), rng.randint(1, 3))
            for _ in range(5)}, 8, 0)
        g_list = [poisson(qi, f_true) + qi * qi for qi in q]
        assert nonresonant_lambda(n, 10) == [11 ** i for i in range(n)]
        s1 = solve_homological(q, g_list, 8, lambda_base=11)
        s2 = solve_homological(q, g_list, 8, lambda_base=23)
        assert s1.F_list == s2.F_list
        assert s1.f == s2.f  # zero-kernel gauge makes f unique as well
        assert all(r.is_zero() for r in residual(q, g_list, s1))


def test_compatible_systems_solve_exactly():
    rng = random.Random(8)
    for counts in ALL_TYPES:
        q = models(counts)
        n = q[0].n
        for _ in range(5):
            f = PolySymbol(n, {
                (tuple(rng.randrange(2) for _ in range(n)),
                 tuple(rng.randrange(2) for _ in range(n)), 0):
                Fraction(rng.randint(-4, 4))
                for _ in range(4)}, 8, 0)
            g_list = [poisson(qi, f) for qi in q]
            sol = solve_homological(q, g_list, 8)
            assert all(r.is_zero() for r in residual(q, g_list, sol))
