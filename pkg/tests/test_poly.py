"""Sparse symbol arithmetic and Gaussian-rational coefficient tests."""
import random
from fractions import Fraction

import pytest

from morsenf.coeffs import (GaussianRational, I, coeff_from_json,
                            coeff_to_json, imag_part, real_part)
from morsenf.poly import (FLOAT, RATIONAL, PolySymbol, basis_dimension,
                          monomial_basis)


def rand_symbol(n, rng, deg_cut=6, h_cut=2, max_deg=4, terms=6):
    out = {}
    for _ in range(terms):
        deg = rng.randrange(0, max_deg + 1)
        xe = [0] * n
        se = [0] * n
        for _ in range(deg):
            which = rng.randrange(2 * n)
            (xe if which < n else se)[which % n] += 1
        h = rng.randrange(0, h_cut + 1)
        out[(tuple(xe), tuple(se), h)] = Fraction(rng.randint(-9, 9),
                                                  rng.randint(1, 5))
    return PolySymbol(n, out, deg_cut, h_cut)


def test_gaussian_rational_field_ops():
    a = GaussianRational(Fraction(1, 2), Fraction(-3))
    b = GaussianRational(2, Fraction(1, 3))
    assert a + b - b == a
    assert (a * b) / b == a
    assert I * I == -1
    assert a * a.conjugate() == real_part(a) ** 2 + imag_part(a) ** 2
    assert complex(GaussianRational(1, 2)) == 1 + 2j
    # interop with plain rationals
    assert Fraction(1, 2) * I + Fraction(1, 2) * I == I
    assert 1 / I == -I


def test_coeff_json_round_trip():
    vals = [Fraction(22, 7), GaussianRational(Fraction(-1, 3), 4), 5]
    for v in vals:
        assert coeff_from_json(coeff_to_json(v), RATIONAL) == v
    assert coeff_from_json(coeff_to_json(1.5), FLOAT) == 1.5


def test_ring_axioms_seeded():
    rng = random.Random(42)
    for _ in range(25):
        a = rand_symbol(2, rng)
        b = rand_symbol(2, rng)
        c = rand_symbol(2, rng)
        assert a + b == b + a
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c
        assert (a - a).is_zero()


def test_truncation_cuts():
    x = PolySymbol.variable(1, 0, 3, 1)
    p = (x * x) * (x * x)  # degree 4 beyond cut 3
    assert p.is_zero()
    h = PolySymbol.hbar(1, 3, 1)
    assert (h * h).is_zero()  # hbar^2 beyond cut 1


def test_mul_weighted_matches_filtered_product():
    rng = random.Random(7)
    for _ in range(10):
        a = rand_symbol(2, rng, deg_cut=8, h_cut=3)
        b = rand_symbol(2, rng, deg_cut=8, h_cut=3)
        W = 6
        full = a * b
        expect = {k: c for k, c in full.terms.items()
                  if sum(k[0]) + sum(k[1]) + 2 * k[2] <= W}
        assert a.mul_weighted(b, W).terms == expect


def test_diff_and_substitute_linear():
    n = 1
    x = PolySymbol.variable(n, 0, 6, 0)
    xi = PolySymbol.variable(n, 1, 6, 0)
    p = x * x * xi
    assert p.diff(0) == x * xi * 2
    assert p.diff(1) == x * x
    # rotate (x, xi) -> (xi, -x) twice gives (x, xi) -> (-x, -xi)
    S = [[Fraction(0), Fraction(1)], [Fraction(-1), Fraction(0)]]
    q = p.substitute_linear(S).substitute_linear(S)
    assert q == -p


def test_substitute_linear_inverse_round_trip():
    rng = random.Random(3)
    from morsenf.linalg import invert
    S = [[Fraction(rng.randint(-2, 2)) for _ in range(4)] for _ in range(4)]
    for i in range(4):
        S[i][i] += 3
    Sinv = invert(S)
    p = rand_symbol(2, rng, deg_cut=5, h_cut=1)
    assert p.substitute_linear(S).substitute_linear(Sinv) == p


def test_grading_and_h_coefficients():
    rng = random.Random(11)
    p = rand_symbol(2, rng, deg_cut=6, h_cut=2, terms=12)
    rebuilt = PolySymbol.zero(2, 6, 2)
    for k in range(0, 7):
        for l in range(0, 3):
            vec = p.grade_component(k, l)
            rebuilt = rebuilt + PolySymbol.from_graded(
                2, k, l, vec, deg_cut=6, h_cut=2)
    assert rebuilt == p
    total = PolySymbol.zero(2, 6, 2)
    for l in range(0, 3):
        total = total + p.h_coefficient(l).times_h(l)
    assert total == p


def test_monomial_basis_counts():
    for n in (1, 2):
        for k in range(0, 7):
            basis = monomial_basis(n, k)
            assert len(basis) == basis_dimension(n, k)
            assert len(set(basis)) == len(basis)
            assert all(sum(xe) + sum(se) == k for xe, se in basis)


def test_json_round_trip():
    rng = random.Random(5)
    p = rand_symbol(2, rng)
    assert PolySymbol.from_json(p.to_json()) == p
    q = p.to_float()
    assert PolySymbol.from_json(q.to_json()) == q


def test_evaluate():
    x = PolySymbol.variable(1, 0, 6, 1)
    xi = PolySymbol.variable(1, 1, 6, 1)
    p = x * x + xi.scale(3) + PolySymbol.hbar(1, 6, 1).scale(2)
    val = p.evaluate([Fraction(2), Fraction(-1)], hval=Fraction(1, 2))
    assert val == 4 - 3 + 1


def test_mode_mismatch_rejected():
    a = PolySymbol.variable(1, 0, 4, 0)
    b = PolySymbol.variable(1, 0, 4, 0).to_float()
    with pytest.raises(Exception):
        _ = a + b
