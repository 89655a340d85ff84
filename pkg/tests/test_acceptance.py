"""Acceptance gate: one test per release criterion, each printing a
single pass line with its measured runtime.

Run with `pytest -s tests/test_acceptance.py` to see the lines.
"""
import itertools
import random
import time
from fractions import Fraction

from morsenf.brackets import moyal_bracket, moyal_star, poisson
from morsenf.homological import solve_homological
from morsenf.linalg import mat_mul, transpose
from morsenf.nf_classical import classical_normal_form, verify_classical_nf
from morsenf.nf_semiclassical import (alpha_first_order,
                                      semiclassical_normal_form,
                                      verify_semiclassical_nf)
from morsenf.poly import FLOAT, PolySymbol, monomial_basis
from morsenf.symplectic import (QuadraticForm, model_symbols, standard_J,
                                verify_cartan, williamson_classify)
from morsenf.systems import (NeumannSpec, cartan_type_from_counts,
                             model_system, neumann_local_system)

from test_poly import rand_symbol
from test_symplectic import conjugated_forms
from test_nf_classical import _signed_permutations
from weyl_oracle import operators_equal

ALL_TYPES = [(1, 0, 0), (0, 1, 0), (2, 0, 0), (1, 1, 0), (0, 2, 0),
             (0, 0, 1)]


def _report(num, name, t0):
    print(f"criterion {num} ({name}): PASS in {time.perf_counter() - t0:.2f}s")


def test_criterion_1_williamson_round_trip():
    t0 = time.perf_counter()
    matched = 0
    total = 0
    for counts in ALL_TYPES:
        for seed in range(100):
            forms, ctype, S0, C0 = conjugated_forms(counts, seed + 1,
                                                    mode=FLOAT)
            basis = williamson_classify(forms)
            total += 1
            if (basis.ctype.m_e, basis.ctype.m_h, basis.ctype.m_f) == counts:
                matched += 1
            n = ctype.n
            J = standard_J(n)
            M = mat_mul(mat_mul(transpose(basis.S), J), basis.S)
            resid = max(abs(M[i][j] - J[i][j]) for i in range(2 * n)
                        for j in range(2 * n))
            assert resid < 1e-9, (counts, seed, resid)
    assert matched == total == 600
    elapsed = time.perf_counter() - t0
    assert elapsed < 10, f"criterion 1 runtime {elapsed:.1f}s >= 10s"
    _report(1, "Williamson round-trip 600/600", t0)


def test_criterion_2_nilpotent_rejection():
    t0 = time.perf_counter()
    xi_squared = QuadraticForm([[Fraction(0), Fraction(0)],
                                [Fraction(0), Fraction(2)]])
    rep = verify_cartan([xi_squared])
    assert not rep.ok
    assert not rep.semisimple
    _report(2, "nilpotent xi^2 rejected as non-semisimple", t0)


def test_criterion_3_homological_exactness():
    t0 = time.perf_counter()
    for counts in ALL_TYPES:
        q = model_symbols(cartan_type_from_counts(*counts), 8, 0)
        n = q[0].n
        rng = random.Random(sum(counts) * 1000 + counts[0])
        for trial in range(50):
            f = PolySymbol(n, {
                (tuple(rng.randrange(3) for _ in range(n)),
                 tuple(rng.randrange(3) for _ in range(n)), 0):
                Fraction(rng.randint(-6, 6), rng.randint(1, 4))
                for _ in range(5)}, 8, 0)
            kern = q[0] * q[0] if trial % 2 else q[n - 1].scale(3)
            g_list = [poisson(qi, f) + kern for qi in q]
            sol_a = solve_homological(q, g_list, 8, lambda_base=None)
            sol_b = solve_homological(q, g_list, 8, lambda_base=23)
            for qi, gi, Fi in zip(q, g_list, sol_a.F_list):
                assert (poisson(qi, sol_a.f) - gi + Fi).is_zero()
            # bit-identical irremovable parts across the two lambda gauges
            assert [p.to_json() for p in sol_a.F_list] == \
                [p.to_json() for p in sol_b.F_list]
    elapsed = time.perf_counter() - t0
    assert elapsed < 60, f"criterion 3 runtime {elapsed:.1f}s >= 60s"
    _report(3, "homological exactness, 300 systems, two gauges", t0)


def test_criterion_4_moyal_laws():
    t0 = time.perf_counter()
    rng = random.Random(40)
    for _ in range(20):        # Jacobi
        a = rand_symbol(2, rng, deg_cut=12, h_cut=0, max_deg=3)
        b = rand_symbol(2, rng, deg_cut=12, h_cut=0, max_deg=3)
        c = rand_symbol(2, rng, deg_cut=12, h_cut=0, max_deg=3)
        assert (poisson(a, poisson(b, c)) + poisson(b, poisson(c, a))
                + poisson(c, poisson(a, b))).is_zero()
    for _ in range(8):         # star associativity through hbar^4
        a = rand_symbol(2, rng, deg_cut=12, h_cut=4, max_deg=4, terms=4)
        b = rand_symbol(2, rng, deg_cut=12, h_cut=4, max_deg=4, terms=4)
        c = rand_symbol(2, rng, deg_cut=12, h_cut=4, max_deg=4, terms=4)
        assert moyal_star(moyal_star(a, b), c) == \
            moyal_star(a, moyal_star(b, c))
    for _ in range(20):        # Moyal = Poisson + O(hbar^2)
        a = rand_symbol(2, rng, deg_cut=12, h_cut=4, max_deg=4)
        b = rand_symbol(2, rng, deg_cut=12, h_cut=4, max_deg=4)
        d = moyal_bracket(a, b) - poisson(a, b)
        assert d.is_zero() or d.min_h_order() >= 2
    # exact quantization rule against every model quadratic, 100 symbols
    checked = 0
    for counts in ALL_TYPES:
        q_list = model_symbols(cartan_type_from_counts(*counts), 10, 3)
        n = q_list[0].n
        while checked < (ALL_TYPES.index(counts) + 1) * 100 // 6 + 1:
            a = rand_symbol(n, rng, deg_cut=10, h_cut=3, max_deg=5)
            for q in q_list:
                assert moyal_bracket(q, a) == poisson(q, a)
            checked += 1
    assert checked >= 100
    _report(4, "Poisson/Moyal laws, exact, zero tolerance", t0)


def test_criterion_5_classical_normal_forms():
    t0 = time.perf_counter()
    for counts in ALL_TYPES:
        for seed in (1, 2):
            rng = random.Random(seed)
            import morsenf.systems as systems
            ctype = cartan_type_from_counts(*counts)
            planted = systems.random_invertible(ctype.n, rng)
            sys = model_system(counts, seed=seed, N=6)
            nf = classical_normal_form(sys, 6)
            rep = verify_classical_nf(nf, sys)
            assert rep.ok and rep.max_residual == 0, (counts, seed)
            # M(0) equals the planted recombination up to block order
            n = ctype.n
            M0 = nf.M0()
            assert any(
                [[sum(planted[i][k] * P[k][j] for k in range(n))
                  for j in range(n)] for i in range(n)] == M0
                for P in _signed_permutations(n)), (counts, seed)
    elapsed = time.perf_counter() - t0
    assert elapsed < 120, f"criterion 5 runtime {elapsed:.1f}s >= 120s"
    _report(5, "classical normal forms, all types, exact", t0)


def test_criterion_6_semiclassical_invariant():
    t0 = time.perf_counter()
    for counts in ALL_TYPES:
        seed = 3 + ALL_TYPES.index(counts)
        sys = model_system(counts, seed=seed, N=6, h_cut=3)
        nf = semiclassical_normal_form(sys, 6, 3)
        rep = verify_semiclassical_nf(nf, sys)
        assert rep.ok and rep.max_residual == 0, (counts, rep.details)
        # alpha^(1) = -M(0)^{-1} r(0): the subprincipal constants r(0) are
        # read directly off the inputs (invariant under linear changes)
        r0 = [p.h_coefficient(1).constant_term() for p in sys.symbols]
        expect = alpha_first_order(nf.base.M0(), r0)
        got = [nf.alpha[j].get(1, 0) for j in range(sys.n)]
        assert got == expect, (counts, got, expect)
    _report(6, "semiclassical alpha^(1) invariant, degree 6, hbar^3", t0)


def test_criterion_7_neumann_types():
    t0 = time.perf_counter()
    for i, counts in [(0, (2, 0, 0)), (1, (1, 1, 0)), (2, (0, 2, 0))]:
        _, basis, report = neumann_local_system(NeumannSpec([1, 2, 4], i))
        assert report["matches"]
        t = report["classified_type"]
        assert (t["m_e"], t["m_h"], t["m_f"]) == counts
    rng = random.Random(70)
    for _ in range(20):
        vals = sorted(round(rng.uniform(0.5, 20.0), 3) for _ in range(3))
        if len(set(vals)) < 3:
            continue
        for i in range(3):
            below = sum(1 for v in vals if v < vals[i])
            _, basis, report = neumann_local_system(NeumannSpec(vals, i))
            assert report["matches"]
            t = report["classified_type"]
            assert (t["m_e"], t["m_h"], t["m_f"]) == (2 - below, below, 0)
    elapsed = time.perf_counter() - t0
    assert elapsed < 10, f"criterion 7 runtime {elapsed:.1f}s >= 10s"
    _report(7, "Neumann fixed-point types (n-i, i, 0)", t0)


def test_criterion_8_weyl_oracle_cross_check():
    t0 = time.perf_counter()
    # every pair of 1-dof monomials of degree <= 4, exactly
    monos1 = [(xe, se) for k in range(5) for xe, se in monomial_basis(1, k)]
    for (xa, sa), (xb, sb) in itertools.product(monos1, monos1):
        a = PolySymbol.monomial(1, xa, sa, deg_cut=8, h_cut=4)
        b = PolySymbol.monomial(1, xb, sb, deg_cut=8, h_cut=4)
        assert operators_equal(moyal_star(a, b), (a, b), 1, 5), \
            ((xa, sa), (xb, sb))
    # seeded 2-dof sample of monomial pairs of degree <= 4
    monos2 = [(xe, se) for k in range(5) for xe, se in monomial_basis(2, k)]
    rng = random.Random(80)
    for _ in range(100):
        (xa, sa) = rng.choice(monos2)
        (xb, sb) = rng.choice(monos2)
        a = PolySymbol.monomial(2, xa, sa, deg_cut=8, h_cut=4)
        b = PolySymbol.monomial(2, xb, sb, deg_cut=8, h_cut=4)
        assert operators_equal(moyal_star(a, b), (a, b), 2, 3), \
            ((xa, sa), (xb, sb))
    _report(8, "star product matches operator Weyl oracle", t0)
