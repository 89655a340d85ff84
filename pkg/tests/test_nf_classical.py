"""Classical normal form: kernel-algebra arithmetic, normalization,
certification, and mutation sensitivity."""
import itertools
import random
from fractions import Fraction

import pytest

from morsenf.brackets import lie_transform, poisson
from morsenf.homological import _grade_symbol
from morsenf.nf_classical import (ClassicalNF, CommutationViolated,
                                  IntegrableSystem, NotInKernel,
                                  classical_normal_form, from_q_polynomial,
                                  taylor_division, to_q_polynomial,
                                  verify_classical_nf)
from morsenf.poly import FLOAT, PolySymbol
from morsenf.symplectic import model_symbols
from morsenf.systems import cartan_type_from_counts, model_system

ALL_TYPES = [(1, 0, 0), (0, 1, 0), (2, 0, 0), (1, 1, 0), (0, 2, 0),
             (0, 0, 1)]


def models(counts, deg_cut=6):
    return model_symbols(cartan_type_from_counts(*counts), deg_cut, 0)


def test_q_polynomial_round_trip():
    q = models((1, 1, 0), 8)
    g = q[0] * q[0] + q[0] * q[1].scale(3) - q[1].scale(Fraction(1, 2))
    coeffs = to_q_polynomial(g, q)
    assert coeffs == {(2, 0): Fraction(1), (1, 1): Fraction(3),
                      (0, 1): Fraction(-1, 2)}
    assert from_q_polynomial(coeffs, q) == g


def test_q_polynomial_rejects_non_kernel():
    q = models((0, 1, 0), 6)
    x = PolySymbol.variable(1, 0, 6, 0)
    with pytest.raises(NotInKernel):
        to_q_polynomial(x * x, q)
    with pytest.raises(NotInKernel):
        to_q_polynomial(x * x * x, q)  # odd degree


def test_taylor_division_greedy_gauge():
    # g = 2 q1 + q1 q2 + 5: constant splits off, q1-monomials go to slot 1
    q = models((1, 1, 0), 8)
    g = q[0].scale(2) + q[0] * q[1] + PolySymbol.constant(2, 5, 8, 0)
    g0, parts = taylor_division(g, q)
    assert g0 == 5
    assert parts[0] == PolySymbol.constant(2, 2, 8, 0) + q[1]
    assert parts[1].is_zero()
    # q2^2 is assigned to the second slot
    g0b, partsb = taylor_division(q[1] * q[1], q)
    assert g0b == 0
    assert partsb[0].is_zero() and partsb[1] == q[1]


def test_cubic_term_removed():
    # elliptic oscillator with an x^3 perturbation normalizes to a q-series
    q = models((1, 0, 0), 6)[0]
    x = PolySymbol.variable(1, 0, 6, 0)
    sys = IntegrableSystem([q + x * x * x])
    nf = classical_normal_form(sys, 6)
    assert any(d == 3 for d, _ in nf.generators)
    coeffs = to_q_polynomial(nf.F[0], models((1, 0, 0), 6))
    assert coeffs[(1,)] == 1  # the quadratic part survives unchanged
    rep = verify_classical_nf(nf, sys)
    assert rep.ok and rep.max_residual == 0


def test_all_types_normalize_and_verify_exact():
    for counts in ALL_TYPES:
        sys = model_system(counts, seed=3, N=6)
        nf = classical_normal_form(sys, 6)
        assert (nf.cartan.ctype.m_e, nf.cartan.ctype.m_h,
                nf.cartan.ctype.m_f) == counts
        rep = verify_classical_nf(nf, sys)
        assert rep.ok, rep.details
        assert rep.max_residual == 0
        # residual identity: {F_i, q_j} = 0 holds exactly by construction
        q = models(counts, 6)
        for Fi in nf.F:
            assert all(poisson(Fi, qj).is_zero() for qj in q)


def _signed_permutations(n):
    for perm in itertools.permutations(range(n)):
        for signs in itertools.product((1, -1), repeat=n):
            yield [[Fraction(signs[j]) if perm[i] == j else Fraction(0)
                    for j in range(n)] for i in range(n)]


def test_planted_recombination_recovered():
    """M(0) equals the planted constant mixing up to block-order convention."""
    import morsenf.systems as systems
    for counts in ALL_TYPES:
        for seed in (1, 2):
            rng = random.Random(seed)
            # replicate the fixture's planted constant recombination
            ctype = cartan_type_from_counts(*counts)
            C0 = systems.random_invertible(ctype.n, rng)
            sys = model_system(counts, seed=seed, N=6)
            nf = classical_normal_form(sys, 6)
            M0 = nf.M0()
            n = ctype.n
            found = False
            for P in _signed_permutations(n):
                cand = [[sum(C0[i][k] * P[k][j] for k in range(n))
                         for j in range(n)] for i in range(n)]
                if cand == M0:
                    found = True
                    break
            assert found, (counts, seed, M0, C0)


def test_noncommuting_input_rejected():
    q = models((1, 1, 0), 6)
    x1 = PolySymbol.variable(2, 0, 6, 0)
    bad = IntegrableSystem.__new__(IntegrableSystem)
    bad.symbols = [q[0], q[1] + x1 ** 3]
    bad.constants = [0, 0]
    with pytest.raises(CommutationViolated):
        classical_normal_form(bad, 6)


def test_mutated_generator_fails_verification():
    sys = model_system((1, 1, 0), seed=4, N=6)
    nf = classical_normal_form(sys, 6)
    assert verify_classical_nf(nf, sys).ok
    assert nf.generators, "fixture should need at least one generator"
    deg, a = nf.generators[0]
    bump = PolySymbol.monomial(2, (deg, 0), (0, 0), coeff=Fraction(1, 7),
                               deg_cut=a.deg_cut)
    tampered = ClassicalNF(nf.cartan, [(deg, a + bump)] + nf.generators[1:],
                           nf.F, nf.M, nf.N, nf.constants)
    rep = verify_classical_nf(tampered, sys)
    assert not rep.ok
    assert rep.first_failure is not None


def test_float_mode_round_trip():
    sys = model_system((1, 1, 0), seed=5, N=6)
    fsys = IntegrableSystem([p.to_float() for p in sys.symbols])
    nf = classical_normal_form(fsys, 6)
    assert nf.F[0].mode == FLOAT
    rep = verify_classical_nf(nf, fsys)
    assert rep.ok, rep.details
    assert rep.max_residual < 1e-7


def test_nf_json_round_trip():
    sys = model_system((0, 0, 1), seed=2, N=6)
    nf = classical_normal_form(sys, 6)
    again = ClassicalNF.from_json(nf.to_json())
    assert again.F == nf.F
    assert again.M == nf.M
    assert again.generators == nf.generators
    assert verify_classical_nf(again, sys).ok


def test_constant_terms_recorded():
    q = models((0, 1, 0), 6)[0]
    sys = IntegrableSystem([q + PolySymbol.constant(1, Fraction(3, 2), 6, 0)])
    assert sys.constants == [Fraction(3, 2)]
    assert sys.symbols[0].constant_term() == 0
