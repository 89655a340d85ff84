"""Formal Birkhoff-type normal form for commuting families.

Given n Poisson-commuting formal series with nondegenerate quadratic parts,
a sequence of time-1 Lie transforms with homogeneous generators a_3..a_N
turns every series into a polynomial in the model quadratics q_1..q_n.
The result is reported as F_i = sum_j M_ij(q) q_j with M(0) invertible.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .brackets import lie_transform, moyal_bracket, poisson
from .homological import (IncompatibleSystem, _grade_symbol, solve_homological)
from .linalg import invert, mat_vec
from .poly import FLOAT, RATIONAL, PolySymbol
from .symplectic import CartanBasis, NotCartan, QuadraticForm, model_symbols, williamson_classify

COMMUTE_TOL = 1e-10
FLOAT_NF_TOL = 1e-9


class CommutationViolated(ValueError):
    """A pair of input series fails to commute up to the cuts."""


class NotInKernel(ValueError):
    """Symbol is not a polynomial in the model quadratics."""


@dataclass
class IntegrableSystem:
    """n formal series vanishing at the origin, pairwise in involution."""

    symbols: list
    constants: list = field(default_factory=list)

    def __post_init__(self):
        n = len(self.symbols)
        cleaned = []
        consts = []
        for p in self.symbols:
            if p.n != n:
                raise ValueError(f"need {p.n} symbols for {p.n} degrees of "
                                 f"freedom, got {n}")
            c = p.constant_term()
            consts.append(c)
            if c != 0:
                z = (0,) * n
                terms = dict(p.terms)
                del terms[(z, z, 0)]
                p = PolySymbol(n, terms, p.deg_cut, p.h_cut, p.mode)
            cleaned.append(p)
        self.symbols = cleaned
        if not self.constants:
            self.constants = consts

    @property
    def n(self):
        return len(self.symbols)

    @property
    def mode(self):
        return self.symbols[0].mode

    @property
    def deg_cut(self):
        return self.symbols[0].deg_cut

    @property
    def h_cut(self):
        return self.symbols[0].h_cut

    def check_involution(self, quantum=None):
        """Raise CommutationViolated if any pair fails to commute."""
        if quantum is None:
            quantum = self.h_cut > 0
        bracket = moyal_bracket if quantum else poisson
        scale = max([1.0] + [p.max_norm() for p in self.symbols]) ** 2
        for i in range(self.n):
            for j in range(i + 1, self.n):
                d = bracket(self.symbols[i], self.symbols[j])
                if self.mode == RATIONAL:
                    ok = d.is_zero()
                else:
                    ok = d.max_norm() <= COMMUTE_TOL * scale
                if not ok:
                    raise CommutationViolated(
                        f"symbols {i} and {j} do not commute "
                        f"(residual norm {d.max_norm():.3e})")

    def to_json(self):
        from .coeffs import coeff_to_json
        return {"symbols": [p.to_json() for p in self.symbols],
                "constants": [coeff_to_json(c) for c in self.constants]}

    @classmethod
    def from_json(cls, obj):
        return cls([PolySymbol.from_json(t) for t in obj["symbols"]])


# ---------------------------------------------------- kernel-algebra algebra


_QPOLY_CACHE = {}


def _q_monomial_exponents(n, d):
    """Exponent vectors gamma with |gamma| = d, descending lex."""
    out = []
    for combo in itertools.product(range(d, -1, -1), repeat=n):
        if sum(combo) == d:
            out.append(combo)
    return out


def _q_power_products(q_list, d):
    """Expanded symbols of all degree-d products of the q_j, with exponents."""
    key = (tuple(hash(q) for q in q_list), d)
    if key not in _QPOLY_CACHE:
        n = len(q_list)
        prods = []
        for gamma in _q_monomial_exponents(n, d):
            p = PolySymbol.constant(n, 1, q_list[0].deg_cut,
                                    q_list[0].h_cut, q_list[0].mode)
            for j, e in enumerate(gamma):
                for _ in range(e):
                    p = p * q_list[j]
            prods.append((gamma, p))
        _QPOLY_CACHE[key] = prods
    return _QPOLY_CACHE[key]


def to_q_polynomial(g: PolySymbol, q_list):
    """Coefficients {gamma: c} with g = sum c * q^gamma; NotInKernel if not."""
    from .linalg import solve as lin_solve
    n = g.n
    mode = g.mode
    tol = 0 if mode == RATIONAL else FLOAT_NF_TOL
    coeffs = {}
    max_deg = g.max_phase_degree()
    for k in range(0, max(max_deg, 0) + 1):
        gk = _grade_symbol(g, k)
        if gk.is_zero():
            continue
        if k % 2:
            raise NotInKernel(f"odd-degree terms at degree {k} cannot be "
                              "polynomials in the quadratics")
        prods = _q_power_products(q_list, k // 2)
        keys = sorted({key for _, p in prods for key in p.terms}
                      | set(gk.terms))
        A = [[p.terms.get(key, 0) for _, p in prods] for key in keys]
        b = [gk.terms.get(key, 0) for key in keys]
        sol = lin_solve(A, b, tol)
        if sol is None:
            raise NotInKernel(f"degree-{k} component is outside the "
                              "kernel algebra")
        if mode == FLOAT:
            # exactness check: residual must be small
            res = max(abs(complex(sum(A[i][j] * sol[j]
                                      for j in range(len(sol))) - b[i]))
                      for i in range(len(b)))
            if res > FLOAT_NF_TOL * max(1.0, g.max_norm()):
                raise NotInKernel(f"degree-{k} component is outside the "
                                  "kernel algebra")
        for (gamma, _), c in zip(prods, sol):
            if c != 0:
                coeffs[gamma] = c
    return coeffs


def from_q_polynomial(coeffs, q_list):
    """Expand {gamma: c} back into a symbol."""
    n = len(q_list)
    out = PolySymbol.zero(n, q_list[0].deg_cut, q_list[0].h_cut,
                          q_list[0].mode)
    for gamma, c in coeffs.items():
        p = PolySymbol.constant(n, c, q_list[0].deg_cut, q_list[0].h_cut,
                                q_list[0].mode)
        for j, e in enumerate(gamma):
            for _ in range(e):
                p = p * q_list[j]
        out = out + p
    return out


def taylor_division(g: PolySymbol, q_list):
    """Write g = g(0) + sum_i coeffs_i * q_i, greedily dividing by q_1 first.

    g must lie in the kernel algebra.  Each q-monomial c q^gamma is assigned
    to the first i with gamma_i > 0, making the decomposition deterministic.
    """
    coeffs = to_q_polynomial(g, q_list)
    n = len(q_list)
    g0 = coeffs.pop((0,) * n, 0)
    parts = [dict() for _ in range(n)]
    for gamma, c in coeffs.items():
        i = next(j for j, e in enumerate(gamma) if e > 0)
        reduced = gamma[:i] + (gamma[i] - 1,) + gamma[i + 1:]
        parts[i][reduced] = parts[i].get(reduced, 0) + c
    return g0, [from_q_polynomial(p, q_list) for p in parts]


# ------------------------------------------------------------- normal form


@dataclass
class ClassicalNF:
    cartan: CartanBasis
    generators: list          # [(degree, PolySymbol a_k), ...]
    F: list                   # n symbols, polynomials in q
    M: list                   # n x n PolySymbols in q
    N: int
    constants: list = field(default_factory=list)

    def M0(self):
        return [[entry.constant_term() for entry in row] for row in self.M]

    def to_json(self):
        from .coeffs import coeff_to_json
        return {
            "cartan": self.cartan.to_json(),
            "generators": [{"degree": d, "symbol": a.to_json()}
                           for d, a in self.generators],
            "F": [p.to_json() for p in self.F],
            "M": [[p.to_json() for p in row] for row in self.M],
            "N": self.N,
            "constants": [coeff_to_json(c) for c in self.constants],
        }

    @classmethod
    def from_json(cls, obj):
        from .symplectic import CartanBasis
        return cls(
            CartanBasis.from_json(obj["cartan"]),
            [(g["degree"], PolySymbol.from_json(g["symbol"]))
             for g in obj["generators"]],
            [PolySymbol.from_json(p) for p in obj["F"]],
            [[PolySymbol.from_json(p) for p in row] for row in obj["M"]],
            int(obj["N"]))


def classical_normal_form(sys: IntegrableSystem, N: int,
                          seed=0) -> ClassicalNF:
    """Normalize a commuting family up to degree N.

    Classifies the quadratic parts, moves to the standard frame, and
    removes all non-kernel terms degree by degree with Lie transforms.
    """
    # involution of the principal (hbar^0) parts only: a star-commuting
    # quantum family generally has nonzero Poisson brackets at higher levels
    IntegrableSystem([p.h_coefficient(0).with_cuts(h_cut=0)
                      for p in sys.symbols]).check_involution(quantum=False)
    n = sys.n
    basis = williamson_classify(
        [QuadraticForm.from_symbol(p) for p in sys.symbols], seed=seed)
    mode = RATIONAL if (basis.exact and sys.mode == RATIONAL) else FLOAT
    symbols = [p.h_coefficient(0) for p in sys.symbols]
    if mode == FLOAT:
        symbols = [p.to_float() for p in symbols]
    deg_cut = min(sys.deg_cut, max(N, 2))
    symbols = [p.with_cuts(deg_cut=deg_cut, h_cut=0) for p in symbols]
    f_list = [p.substitute_linear(basis.S) for p in symbols]
    q_list = model_symbols(basis.ctype, deg_cut, 0, mode)
    tol = 0 if mode == RATIONAL else FLOAT_NF_TOL
    Cinv = invert(basis.C, tol)
    generators = []
    for k in range(3, N + 1):
        r = [_grade_symbol(fi, k) for fi in f_list]
        g_std = []
        for i in range(n):
            gi = PolySymbol.zero(n, deg_cut, 0, mode)
            for j in range(n):
                gi = gi + r[j].scale(Cinv[i][j])
            g_std.append(gi)
        try:
            sol = solve_homological(q_list, g_std, k)
        except IncompatibleSystem as exc:
            raise CommutationViolated(
                f"degree-{k} terms are not jointly normalizable: "
                f"{exc}") from exc
        a_k = _grade_symbol(sol.f, k)
        if not a_k.is_zero():
            generators.append((k, a_k))
            f_list = [lie_transform(fi, a_k) for fi in f_list]
    F_list = []
    M = []
    for i, fi in enumerate(f_list):
        Fi = PolySymbol(n, {key: c for key, c in fi.terms.items()
                            if sum(key[0]) + sum(key[1]) <= N},
                        deg_cut, 0, mode)
        if mode == FLOAT:
            Fi = _chop(Fi, FLOAT_NF_TOL * max(1.0, fi.max_norm()))
        try:
            g0, coeffs = taylor_division(Fi, q_list)
        except NotInKernel as exc:
            raise CommutationViolated(
                f"normalized symbol {i} left the kernel algebra: "
                f"{exc}") from exc
        if g0 != 0:
            raise CommutationViolated(
                f"normalized symbol {i} has a constant term {g0}")
        F_list.append(Fi)
        M.append(coeffs)
    try:
        invert([[row[j].constant_term() for j in range(n)] for row in M], tol)
    except ValueError:
        raise NotCartan("M(0) is singular") from None
    return ClassicalNF(basis, generators, F_list, M, N, sys.constants)


def _chop(p: PolySymbol, tol):
    terms = {k: c for k, c in p.terms.items() if abs(complex(c)) > tol}
    return PolySymbol(p.n, terms, p.deg_cut, p.h_cut, p.mode)


@dataclass
class CertificateReport:
    ok: bool
    first_failure: tuple = None      # (pair or symbol index, degree)
    max_residual: float = 0.0
    details: str = ""

    def to_json(self):
        return {"ok": self.ok,
                "first_failure": list(self.first_failure)
                if self.first_failure else None,
                "max_residual": self.max_residual,
                "details": self.details}


def verify_classical_nf(nf: ClassicalNF, sys: IntegrableSystem,
                        tol=None) -> CertificateReport:
    """Replay the transformation and certify {f_i o phi, q_j} = 0 up to N."""
    n = sys.n
    mode = RATIONAL if (nf.cartan.exact and sys.mode == RATIONAL) else FLOAT
    deg_cut = min(sys.deg_cut, max(nf.N, 2))
    symbols = [p.h_coefficient(0).with_cuts(deg_cut=deg_cut, h_cut=0)
               for p in sys.symbols]
    if mode == FLOAT:
        symbols = [p.to_float() for p in symbols]
    f_list = [p.substitute_linear(nf.cartan.S) for p in symbols]
    for _deg, a in nf.generators:
        f_list = [lie_transform(fi, a) for fi in f_list]
    q_list = model_symbols(nf.cartan.ctype, deg_cut, 0, mode)
    if tol is None:
        # roundoff accumulates at the scale of the input coefficients, not
        # of the (normalized, O(1)) transformed symbols
        tol = 0 if mode == RATIONAL else \
            COMMUTE_TOL * max([1.0] + [p.max_norm() for p in f_list]
                              + [p.max_norm() for p in symbols])
    worst = 0.0
    failure = None
    for i, fi in enumerate(f_list):
        for j, qj in enumerate(q_list):
            br = poisson(fi, qj)
            for k in range(0, nf.N + 1):
                piece = _grade_symbol(br, k)
                nrm = piece.max_norm()
                worst = max(worst, nrm)
                bad = (not piece.is_zero()) if tol == 0 else nrm > tol
                if bad and failure is None:
                    failure = (i, j, k)
        # transformed symbol must match the reported F up to degree N
        diff = fi - nf.F[i]
        for k in range(0, nf.N + 1):
            piece = _grade_symbol(diff, k)
            nrm = piece.max_norm()
            bad = (not piece.is_zero()) if tol == 0 else nrm > tol
            if bad and failure is None:
                failure = (i, -1, k)
                worst = max(worst, nrm)
    if failure is None:
        return CertificateReport(True, None, worst, "all brackets vanish "
                                 f"through degree {nf.N}")
    return CertificateReport(False, failure, worst,
                             "first failing (symbol, model, degree): "
                             f"{failure}")
