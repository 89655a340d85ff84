"""Semiclassical normal form and the hbar-series invariants alpha(hbar).

Starting from the classical normal form of the principal symbols, the
family is reduced level by level in hbar: at level l the residual

    r_j = hbar^l coefficient of  P_j - sum_k Mh_jk * (q_k - alpha_k)

is removed by one transport solve (a homological system with right-hand
side -N^{-1} r, N_jk = dF_j/dq_k) followed by a star-conjugation, and the
irremovable kernel part is absorbed into Mh and the constants alpha.  The
first-order constants satisfy alpha^(1) = -M(0)^{-1} r(0), the intrinsic
invariant of the family.

Truncation is by the weight  phase degree + 2 * (hbar order).  Every term
of the star product preserves this weight exactly (each power of hbar in
the expansion costs two phase derivatives), so cutting at a fixed weight
commutes with all the operations below; a plain rectangular cut does not,
because hbar^2 corrections of discarded high-degree terms would re-enter
at low degree.  Requests for (degree N, order N_h) therefore run at
weight W = N + 2 N_h, whose cone contains the full (N, N_h) rectangle.
Input symbols are taken as exact polynomials: coefficients beyond their
stored cuts are zero, not unknown.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .brackets import (exp_gauge_conjugate, moyal_bracket, moyal_lie_transform,
                       moyal_star, star_conjugate)
from .homological import IncompatibleSystem, _grade_symbol, solve_homological
from .linalg import invert
from .nf_classical import (ClassicalNF, CommutationViolated, IntegrableSystem,
                           NotInKernel, _chop, classical_normal_form,
                           from_q_polynomial, taylor_division, to_q_polynomial,
                           CertificateReport, FLOAT_NF_TOL)
from .poly import FLOAT, RATIONAL, PolySymbol
from .symplectic import model_symbols


class SingularM0(ValueError):
    """The nondegeneracy matrix M(0) is not invertible."""


def alpha_first_order(M0, r):
    """The closed first-order formula alpha^(1) = -M0^{-1} r for the
    subprincipal constants r_j (hbar^1 coefficients at the critical point)."""
    try:
        Minv = invert(M0, 0 if all(isinstance(e, (int, Fraction))
                                   for row in M0 for e in row) else 1e-12)
    except ValueError:
        raise SingularM0("M(0) is singular") from None
    from .linalg import mat_vec
    return [-v for v in mat_vec(Minv, r)]


# ----------------------------------------------- truncated series matrices


def _wcut(p: PolySymbol, W):
    """Drop all terms of weight (phase degree + 2 * hbar order) above W."""
    terms = {k: c for k, c in p.terms.items()
             if sum(k[0]) + sum(k[1]) + 2 * k[2] <= W}
    return PolySymbol(p.n, terms, p.deg_cut, p.h_cut, p.mode)


def _mat_sym_mul(A, B):
    n = len(A)
    m = len(B[0])
    return [[sum((A[i][k] * B[k][j] for k in range(len(B))),
                 start=PolySymbol.zero(A[0][0].n, A[0][0].deg_cut,
                                       A[0][0].h_cut, A[0][0].mode))
             for j in range(m)] for i in range(n)]


def _mat_sym_vec(A, v):
    return [sum((A[i][k] * v[k] for k in range(len(v))),
                start=PolySymbol.zero(A[0][0].n, A[0][0].deg_cut,
                                      A[0][0].h_cut, A[0][0].mode))
            for i in range(len(A))]


def _series_inverse(Nmat, tol=0):
    """Inverse of a matrix of symbols, as a truncated Neumann series.

    Requires the constant-term matrix to be invertible; the higher-degree
    part has phase degree >= 2 so the series terminates at the cut.
    """
    n = len(Nmat)
    proto = Nmat[0][0]
    N0 = [[e.constant_term() for e in row] for row in Nmat]
    try:
        N0inv = invert(N0, tol)
    except ValueError:
        raise SingularM0("constant part of the series matrix is singular") \
            from None
    const = [[PolySymbol.constant(proto.n, N0inv[i][j], proto.deg_cut,
                                  proto.h_cut, proto.mode)
              for j in range(n)] for i in range(n)]
    # R = N0^{-1} (N - N0): strictly positive minimum degree
    R = [[sum((const[i][k] * (Nmat[k][j]
                              - PolySymbol.constant(proto.n, N0[k][j],
                                                    proto.deg_cut,
                                                    proto.h_cut, proto.mode))
               for k in range(n)),
              start=PolySymbol.zero(proto.n, proto.deg_cut, proto.h_cut,
                                    proto.mode))
          for j in range(n)] for i in range(n)]
    out = const
    term = const
    for _ in range(proto.deg_cut // 2 + 1):
        term = [[-sum((R[i][k] * term[k][j] for k in range(n)),
                      start=PolySymbol.zero(proto.n, proto.deg_cut,
                                            proto.h_cut, proto.mode))
                 for j in range(n)] for i in range(n)]
        if all(e.is_zero() for row in term for e in row):
            break
        out = [[out[i][j] + term[i][j] for j in range(n)] for i in range(n)]
    return out


def _q_jacobian(F_list, q_list):
    """N_jk = dF_j/dq_k as symbols (functions of q)."""
    n = len(q_list)
    out = []
    for Fj in F_list:
        coeffs = to_q_polynomial(Fj, q_list)
        row = []
        for k in range(n):
            d = {}
            for gamma, c in coeffs.items():
                if gamma[k]:
                    red = gamma[:k] + (gamma[k] - 1,) + gamma[k + 1:]
                    d[red] = d.get(red, 0) + c * gamma[k]
            row.append(from_q_polynomial(d, q_list))
        out.append(row)
    return out


# --------------------------------------------------------------- main loop


@dataclass
class SemiclassicalNF:
    base: ClassicalNF
    Mh: list                  # n x n symbols in q with hbar-series entries
    alpha: list               # n dicts {level: scalar}
    conjugators: list         # [{"level": l, "kind": "exp"|"linear",
                              #   "symbol": PolySymbol}, ...]
    N: int
    N_h: int
    real_alpha_ok: bool = True
    gauge_unitary: bool = True

    def alpha_series(self, j, deg_cut=None, h_cut=None):
        """alpha_j as a constant hbar-series symbol."""
        proto = self.Mh[0][0]
        deg_cut = proto.deg_cut if deg_cut is None else deg_cut
        h_cut = proto.h_cut if h_cut is None else h_cut
        n = proto.n
        z = (0,) * n
        return PolySymbol(n, {(z, z, l): c for l, c in self.alpha[j].items()},
                          deg_cut, h_cut, proto.mode)

    def to_json(self):
        from .coeffs import coeff_to_json
        return {
            "base": self.base.to_json(),
            "Mh": [[p.to_json() for p in row] for row in self.Mh],
            "alpha": [{str(l): coeff_to_json(c) for l, c in a.items()}
                      for a in self.alpha],
            "conjugators": [{"level": c["level"], "kind": c["kind"],
                             "symbol": c["symbol"].to_json()}
                            for c in self.conjugators],
            "N": self.N, "N_h": self.N_h,
            "real_alpha_ok": self.real_alpha_ok,
            "gauge_unitary": self.gauge_unitary,
        }

    @classmethod
    def from_json(cls, obj):
        from .coeffs import coeff_from_json
        base = ClassicalNF.from_json(obj["base"])
        mode = RATIONAL if base.cartan.exact else FLOAT
        return cls(
            base,
            [[PolySymbol.from_json(p) for p in row] for row in obj["Mh"]],
            [{int(l): coeff_from_json(c, mode) for l, c in a.items()}
             for a in obj["alpha"]],
            [{"level": int(c["level"]), "kind": c["kind"],
              "symbol": PolySymbol.from_json(c["symbol"])}
             for c in obj["conjugators"]],
            int(obj["N"]), int(obj["N_h"]),
            bool(obj.get("real_alpha_ok", True)),
            bool(obj.get("gauge_unitary", True)))


def _apply_conjugator(P, conj, weight=None):
    if conj["kind"] == "exp":
        return exp_gauge_conjugate(P, conj["symbol"], conj["level"], weight)
    return star_conjugate(P, conj["symbol"], conj["level"] - 1,
                          weight=weight)


def _is_real_symbol(p, tol):
    from .coeffs import imag_part
    for c in p.terms.values():
        im = imag_part(c)
        bad = (im != 0) if tol == 0 else abs(float(im)) > tol
        if bad:
            return False
    return True


def _residuals(P_list, Mh, q_list, alpha, level):
    """hbar^level coefficients of P_j - sum_k Mh_jk * (q_k - alpha_k)."""
    n = len(q_list)
    proto = q_list[0]
    out = []
    for j in range(n):
        target = PolySymbol.zero(proto.n, proto.deg_cut, proto.h_cut,
                                 proto.mode)
        for k in range(n):
            z = (0,) * proto.n
            alpha_sym = PolySymbol(
                proto.n, {(z, z, l): c for l, c in alpha[k].items()},
                proto.deg_cut, proto.h_cut, proto.mode)
            target = target + moyal_star(Mh[j][k], q_list[k] - alpha_sym,
                                         proto.deg_cut)
        out.append(_wcut(P_list[j] - target,
                         proto.deg_cut).h_coefficient(level))
    return out


def semiclassical_normal_form(sys: IntegrableSystem, N: int, N_h: int,
                              seed=0, lambda_base=None) -> SemiclassicalNF:
    """Reduce a star-commuting family to Mh * (q - alpha(hbar)).

    Runs the classical normal form on the hbar^0 parts, lifts its
    generators to star-conjugations, then clears one hbar-level per pass,
    splitting each level's kernel remainder into Mh corrections and the
    constants alpha.

    lambda_base overrides the nonresonant weights used by the transport
    solves; the first-order constants are independent of this gauge
    choice (asserted in tests), higher orders are an open experiment.
    """
    if sys.h_cut < 1:
        raise ValueError("semiclassical reduction needs h_cut >= 1")
    N_h = min(N_h, sys.h_cut)
    W = N + 2 * N_h
    sys.check_involution(quantum=True)
    work = IntegrableSystem([p.with_cuts(deg_cut=W, h_cut=N_h)
                             for p in sys.symbols])
    base = classical_normal_form(work, W, seed=seed)
    mode = RATIONAL if (base.cartan.exact and sys.mode == RATIONAL) else FLOAT
    n = sys.n
    tol = 0 if mode == RATIONAL else FLOAT_NF_TOL
    symbols = work.symbols
    if mode == FLOAT:
        symbols = [p.to_float() for p in symbols]
    P_list = [_wcut(p.substitute_linear(base.cartan.S), W) for p in symbols]
    for _deg, a in base.generators:
        a = a.with_cuts(deg_cut=W, h_cut=N_h)
        if mode == FLOAT:
            a = a.to_float()
        P_list = [_wcut(moyal_lie_transform(P, a, W), W) for P in P_list]
    q_list = model_symbols(base.cartan.ctype, W, N_h, mode)
    M_sym = [[e.with_cuts(deg_cut=W, h_cut=N_h) for e in row]
             for row in base.M]
    if mode == FLOAT:
        M_sym = [[e.to_float() for e in row] for row in M_sym]
    F_now = [e.with_cuts(deg_cut=W, h_cut=N_h) for e in base.F]
    if mode == FLOAT:
        F_now = [e.to_float() for e in F_now]
    Nmat = _q_jacobian(F_now, q_list)
    Ninv = _series_inverse(Nmat, tol)
    Minv = _series_inverse(M_sym, tol)
    Mh = [[e for e in row] for row in M_sym]
    alpha = [dict() for _ in range(n)]
    conjugators = []
    for level in range(1, N_h + 1):
        r = _residuals(P_list, Mh, q_list, alpha, level)
        if all(ri.is_zero() for ri in r):
            continue
        g = _mat_sym_vec(Ninv, [-ri for ri in r])
        g = [gi.h_coefficient(0) for gi in g]
        if mode == FLOAT:
            g = [_chop(gi, 1e-13 * max(1.0, gi.max_norm())) for gi in g]
        try:
            sol = solve_homological(q_list, g, W, lambda_base=lambda_base)
        except IncompatibleSystem as exc:
            raise CommutationViolated(
                f"hbar^{level} residuals violate the transport "
                f"compatibility: {exc}") from exc
        d = sol.f
        # irremovable kernel remainder: F_j = -sum_k N_jk Fsol_k
        F_ker = [-v for v in _mat_sym_vec(Nmat, sol.F_list)]
        G = _mat_sym_vec(Minv, F_ker)
        G = [Gk.h_coefficient(0) for Gk in G]
        H = []
        for k in range(n):
            try:
                g0, coeffs = taylor_division(G[k], q_list)
            except NotInKernel as exc:
                raise CommutationViolated(
                    f"hbar^{level} kernel remainder is outside the "
                    f"q-algebra: {exc}") from exc
            if g0 != 0:
                alpha[k][level] = -g0
            H.append(coeffs)
        # Mh_jm += hbar^level * sum_k M_jk H_km
        HT = [[H[k][m] for m in range(n)] for k in range(n)]
        delta = _mat_sym_mul(M_sym, HT)
        for j in range(n):
            for m in range(n):
                Mh[j][m] = _wcut(Mh[j][m] + delta[j][m].times_h(level), W)
        if not d.is_zero():
            kind = "exp" if level == 1 else "linear"
            conj = {"level": level, "kind": kind, "symbol": d}
            conjugators.append(conj)
            P_list = [_wcut(_apply_conjugator(P, conj, W), W) for P in P_list]
        check = _residuals(P_list, Mh, q_list, alpha, level)
        for j, cj in enumerate(check):
            ok = cj.is_zero() if tol == 0 else \
                cj.max_norm() <= 1e-8 * max(1.0, P_list[j].max_norm())
            if not ok:
                raise CommutationViolated(
                    f"hbar^{level} residual of symbol {j} did not clear "
                    f"(norm {cj.max_norm():.3e})")
    inputs_real = all(_is_real_symbol(p, 0 if sys.mode == RATIONAL else 1e-14)
                      for p in sys.symbols)
    real_ok = True
    unitary = True
    if inputs_real:
        rtol = 0 if mode == RATIONAL else 1e-9
        from .coeffs import imag_part
        for a in alpha:
            for c in a.values():
                im = imag_part(c)
                if (im != 0) if rtol == 0 else abs(float(im)) > rtol:
                    real_ok = False
        for conj in conjugators:
            if not _is_real_symbol(conj["symbol"], rtol):
                unitary = False
    return SemiclassicalNF(base, Mh, alpha, conjugators, N, N_h,
                           real_ok, unitary)


def verify_semiclassical_nf(nf: SemiclassicalNF, sys: IntegrableSystem,
                            tol=None) -> CertificateReport:
    """Replay every conjugation from scratch and check the defining identity.

    Reports the first (symbol, degree, hbar-order) where
    P_j != sum_k Mh_jk * (q_k - alpha_k) within the cuts, and checks that
    every hbar-coefficient of every Mh entry stays in the kernel algebra.
    """
    n = sys.n
    mode = nf.Mh[0][0].mode
    W = nf.N + 2 * nf.N_h
    if tol is None:
        tol = 0 if mode == RATIONAL else 1e-8
    symbols = [p.with_cuts(deg_cut=W, h_cut=nf.N_h) for p in sys.symbols]
    if mode == FLOAT:
        symbols = [p.to_float() for p in symbols]
    P_list = [_wcut(p.substitute_linear(nf.base.cartan.S), W)
              for p in symbols]
    for _deg, a in nf.base.generators:
        a = a.with_cuts(deg_cut=W, h_cut=nf.N_h)
        if mode == FLOAT:
            a = a.to_float()
        P_list = [_wcut(moyal_lie_transform(P, a, W), W) for P in P_list]
    for conj in nf.conjugators:
        P_list = [_wcut(_apply_conjugator(P, conj, W), W) for P in P_list]
    q_list = model_symbols(nf.base.cartan.ctype, W, nf.N_h, mode)
    worst = 0.0
    failure = None
    scale = max([1.0] + [P.max_norm() for P in P_list])
    for level in range(0, nf.N_h + 1):
        r = _residuals(P_list, nf.Mh, q_list, nf.alpha, level)
        for j, rj in enumerate(r):
            for k in range(0, W - 2 * level + 1):
                piece = _grade_symbol(rj, k)
                nrm = piece.max_norm()
                worst = max(worst, nrm)
                bad = (not piece.is_zero()) if tol == 0 else nrm > tol * scale
                if bad and failure is None:
                    failure = (j, k, level)
    commutant_ok = True
    for row in nf.Mh:
        for entry in row:
            for level in range(0, nf.N_h + 1):
                coeff = entry.h_coefficient(level)
                if coeff.is_zero():
                    continue
                try:
                    to_q_polynomial(coeff, q_list)
                except NotInKernel:
                    commutant_ok = False
    if failure is None and commutant_ok:
        return CertificateReport(True, None, worst,
                                 f"identity holds through degree {nf.N}, "
                                 f"hbar^{nf.N_h}")
    detail = []
    if failure is not None:
        detail.append(f"first failing (symbol, degree, hbar-order): {failure}")
    if not commutant_ok:
        detail.append("Mh entry leaves the semiclassical commutant")
        if failure is None:
            failure = (-1, -1, -1)
    return CertificateReport(False, failure, worst, "; ".join(detail))
