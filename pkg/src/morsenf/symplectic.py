"""Symplectic linear algebra and Williamson classification.

Quadratic Hamiltonians at a common nondegenerate critical point form a
Cartan subalgebra of sp(2n) exactly when they commute, span an
n-dimensional space, and a generic combination is semisimple.  This module
checks those conditions and constructs a linear symplectic frame S plus a
recombination matrix C writing every input form as a combination of the
three model blocks:

    hyperbolic   x_j xi_j
    elliptic     x_j^2 + xi_j^2
    focus-focus  (x_j xi_{j+1} - x_{j+1} xi_j,  x_j xi_j + x_{j+1} xi_{j+1})

Frames are exact (Fraction / GaussianRational) whenever the inputs and the
spectrum are rational; otherwise the construction falls back to floats.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

import sympy

from .coeffs import GaussianRational, is_exact, normalize
from .linalg import identity, invert, mat_mul, mat_vec, nullspace, rank, transpose
from .poly import FLOAT, RATIONAL, PolySymbol

TOL_SYMP = 1e-9
TOL_EIG = 1e-8
MAX_RETRIES = 20


class NotCartan(ValueError):
    """The quadratic family fails a Cartan-subalgebra check."""


class ResonantGenericityFailure(NotCartan):
    """No random combination with simple spectrum was found."""


# --------------------------------------------------------------- basic forms


def standard_J(n):
    """The standard symplectic matrix [[0, I], [-I, 0]] over Fractions."""
    J = [[Fraction(0)] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        J[i][n + i] = Fraction(1)
        J[n + i][i] = Fraction(-1)
    return J


def omega(u, v):
    """Symplectic pairing u^T J v in the standard frame."""
    n = len(u) // 2
    total = 0
    for i in range(n):
        total = total + u[i] * v[n + i] - u[n + i] * v[i]
    return total


def _refine_symplectic(S, sweeps=3):
    """Newton polish of a nearly symplectic float matrix.

    The defect E = S^T J S - J is antisymmetric, and S(I + J E / 2) cancels
    it to second order, so roundoff amplified by large input coefficients
    collapses to machine precision in a sweep or two.
    """
    m = len(S)
    n = m // 2
    J = standard_J(n)
    for _ in range(sweeps):
        E = mat_mul(mat_mul(transpose(S), J), S)
        for i in range(m):
            for j in range(m):
                E[i][j] -= J[i][j]
        resid = max(abs(float(e)) for row in E for e in row)
        if resid < 1e-15:
            break
        half_JE = mat_mul(J, E)
        corr = [[(1.0 if i == j else 0.0) + 0.5 * float(half_JE[i][j])
                 for j in range(m)] for i in range(m)]
        S = mat_mul(S, corr)
    return S


def check_symplectic(S, tol=TOL_SYMP):
    """True iff S^T J S = J (exactly for exact entries, else within tol)."""
    m = len(S)
    if m % 2 or any(len(row) != m for row in S):
        return False
    n = m // 2
    J = standard_J(n)
    exact = all(is_exact(e) for row in S for e in row)
    P = mat_mul(mat_mul(transpose(S), J), S)
    for i in range(m):
        for j in range(m):
            d = P[i][j] - J[i][j]
            if exact:
                if d != 0:
                    return False
            elif abs(complex(d)) > tol:
                return False
    return True


class QuadraticForm:
    """A quadratic Hamiltonian stored as its symmetric Hessian matrix Q.

    The associated function is q(z) = 1/2 z^T Q z, so x^2 + xi^2 has
    Q = diag(2, 2) and x xi has the off-diagonal pair (1, 1).
    """

    __slots__ = ("Q", "n", "exact")

    def __init__(self, Q):
        m = len(Q)
        if m % 2 or any(len(row) != m for row in Q):
            raise ValueError("Hessian must be square of even size")
        self.n = m // 2
        self.exact = all(is_exact(e) for row in Q for e in row)
        if self.exact:
            self.Q = [[Fraction(e) if isinstance(e, int) else e for e in row]
                      for row in Q]
        else:
            self.Q = [[float(e) for e in row] for row in Q]
        for i in range(m):
            for j in range(i + 1, m):
                d = self.Q[i][j] - self.Q[j][i]
                if (d != 0) if self.exact else (abs(d) > 1e-12):
                    raise ValueError("Hessian must be symmetric")

    @classmethod
    def from_symbol(cls, p: PolySymbol):
        """Hessian at 0 of the degree-2 part of a symbol (hbar^0 terms)."""
        return hessian_at(p, [0] * (2 * p.n))

    def to_symbol(self, deg_cut=10, h_cut=0):
        mode = RATIONAL if self.exact else FLOAT
        n = self.n
        out = PolySymbol.zero(n, deg_cut, h_cut, mode)
        half = Fraction(1, 2) if self.exact else 0.5
        for i in range(2 * n):
            for j in range(2 * n):
                c = self.Q[i][j]
                if c == 0:
                    continue
                zi = PolySymbol.variable(n, i, deg_cut, h_cut, mode)
                zj = PolySymbol.variable(n, j, deg_cut, h_cut, mode)
                out = out + (zi * zj).scale(c * half)
        return out

    def hamiltonian_matrix(self):
        """A = J Q, the linearization of the Hamiltonian flow."""
        return mat_mul(standard_J(self.n), self.Q)

    def to_json(self):
        from .coeffs import coeff_to_json
        return [[coeff_to_json(e) for e in row] for row in self.Q]


def hessian_at(f: PolySymbol, point):
    """Matrix of second partial derivatives of f at the given 2n-point."""
    n = f.n
    if len(point) != 2 * n:
        raise ValueError("point must have 2n entries")
    g = f.h_coefficient(0)
    rows = []
    firsts = [g.diff(i) for i in range(2 * n)]
    for i in range(2 * n):
        rows.append([firsts[i].diff(j).evaluate(point) for j in range(2 * n)])
    return QuadraticForm(rows)


# ----------------------------------------------------- Cartan verification


@dataclass
class CartanReport:
    commuting: bool
    span_ok: bool
    semisimple: bool
    witness: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    @property
    def ok(self):
        return (self.commuting and self.span_ok and self.semisimple
                and not self.failures)

    def to_json(self):
        return {"commuting": self.commuting, "span_ok": self.span_ok,
                "semisimple": self.semisimple,
                "witness": [str(c) for c in self.witness],
                "failures": list(self.failures)}


def _coerce_forms(q_list):
    forms = []
    for q in q_list:
        if isinstance(q, QuadraticForm):
            forms.append(q)
        elif isinstance(q, PolySymbol):
            forms.append(QuadraticForm.from_symbol(q))
        else:
            forms.append(QuadraticForm(q))
    return forms


def _mat_norm(A):
    return max((sum(abs(complex(e)) ** 2 for e in row) for row in A),
               default=1.0) ** 0.5 or 1.0


def _commutator_zero(A, B, tol):
    AB = mat_mul(A, B)
    BA = mat_mul(B, A)
    for ra, rb in zip(AB, BA):
        for a, b in zip(ra, rb):
            d = a - b
            if (d != 0) if tol == 0 else (abs(complex(d)) > tol):
                return False
    return True


def _witness_matrix(mats, coeffs):
    m = len(mats[0])
    out = [[0] * m for _ in range(m)]
    for c, A in zip(coeffs, mats):
        for i in range(m):
            for j in range(m):
                out[i][j] = out[i][j] + c * A[i][j]
    return out


def _eigenvalues_distinct(A, exact, tol):
    """Eigenvalues of A and whether they are pairwise distinct."""
    if exact:
        M = sympy.Matrix([[sympy.Rational(e.numerator, e.denominator)
                           for e in row] for row in A])
        p = M.charpoly(sympy.Symbol("_t"))
        # simple spectrum iff the characteristic polynomial is squarefree
        distinct = sympy.degree(sympy.gcd(p, p.diff())) == 0
        return None, distinct
    import numpy as np
    vals = np.linalg.eigvals(np.array(A, dtype=float))
    sep = tol * _mat_norm(A)
    distinct = all(abs(vals[i] - vals[j]) > sep
                   for i in range(len(vals)) for j in range(i + 1, len(vals)))
    return vals, distinct


def _semisimple_check(A, exact, tol):
    if exact:
        M = sympy.Matrix([[sympy.Rational(e.numerator, e.denominator)
                           for e in row] for row in A])
        return M.is_diagonalizable()
    import numpy as np
    An = np.array(A, dtype=float)
    vals = np.linalg.eigvals(An)
    sep = max(tol * _mat_norm(A), 1e-300)
    used = [False] * len(vals)
    for i, lam in enumerate(vals):
        if used[i]:
            continue
        cluster = [j for j in range(len(vals)) if abs(vals[j] - lam) <= sep]
        for j in cluster:
            used[j] = True
        s = np.linalg.svd(An - lam * np.eye(len(A)), compute_uv=False)
        deficiency = int(np.sum(s <= tol * max(s[0], 1.0)))
        if deficiency != len(cluster):
            return False
    return True


def verify_cartan(q_list, seed=0, max_retries=MAX_RETRIES) -> CartanReport:
    """Check the three Cartan-subalgebra conditions for n quadratic forms.

    Reports pairwise commutation of the Hamiltonian matrices, span
    dimension n, and semisimplicity of a generic integer combination.
    """
    forms = _coerce_forms(q_list)
    n = forms[0].n
    exact = all(f.exact for f in forms)
    failures = []
    if len(forms) != n:
        failures.append(f"expected {n} forms in dimension {2 * n}, "
                        f"got {len(forms)}")
    mats = [f.hamiltonian_matrix() for f in forms]
    tol = 0 if exact else TOL_EIG * max(_mat_norm(A) for A in mats)
    commuting = True
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            if not _commutator_zero(mats[i], mats[j], tol):
                commuting = False
                failures.append(f"forms {i} and {j} do not Poisson-commute")
    span_rows = [[e for row in f.Q for e in row] for f in forms]
    span_dim = rank(span_rows, 0 if exact else TOL_EIG)
    span_ok = span_dim == n
    if not span_ok:
        failures.append(f"span dimension {span_dim} != {n}")
    rng = random.Random(seed)
    witness = None
    semisimple = False
    last = None
    for _ in range(max_retries):
        coeffs = [rng.randint(1, 1000) for _ in range(len(mats))]
        if not exact:
            coeffs = [float(c) for c in coeffs]
        A = _witness_matrix(mats, coeffs)
        last = (coeffs, A)
        vals, distinct = _eigenvalues_distinct(A, exact, TOL_EIG)
        if distinct:
            witness = coeffs
            semisimple = True
            break
    if witness is None:
        coeffs, A = last
        witness = coeffs
        semisimple = _semisimple_check(A, exact, TOL_EIG)
        if not semisimple:
            failures.append("generic combination is not semisimple")
        else:
            failures.append("no combination with simple spectrum found "
                            f"in {max_retries} tries (resonant family)")
    return CartanReport(commuting, span_ok, semisimple, witness, failures)


# ------------------------------------------------------------ classification


@dataclass
class Block:
    kind: str           # "hyperbolic" | "elliptic" | "focus"
    positions: tuple    # one index, or a pair for focus-focus

    def to_json(self):
        return {"kind": self.kind, "positions": list(self.positions)}


@dataclass
class CartanType:
    m_e: int
    m_h: int
    m_f: int
    blocks: list

    @property
    def n(self):
        return self.m_e + self.m_h + 2 * self.m_f

    def to_json(self):
        return {"m_e": self.m_e, "m_h": self.m_h, "m_f": self.m_f,
                "blocks": [b.to_json() for b in self.blocks]}

    @classmethod
    def from_json(cls, obj):
        return cls(int(obj["m_e"]), int(obj["m_h"]), int(obj["m_f"]),
                   [Block(b["kind"], tuple(b["positions"]))
                    for b in obj["blocks"]])


@dataclass
class CartanBasis:
    ctype: CartanType
    S: list              # standardizing symplectic frame, 2n x 2n
    C: list              # n x n recombination: q_i(S z) = sum_k C[i][k] model_k
    q_std: list          # the n model forms as QuadraticForms
    exact: bool

    def model_symbols(self, deg_cut=10, h_cut=0, mode=None):
        if mode is None:
            mode = RATIONAL if self.exact else FLOAT
        return model_symbols(self.ctype, deg_cut, h_cut, mode)

    def to_json(self):
        from .coeffs import coeff_to_json
        return {
            "type": self.ctype.to_json(),
            "S": [[coeff_to_json(e) for e in row] for row in self.S],
            "C": [[coeff_to_json(e) for e in row] for row in self.C],
            "exact": self.exact,
        }

    @classmethod
    def from_json(cls, obj):
        from .coeffs import coeff_from_json
        exact = bool(obj["exact"])
        mode = RATIONAL if exact else FLOAT
        ctype = CartanType.from_json(obj["type"])
        S = [[coeff_from_json(e, mode) for e in row] for row in obj["S"]]
        C = [[coeff_from_json(e, mode) for e in row] for row in obj["C"]]
        return cls(ctype, S, C,
                   [QuadraticForm.from_symbol(m)
                    for m in model_symbols(ctype, 4, 0, mode)], exact)


def model_symbols(ctype: CartanType, deg_cut=10, h_cut=0, mode=RATIONAL):
    """The standard model forms of a CartanType, as PolySymbols."""
    n = ctype.n
    out = [None] * n

    def var(i):
        return PolySymbol.variable(n, i, deg_cut, h_cut, mode)

    for block in ctype.blocks:
        if block.kind == "hyperbolic":
            (p,) = block.positions
            out[p] = var(p) * var(n + p)
        elif block.kind == "elliptic":
            (p,) = block.positions
            out[p] = var(p) * var(p) + var(n + p) * var(n + p)
        else:
            p, p2 = block.positions
            out[p] = var(p) * var(n + p2) - var(p2) * var(n + p)
            out[p2] = var(p) * var(n + p) + var(p2) * var(n + p2)
    return out


def _to_sympy_exact(A):
    return sympy.Matrix([[sympy.Rational(e.numerator, e.denominator)
                          for e in row] for row in A])


def _gaussian_rational_root(r):
    """Fraction/GaussianRational value of a sympy root, or None."""
    re, im = r.as_real_imag()
    if not (re.is_rational and im.is_rational):
        return None
    re = Fraction(int(re.p), int(re.q))
    im = Fraction(int(im.p), int(im.q))
    return normalize(GaussianRational(re, im))


def _two_squares(fr: Fraction):
    """Rational (a, b) with a^2 + b^2 = fr > 0, or None."""
    from sympy.solvers.diophantine.diophantine import cornacchia
    N = fr.numerator * fr.denominator
    za, zb = 1, 0
    for prime, exp in sympy.factorint(N).items():
        if prime == 2:
            for _ in range(exp):
                za, zb = za - zb, za + zb
        elif prime % 4 == 3:
            if exp % 2:
                return None
            f = prime ** (exp // 2)
            za, zb = za * f, zb * f
        else:
            sol = cornacchia(1, 1, prime)
            x, y = next(iter(sol))
            for _ in range(exp):
                za, zb = za * x - zb * y, za * y + zb * x
    return Fraction(abs(za), fr.denominator), Fraction(abs(zb), fr.denominator)


def _conj_vec(v):
    return [e.conjugate() for e in v]


def _form_eigenvalue(A, w, exact, tol):
    """mu with A w = mu w, validated on every component."""
    v = mat_vec(A, w)
    j = max(range(len(w)), key=lambda i: abs(complex(w[i])))
    mu = v[j] / w[j]
    for a, b in zip(v, w):
        d = a - mu * b
        bad = (d != 0) if exact else abs(complex(d)) > tol
        if bad:
            raise NotCartan("common eigenvector structure violated; "
                            "family is not simultaneously diagonalizable")
    return mu


def _re_im(c):
    if isinstance(c, GaussianRational):
        return c.re, c.im
    if isinstance(c, complex):
        return c.real, c.imag
    return c, type(c)(0) if isinstance(c, float) else Fraction(0)


def williamson_classify(q_list, seed=0, max_retries=MAX_RETRIES) -> CartanBasis:
    """Classify a Cartan family and build its standardizing frame.

    Returns a CartanBasis whose S and C satisfy, for each input form,
    q_i(S z) = sum_k C[i][k] model_k(z); exact over the rationals whenever
    the inputs and the generic spectrum are rational, floats otherwise.
    """
    forms = _coerce_forms(q_list)
    n = forms[0].n
    report = verify_cartan(forms, seed=seed, max_retries=max_retries)
    if not (report.commuting and report.span_ok and report.semisimple):
        raise NotCartan("; ".join(report.failures) or "not a Cartan family")
    if report.witness is None or any("no combination" in f
                                     for f in report.failures):
        raise ResonantGenericityFailure(
            f"no generic combination with simple spectrum in "
            f"{max_retries} tries")
    mats = [f.hamiltonian_matrix() for f in forms]
    exact = all(f.exact for f in forms)
    coeffs = report.witness
    A = _witness_matrix(mats, coeffs)
    if exact:
        basis = _classify_exact(mats, A)
        if basis is None:
            exact = False
    if not exact:
        mats = [[[float(e) for e in row] for row in M] for M in mats]
        A = [[float(e) for e in row] for row in A]
        basis = _classify_float(mats, A)
    blocks_info = basis  # list of (kind, sort_key, columns, entries)
    # order: hyperbolic, elliptic, focus; within a kind by |witness eigenvalue|
    kind_order = {"hyperbolic": 0, "elliptic": 1, "focus": 2}
    blocks_info.sort(key=lambda b: (kind_order[b[0]], b[1]))
    S_cols_x = []
    S_cols_xi = []
    blocks = []
    C = [[Fraction(0) if exact else 0.0] * n for _ in range(n)]
    pos = 0
    m_e = m_h = m_f = 0
    for kind, _key, cols, entries in blocks_info:
        if kind == "focus":
            blocks.append(Block("focus", (pos, pos + 1)))
            m_f += 1
            S_cols_x.extend(cols[:2])
            S_cols_xi.extend(cols[2:])
            for i in range(n):
                C[i][pos] = entries[i][0]
                C[i][pos + 1] = entries[i][1]
            pos += 2
        else:
            blocks.append(Block(kind, (pos,)))
            if kind == "hyperbolic":
                m_h += 1
            else:
                m_e += 1
            S_cols_x.append(cols[0])
            S_cols_xi.append(cols[1])
            for i in range(n):
                C[i][pos] = entries[i]
            pos += 1
    ctype = CartanType(m_e, m_h, m_f, blocks)
    cols = S_cols_x + S_cols_xi
    S = [[cols[j][i] for j in range(2 * n)] for i in range(2 * n)]
    if not exact:
        S = _refine_symplectic(S)
    if not check_symplectic(S):
        raise NotCartan("constructed frame is not symplectic")
    try:
        invert(C, 0 if exact else TOL_EIG)
    except ValueError:
        raise NotCartan("recombination matrix is singular") from None
    basis_obj = CartanBasis(ctype, S, C,
                            [QuadraticForm.from_symbol(m)
                             for m in model_symbols(ctype, 4, 0,
                                                    RATIONAL if exact
                                                    else FLOAT)],
                            exact)
    _verify_frame(forms, basis_obj)
    return basis_obj


def _classify_exact(mats, A):
    """Exact block construction; None if the spectrum is not in Q(i)."""
    n = len(mats)
    M = _to_sympy_exact(A)
    roots = sympy.roots(M.charpoly(sympy.Symbol("_t")))
    if sum(roots.values()) != 2 * n:
        return None
    vals = []
    for r in roots:
        v = _gaussian_rational_root(r)
        if v is None:
            return None
        vals.append(v)

    def eigvec(mu):
        m = len(A)
        B = [[A[i][j] - (mu if i == j else 0) for j in range(m)]
             for i in range(m)]
        ker = nullspace(B, 0)
        if len(ker) != 1:
            raise NotCartan("witness eigenvalue is not simple")
        w = ker[0]
        lead = next(e for e in w if e != 0)
        return [e / lead for e in w]

    blocks = []
    used = set()
    for idx, mu in enumerate(vals):
        if idx in used:
            continue
        re, im = _re_im(mu)
        if im == 0:
            if re <= 0:
                continue
            jdx = vals.index(-mu)
            used.update({idx, jdx})
            u = eigvec(mu)
            v = eigvec(-mu)
            v = [e / omega(u, v) for e in v]
            entries = [_form_eigenvalue(Ai, u, True, 0) for Ai in mats]
            first = next((e for e in entries if e != 0), None)
            if first is not None and first < 0:
                u, v = v, [-e for e in u]
                entries = [-e for e in entries]
            blocks.append(("hyperbolic", abs(complex(mu)), (u, v), entries))
        elif re == 0:
            if im <= 0:
                continue
            used.update({idx, vals.index(mu.conjugate())})
            w = eigvec(mu)
            u = [real_of(e) for e in w]
            v = [imag_of(e) for e in w]
            s = omega(u, v)
            if s < 0:
                w = _conj_vec(w)
                u = [real_of(e) for e in w]
                v = [imag_of(e) for e in w]
                s = -s
            ts = _two_squares(Fraction(s))
            if ts is None:
                return None
            rho = GaussianRational(ts[0], ts[1])
            w = [e / rho for e in w]
            u = [real_of(e) for e in w]
            v = [imag_of(e) for e in w]
            mus = [_form_eigenvalue(Ai, w, True, 0) for Ai in mats]
            entries = []
            for m_i in mus:
                r_i, b_i = _re_im(m_i)
                if r_i != 0:
                    raise NotCartan("mixed eigenvalue on an elliptic block")
                entries.append(b_i / 2)
            blocks.append(("elliptic", abs(complex(mu)), (u, v), entries))
        else:
            quad = {idx}
            for other in (-mu, mu.conjugate(), -mu.conjugate()):
                quad.add(vals.index(other))
            if len(quad) != 4:
                raise NotCartan("degenerate focus-focus eigenvalue group")
            used.update(quad)
            if re < 0:
                mu = -mu.conjugate()  # representative with positive real part
            w = eigvec(mu)
            wp = eigvec(-mu)
            mus = [_form_eigenvalue(Ai, w, True, 0) for Ai in mats]
            pairs = [list(_re_im(m_i)) for m_i in mus]
            first_l = next((p[0] for p in pairs if p[0] != 0), None)
            swap = first_l is not None and first_l < 0
            if swap:
                w, wp = wp, w
                pairs = [[-a, -b] for a, b in pairs]
            first_b = next((p[1] for p in pairs if p[1] != 0), None)
            if first_b is not None and first_b < 0:
                w = _conj_vec(w)
                wp = _conj_vec(wp)
                pairs = [[a, -b] for a, b in pairs]
            wp = [e * (2 / omega_c(w, wp)) for e in wp]
            x1 = [real_of(e) for e in w]
            x2 = [-imag_of(e) for e in w]
            xi1 = [real_of(e) for e in wp]
            xi2 = [imag_of(e) for e in wp]
            entries = [(b, a) for a, b in pairs]
            blocks.append(("focus", abs(complex(mu)), (x1, x2, xi1, xi2),
                           entries))
    return blocks


def real_of(c):
    return _re_im(c)[0]


def imag_of(c):
    return _re_im(c)[1]


def omega_c(u, v):
    """Bilinear (not sesquilinear) extension of the symplectic pairing."""
    return omega(u, v)


def _classify_float(mats, A):
    import numpy as np
    n = len(mats)
    An = np.array(A, dtype=float)
    vals, vecs = np.linalg.eig(An)
    sep = TOL_EIG * _mat_norm(A)

    def find(target, exclude):
        best, bd = None, None
        for i in range(len(vals)):
            if i in exclude:
                continue
            d = abs(vals[i] - target)
            if bd is None or d < bd:
                best, bd = i, d
        if bd is None or bd > max(sep * 10, 1e-6 * abs(target)):
            raise NotCartan("eigenvalue pairing failed in float mode")
        return best

    def form_mu(Ai, w):
        return _form_eigenvalue(Ai, list(w), False, max(sep, 1e-9) * 1e2
                                * max(1.0, float(np.abs(w).max())))

    blocks = []
    used = set()
    order = sorted(range(len(vals)), key=lambda i: -abs(vals[i]))
    for idx in order:
        if idx in used:
            continue
        lam = vals[idx]
        if abs(lam.imag) <= sep:          # real pair
            lam = lam.real
            if lam < 0:
                continue
            jdx = find(-lam, used | {idx})
            used.update({idx, jdx})
            w = vecs[:, idx]
            j = int(np.argmax(np.abs(w)))
            u = list((w / w[j]).real)
            w2 = vecs[:, jdx]
            j = int(np.argmax(np.abs(w2)))
            v = list((w2 / w2[j]).real)
            s = omega(u, v)
            v = [e / s for e in v]
            entries = [complex(form_mu(Ai, np.array(u))).real for Ai in mats]
            first = next((e for e in entries if abs(e) > sep), None)
            if first is not None and first < 0:
                u, v = v, [-e for e in u]
                entries = [-e for e in entries]
            blocks.append(("hyperbolic", abs(lam), (u, v), entries))
        elif abs(lam.real) <= sep:        # imaginary pair
            beta = lam.imag
            if beta < 0:
                continue
            jdx = find(np.conj(lam), used | {idx})
            used.update({idx, jdx})
            w = vecs[:, idx]
            u = list(w.real)
            v = list(w.imag)
            s = omega(u, v)
            if s < 0:
                w = np.conj(w)
                u, v = list(w.real), list(w.imag)
                s = -s
            w = w / np.sqrt(s)
            u, v = list(w.real), list(w.imag)
            mus = [complex(form_mu(Ai, w)) for Ai in mats]
            entries = [m.imag / 2 for m in mus]
            blocks.append(("elliptic", abs(lam), (u, v), entries))
        else:                             # focus-focus quadruple
            group = {idx}
            for target in (-lam, np.conj(lam), -np.conj(lam)):
                group.add(find(target, used | group))
            used.update(group)
            mu = lam if lam.real > 0 else -np.conj(lam)
            w = vecs[:, find(mu, set())]
            wp = vecs[:, find(-mu, set())]
            mus = [complex(form_mu(Ai, w)) for Ai in mats]
            pairs = [[m.real, m.imag] for m in mus]
            first_l = next((p[0] for p in pairs if abs(p[0]) > sep), None)
            if first_l is not None and first_l < 0:
                w, wp = wp, w
                pairs = [[-a, -b] for a, b in pairs]
            first_b = next((p[1] for p in pairs if abs(p[1]) > sep), None)
            if first_b is not None and first_b < 0:
                w, wp = np.conj(w), np.conj(wp)
                pairs = [[a, -b] for a, b in pairs]
            wp = wp * (2 / omega(list(w), list(wp)))
            x1 = list(w.real)
            x2 = list(-w.imag)
            xi1 = list(wp.real)
            xi2 = list(wp.imag)
            entries = [(b, a) for a, b in pairs]
            blocks.append(("focus", abs(lam), (x1, x2, xi1, xi2), entries))
    return blocks


def _verify_frame(forms, basis: CartanBasis):
    n = forms[0].n
    mode = RATIONAL if basis.exact else FLOAT
    models = model_symbols(basis.ctype, 4, 0, mode)
    for i, f in enumerate(forms):
        sym = f.to_symbol(4, 0)
        if mode == FLOAT:
            sym = sym.to_float()
        moved = sym.substitute_linear(basis.S)
        combo = PolySymbol.zero(n, 4, 0, mode)
        for k in range(n):
            combo = combo + models[k].scale(basis.C[i][k])
        diff = moved - combo
        if basis.exact:
            ok = diff.is_zero()
        else:
            scale = max(1.0, sym.max_norm())
            ok = diff.max_norm() <= 1e-8 * scale
        if not ok:
            raise NotCartan(f"frame verification failed for form {i}")
