"""Independent operator-level Weyl quantization oracle.

Quantizes polynomial symbols as differential operators acting on
polynomials in x with exact Gaussian-rational coefficients and a symbolic
hbar: x_j acts by multiplication and xi_j by (hbar/i) d/dx_j.  The Weyl
(symmetric) ordering of a monomial x^a xi^b is realized per degree of
freedom by McCoy's formula

    W(x^a xi^b) = 2^(-a) sum_k C(a,k) x^k (hbar/i d/dx)^b x^(a-k).

Test polynomials are dicts {(x_exponents, h_exponent): coefficient} with
Fraction / GaussianRational coefficients, so all comparisons are exact.
The oracle shares no code with the symbol calculus under test.
"""
from fractions import Fraction
from math import comb

from morsenf.coeffs import GaussianRational

MINUS_I = GaussianRational(0, -1)


def poly_zero():
    return {}


def poly_monomial(n, exps, h=0, coeff=1):
    return {(tuple(exps), h): Fraction(coeff) if isinstance(coeff, int)
            else coeff}


def poly_add(p, q):
    out = dict(p)
    for k, c in q.items():
        s = out.get(k, 0) + c
        if s == 0:
            out.pop(k, None)
        else:
            out[k] = s
    return out


def poly_scale(p, c):
    if c == 0:
        return {}
    return {k: v * c for k, v in p.items()}


def poly_mul_x(p, j):
    """Multiply by x_j."""
    out = {}
    for (exps, h), c in p.items():
        key = (exps[:j] + (exps[j] + 1,) + exps[j + 1:], h)
        out[key] = out.get(key, 0) + c
    return out


def poly_hbar_diff(p, j):
    """Apply (hbar/i) d/dx_j."""
    out = {}
    for (exps, h), c in p.items():
        e = exps[j]
        if e == 0:
            continue
        key = (exps[:j] + (e - 1,) + exps[j + 1:], h + 1)
        out[key] = out.get(key, 0) + c * e * MINUS_I
    return out


def apply_weyl_monomial(x_exp, xi_exp, p):
    """Apply the Weyl quantization of x^x_exp xi^xi_exp to polynomial p.

    The per-dof McCoy operators commute across degrees of freedom, so they
    are applied one dof at a time.
    """
    n = len(x_exp)
    for j in range(n):
        a, b = x_exp[j], xi_exp[j]
        if a == 0 and b == 0:
            continue
        acc = poly_zero()
        for k in range(a + 1):
            t = p
            for _ in range(a - k):
                t = poly_mul_x(t, j)
            for _ in range(b):
                t = poly_hbar_diff(t, j)
            for _ in range(k):
                t = poly_mul_x(t, j)
            acc = poly_add(acc, poly_scale(t, Fraction(comb(a, k), 2 ** a)))
        p = acc
    return p


def apply_symbol(sym, p):
    """Apply the Weyl quantization of a PolySymbol to polynomial p."""
    out = poly_zero()
    for (xe, se, h), c in sym.terms.items():
        t = apply_weyl_monomial(xe, se, p)
        t = {(exps, hh + h): v for (exps, hh), v in t.items()}
        out = poly_add(out, poly_scale(t, c))
    return out


def operators_equal(sym_left, sym_right, n, max_exp):
    """Compare quantized operators on all test monomials x^m, m <= max_exp.

    sym_left is applied directly; sym_right is a pair (a, b) applied as
    the composition Op(a) o Op(b).  Equality on x^m for every m up to the
    differential order plus coefficient degree is operator equality.
    """
    import itertools
    a, b = sym_right
    for exps in itertools.product(range(max_exp + 1), repeat=n):
        t = poly_monomial(n, exps)
        lhs = apply_symbol(sym_left, t)
        rhs = apply_symbol(a, apply_symbol(b, t))
        if poly_add(lhs, poly_scale(rhs, -1)):
            return False
    return True
