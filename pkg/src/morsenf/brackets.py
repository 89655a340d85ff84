"""Poisson bracket, Moyal star product, and Lie-series transforms.

The bracket convention is fixed once for the whole library:

    {f, g} = sum_j d(f)/d(xi_j) d(g)/d(x_j) - d(f)/d(x_j) d(g)/d(xi_j)

so {xi_1, x_1} = 1 and ad of x_1 xi_1 acts on x^a xi^b with eigenvalue
(a - b).  The star product normalization

    a * b = sum_k (1/k!) (hbar/2i)^k a D^k b

with D the antisymmetric bidifferential operator of the same convention is
the unique one whose commutator matches the operator-level Weyl calculus
(x -> multiplication, xi -> (hbar/i) d/dx); the test suite pins this
against that oracle.
"""
from __future__ import annotations

from fractions import Fraction

from .coeffs import GaussianRational
from .poly import FLOAT, PolySymbol, _check_compatible

POISSON_CONVENTION = "{f,g} = sum_j df/dxi_j dg/dx_j - df/dx_j dg/dxi_j"


class GeneratorDegreeError(ValueError):
    """Lie-series generator has forbidden low-degree terms."""


def poisson(a: PolySymbol, b: PolySymbol, weight=None) -> PolySymbol:
    """Poisson bracket in the fixed convention.

    With `weight` set, result terms of weight deg + 2*h above it are
    dropped at generation time (see PolySymbol.mul_weighted).
    """
    _check_compatible(a, b)
    n = a.n
    out = PolySymbol.zero(n, min(a.deg_cut, b.deg_cut),
                          min(a.h_cut, b.h_cut), a.mode)
    if weight is None:
        for j in range(n):
            out = out + a.diff(n + j) * b.diff(j) - a.diff(j) * b.diff(n + j)
    else:
        for j in range(n):
            out = out + a.diff(n + j).mul_weighted(b.diff(j), weight) \
                - a.diff(j).mul_weighted(b.diff(n + j), weight)
    return out


def _derivative_cache(p: PolySymbol):
    cache = {((0,) * p.n, (0,) * p.n): p}

    def get(x_orders, xi_orders):
        key = (x_orders, xi_orders)
        if key not in cache:
            for i, e in enumerate(x_orders):
                if e:
                    prev = get(x_orders[:i] + (e - 1,) + x_orders[i + 1:],
                               xi_orders)
                    cache[key] = prev.diff(i)
                    return cache[key]
            for i, e in enumerate(xi_orders):
                if e:
                    prev = get(x_orders,
                               xi_orders[:i] + (e - 1,) + xi_orders[i + 1:])
                    cache[key] = prev.diff(p.n + i)
                    return cache[key]
        return cache[key]

    return get


def _multi_indices(k, n):
    """All (mu, nu) in N^n x N^n with |mu| + |nu| = k."""
    from .poly import _compositions
    for combo in _compositions(k, 2 * n):
        yield combo[:n], combo[n:]


def _factorial_multi(idx):
    out = 1
    for e in idx:
        for m in range(2, e + 1):
            out *= m
    return out


def bidiff_power(a: PolySymbol, b: PolySymbol, k: int,
                 weight=None) -> PolySymbol:
    """a D^k b: the k-th power of the Poisson bidifferential operator.

    `weight` cuts the output (before any hbar^k factor the caller adds)
    at weight deg + 2*h.
    """
    _check_compatible(a, b)
    n = a.n
    da = _derivative_cache(a)
    db = _derivative_cache(b)
    kfact = _factorial_multi((k,))
    out = PolySymbol.zero(n, min(a.deg_cut, b.deg_cut),
                          min(a.h_cut, b.h_cut), a.mode)
    for mu, nu in _multi_indices(k, n):
        left = da(nu, mu)
        if left.is_zero():
            continue
        right = db(mu, nu)
        if right.is_zero():
            continue
        coeff = Fraction(kfact, _factorial_multi(mu) * _factorial_multi(nu))
        if sum(nu) % 2:
            coeff = -coeff
        if a.mode == FLOAT:
            coeff = float(coeff)
        prod = left * right if weight is None \
            else left.mul_weighted(right, weight)
        out = out + prod.scale(coeff)
    return out


def moyal_star(a: PolySymbol, b: PolySymbol, weight=None) -> PolySymbol:
    """Weyl-symbol composition a * b, truncated at the operand cuts."""
    _check_compatible(a, b)
    h_cut = min(a.h_cut, b.h_cut)
    kmax = min(h_cut, a.max_phase_degree(), b.max_phase_degree())
    if kmax < 0:
        return PolySymbol.zero(a.n, min(a.deg_cut, b.deg_cut), h_cut, a.mode)
    out = a * b if weight is None else a.mul_weighted(b, weight)
    half_over_i = GaussianRational(0, Fraction(-1, 2))  # 1/(2i)
    if a.mode == FLOAT:
        half_over_i = complex(half_over_i)
    factor = 1
    for k in range(1, kmax + 1):
        factor = factor * half_over_i / k
        term = bidiff_power(a, b, k,
                            None if weight is None else weight - 2 * k)
        if term.is_zero():
            continue
        out = out + term.scale(factor).times_h(k)
    return out


def moyal_bracket(a: PolySymbol, b: PolySymbol, weight=None) -> PolySymbol:
    """(i/hbar)(a*b - b*a); equals poisson(a, b) plus even hbar corrections."""
    _check_compatible(a, b)
    h_cut = min(a.h_cut, b.h_cut)
    out = poisson(a, b, weight)
    # coefficient of D^k for odd k in (2/h) sin(h D / 2), divided by h^(k-1)
    kmax = min(h_cut + 1, a.max_phase_degree(), b.max_phase_degree())
    for k in range(3, kmax + 1, 2):
        coeff = Fraction(2) * Fraction((-1) ** ((k - 1) // 2), 2 ** k) \
            / _factorial_multi((k,))
        if a.mode == FLOAT:
            coeff = float(coeff)
        term = bidiff_power(a, b, k,
                            None if weight is None else weight - 2 * (k - 1))
        if term.is_zero():
            continue
        out = out + term.scale(coeff).times_h(k - 1)
    return out


def _check_generator(a: PolySymbol):
    low = [key for key in a.terms
           if sum(key[0]) + sum(key[1]) <= 2 and key[2] == 0]
    if low:
        raise GeneratorDegreeError(
            "flow generator must have phase degree >= 3; found terms "
            f"of degree {sorted(sum(k[0]) + sum(k[1]) for k in low)}")


def lie_transform(f: PolySymbol, a: PolySymbol, N=None) -> PolySymbol:
    """Time-1 flow transform exp(ad_a) f = f + {a,f} + {a,{a,f}}/2 + ...

    The generator a must have no terms of phase degree <= 2, so the series
    terminates degree by degree.  Truncated at degree N (defaults to the
    operand cut).
    """
    _check_generator(a)
    if N is not None and N < f.deg_cut:
        f = f.with_cuts(deg_cut=N)
        a = a.with_cuts(deg_cut=N)
    out = f
    term = f
    for k in range(1, f.deg_cut + 2 * f.h_cut + 2):
        term = poisson(a, term).scale(Fraction(1, k) if f.mode != FLOAT
                                      else 1.0 / k)
        if term.is_zero():
            break
        out = out + term
    return out


def moyal_lie_transform(f: PolySymbol, a: PolySymbol,
                        weight=None) -> PolySymbol:
    """Star-conjugation counterpart of lie_transform.

    Applies exp of the Moyal adjoint of a; the hbar^0 part transforms
    exactly like the classical Lie transform, with quantum corrections at
    even hbar orders.
    """
    _check_generator(a)
    out = f
    term = f
    for k in range(1, f.deg_cut + 2 * f.h_cut + 2):
        term = moyal_bracket(a, term, weight) \
            .scale(Fraction(1, k) if f.mode != FLOAT else 1.0 / k)
        if term.is_zero():
            break
        out = out + term
    return out


def exp_gauge_conjugate(p: PolySymbol, d: PolySymbol, level: int,
                        weight=None) -> PolySymbol:
    """Conjugation by the star exponential of i hbar^(level-1) d.

    Symbol of U^-1 P U for U = exp_star(i hbar^(level-1) D):
    sum_m (-1)^m / m! hbar^(level m) ad^m p with ad = moyal_bracket(d, .).
    The leading change sits at hbar^level.
    """
    if level < 1:
        raise ValueError("gauge level must be >= 1")
    out = p
    term = p
    sign = 1
    for m in range(1, p.h_cut // level + 2):
        term = moyal_bracket(
            d, term, None if weight is None else weight - 2 * level) \
            .times_h(level) \
            .scale(Fraction(1, m) if p.mode != FLOAT else 1.0 / m)
        sign = -sign
        if term.is_zero():
            break
        out = out + term.scale(sign)
    return out


def star_conjugate(p: PolySymbol, c: PolySymbol, level: int,
                   N_h=None, weight=None) -> PolySymbol:
    """Symbol of (I + i hbar^level C)^-1 P (I + i hbar^level C).

    The inverse is the geometric star series, which terminates because
    every factor carries hbar^level.  The leading change appears at
    hbar^(level+1) and equals hbar^(level+1) moyal_bracket(p, c) there.
    """
    if level < 1:
        raise ValueError("conjugation level must be >= 1")
    h_cut = p.h_cut if N_h is None else min(N_h, p.h_cut)
    if h_cut < level:
        raise ValueError(f"truncation cut {h_cut} smaller than level {level}")
    if c.is_zero():
        return p
    work = p.with_cuts(h_cut=h_cut)
    cc = c.with_cuts(h_cut=h_cut)
    i_unit = GaussianRational(0, 1)
    if p.mode == FLOAT:
        i_unit = 1j
    ic = cc.scale(i_unit).times_h(level)
    u = PolySymbol.constant(p.n, 1, work.deg_cut, h_cut, p.mode) + ic
    # geometric series for the star inverse of u
    u_inv = PolySymbol.constant(p.n, 1, work.deg_cut, h_cut, p.mode)
    term = u_inv
    for _ in range(h_cut // level + 1):
        term = moyal_star(term, ic, weight).scale(-1)
        if term.is_zero():
            break
        u_inv = u_inv + term
    return moyal_star(moyal_star(u_inv, work, weight), u, weight)
