"""Sparse truncated polynomial symbols in phase-space variables and hbar.

A PolySymbol represents a truncated formal series in x_1..x_n, xi_1..xi_n
and hbar.  Terms are stored sparsely as a map from exponent keys
(x_exponents, xi_exponents, h_exponent) to coefficients.  The phase degree
|alpha| + |beta| is truncated at ``deg_cut`` and the hbar power
independently at ``h_cut``.  All operations prune zero coefficients and
re-truncate, so equal series compare equal term-by-term.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

from .coeffs import (GaussianRational, coeff_from_json, coeff_to_json,
                     is_exact, normalize)

RATIONAL = "rational"
FLOAT = "float"


class DimensionMismatch(ValueError):
    pass


class ModeMismatch(ValueError):
    pass


def _check_compatible(a: "PolySymbol", b: "PolySymbol"):
    if a.n != b.n:
        raise DimensionMismatch(f"dimension mismatch: {a.n} vs {b.n}")
    if a.mode != b.mode:
        raise ModeMismatch(f"coefficient mode mismatch: {a.mode} vs {b.mode}")


class PolySymbol:
    """Truncated series sum c * x^alpha xi^beta hbar^k.

    Immutable by convention: no method mutates ``terms`` after
    construction, so instances can be shared freely.
    """

    __slots__ = ("n", "deg_cut", "h_cut", "mode", "terms")

    def __init__(self, n, terms=None, deg_cut=10, h_cut=0, mode=RATIONAL):
        self.n = n
        self.deg_cut = deg_cut
        self.h_cut = h_cut
        self.mode = mode
        clean = {}
        if terms:
            for key, coeff in terms.items():
                xe, se, h = key
                if sum(xe) + sum(se) > deg_cut or h > h_cut:
                    continue
                coeff = normalize(coeff)
                if _is_zero(coeff):
                    continue
                if mode == RATIONAL and not is_exact(coeff):
                    raise ModeMismatch(f"inexact coefficient {coeff!r} in rational mode")
                if mode == FLOAT and is_exact(coeff):
                    coeff = complex(coeff) if isinstance(coeff, GaussianRational) \
                        else float(coeff)
                    coeff = normalize(coeff)
                    if _is_zero(coeff):
                        continue
                clean[(tuple(xe), tuple(se), h)] = coeff
        self.terms = clean

    # ---------------------------------------------------------------- basics

    @classmethod
    def zero(cls, n, deg_cut=10, h_cut=0, mode=RATIONAL):
        return cls(n, {}, deg_cut, h_cut, mode)

    @classmethod
    def constant(cls, n, value, deg_cut=10, h_cut=0, mode=RATIONAL):
        z = (0,) * n
        return cls(n, {(z, z, 0): value}, deg_cut, h_cut, mode)

    @classmethod
    def variable(cls, n, index, deg_cut=10, h_cut=0, mode=RATIONAL):
        """The coordinate symbol: index 0..n-1 is x_i, n..2n-1 is xi_{i-n}."""
        xe = [0] * n
        se = [0] * n
        if index < n:
            xe[index] = 1
        else:
            se[index - n] = 1
        return cls(n, {(tuple(xe), tuple(se), 0): Fraction(1)},
                   deg_cut, h_cut, mode)

    @classmethod
    def monomial(cls, n, x_exp, xi_exp, h_exp=0, coeff=1, deg_cut=10,
                 h_cut=0, mode=RATIONAL):
        return cls(n, {(tuple(x_exp), tuple(xi_exp), h_exp): coeff},
                   deg_cut, h_cut, mode)

    @classmethod
    def hbar(cls, n, deg_cut=10, h_cut=1, mode=RATIONAL):
        z = (0,) * n
        return cls(n, {(z, z, 1): Fraction(1)}, deg_cut, h_cut, mode)

    def is_zero(self):
        return not self.terms

    def with_cuts(self, deg_cut=None, h_cut=None):
        return PolySymbol(self.n, self.terms,
                          self.deg_cut if deg_cut is None else deg_cut,
                          self.h_cut if h_cut is None else h_cut,
                          self.mode)

    def to_float(self):
        if self.mode == FLOAT:
            return self
        terms = {k: (complex(c) if isinstance(c, GaussianRational) else float(c))
                 for k, c in self.terms.items()}
        return PolySymbol(self.n, terms, self.deg_cut, self.h_cut, FLOAT)

    def max_phase_degree(self):
        return max((sum(k[0]) + sum(k[1]) for k in self.terms), default=-1)

    def min_phase_degree(self):
        return min((sum(k[0]) + sum(k[1]) for k in self.terms), default=-1)

    def min_h_order(self):
        return min((k[2] for k in self.terms), default=-1)

    def max_norm(self):
        """Largest coefficient magnitude (float)."""
        return max((abs(complex(c)) for c in self.terms.values()), default=0.0)

    def coefficient(self, x_exp, xi_exp, h_exp=0):
        return self.terms.get((tuple(x_exp), tuple(xi_exp), h_exp), 0)

    def constant_term(self, h_exp=0):
        z = (0,) * self.n
        return self.terms.get((z, z, h_exp), 0)

    # ------------------------------------------------------------ arithmetic

    def __add__(self, other):
        if not isinstance(other, PolySymbol):
            if other == 0:
                return self
            return self + PolySymbol.constant(self.n, other, self.deg_cut,
                                              self.h_cut, self.mode)
        _check_compatible(self, other)
        terms = dict(self.terms)
        for key, coeff in other.terms.items():
            terms[key] = terms.get(key, 0) + coeff
        return PolySymbol(self.n, terms, min(self.deg_cut, other.deg_cut),
                          min(self.h_cut, other.h_cut), self.mode)

    __radd__ = __add__

    def __neg__(self):
        return PolySymbol(self.n, {k: -c for k, c in self.terms.items()},
                          self.deg_cut, self.h_cut, self.mode)

    def __sub__(self, other):
        return self + (-other if isinstance(other, PolySymbol) else -_as_coeff(other, self))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, PolySymbol):
            return self.scale(other)
        _check_compatible(self, other)
        deg_cut = min(self.deg_cut, other.deg_cut)
        h_cut = min(self.h_cut, other.h_cut)
        n = self.n
        terms = {}
        for (xa, sa, ha), ca in self.terms.items():
            da = sum(xa) + sum(sa)
            for (xb, sb, hb), cb in other.terms.items():
                if da + sum(xb) + sum(sb) > deg_cut or ha + hb > h_cut:
                    continue
                key = (tuple(xa[i] + xb[i] for i in range(n)),
                       tuple(sa[i] + sb[i] for i in range(n)), ha + hb)
                terms[key] = terms.get(key, 0) + ca * cb
        return PolySymbol(n, terms, deg_cut, h_cut, self.mode)

    __rmul__ = __mul__

    def mul_weighted(self, other, weight):
        """Product dropping result terms of weight deg + 2*h above `weight`.

        Skipping the heavy cross terms at generation time is much cheaper
        than multiplying fully and cutting afterwards; used by the
        weight-graded semiclassical pipeline.
        """
        _check_compatible(self, other)
        deg_cut = min(self.deg_cut, other.deg_cut)
        h_cut = min(self.h_cut, other.h_cut)
        n = self.n
        terms = {}
        for (xa, sa, ha), ca in self.terms.items():
            da = sum(xa) + sum(sa)
            for (xb, sb, hb), cb in other.terms.items():
                db = sum(xb) + sum(sb)
                if (da + db > deg_cut or ha + hb > h_cut
                        or da + db + 2 * (ha + hb) > weight):
                    continue
                key = (tuple(xa[i] + xb[i] for i in range(n)),
                       tuple(sa[i] + sb[i] for i in range(n)), ha + hb)
                terms[key] = terms.get(key, 0) + ca * cb
        return PolySymbol(n, terms, deg_cut, h_cut, self.mode)

    def scale(self, scalar):
        if _is_zero(scalar):
            return PolySymbol.zero(self.n, self.deg_cut, self.h_cut, self.mode)
        return PolySymbol(self.n, {k: c * scalar for k, c in self.terms.items()},
                          self.deg_cut, self.h_cut, self.mode)

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("powers must be non-negative integers")
        out = PolySymbol.constant(self.n, 1, self.deg_cut, self.h_cut, self.mode)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, PolySymbol):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def times_h(self, k=1):
        """Multiply by hbar^k."""
        terms = {}
        for (xe, se, h), c in self.terms.items():
            if h + k <= self.h_cut:
                terms[(xe, se, h + k)] = c
        return PolySymbol(self.n, terms, self.deg_cut, self.h_cut, self.mode)

    # --------------------------------------------------------------- calculus

    def diff(self, var):
        """Partial derivative; var in 0..2n-1, x-block then xi-block."""
        n = self.n
        terms = {}
        for (xe, se, h), c in self.terms.items():
            if var < n:
                e = xe[var]
                if e == 0:
                    continue
                nxe = xe[:var] + (e - 1,) + xe[var + 1:]
                terms[(nxe, se, h)] = terms.get((nxe, se, h), 0) + c * e
            else:
                j = var - n
                e = se[j]
                if e == 0:
                    continue
                nse = se[:j] + (e - 1,) + se[j + 1:]
                terms[(xe, nse, h)] = terms.get((xe, nse, h), 0) + c * e
        return PolySymbol(n, terms, self.deg_cut, self.h_cut, self.mode)

    def diff_multi(self, x_orders, xi_orders):
        out = self
        for i, k in enumerate(x_orders):
            for _ in range(k):
                out = out.diff(i)
        for i, k in enumerate(xi_orders):
            for _ in range(k):
                out = out.diff(self.n + i)
        return out

    # ------------------------------------------------------- transformations

    def substitute_linear(self, S):
        """Compose with a linear change of frame: return p(S z).

        S is a 2n x 2n matrix (list of rows); variable v is replaced by
        sum_j S[v][j] z_j.  Exact when both the symbol and S are rational.
        """
        n = self.n
        if len(S) != 2 * n or any(len(row) != 2 * n for row in S):
            raise DimensionMismatch("substitution matrix must be 2n x 2n")
        mode = self.mode
        if mode == RATIONAL and any(not is_exact(e) for row in S for e in row):
            return self.to_float().substitute_linear(S)
        lin = []
        for v in range(2 * n):
            terms = {}
            for j in range(2 * n):
                e = S[v][j]
                if _is_zero(e):
                    continue
                xe = [0] * n
                se = [0] * n
                if j < n:
                    xe[j] = 1
                else:
                    se[j - n] = 1
                terms[(tuple(xe), tuple(se), 0)] = e
            lin.append(PolySymbol(n, terms, self.deg_cut, self.h_cut, mode))
        powers = [{0: PolySymbol.constant(n, 1, self.deg_cut, self.h_cut, mode)}
                  for _ in range(2 * n)]

        def power(v, k):
            cache = powers[v]
            if k not in cache:
                cache[k] = power(v, k - 1) * lin[v]
            return cache[k]

        out = PolySymbol.zero(n, self.deg_cut, self.h_cut, mode)
        for (xe, se, h), c in self.terms.items():
            piece = PolySymbol.monomial(n, (0,) * n, (0,) * n, h, c,
                                        self.deg_cut, self.h_cut, mode)
            for i in range(n):
                if xe[i]:
                    piece = piece * power(i, xe[i])
                if se[i]:
                    piece = piece * power(n + i, se[i])
            out = out + piece
        return out

    def h_coefficient(self, level):
        """The coefficient of hbar^level, as an hbar-free symbol."""
        terms = {(xe, se, 0): c for (xe, se, h), c in self.terms.items()
                 if h == level}
        return PolySymbol(self.n, terms, self.deg_cut, self.h_cut, self.mode)

    def evaluate(self, point, hval=0):
        """Numeric value at a 2n-point; exact when inputs are rational."""
        if len(point) != 2 * self.n:
            raise DimensionMismatch("evaluation point must have 2n entries")
        total = 0
        for (xe, se, h), c in self.terms.items():
            val = c
            for i, e in enumerate(xe):
                for _ in range(e):
                    val = val * point[i]
            for i, e in enumerate(se):
                for _ in range(e):
                    val = val * point[self.n + i]
            for _ in range(h):
                val = val * hval
            total = total + val
        return normalize(total)

    # ---------------------------------------------------------------- grading

    def grade_component(self, k, h=0):
        """Coefficient vector of the degree-k, hbar^h part in the P_k basis."""
        if k > self.deg_cut or h > self.h_cut or k < 0 or h < 0:
            raise ValueError(f"grade ({k},{h}) outside cuts "
                             f"({self.deg_cut},{self.h_cut})")
        basis = monomial_basis(self.n, k)
        return [self.terms.get((xe, se, h), 0) for xe, se in basis]

    @classmethod
    def from_graded(cls, n, k, h, vector, deg_cut=10, h_cut=0, mode=RATIONAL):
        basis = monomial_basis(n, k)
        if len(vector) != len(basis):
            raise ValueError("vector length does not match the P_k basis")
        terms = {(xe, se, h): c for (xe, se), c in zip(basis, vector)}
        return cls(n, terms, deg_cut, h_cut, mode)

    # -------------------------------------------------------------------- io

    def to_json(self):
        items = sorted(self.terms.items(),
                       key=lambda kv: (kv[0][2], sum(kv[0][0]) + sum(kv[0][1]),
                                       tuple(-e for e in kv[0][0] + kv[0][1])))
        return {
            "n": self.n,
            "deg_cut": self.deg_cut,
            "h_cut": self.h_cut,
            "mode": self.mode,
            "terms": [{"x": list(xe), "xi": list(se), "h": h,
                       "coeff": coeff_to_json(c)}
                      for (xe, se, h), c in items],
        }

    @classmethod
    def from_json(cls, obj):
        n = int(obj["n"])
        mode = obj.get("mode", RATIONAL)
        terms = {}
        for t in obj["terms"]:
            key = (tuple(int(e) for e in t["x"]),
                   tuple(int(e) for e in t["xi"]), int(t.get("h", 0)))
            if len(key[0]) != n or len(key[1]) != n:
                raise ValueError("term exponent vectors must have length n")
            terms[key] = terms.get(key, 0) + coeff_from_json(t["coeff"], mode)
        return cls(n, terms, int(obj.get("deg_cut", 10)),
                   int(obj.get("h_cut", 0)), mode)

    def __repr__(self):
        if not self.terms:
            return "PolySymbol(0)"
        parts = []
        for (xe, se, h), c in sorted(self.terms.items()):
            factors = []
            for i, e in enumerate(xe):
                if e:
                    factors.append(f"x{i + 1}" + (f"^{e}" if e > 1 else ""))
            for i, e in enumerate(se):
                if e:
                    factors.append(f"xi{i + 1}" + (f"^{e}" if e > 1 else ""))
            if h:
                factors.append("h" + (f"^{h}" if h > 1 else ""))
            parts.append(f"({c})" + ("*" + "*".join(factors) if factors else ""))
        return " + ".join(parts)


def _is_zero(c):
    if isinstance(c, GaussianRational):
        return not c
    return c == 0


def _as_coeff(value, like: PolySymbol):
    return PolySymbol.constant(like.n, value, like.deg_cut, like.h_cut, like.mode)


_BASIS_CACHE = {}


def monomial_basis(n, k):
    """Ordered basis of homogeneous degree-k monomials in 2n variables.

    Graded lexicographic with the x-block before the xi-block; within the
    degree, exponent vectors are listed in descending lex order.  The order
    is deterministic and fixes every basis-dependent matrix in the library.
    """
    key = (n, k)
    if key not in _BASIS_CACHE:
        vecs = []
        for total_x in range(k, -1, -1):
            for xe in _compositions(total_x, n):
                for se in _compositions(k - total_x, n):
                    vecs.append((xe, se))
        vecs.sort(key=lambda p: p[0] + p[1], reverse=True)
        _BASIS_CACHE[key] = tuple(vecs)
    return _BASIS_CACHE[key]


def _compositions(total, parts):
    """All exponent tuples of given length summing to total."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def basis_dimension(n, k):
    return len(monomial_basis(n, k))
