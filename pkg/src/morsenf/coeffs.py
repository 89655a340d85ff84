"""Coefficient arithmetic: exact rationals, Gaussian rationals, and floats.

A symbol is either in "rational" mode (coefficients are Fraction or
GaussianRational, all arithmetic exact) or "float" mode (float or complex).
The two modes never mix inside one symbol.
"""
from __future__ import annotations

from fractions import Fraction


class GaussianRational:
    """Exact complex number with rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    def __add__(self, other):
        o = _lift(other)
        if o is NotImplemented:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _lift(other)
        if o is NotImplemented:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _lift(other)
        if o is NotImplemented:
            return NotImplemented
        return GaussianRational(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = _lift(other)
        if o is NotImplemented:
            return NotImplemented
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _lift(other)
        if o is NotImplemented:
            return NotImplemented
        d = o.re * o.re + o.im * o.im
        if d == 0:
            raise ZeroDivisionError("division by zero GaussianRational")
        return GaussianRational((self.re * o.re + self.im * o.im) / d,
                                (self.im * o.re - self.re * o.im) / d)

    def __rtruediv__(self, other):
        return _lift(other) / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"


#: the exact imaginary unit
I = GaussianRational(0, 1)


def _lift(value):
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, (int, Fraction)):
        return GaussianRational(value, 0)
    return NotImplemented


def normalize(c):
    """Canonical form: demote a real GaussianRational to Fraction."""
    if isinstance(c, GaussianRational) and c.im == 0:
        return c.re
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, complex) and c.imag == 0.0:
        return c.real
    return c


def is_exact(c) -> bool:
    return isinstance(c, (int, Fraction, GaussianRational))


def real_part(c):
    if isinstance(c, GaussianRational):
        return c.re
    if isinstance(c, complex):
        return c.real
    return c


def imag_part(c):
    if isinstance(c, GaussianRational):
        return c.im
    if isinstance(c, complex):
        return c.imag
    return type(c)(0) if isinstance(c, float) else Fraction(0)


def as_complex(c) -> complex:
    return complex(c) if not isinstance(c, GaussianRational) else complex(c)


def coeff_abs(c) -> float:
    return abs(complex(c))


def coeff_from_json(obj, mode):
    """Parse a JSON coefficient: "p/q", float, or {"re": ..., "im": ...}."""
    if isinstance(obj, dict):
        re = coeff_from_json(obj.get("re", 0), mode)
        im = coeff_from_json(obj.get("im", 0), mode)
        if mode == "rational":
            return normalize(GaussianRational(re, im))
        return complex(re, im)
    if mode == "rational":
        if isinstance(obj, str):
            return Fraction(obj)
        if isinstance(obj, int):
            return Fraction(obj)
        raise ValueError(f"not an exact rational coefficient: {obj!r}")
    return float(obj)


def coeff_to_json(c):
    if isinstance(c, Fraction):
        return str(c)
    if isinstance(c, GaussianRational):
        return {"re": str(c.re), "im": str(c.im)}
    if isinstance(c, complex):
        if c.imag == 0.0:
            return c.real
        return {"re": c.real, "im": c.imag}
    if isinstance(c, int):
        return str(Fraction(c))
    return float(c)
