"""Exact univariate polynomial arithmetic over Q and Q(i).

Engine behind the closure polynomials: chain points are carried as pairs
(numerator, denominator) of polynomials in the coordinate of the unknown
point, with a polynomial-GCD reduction after every step so that degrees
match the reduced rational functions.  Floating inputs are converted to
exact dyadic rationals, so there is a single exact code path; complex
inputs use Gaussian rationals.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence, Union


class GaussQ:
    """Gaussian rational a + b*i with exact Fraction components."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, *a):
        raise AttributeError("GaussQ is immutable")

    @classmethod
    def from_complex(cls, z: complex) -> "GaussQ":
        return cls(Fraction(z.real), Fraction(z.imag))

    def __add__(self, other):
        other = _as_gauss(other)
        return GaussQ(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_gauss(other)
        return GaussQ(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _as_gauss(other) - self

    def __mul__(self, other):
        other = _as_gauss(other)
        return GaussQ(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_gauss(other)
        d = other.re * other.re + other.im * other.im
        if d == 0:
            raise ZeroDivisionError("division by zero GaussQ")
        return GaussQ(
            (self.re * other.re + self.im * other.im) / d,
            (self.im * other.re - self.re * other.im) / d,
        )

    def __neg__(self):
        return GaussQ(-self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        try:
            other = _as_gauss(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussQ({self.re}, {self.im})"


def _as_gauss(x) -> GaussQ:
    if isinstance(x, GaussQ):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussQ(x, 0)
    if isinstance(x, float):
        return GaussQ(Fraction(x), 0)
    if isinstance(x, complex):
        return GaussQ.from_complex(x)
    raise TypeError(f"cannot convert {type(x).__name__} to GaussQ")


Coeff = Union[Fraction, GaussQ]


def exact_scalar(z, gaussian: bool) -> Coeff:
    """Exact field element from an int/float/complex value."""
    if gaussian:
        return _as_gauss(z)
    if isinstance(z, complex):
        if z.imag != 0:
            raise ValueError("complex value in a rational-only context")
        z = z.real
    return Fraction(z)


class Poly:
    """Dense univariate polynomial, coefficients ascending, exact field."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Sequence[Coeff]):
        c = list(coeffs)
        while c and not c[-1]:
            c.pop()
        object.__setattr__(self, "c", tuple(c))

    def __setattr__(self, *a):
        raise AttributeError("Poly is immutable")

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return not self.c

    def __add__(self, other: "Poly") -> "Poly":
        a, b = self.c, other.c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, z in enumerate(b):
            out[i] = out[i] + z
        return Poly(out)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __neg__(self) -> "Poly":
        return Poly([-z for z in self.c])

    def __mul__(self, other: "Poly") -> "Poly":
        if self.is_zero() or other.is_zero():
            return Poly(())
        a, b = self.c, other.c
        out = [a[0] * b[0] * 0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j, bj in enumerate(b):
                out[i + j] = out[i + j] + ai * bj
        return Poly(out)

    def scale(self, k: Coeff) -> "Poly":
        return Poly([z * k for z in self.c])

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.c)
        d = other.c
        dd = len(d) - 1
        lead = d[-1]
        q = [self.c[0] * 0 if self.c else Fraction(0)] * max(len(rem) - dd, 0)
        while len(rem) - 1 >= dd and any(rem):
            while rem and not rem[-1]:
                rem.pop()
            if len(rem) - 1 < dd:
                break
            k = rem[-1] / lead
            pos = len(rem) - 1 - dd
            q[pos] = k
            for i in range(len(d)):
                rem[pos + i] = rem[pos + i] - k * d[i]
            rem.pop()
        return Poly(q), Poly(rem)

    def __floordiv__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[1]

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        lead = self.c[-1]
        return Poly([z / lead for z in self.c])

    def eval_complex(self, x: complex, scale: float | None = None) -> complex:
        """Horner evaluation in complex floats; coefficients pre-scaled."""
        if self.is_zero():
            return 0j
        if scale is None:
            scale = max(_coeff_norm(z) for z in self.c) or 1.0
        acc = 0j
        for z in reversed(self.c):
            acc = acc * x + _coeff_to_complex(z, scale)
        return acc

    def eval_exact(self, x: Coeff) -> Coeff:
        """Horner evaluation in exact field arithmetic."""
        if self.is_zero():
            return x * 0
        acc = x * 0
        for z in reversed(self.c):
            acc = acc * x + z
        return acc

    def derivative(self) -> "Poly":
        if self.degree < 1:
            return Poly(())
        return Poly([k * z for k, z in enumerate(self.c)][1:])

    def complex_coefficients(self) -> tuple[complex, ...]:
        """Coefficients as floats, jointly normalized by the largest magnitude."""
        if self.is_zero():
            return ()
        scale = max(_coeff_norm(z) for z in self.c)
        return tuple(_coeff_to_complex(z, scale) for z in self.c)

    def __repr__(self):
        return f"Poly({list(self.c)})"


def _coeff_norm(z: Coeff) -> float:
    if isinstance(z, GaussQ):
        return math.hypot(_frac_to_float(z.re), _frac_to_float(z.im))
    return abs(_frac_to_float(z))


def _frac_to_float(f: Fraction) -> float:
    try:
        return float(f)
    except OverflowError:
        # huge integers: fall back to a scaled conversion
        n, d = f.numerator, f.denominator
        shift = max(n.bit_length(), d.bit_length()) - 500
        if shift > 0:
            n >>= shift
            d >>= shift
        return n / d if d else math.inf


def _coeff_to_complex(z: Coeff, scale: float) -> complex:
    if isinstance(z, GaussQ):
        return complex(_frac_to_float(z.re) / scale, _frac_to_float(z.im) / scale)
    return complex(_frac_to_float(z) / scale, 0.0)


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic GCD over the coefficient field (Euclid with monic remainders)."""
    a, b = a.monic() if not a.is_zero() else a, b.monic() if not b.is_zero() else b
    while not b.is_zero():
        a, b = b, (a % b)
        if not b.is_zero():
            b = b.monic()
    return a.monic() if not a.is_zero() else a


def _int_content_normalize(polys: list[Poly]) -> list[Poly]:
    """Jointly scale Fraction-coefficient polynomials to primitive integers."""
    from math import gcd

    denoms = [z.denominator for p in polys for z in p.c]
    if not denoms:
        return polys
    lcm = 1
    for d in denoms:
        lcm = lcm * d // gcd(lcm, d)
    nums = [abs(z.numerator * (lcm // z.denominator)) for p in polys for z in p.c if z]
    if not nums:
        return polys
    g = 0
    for v in nums:
        g = gcd(g, v)
    g = g or 1
    k = Fraction(lcm, g)
    return [p.scale(k) for p in polys]


def normalize_pair(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    """Reduce a homogeneous polynomial pair: cancel the GCD, tame coefficients."""
    if a.is_zero() and b.is_zero():
        return a, b
    if not a.is_zero() and not b.is_zero():
        g = poly_gcd(a, b)
        if g.degree > 0:
            a = a // g
            b = b // g
    ref = b if not b.is_zero() else a
    lead = ref.c[-1]
    if isinstance(lead, GaussQ):
        a, b = a.scale(GaussQ(1) / lead), b.scale(GaussQ(1) / lead)
        return a, b
    a, b = a.scale(1 / lead), b.scale(1 / lead)
    a, b = _int_content_normalize([a, b])
    return a, b


def primitive(p: Poly) -> Poly:
    """Canonical form: integer primitive with positive leading coefficient
    (rational case) or monic (Gaussian case)."""
    if p.is_zero():
        return p
    if isinstance(p.c[-1], GaussQ):
        return p.monic()
    (q,) = _int_content_normalize([p.monic()])
    if q.c[-1] < 0:
        q = q.scale(Fraction(-1))
    return q


# ---------------------------------------------------------------------------
# chain iteration on polynomial vectors


PolyVec = tuple[Poly, Poly]


def _pv_bracket(u: PolyVec, v: PolyVec) -> Poly:
    return u[0] * v[1] - u[1] * v[0]


def chain_next_vector(window: Sequence[PolyVec]) -> PolyVec:
    """Next chain point from six consecutive ones, as a reduced polynomial pair."""
    q1, q2, q3, q4, q5, q6 = window
    c1 = _pv_bracket(q1, q4) * _pv_bracket(q3, q4) * _pv_bracket(q5, q6)
    c2 = _pv_bracket(q1, q6) * _pv_bracket(q2, q3) * _pv_bracket(q4, q5)
    a = c1 * q2[0] - c2 * q4[0]
    b = c1 * q2[1] - c2 * q4[1]
    return normalize_pair(a, b)


def constant_vector(x, gaussian: bool) -> PolyVec:
    """Constant chain point from a homogeneous coordinate pair or affine value."""
    if isinstance(x, tuple):
        a, b = x
    else:
        a, b = x, 1
    return Poly([exact_scalar(a, gaussian)]), Poly([exact_scalar(b, gaussian)])


def variable_vector(gaussian: bool) -> PolyVec:
    one = exact_scalar(1, gaussian)
    zero = exact_scalar(0, gaussian)
    return Poly([zero, one]), Poly([one])


def round_dyadic(x: Coeff, bits: int = 200) -> Coeff:
    """Round an exact scalar to the 2^-bits grid to cap denominator growth."""
    if isinstance(x, GaussQ):
        return GaussQ(_round_frac(x.re, bits), _round_frac(x.im, bits))
    return _round_frac(Fraction(x), bits)


def _round_frac(f: Fraction, bits: int) -> Fraction:
    scaled = f * (1 << bits)
    return Fraction(round(scaled), 1 << bits)


def exact_newton(
    p: Poly, seed: complex, steps: int = 16, bits: int = 200
) -> tuple[Coeff, complex]:
    """Polish a root with Newton steps in exact arithmetic.

    Iterates in the field of the coefficients (dyadically rounded between
    steps) so clustered roots separate far below double precision; returns
    both the exact iterate and its complex value.
    """
    gaussian = isinstance(p.c[0], GaussQ) or abs(seed.imag) > 0
    x: Coeff = round_dyadic(_as_gauss(seed) if gaussian else Fraction(seed.real), bits)
    dp = p.derivative()
    for _ in range(steps):
        fx = p.eval_exact(x)
        if not fx:
            break
        dx = dp.eval_exact(x)
        if not dx:
            break
        step = fx / dx
        x = round_dyadic(x - step, bits)
        if isinstance(step, GaussQ):
            mag = math.hypot(_frac_to_float(step.re), _frac_to_float(step.im))
        else:
            mag = abs(_frac_to_float(step))
        if mag < 1e-45:
            break
    if isinstance(x, GaussQ):
        return x, complex(_frac_to_float(x.re), _frac_to_float(x.im))
    return x, complex(_frac_to_float(x), 0.0)
