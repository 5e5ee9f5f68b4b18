"""Exact pi-graded Gaussian-rational scalars and arbitrary-precision complexes.

PiScalar is the coefficient ring used by every symbolic computation in the
package: finite sums  sum_j  pi^{g_j} * (a_j + b_j i)  with integer grades g_j
and rational a_j, b_j.  Equality is decidable and all ring operations are
exact, so identities involving factors like  pi * i^{2n-k+2}  or  2^{2-k} pi
can be checked with zero tolerance.

BigComplex is a thin arbitrary-precision complex float (mpmath-backed) with
the working precision recorded on the value itself; mixed-precision
arithmetic rounds to the smaller of the two precisions.
"""

from __future__ import annotations

from fractions import Fraction

from mpmath import mp, mpf, mpc, workprec

from .errors import NonMonomialError

_GUARD_BITS = 16


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


class PiScalar:
    """Finitely supported map {pi-grade -> Gaussian rational}, zero-free."""

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        # terms: iterable of (grade, re, im); zeros are dropped.
        clean = {}
        if terms:
            for grade, re, im in terms:
                re = _as_fraction(re)
                im = _as_fraction(im)
                if re or im:
                    if grade in clean:
                        ore, oim = clean[grade]
                        re, im = ore + re, oim + im
                    if re or im:
                        clean[int(grade)] = (re, im)
                    else:
                        clean.pop(grade, None)
        self._terms = dict(sorted(clean.items()))

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls) -> "PiScalar":
        return cls()

    @classmethod
    def one(cls) -> "PiScalar":
        return cls([(0, 1, 0)])

    @classmethod
    def from_rational(cls, q, grade: int = 0) -> "PiScalar":
        return cls([(grade, _as_fraction(q), Fraction(0))])

    @classmethod
    def from_gaussian(cls, re, im, grade: int = 0) -> "PiScalar":
        return cls([(grade, re, im)])

    @classmethod
    def pi_power(cls, grade: int, coeff=1) -> "PiScalar":
        return cls([(grade, _as_fraction(coeff), Fraction(0))])

    @classmethod
    def i_power(cls, j: int) -> "PiScalar":
        re, im = ((1, 0), (0, 1), (-1, 0), (0, -1))[j % 4]
        return cls([(0, re, im)])

    # -- inspection ---------------------------------------------------

    @property
    def terms(self):
        """Grade -> (re, im) map (a copy; instances are immutable)."""
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def grades(self):
        return list(self._terms)

    def coefficient(self, grade: int):
        return self._terms.get(grade, (Fraction(0), Fraction(0)))

    def rational_part(self):
        """The (re, im) pair at grade 0, as Fractions."""
        return self.coefficient(0)

    # -- ring structure -----------------------------------------------

    @staticmethod
    def _coerce(other):
        if isinstance(other, PiScalar):
            return other
        if isinstance(other, (int, Fraction)):
            return PiScalar.from_rational(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        items = [(g, re, im) for g, (re, im) in self._terms.items()]
        items += [(g, re, im) for g, (re, im) in o._terms.items()]
        return PiScalar(items)

    __radd__ = __add__

    def __neg__(self):
        return PiScalar([(g, -re, -im) for g, (re, im) in self._terms.items()])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        items = []
        for g1, (a, b) in self._terms.items():
            for g2, (c, d) in o._terms.items():
                items.append((g1 + g2, a * c - b * d, a * d + b * c))
        return PiScalar(items)

    __rmul__ = __mul__

    def inv(self) -> "PiScalar":
        """Inverse of a single-term scalar; the grade negates."""
        if len(self._terms) != 1:
            raise NonMonomialError(
                "only single-grade scalars are invertible, got "
                f"{len(self._terms)} terms"
            )
        (g, (a, b)), = self._terms.items()
        n = a * a + b * b
        return PiScalar([(-g, a / n, -b / n)])

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inv()

    def conjugate(self) -> "PiScalar":
        return PiScalar([(g, re, -im) for g, (re, im) in self._terms.items()])

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._terms == o._terms

    def __hash__(self):
        return hash(tuple((g, re, im) for g, (re, im) in self._terms.items()))

    def __bool__(self):
        return bool(self._terms)

    # -- numerics and io ----------------------------------------------

    def to_numeric(self, precision: int) -> "BigComplex":
        """Evaluate pi to `precision` bits and sum the terms."""
        if precision < 32:
            raise ValueError("precision must be at least 32 bits")
        with workprec(precision + _GUARD_BITS):
            total = mpc(0)
            for g, (re, im) in self._terms.items():
                total += mpc(_frac_to_mpf(re), _frac_to_mpf(im)) * mp.pi ** g
        return BigComplex.from_mpc(total, precision)

    def to_json(self):
        """[[grade, re_num, re_den, im_num, im_den], ...] sorted by grade."""
        return [
            [g, re.numerator, re.denominator, im.numerator, im.denominator]
            for g, (re, im) in self._terms.items()
        ]

    @classmethod
    def from_json(cls, data) -> "PiScalar":
        return cls(
            [
                (g, Fraction(rn, rd), Fraction(imn, imd))
                for g, rn, rd, imn, imd in data
            ]
        )

    def __repr__(self):
        if not self._terms:
            return "PiScalar(0)"
        bits = []
        for g, (re, im) in self._terms.items():
            coeff = f"({re}+{im}i)" if im else f"{re}"
            bits.append(coeff if g == 0 else f"pi^{g}*{coeff}")
        return "PiScalar(" + " + ".join(bits) + ")"


def _frac_to_mpf(q: Fraction) -> mpf:
    return mpf(q.numerator) / mpf(q.denominator)


def _coerce_numeric(value, precision: int):
    """Lift value to an mpc at the given working precision, or None."""
    with workprec(precision + _GUARD_BITS):
        if isinstance(value, BigComplex):
            return mpc(value.re, value.im)
        if isinstance(value, (int, float)):
            return mpc(value)
        if isinstance(value, Fraction):
            return mpc(_frac_to_mpf(value))
        if isinstance(value, complex):
            return mpc(value.real, value.imag)
        if isinstance(value, (mpf, mpc)):
            return mpc(value)
        if isinstance(value, PiScalar):
            n = value.to_numeric(max(precision, 32))
            return mpc(n.re, n.im)
    return None


class BigComplex:
    """Arbitrary-precision complex with its precision carried along.

    Mixed-precision arithmetic rounds to the minimum of the operand
    precisions; other numeric types are absorbed at this value's own
    precision.
    """

    __slots__ = ("re", "im", "precision")

    def __init__(self, re, im, precision: int):
        if precision < 1:
            raise ValueError("precision must be positive")
        self.precision = int(precision)
        with workprec(self.precision):
            self.re = +mpf(re)
            self.im = +mpf(im)

    @classmethod
    def from_mpc(cls, z, precision: int) -> "BigComplex":
        # attribute access avoids re-rounding at the ambient precision
        if isinstance(z, (mpc, complex)):
            return cls(z.real, z.imag, precision)
        return cls(z, 0, precision)

    @classmethod
    def zero(cls, precision: int) -> "BigComplex":
        return cls(0, 0, precision)

    def to_mpc(self) -> mpc:
        with workprec(self.precision):
            return mpc(self.re, self.im)

    def conjugate(self) -> "BigComplex":
        return BigComplex(self.re, -self.im, self.precision)

    def __abs__(self):
        with workprec(self.precision + _GUARD_BITS):
            return mp.hypot(self.re, self.im)

    def ulp(self):
        """Unit in the last place at this value's magnitude and precision."""
        with workprec(self.precision + _GUARD_BITS):
            mag = mp.hypot(self.re, self.im)
            if mag == 0:
                return mpf(2) ** (-self.precision)
            return mag * mpf(2) ** (1 - self.precision)

    def _binary(self, other, op):
        if isinstance(other, BigComplex):
            prec = min(self.precision, other.precision)
        else:
            prec = self.precision
        zo = _coerce_numeric(other, prec)
        if zo is None:
            return NotImplemented
        with workprec(prec + _GUARD_BITS):
            z = op(mpc(self.re, self.im), zo)
        return BigComplex.from_mpc(z, prec)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binary(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binary(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return self._binary(other, lambda a, b: b / a)

    def __neg__(self):
        return BigComplex(-self.re, -self.im, self.precision)

    def __eq__(self, other):
        if isinstance(other, BigComplex):
            return self.re == other.re and self.im == other.im
        z = _coerce_numeric(other, self.precision)
        if z is None:
            return NotImplemented
        return self.re == z.real and self.im == z.imag

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        return f"BigComplex({self.re!r}, {self.im!r}, prec={self.precision})"


def pi_numeric(precision: int) -> BigComplex:
    """pi to `precision` bits (error at most a few ulp)."""
    with workprec(precision + _GUARD_BITS):
        value = +mp.pi
    return BigComplex(value, 0, precision)
