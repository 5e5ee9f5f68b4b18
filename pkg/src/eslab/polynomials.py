"""Homogeneous polynomials of degree k-2 with a determinant twist.

The module implements the finite-dimensional coefficient space for weight-k
cohomology: the group action g.P = |det g|^{(2-k+mu)/2} P((x,y)g), the
invariant pairing determined by the reproduction identity  <P, Q_{s,t}> =
P(s,t)  with  Q_{s,t}(x,y) = (ys-xt)^{k-2},  the realization of dual
functionals as polynomials, and the exact change of basis between the
monomial basis  x^a y^{k-2-a}  and the complex basis
P_n(x,y) = (x+iy)^n (x-iy)^{k-2-n}.

Coefficients are either PiScalar (exact layer) or BigComplex (numeric layer,
used for period polynomials); both support the same arithmetic.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb

from mpmath import mpc, workprec

from .errors import (
    DetRootInexactError,
    NegativeDetFractionalPowerError,
    WeightMismatchError,
)
from .scalars import BigComplex, PiScalar


class GroupElement:
    """2x2 matrix with exact rational entries and nonzero determinant."""

    __slots__ = ("a", "b", "c", "d", "det")

    def __init__(self, a, b, c, d):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.c = Fraction(c)
        self.d = Fraction(d)
        self.det = self.a * self.d - self.b * self.c
        if self.det == 0:
            raise ValueError("matrix is singular")

    @classmethod
    def from_rows(cls, rows) -> "GroupElement":
        (a, b), (c, d) = rows
        return cls(a, b, c, d)

    def rows(self):
        return [[self.a, self.b], [self.c, self.d]]

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inv(self) -> "GroupElement":
        return GroupElement(
            self.d / self.det, -self.b / self.det,
            -self.c / self.det, self.a / self.det,
        )

    def adjugate(self) -> "GroupElement":
        """[[d,-b],[-c,a]]; equals det * inverse."""
        return GroupElement(self.d, -self.b, -self.c, self.a)

    def __neg__(self):
        return GroupElement(-self.a, -self.b, -self.c, -self.d)

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return (self.a, self.b, self.c, self.d) == (
            other.a, other.b, other.c, other.d)

    def __hash__(self):
        return hash((self.a, self.b, self.c, self.d))

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for x in (self.a, self.b, self.c, self.d))

    def key(self):
        return (self.a, self.b, self.c, self.d)

    def __repr__(self):
        return f"GroupElement([[{self.a}, {self.b}], [{self.c}, {self.d}]])"


IDENTITY = GroupElement(1, 0, 0, 1)
INVERSION = GroupElement(0, -1, 1, 0)       # order 4, sends tau -> -1/tau
TRANSLATION = GroupElement(1, 1, 0, 1)      # tau -> tau + 1
REFLECTION = GroupElement(1, 0, 0, -1)      # det -1, normalizes SL2(Z)


def _is_exact_coeff(x) -> bool:
    return isinstance(x, (PiScalar, int, Fraction))


def _lift_exact(x) -> PiScalar:
    if isinstance(x, PiScalar):
        return x
    return PiScalar.from_rational(x)


class HomPoly:
    """Homogeneous polynomial of degree k-2, twist mu, monomial coefficients.

    coeffs[a] multiplies x^a y^{k-2-a}, a = 0..k-2 (length exactly k-1).
    """

    __slots__ = ("k", "mu", "coeffs")

    def __init__(self, k: int, coeffs, mu=0):
        if k < 2:
            raise ValueError("weight k must be at least 2")
        coeffs = list(coeffs)
        if len(coeffs) != k - 1:
            raise ValueError(f"need {k - 1} coefficients for weight {k}")
        self.k = int(k)
        self.mu = Fraction(mu)
        if all(_is_exact_coeff(c) for c in coeffs):
            coeffs = [_lift_exact(c) for c in coeffs]
        self.coeffs = tuple(coeffs)

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, k: int, mu=0) -> "HomPoly":
        return cls(k, [PiScalar.zero()] * (k - 1), mu)

    @classmethod
    def monomial(cls, k: int, a: int, coeff=1, mu=0) -> "HomPoly":
        cs = [PiScalar.zero()] * (k - 1)
        cs[a] = _lift_exact(coeff)
        return cls(k, cs, mu)

    @classmethod
    def complex_basis(cls, k: int, n: int, mu=0) -> "HomPoly":
        """P_n(x,y) = (x+iy)^n (x-iy)^{k-2-n}."""
        if not 0 <= n <= k - 2:
            raise ValueError("complex basis index out of range")
        col = _complex_to_monomial(k)[n]
        return cls(k, list(col), mu)

    @classmethod
    def from_complex_coeffs(cls, k: int, coeffs, mu=0) -> "HomPoly":
        """Polynomial sum_n coeffs[n] * P_n."""
        coeffs = list(coeffs)
        if len(coeffs) != k - 1:
            raise ValueError(f"need {k - 1} coefficients for weight {k}")
        cols = _complex_to_monomial(k)
        out = [PiScalar.zero()] * (k - 1)
        for n, c in enumerate(coeffs):
            if isinstance(c, (int, Fraction)):
                c = _lift_exact(c)
            for a in range(k - 1):
                out[a] = out[a] + c * cols[n][a]
        return cls(k, out, mu)

    # -- structure ------------------------------------------------------

    @property
    def degree(self) -> int:
        return self.k - 2

    def is_exact(self) -> bool:
        return all(isinstance(c, PiScalar) for c in self.coeffs)

    def precision(self) -> int:
        """Smallest precision among numeric coefficients."""
        precs = [c.precision for c in self.coeffs if isinstance(c, BigComplex)]
        if not precs:
            raise TypeError("polynomial has no numeric coefficients")
        return min(precs)

    def is_zero(self) -> bool:
        if self.is_exact():
            return all(c.is_zero() for c in self.coeffs)
        return all(abs(_as_big(c, 53)) == 0 for c in self.coeffs)

    def to_complex_coeffs(self):
        """Coefficients in the basis P_n (exact polynomials only)."""
        if not self.is_exact():
            raise TypeError("complex-basis conversion needs exact coefficients")
        rows = _monomial_to_complex(self.k)
        out = [PiScalar.zero()] * (self.k - 1)
        for a, c in enumerate(self.coeffs):
            for n in range(self.k - 1):
                out[n] = out[n] + c * rows[a][n]
        return out

    def evaluate(self, s, t):
        """P(s, t) for exact rational (or scalar) arguments."""
        m = self.degree
        total = 0
        for a, c in enumerate(self.coeffs):
            total = total + c * (Fraction(s) ** a * Fraction(t) ** (m - a))
        return total

    def conjugate_coeffs(self) -> "HomPoly":
        return HomPoly(self.k, [c.conjugate() for c in self.coeffs], self.mu)

    def map_coeffs(self, fn) -> "HomPoly":
        return HomPoly(self.k, [fn(c) for c in self.coeffs], self.mu)

    def __add__(self, other: "HomPoly") -> "HomPoly":
        if not isinstance(other, HomPoly):
            return NotImplemented
        if self.k != other.k:
            raise WeightMismatchError("cannot add different weights")
        return HomPoly(
            self.k, [x + y for x, y in zip(self.coeffs, other.coeffs)], self.mu)

    def __sub__(self, other: "HomPoly") -> "HomPoly":
        if not isinstance(other, HomPoly):
            return NotImplemented
        return self + other.map_coeffs(lambda c: -c)

    def __neg__(self):
        return self.map_coeffs(lambda c: -c)

    def scale(self, factor) -> "HomPoly":
        return self.map_coeffs(lambda c: c * factor)

    def __eq__(self, other):
        if not isinstance(other, HomPoly):
            return NotImplemented
        return (
            self.k == other.k
            and self.mu == other.mu
            and all(x == y for x, y in zip(self.coeffs, other.coeffs))
        )

    def __hash__(self):
        return hash((self.k, self.mu, self.coeffs))

    def numeric(self, precision: int) -> "HomPoly":
        """Numeric copy with BigComplex coefficients."""
        out = []
        for c in self.coeffs:
            if isinstance(c, PiScalar):
                out.append(c.to_numeric(precision))
            elif isinstance(c, BigComplex):
                out.append(c)
            else:
                out.append(BigComplex(c, 0, precision))
        return HomPoly(self.k, out, self.mu)

    def to_json(self):
        if not self.is_exact():
            raise TypeError("only exact polynomials serialize to JSON")
        return {
            "k": self.k,
            "mu": f"{self.mu.numerator}/{self.mu.denominator}",
            "basis": "monomial",
            "coeffs": [c.to_json() for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, data) -> "HomPoly":
        if data.get("basis", "monomial") != "monomial":
            raise ValueError("unsupported basis")
        num, den = data["mu"].split("/")
        return cls(
            data["k"],
            [PiScalar.from_json(c) for c in data["coeffs"]],
            Fraction(int(num), int(den)),
        )

    def __repr__(self):
        return f"HomPoly(k={self.k}, mu={self.mu}, coeffs={list(self.coeffs)!r})"


# -- basis conversion tables ---------------------------------------------

@lru_cache(maxsize=None)
def _complex_to_monomial(k: int):
    """cols[n][a] = coefficient of x^a y^{m-a} in P_n, as PiScalar."""
    m = k - 2
    cols = []
    for n in range(m + 1):
        col = [PiScalar.zero()] * (m + 1)
        for j in range(n + 1):
            cj = PiScalar.i_power(n - j) * comb(n, j)
            for l in range(m - n + 1):
                # (-i)^{m-n-l} = i^{3(m-n-l)}
                cl = PiScalar.i_power(3 * (m - n - l)) * comb(m - n, l)
                col[j + l] = col[j + l] + cj * cl
        cols.append(tuple(col))
    return tuple(cols)


@lru_cache(maxsize=None)
def _monomial_to_complex(k: int):
    """rows[a][n] = coefficient of P_n in x^a y^{m-a}, as PiScalar."""
    m = k - 2
    rows = []
    for a in range(m + 1):
        row = [PiScalar.zero()] * (m + 1)
        base = PiScalar.from_rational(Fraction(1, 2 ** a))
        # y = -(i/2)(z - zbar), so y^{m-a} carries (-i/2)^{m-a}
        yfac = PiScalar.one()
        for _ in range(m - a):
            yfac = yfac * (PiScalar.i_power(3) * Fraction(1, 2))
        for j in range(a + 1):
            cj = comb(a, j)
            for l in range(m - a + 1):
                sign = -1 if (m - a - l) % 2 else 1
                n = j + l
                term = base * yfac * (cj * comb(m - a, l) * sign)
                row[n] = row[n] + term
        rows.append(tuple(row))
    return tuple(rows)


# -- substitution and group action ----------------------------------------

def linear_substitute(P: HomPoly, g: GroupElement) -> HomPoly:
    """P((x,y)g) = P(ax+cy, bx+dy), no determinant factor."""
    m = P.degree
    a, b, c, d = g.a, g.b, g.c, g.d
    # pow1[j] = coefficients of (ax+cy)^j over x-degree, etc.
    pow1 = _binomial_powers(a, c, m)
    pow2 = _binomial_powers(b, d, m)
    if P.is_exact():
        out = [PiScalar.zero()] * (m + 1)
    else:
        out = [BigComplex.zero(P.precision())] * (m + 1)
    for deg, coeff in enumerate(P.coeffs):
        if isinstance(coeff, PiScalar) and coeff.is_zero():
            continue
        left = pow1[deg]
        right = pow2[m - deg]
        for i, li in enumerate(left):
            if not li:
                continue
            for j, rj in enumerate(right):
                if not rj:
                    continue
                out[i + j] = out[i + j] + coeff * (li * rj)
    return HomPoly(P.k, out, P.mu)


def _binomial_powers(u: Fraction, v: Fraction, m: int):
    """table[j][i] = coefficient of x^i y^{j-i} in (u x + v y)^j."""
    table = [[Fraction(1)]]
    for j in range(1, m + 1):
        prev = table[-1]
        row = [Fraction(0)] * (j + 1)
        for i, p in enumerate(prev):
            row[i] += v * p
            row[i + 1] += u * p
        table.append(row)
    return table


def _exact_root(q: Fraction, root: int) -> Fraction:
    """Exact root-th root of a positive rational, or raise."""
    def iroot(n: int) -> int:
        if n < 2:
            return n
        x = round(n ** (1.0 / root))
        for cand in (x - 1, x, x + 1):
            if cand > 0 and cand ** root == n:
                return cand
        raise DetRootInexactError(
            f"{q} has no exact rational {root}-th root")
    return Fraction(iroot(q.numerator), iroot(q.denominator))


def det_twist_factor(g: GroupElement, k: int, mu) -> Fraction:
    """|det g|^{(2-k+mu)/2} as an exact rational, or raise."""
    exponent = (Fraction(2 - k) + Fraction(mu)) / 2
    det = abs(g.det)
    if exponent.denominator == 1:
        return det ** exponent.numerator
    if g.det < 0:
        raise NegativeDetFractionalPowerError(
            f"det = {g.det} < 0 with fractional twist exponent {exponent}")
    base = _exact_root(det, exponent.denominator)
    return base ** exponent.numerator


def act(g: GroupElement, P: HomPoly) -> HomPoly:
    """Group action on the twisted polynomial module.

    g.P = |det g|^{(2-k+mu)/2} * P((x,y)g).  Negative determinants are
    accepted only when the twist exponent is an integer (k = mu mod 2).
    """
    exponent = (Fraction(2 - P.k) + P.mu) / 2
    if g.det < 0 and exponent.denominator != 1:
        raise NegativeDetFractionalPowerError(
            f"det = {g.det} < 0 with fractional twist exponent {exponent}")
    Q = linear_substitute(P, g)
    if Q.is_exact():
        return Q.scale(det_twist_factor(g, P.k, P.mu))
    prec = Q.precision()
    with workprec(prec + 16):
        det = abs(mpc(g.det.numerator) / mpc(g.det.denominator))
        factor = det ** (mpc(exponent.numerator) / mpc(exponent.denominator))
    return Q.scale(BigComplex.from_mpc(factor, prec))


def reflect(P: HomPoly) -> HomPoly:
    """Action of diag(1,-1): P(x,y) -> P(x,-y)."""
    m = P.degree
    return HomPoly(
        P.k,
        [c if (m - a) % 2 == 0 else -c for a, c in enumerate(P.coeffs)],
        P.mu,
    )


# -- pairing and duality ---------------------------------------------------

def pair_V(P: HomPoly, Q: HomPoly):
    """Invariant pairing with <P, Q_{s,t}> = P(s,t).

    In monomial coordinates:
    <P,Q> = sum_a P_a Q_{m-a} (-1)^{k-a} / binom(m, a),  m = k-2.
    Symmetric for even k, antisymmetric for odd k.
    """
    if P.k != Q.k:
        raise WeightMismatchError(f"weights differ: {P.k} vs {Q.k}")
    if P.mu + Q.mu != 0:
        raise WeightMismatchError(
            f"twists must be opposite: {P.mu} vs {Q.mu}")
    m = P.degree
    total = 0
    for a in range(m + 1):
        sign = -1 if (P.k - a) % 2 else 1
        w = Fraction(sign, comb(m, a))
        total = total + (P.coeffs[a] * Q.coeffs[m - a]) * w
    return total


def q_st(k: int, s, t, mu=0) -> HomPoly:
    """Q_{s,t}(x,y) = (ys - xt)^{k-2}, the reproducing element at (s,t)."""
    m = k - 2
    s = Fraction(s)
    t = Fraction(t)
    coeffs = [
        PiScalar.from_rational(comb(m, a) * (-t) ** a * s ** (m - a))
        for a in range(m + 1)
    ]
    return HomPoly(k, coeffs, mu)


def dual_to_poly(k: int, values, mu=0) -> HomPoly:
    """Realize a dual functional as a polynomial.

    values[a] = F(x^a y^{k-2-a}).  The output P_F satisfies
    pair_V(P_F, Q) = F(Q) for every Q, via
    P_F = F applied to (Yx - Xy)^{k-2} in the (X,Y)-variables.
    """
    m = k - 2
    if len(values) != m + 1:
        raise ValueError(f"need {m + 1} functional values")
    out = []
    for b in range(m + 1):
        sign = -1 if (k - b) % 2 else 1
        v = values[m - b]
        if isinstance(v, (int, Fraction)):
            v = _lift_exact(v)
        out.append(v * Fraction(sign * comb(m, b)))
    return HomPoly(k, out, mu)


def twist_sign_check(g: GroupElement, P: HomPoly, Q: HomPoly) -> bool:
    """Exact check of pair_V(gP, Q) == sign(det g)^k * pair_V(P, g^{-1} Q).

    For even k the sign factor is +1 regardless of det(g).
    """
    if P.k % 2 != 0:
        raise WeightMismatchError("sign-twist identity is stated for even k")
    lhs = pair_V(act(g, P), Q)
    rhs = pair_V(P, act(g.inv(), Q))
    return lhs == rhs


def action_matrix(g: GroupElement, k: int):
    """Matrix of P -> P((x,y)g) on monomial coefficients, as Fractions.

    Column a holds the coefficients of (x^a y^{k-2-a})((x,y)g).
    """
    m = k - 2
    pow1 = _binomial_powers(g.a, g.c, m)
    pow2 = _binomial_powers(g.b, g.d, m)
    cols = []
    for a in range(m + 1):
        col = [Fraction(0)] * (m + 1)
        for i, li in enumerate(pow1[a]):
            if not li:
                continue
            for j, rj in enumerate(pow2[m - a]):
                if rj:
                    col[i + j] += li * rj
        cols.append(col)
    return cols


def _as_big(c, default_prec):
    if isinstance(c, BigComplex):
        return c
    if isinstance(c, PiScalar):
        return c.to_numeric(max(default_prec, 32))
    return BigComplex(c, 0, default_prec)
