"""K-type graded vectors for the weight-k line models of GL(2,R)+.

A vector is a finite sum  sum_t c_t f_t  over integers t = k (mod 2), where
f_t(u * tau(x,y) * kappa(theta)) = u^mu y^{k/2} e^{i t theta}.  The module
implements the raising/lowering operators

    R f_t = ((k+t)/2) f_{t+2},      L f_t = ((k-t)/2) f_{t-2},

the two orientation-reversing structures  omega f_t = +/- f_{-t},  the
embedding iota of polynomials into the weight-(2-k) model, the circle
pairing with vol(S^1) = pi, the surjection phi onto polynomials with section
s, the involution I(f_t) = sign(t) f_t on the discrete part, and the real
basis h_t = f_t + f_{-t}, g_t = i(f_t - f_{-t}).

All coefficients are PiScalar, so every identity here is exact.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb

from mpmath import mp, mpc, workprec

from .errors import (
    NotInDiscreteSeriesError,
    UnspecifiedSignStructureError,
    WeightMismatchError,
)
from .polynomials import HomPoly
from .scalars import BigComplex, PiScalar

PLUS = "+"
MINUS = "-"
UNSPECIFIED = None


def _lift(c):
    if isinstance(c, PiScalar):
        return c
    return PiScalar.from_rational(c)


class KTypeVector:
    """Finitely supported map t -> PiScalar with t = k (mod 2).

    The weight k may be any integer: the image of iota lives in weight 2-k.
    sign is "+", "-" or None and selects the omega-structure when needed.
    """

    __slots__ = ("k", "mu", "sign", "terms")

    def __init__(self, k: int, terms=None, mu=0, sign=UNSPECIFIED):
        self.k = int(k)
        self.mu = Fraction(mu)
        if sign not in (PLUS, MINUS, UNSPECIFIED):
            raise ValueError("sign must be '+', '-' or None")
        self.sign = sign
        clean = {}
        for t, c in dict(terms or {}).items():
            t = int(t)
            if (t - self.k) % 2:
                raise ValueError(f"K-type {t} has wrong parity for weight {self.k}")
            c = _lift(c)
            if not c.is_zero():
                clean[t] = c
        self.terms = dict(sorted(clean.items()))

    @classmethod
    def basis(cls, k: int, t: int, mu=0, sign=UNSPECIFIED) -> "KTypeVector":
        return cls(k, {t: PiScalar.one()}, mu, sign)

    @classmethod
    def zero(cls, k: int, mu=0, sign=UNSPECIFIED) -> "KTypeVector":
        return cls(k, {}, mu, sign)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, t: int) -> PiScalar:
        return self.terms.get(t, PiScalar.zero())

    def support(self):
        return list(self.terms)

    def is_discrete(self) -> bool:
        """True when every K-type satisfies |t| >= k."""
        return all(abs(t) >= self.k for t in self.terms)

    def _like(self, terms) -> "KTypeVector":
        return KTypeVector(self.k, terms, self.mu, self.sign)

    def with_sign(self, sign) -> "KTypeVector":
        return KTypeVector(self.k, self.terms, self.mu, sign)

    def __add__(self, other: "KTypeVector") -> "KTypeVector":
        if not isinstance(other, KTypeVector):
            return NotImplemented
        if self.k != other.k or self.mu != other.mu:
            raise WeightMismatchError("cannot add different weights or twists")
        terms = dict(self.terms)
        for t, c in other.terms.items():
            terms[t] = terms.get(t, PiScalar.zero()) + c
        return self._like(terms)

    def __sub__(self, other: "KTypeVector") -> "KTypeVector":
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, factor) -> "KTypeVector":
        if isinstance(factor, (int, Fraction)):
            factor = PiScalar.from_rational(factor)
        return self._like({t: c * factor for t, c in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, KTypeVector):
            return NotImplemented
        return (
            self.k == other.k
            and self.mu == other.mu
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.k, self.mu, tuple(self.terms.items())))

    def to_json(self):
        return {
            "k": self.k,
            "mu": f"{self.mu.numerator}/{self.mu.denominator}",
            "sign": self.sign if self.sign else "none",
            "terms": {str(t): c.to_json() for t, c in self.terms.items()},
        }

    @classmethod
    def from_json(cls, data) -> "KTypeVector":
        num, den = data["mu"].split("/")
        sign = data.get("sign", "none")
        return cls(
            data["k"],
            {int(t): PiScalar.from_json(c) for t, c in data["terms"].items()},
            Fraction(int(num), int(den)),
            None if sign == "none" else sign,
        )

    def __repr__(self):
        return f"KTypeVector(k={self.k}, terms={self.terms!r})"


# -- operators -------------------------------------------------------------

def raise_op(v: KTypeVector) -> KTypeVector:
    """R f_t = ((k+t)/2) f_{t+2}, extended linearly."""
    terms = {}
    for t, c in v.terms.items():
        w = c * Fraction(v.k + t, 2)
        if not w.is_zero():
            terms[t + 2] = terms.get(t + 2, PiScalar.zero()) + w
    return v._like(terms)


def lower_op(v: KTypeVector) -> KTypeVector:
    """L f_t = ((k-t)/2) f_{t-2}, extended linearly."""
    terms = {}
    for t, c in v.terms.items():
        w = c * Fraction(v.k - t, 2)
        if not w.is_zero():
            terms[t - 2] = terms.get(t - 2, PiScalar.zero()) + w
    return v._like(terms)


def theta_derivative(v: KTypeVector) -> KTypeVector:
    """d/dtheta acting by f_t -> i t f_t."""
    return v._like(
        {t: c * PiScalar.from_gaussian(0, t) for t, c in v.terms.items()}
    )


def rotate_multipliers(v: KTypeVector):
    """List of (t, multiplier exponent) pairs: kappa(theta) f_t = e^{it theta} f_t."""
    return [(t, t) for t in v.terms]


def rotate(v: KTypeVector, theta, precision: int):
    """Numeric rotation: t -> e^{i t theta} c_t.  Returns {t: BigComplex}."""
    out = {}
    with workprec(precision + 16):
        th = mp.mpf(theta)
        for t, c in v.terms.items():
            z = c.to_numeric(precision).to_mpc() * mp.e ** (mpc(0, t) * th)
            out[t] = BigComplex.from_mpc(z, precision)
    return out


def act_omega(v: KTypeVector) -> KTypeVector:
    """omega f_t = +/- f_{-t} according to the chosen sign structure."""
    if v.sign not in (PLUS, MINUS):
        raise UnspecifiedSignStructureError(
            "omega needs a vector with sign structure '+' or '-'")
    flip = 1 if v.sign == PLUS else -1
    return v._like({-t: c * flip for t, c in v.terms.items()})


def involution_I(v: KTypeVector) -> KTypeVector:
    """I(f_t) = sign(t) f_t on vectors supported in |t| >= k."""
    if not v.is_discrete():
        raise NotInDiscreteSeriesError(
            f"support {v.support()} is not contained in |t| >= {v.k}")
    return v._like({t: (c if t > 0 else -c) for t, c in v.terms.items()})


# -- maps between the polynomial and line models ---------------------------

def iota(P: HomPoly) -> KTypeVector:
    """Embed a weight-k polynomial into the weight-(2-k) model.

    On the circle, iota(P)(kappa(theta)) = P(-sin theta, cos theta), and
    P_n contributes i^{2n-k+2} e^{(2n-k+2) i theta}.
    """
    k = P.k
    cc = P.to_complex_coeffs()
    terms = {}
    for n, c in enumerate(cc):
        t = 2 * n - k + 2
        w = c * PiScalar.i_power((2 * n - k + 2) % 4)
        if not w.is_zero():
            terms[t] = terms.get(t, PiScalar.zero()) + w
    return KTypeVector(2 - k, terms, P.mu)


def pair_I(f: KTypeVector, g: KTypeVector) -> PiScalar:
    """Circle pairing between weights k and 2-k with vol(S^1) = pi.

    pair_I(f_s, f'_t) = pi * delta(s + t), extended bilinearly.
    """
    if f.k + g.k != 2:
        raise WeightMismatchError(
            f"weights must sum to 2, got {f.k} and {g.k}")
    if f.mu + g.mu != 0:
        raise WeightMismatchError(
            f"twists must be opposite, got {f.mu} and {g.mu}")
    total = PiScalar.zero()
    for s, c in f.terms.items():
        d = g.terms.get(-s)
        if d is not None:
            total = total + c * d * PiScalar.pi_power(1)
    return total


def phi(v: KTypeVector) -> HomPoly:
    """Project onto polynomials: phi(f_{2n-k+2}) = 2^{2-k} pi binom(k-2,n) P_n.

    K-types with |t| >= k are annihilated; the kernel is the discrete part.
    """
    k = v.k
    if k < 2:
        raise WeightMismatchError("phi is defined on weights k >= 2")
    cc = [PiScalar.zero()] * (k - 1)
    for t, c in v.terms.items():
        n = (t + k - 2) // 2
        if 0 <= n <= k - 2:
            factor = PiScalar.pi_power(1, Fraction(comb(k - 2, n), 2 ** (k - 2)))
            cc[n] = cc[n] + c * factor
    return HomPoly.from_complex_coeffs(k, cc, v.mu)


def section(P: HomPoly, sign=UNSPECIFIED) -> KTypeVector:
    """Right inverse of phi: s(P_n) = (2^{k-2}/pi) binom(k-2,n)^{-1} f_{2n-k+2}."""
    k = P.k
    terms = {}
    for n, c in enumerate(P.to_complex_coeffs()):
        if c.is_zero():
            continue
        t = 2 * n - k + 2
        factor = PiScalar.pi_power(-1, Fraction(2 ** (k - 2), comb(k - 2, n)))
        terms[t] = terms.get(t, PiScalar.zero()) + c * factor
    return KTypeVector(k, terms, P.mu, sign)


# -- real structure ---------------------------------------------------------

def _is_real_scalar(c: PiScalar) -> bool:
    return c.conjugate() == c


class RealKTypeVector:
    """Vector in the real span of h_t = f_t + f_{-t} and g_t = i(f_t - f_{-t}).

    h-coefficients are indexed by t >= 0 and g-coefficients by t > 0; all
    coefficients must be real (conjugation-fixed) PiScalars.
    """

    __slots__ = ("k", "mu", "sign", "h_terms", "g_terms")

    def __init__(self, k: int, h_terms=None, g_terms=None, mu=0, sign=UNSPECIFIED):
        self.k = int(k)
        self.mu = Fraction(mu)
        self.sign = sign
        self.h_terms = {}
        self.g_terms = {}
        for t, c in dict(h_terms or {}).items():
            c = _lift(c)
            if t < 0 or (t - k) % 2:
                raise ValueError(f"bad h-index {t}")
            if not _is_real_scalar(c):
                raise ValueError(f"h-coefficient at {t} is not real: {c!r}")
            if not c.is_zero():
                self.h_terms[int(t)] = c
        for t, c in dict(g_terms or {}).items():
            c = _lift(c)
            if t <= 0 or (t - k) % 2:
                raise ValueError(f"bad g-index {t}")
            if not _is_real_scalar(c):
                raise ValueError(f"g-coefficient at {t} is not real: {c!r}")
            if not c.is_zero():
                self.g_terms[int(t)] = c

    def to_ktype(self) -> KTypeVector:
        """Expand h_t, g_t back into the f_t basis."""
        terms = {}
        def add(t, c):
            terms[t] = terms.get(t, PiScalar.zero()) + c
        for t, c in self.h_terms.items():
            add(t, c)
            if t != 0:
                add(-t, c)
            else:
                add(0, c)  # h_0 = 2 f_0
        for t, c in self.g_terms.items():
            add(t, c * PiScalar.i_power(1))
            add(-t, c * PiScalar.i_power(3))
        return KTypeVector(self.k, terms, self.mu, self.sign)

    @classmethod
    def from_ktype(cls, v: KTypeVector) -> "RealKTypeVector":
        """Inverse basis change; raises if any h/g-coefficient is not real."""
        h = {}
        g = {}
        half = Fraction(1, 2)
        for t in sorted({abs(t) for t in v.terms}):
            if t == 0:
                h[0] = v.coefficient(0) * half
                continue
            cp = v.coefficient(t)
            cm = v.coefficient(-t)
            h[t] = (cp + cm) * half
            g[t] = (cm - cp) * PiScalar.i_power(1) * half
        return cls(v.k, h, g, v.mu, v.sign)

    def is_zero(self) -> bool:
        return not self.h_terms and not self.g_terms

    def __eq__(self, other):
        if not isinstance(other, RealKTypeVector):
            return NotImplemented
        return (
            self.k == other.k
            and self.mu == other.mu
            and self.h_terms == other.h_terms
            and self.g_terms == other.g_terms
        )

    def __repr__(self):
        return (f"RealKTypeVector(k={self.k}, h={self.h_terms!r}, "
                f"g={self.g_terms!r})")


def real_closure_holds(v: KTypeVector) -> bool:
    """Check that R+L, i(R-L), d/dtheta and omega keep real coefficients."""
    ops = [
        lambda w: raise_op(w) + lower_op(w),
        lambda w: (raise_op(w) - lower_op(w)).scale(PiScalar.i_power(1)),
        theta_derivative,
    ]
    if v.sign in (PLUS, MINUS):
        ops.append(act_omega)
    for op in ops:
        try:
            RealKTypeVector.from_ktype(op(v))
        except ValueError:
            return False
    return True
