"""Numerics on GL(2,R)+: Iwasawa coordinates, expansion coefficients of
g^{-1}P in the complex polynomial basis, and finite-difference evaluation of
the raising/lowering operators in the coordinates (x, y, theta).

The operators are taken in the explicit form

    R = e^{ 2 i theta} ( i y d/dx + y d/dy + (1/2i) d/dtheta),
    L = e^{-2 i theta} (-i y d/dx + y d/dy - (1/2i) d/dtheta),

evaluated by central differences with one Richardson extrapolation step.
"""

from __future__ import annotations

from fractions import Fraction

from mpmath import mp, mpc, mpf, workprec

from .errors import NonPositiveDetError, StepTooLargeError
from .polynomials import (
    GroupElement,
    HomPoly,
    _monomial_to_complex,
    act,
)
from .scalars import BigComplex

_GUARD = 24


class GroupPoint:
    """Point of GL(2,R)+ with cached Iwasawa coordinates.

    g = u * tau(x, y) * kappa(theta) with u > 0, y > 0 and
    tau(x,y) = [[sqrt(y), x/sqrt(y)], [0, 1/sqrt(y)]],
    kappa(theta) = [[cos theta, sin theta], [-sin theta, cos theta]].
    """

    __slots__ = ("entries", "u", "x", "y", "theta", "precision")

    def __init__(self, entries, u, x, y, theta, precision):
        self.entries = tuple(entries)
        self.u = u
        self.x = x
        self.y = y
        self.theta = theta
        self.precision = int(precision)

    @classmethod
    def from_matrix(cls, entries, precision: int) -> "GroupPoint":
        """Decompose a matrix given as (a, b, c, d)."""
        with workprec(precision + _GUARD):
            a, b, c, d = (mpf(e) for e in entries)
            det = a * d - b * c
            if det <= 0:
                raise NonPositiveDetError(f"determinant {det} is not positive")
            u = mp.sqrt(det)
            a1, b1, c1, d1 = a / u, b / u, c / u, d / u
            norm = c1 * c1 + d1 * d1
            y = 1 / norm
            x = (a1 * c1 + b1 * d1) * y
            theta = mp.atan2(-c1, d1)
            if theta < 0:
                theta += 2 * mp.pi
            return cls((a, b, c, d), u, x, y, theta, precision)

    @classmethod
    def from_iwasawa(cls, u, x, y, theta, precision: int) -> "GroupPoint":
        with workprec(precision + _GUARD):
            u, x, y, theta = mpf(u), mpf(x), mpf(y), mpf(theta)
            r = mp.sqrt(y)
            ct, st = mp.cos(theta), mp.sin(theta)
            a = u * (r * ct - x / r * st)
            b = u * (r * st + x / r * ct)
            c = u * (-st / r)
            d = u * (ct / r)
            return cls((a, b, c, d), u, x, y, theta, precision)

    def reconstruction_error(self):
        """Max entrywise defect of u * tau(x,y) * kappa(theta)."""
        rebuilt = GroupPoint.from_iwasawa(
            self.u, self.x, self.y, self.theta, self.precision)
        with workprec(self.precision + _GUARD):
            return max(abs(p - q) for p, q in zip(self.entries, rebuilt.entries))

    def shifted(self, dx=0, dy=0, dtheta=0) -> "GroupPoint":
        return GroupPoint.from_iwasawa(
            self.u, self.x + dx, self.y + dy, self.theta + dtheta,
            self.precision)

    def __repr__(self):
        return (f"GroupPoint(u={self.u}, x={self.x}, y={self.y}, "
                f"theta={self.theta})")


def iwasawa(entries, precision: int = 64) -> GroupPoint:
    """Unique decomposition g = u * tau(x,y) * kappa(theta), det(g) > 0."""
    return GroupPoint.from_matrix(entries, precision)


def f_t_value(point: GroupPoint, k: int, t: int, mu=0):
    """f_t(g) = u^mu y^{k/2} e^{i t theta} at a numeric group point."""
    with workprec(point.precision + _GUARD):
        mu = Fraction(mu)
        val = point.y ** (mpf(k) / 2) * mp.e ** (mpc(0, t) * point.theta)
        if mu:
            val *= point.u ** (mpf(mu.numerator) / mu.denominator)
        return val


# -- expansion coefficients of g^{-1} P ------------------------------------

def alpha_exact(g: GroupElement, P: HomPoly):
    """Complex-basis coefficients of g^{-1}P, exactly.

    Returns a length-(k-1) list of PiScalar; entries vanish outside 0..k-2
    by construction.
    """
    if g.det <= 0:
        raise NonPositiveDetError(f"determinant {g.det} is not positive")
    return act(g.inv(), P).to_complex_coeffs()


def alpha_matrix(g: GroupElement, k: int, mu=0):
    """Columns alpha(g^{-1} P_n); satisfies M(gh) = M(h) M(g)."""
    return [
        alpha_exact(g, HomPoly.complex_basis(k, n, mu))
        for n in range(k - 1)
    ]


def alpha_numeric(entries, P: HomPoly, precision: int):
    """Numeric alpha vector for a real matrix g given as (a, b, c, d)."""
    k, mu = P.k, Fraction(P.mu)
    m = k - 2
    with workprec(precision + _GUARD):
        a, b, c, d = (mpf(e) for e in entries)
        det = a * d - b * c
        if det <= 0:
            raise NonPositiveDetError(f"determinant {det} is not positive")
        # inverse of g
        ia, ib, ic, id_ = d / det, -b / det, -c / det, a / det
        coeffs = [
            x.to_numeric(precision).to_mpc() if hasattr(x, "to_numeric")
            else mpc(x)
            for x in P.coeffs
        ]
        mono = _substitute_mpc(coeffs, m, ia, ib, ic, id_)
        exponent = (Fraction(2 - k) + mu) / 2
        twist = (1 / det) ** (mpf(exponent.numerator) / exponent.denominator)
        mono = [v * twist for v in mono]
        rows = _monomial_to_complex(k)
        out = [mpc(0)] * (k - 1)
        for aa in range(m + 1):
            va = mono[aa]
            if va == 0:
                continue
            for n in range(m + 1):
                w = rows[aa][n]
                if not w.is_zero():
                    out[n] += va * w.to_numeric(precision).to_mpc()
        return out


def _substitute_mpc(coeffs, m, a, b, c, d):
    """Monomial coefficients of P((x,y)g) for numeric g, P of degree m."""
    pow1 = [[mpf(1)]]
    pow2 = [[mpf(1)]]
    for j in range(1, m + 1):
        row1 = [mpf(0)] * (j + 1)
        row2 = [mpf(0)] * (j + 1)
        for i, (p1, p2) in enumerate(zip(pow1[-1], pow2[-1])):
            row1[i] += c * p1
            row1[i + 1] += a * p1
            row2[i] += d * p2
            row2[i + 1] += b * p2
        pow1.append(row1)
        pow2.append(row2)
    out = [mpc(0)] * (m + 1)
    for deg, coeff in enumerate(coeffs):
        if coeff == 0:
            continue
        for i, li in enumerate(pow1[deg]):
            if li == 0:
                continue
            for j, rj in enumerate(pow2[m - deg]):
                if rj != 0:
                    out[i + j] += coeff * li * rj
    return out


# -- circle quadrature and the matrix-coefficient formula ------------------

def circle_pairing_quadrature(F, G, precision: int, nodes: int = 64):
    """Integral of F(theta) G(theta) over the circle with total mass pi.

    Periodic trapezoid rule with `nodes` points, adaptively doubled until
    two consecutive levels agree to the working precision (or nodes exceed
    2^16, in which case the last value is returned).
    """
    target = mpf(2) ** (-(precision + 8))
    with workprec(precision + _GUARD):
        prev = None
        while True:
            h = 2 * mp.pi / nodes
            total = mpc(0)
            for j in range(nodes):
                th = j * h
                total += F(th) * G(th)
            total *= mp.pi / nodes
            if prev is not None:
                scale = max(mpf(1), abs(total))
                if abs(total - prev) <= scale * target or nodes >= 1 << 16:
                    return total
            prev = total
            nodes *= 2


def alpha_quadrature(g: GroupElement, P: HomPoly, n: int, precision: int):
    """alpha_n(g) via the matrix-coefficient integral.

    alpha_n(g) = (i^{k-2-2n} / pi) <g f_{k-2-2n}, iota(P)>  where the pairing
    integrates over the circle and (g f)(h) = f(h g).
    """
    k, mu = P.k, P.mu
    t = k - 2 - 2 * n
    with workprec(precision + _GUARD):
        ge = [mpf(e.numerator) / mpf(e.denominator) for e in
              (g.a, g.b, g.c, g.d)]
        pnum = [
            x.to_numeric(precision).to_mpc() for x in P.coeffs
        ]
        m = k - 2

        def F(th):
            ct, st = mp.cos(th), mp.sin(th)
            ka = (ct * ge[0] + st * ge[2], ct * ge[1] + st * ge[3],
                  -st * ge[0] + ct * ge[2], -st * ge[1] + ct * ge[3])
            pt = GroupPoint.from_matrix(ka, precision)
            return f_t_value(pt, k, t, mu)

        def G(th):
            ct, st = mp.cos(th), mp.sin(th)
            # iota(P)(kappa) = P(-sin, cos); the det twist is 1 on kappa
            total = mpc(0)
            for a_, cf in enumerate(pnum):
                if cf != 0:
                    total += cf * (-st) ** a_ * ct ** (m - a_)
            return total

        integral = circle_pairing_quadrature(F, G, precision)
        return mpc(0, 1) ** ((k - 2 - 2 * n) % 4) / mp.pi * integral


# -- Maass operators by finite differences ----------------------------------

def _central(Ffun, point: GroupPoint, coord: str, h):
    kw = {coord: h}
    kwm = {coord: -h}
    return (Ffun(point.shifted(**kw)) - Ffun(point.shifted(**kwm))) / (2 * h)


def _partial(Ffun, point: GroupPoint, coord: str, h):
    """Richardson-extrapolated central difference; returns (value, err)."""
    d1 = _central(Ffun, point, coord, h)
    d2 = _central(Ffun, point, coord, h / 2)
    value = (4 * d2 - d1) / 3
    return value, abs(value - d2)


def maass_apply(F, which: str, point: GroupPoint, h=None):
    """Apply R or L to a scalar function at a group point, numerically.

    F maps GroupPoint -> complex.  Returns (BigComplex value, error
    estimate).  Raises StepTooLargeError when the extrapolation levels
    disagree badly.
    """
    if which not in ("R", "L"):
        raise ValueError("which must be 'R' or 'L'")
    prec = point.precision
    with workprec(prec + _GUARD):
        if h is None:
            h = mpf(2) ** (-(prec // 3))
        else:
            h = mpf(h)
        fx, ex = _partial(F, point, "dx", h)
        fy, ey = _partial(F, point, "dy", h)
        ft, et = _partial(F, point, "dtheta", h)
        y = point.y
        half_i = mpc(0, -0.5)  # 1/(2i)
        if which == "R":
            val = mp.e ** (mpc(0, 2) * point.theta) * (
                mpc(0, 1) * y * fx + y * fy + half_i * ft)
        else:
            val = mp.e ** (mpc(0, -2) * point.theta) * (
                -mpc(0, 1) * y * fx + y * fy - half_i * ft)
        err = (abs(y) + 1) * (ex + ey + et)
        scale = max(mpf(1), abs(val))
        if err > scale * mpf(2) ** (-8):
            raise StepTooLargeError(
                f"extrapolation error estimate {err} too large at step {h}")
        return BigComplex.from_mpc(val, prec), err


def maass_on_alpha(P: HomPoly, n: int, which: str, point: GroupPoint):
    """R or L applied to g -> alpha_n(g), by finite differences."""
    def F(pt: GroupPoint):
        return alpha_numeric(pt.entries, P, pt.precision)[n]
    return maass_apply(F, which, point)


def alpha_recurrence_check(k: int, trials: int, precision: int = 128,
                           seed: int = 0, tolerance: float = 1e-6):
    """Verify R alpha_n = (n+1-k) alpha_{n-1} and L alpha_n = -(n+1) alpha_{n+1}.

    Finite differences against exact alpha vectors at `trials` random
    rational group elements.  Returns a JSON-ready report dict.
    """
    import random

    rng = random.Random(seed)
    max_residual = mpf(0)
    with workprec(precision + _GUARD):
        for _ in range(trials):
            g = _random_positive_element(rng)
            P = HomPoly(k, [Fraction(rng.randint(-4, 4), rng.randint(1, 3))
                            for _ in range(k - 1)])
            entries = tuple(
                mpf(e.numerator) / mpf(e.denominator)
                for e in (g.a, g.b, g.c, g.d))
            point = GroupPoint.from_matrix(entries, precision)
            alpha = alpha_numeric(entries, P, precision)
            scale = max([mpf(1)] + [abs(v) for v in alpha])
            for n in range(k - 1):
                rv, _ = maass_on_alpha(P, n, "R", point)
                expected = (n + 1 - k) * alpha[n - 1] if n >= 1 else mpc(0)
                max_residual = max(max_residual, abs(rv.to_mpc() - expected) / scale)
                lv, _ = maass_on_alpha(P, n, "L", point)
                expected = -(n + 1) * alpha[n + 1] if n + 1 <= k - 2 else mpc(0)
                max_residual = max(max_residual, abs(lv.to_mpc() - expected) / scale)
    return {
        "check": "alpha_recurrence",
        "k": k,
        "trials": trials,
        "seed": seed,
        "max_residual": float(max_residual),
        "tolerance": tolerance,
        "pass": float(max_residual) <= tolerance,
    }


def _random_positive_element(rng) -> GroupElement:
    while True:
        a, b, c, d = (rng.randint(-5, 5) for _ in range(4))
        if a * d - b * c > 0:
            return GroupElement(a, b, c, d)
