"""Cusp forms as integer q-expansions, with certified truncation bounds.

Built-in forms are eta products: the weight-12 level-1 form q prod(1-q^n)^24
and the weight-2 level-11 form q prod(1-q^n)^2 (1-q^{11n})^2.  Evaluation on
the upper half-plane and completed L-values carry crude but rigorous tail
bounds based on |a_n| <= C n^{k/2+1} with C read off the stored
coefficients.

Completed L-values are computed by splitting the Mellin integral at
y = 1/sqrt(N) and folding the lower range with the Fricke involution, so
only incomplete-gamma sums with fast decay remain.
"""

from __future__ import annotations

import json
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, isqrt

from mpmath import mp, mpc, mpf, workprec

from .errors import (
    AccuracyUnreachableError,
    InsufficientTermsError,
    NonIntegralExpansionError,
)
from .scalars import BigComplex

_GUARD = 24


class QExpansion:
    """Truncated q-expansion sum_{n=1}^{M} a_n q^n of a cusp form.

    fricke, when set, is the eigenvalue w in
    f(-1/(N tau)) = w N^{k/2} tau^k f(tau).
    """

    __slots__ = ("weight", "level", "coeffs", "fricke", "form_id",
                 "tail_constant")

    def __init__(self, weight: int, level: int, coeffs, fricke=None,
                 form_id: str | None = None):
        if weight < 2 or weight % 2:
            raise ValueError("weight must be an even integer >= 2")
        if level < 1:
            raise ValueError("level must be positive")
        self.weight = int(weight)
        self.level = int(level)
        self.coeffs = [Fraction(c) for c in coeffs]
        self.fricke = fricke
        self.form_id = form_id
        self.tail_constant = self._tail_constant()

    def _tail_constant(self):
        s = Fraction(self.weight, 2) + 1
        best = Fraction(1)
        for n, a in enumerate(self.coeffs, start=1):
            if a:
                bound = abs(a) / Fraction(n) ** s
                if bound > best:
                    best = bound
        return best

    @property
    def terms(self) -> int:
        return len(self.coeffs)

    def a(self, n: int) -> Fraction:
        """Coefficient a_n (1-based); raises when past the truncation."""
        if n < 1:
            raise IndexError("coefficients start at n = 1")
        if n > len(self.coeffs):
            raise InsufficientTermsError(
                f"need a_{n} but only {len(self.coeffs)} terms are stored")
        return self.coeffs[n - 1]

    def is_normalized(self) -> bool:
        return bool(self.coeffs) and self.coeffs[0] == 1

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def scale(self, factor) -> "QExpansion":
        return QExpansion(
            self.weight, self.level,
            [c * Fraction(factor) for c in self.coeffs],
            self.fricke, None)

    def truncate(self, M: int) -> "QExpansion":
        if M > len(self.coeffs):
            raise InsufficientTermsError(
                f"cannot extend {len(self.coeffs)} terms to {M}")
        return QExpansion(self.weight, self.level, self.coeffs[:M],
                          self.fricke, self.form_id)

    def to_json(self):
        data = {
            "weight": self.weight,
            "level": self.level,
            "coeffs": [
                c.numerator if c.denominator == 1
                else [c.numerator, c.denominator]
                for c in self.coeffs
            ],
        }
        if self.fricke is not None:
            data["fricke"] = self.fricke
        if self.form_id:
            data["form_id"] = self.form_id
        return data

    @classmethod
    def from_json(cls, data) -> "QExpansion":
        coeffs = [
            Fraction(c[0], c[1]) if isinstance(c, list) else Fraction(c)
            for c in data["coeffs"]
        ]
        return cls(data["weight"], data["level"], coeffs,
                   data.get("fricke"), data.get("form_id"))

    def __repr__(self):
        head = ", ".join(str(c) for c in self.coeffs[:5])
        return (f"QExpansion(weight={self.weight}, level={self.level}, "
                f"M={self.terms}, a=[{head}, ...])")


# -- eta machinery -----------------------------------------------------------

def _pentagonal_series(L: int):
    """Sparse prod(1-q^n) to exponent < L: list of (exponent, +-1)."""
    out = [(0, 1)]
    j = 1
    while True:
        done = True
        for jj in (j, -j):
            e = jj * (3 * jj - 1) // 2
            if e < L:
                out.append((e, -1 if j % 2 else 1))
                done = False
        if done:
            break
        j += 1
    return sorted(out)


def _jacobi_cube_series(L: int):
    """Sparse prod(1-q^n)^3 = sum (-1)^j (2j+1) q^{j(j+1)/2}."""
    out = []
    j = 0
    while True:
        e = j * (j + 1) // 2
        if e >= L:
            break
        out.append((e, (2 * j + 1) * (-1 if j % 2 else 1)))
        j += 1
    return out


def _sparse_multiply(dense, sparse, L: int):
    out = [0] * L
    for e, c in sparse:
        for i, v in enumerate(dense):
            if v and i + e < L:
                out[i + e] += c * v
    return out


@lru_cache(maxsize=32)
def _eta_power(L: int, exponent: int):
    """Dense coefficients of prod_{n>=1}(1-q^n)^exponent, length L."""
    if exponent < 0:
        raise ValueError("negative eta exponents are not supported")
    dense = [1] + [0] * (L - 1)
    cubes, rest = divmod(exponent, 3)
    jac = _jacobi_cube_series(L)
    pent = _pentagonal_series(L)
    for _ in range(cubes):
        dense = _sparse_multiply(dense, jac, L)
    for _ in range(rest):
        dense = _sparse_multiply(dense, pent, L)
    return tuple(dense)


def _rescale_exponents(series, d: int, L: int):
    return [(e * d, c) for e, c in series if e * d < L]


def delta_qexp(M: int) -> QExpansion:
    """The discriminant form q prod_{n>=1}(1-q^n)^24, M coefficients."""
    if M < 2:
        raise ValueError("need at least 2 terms")
    dense = list(_eta_power(M, 24))
    # shift by the leading q
    coeffs = dense[:M]
    return QExpansion(12, 1, coeffs, fricke=1, form_id="delta")


def eta_product(N: int, exponent_pairs, M: int) -> QExpansion:
    """Eta product prod_d eta(d tau)^{r_d} of level N as a q-expansion.

    exponent_pairs is an iterable of (d, r_d) with d | N and r_d > 0.  The
    weight sum(r_d)/2 must be an even integer >= 2 and the leading q-power
    sum(d r_d)/24 must be integral, else NonIntegralExpansionError.
    For self-dual products ({(d, r_d)} = {(N/d, r_d)}) the Fricke eigenvalue
    (-1)^{k/2} is attached.
    """
    pairs = [(int(d), int(r)) for d, r in exponent_pairs]
    if not pairs:
        raise NonIntegralExpansionError(
            "empty eta product has weight 0 and is not a cusp form")
    if any(r <= 0 for _, r in pairs):
        raise ValueError("eta exponents must be positive")
    if any(N % d for d, _ in pairs):
        raise ValueError("every d must divide the level")
    rsum = sum(r for _, r in pairs)
    if rsum % 4:
        raise NonIntegralExpansionError(
            f"weight {rsum}/2 is not an even integer")
    weight = rsum // 2
    if weight < 2:
        raise NonIntegralExpansionError(f"weight {weight} is below 2")
    shift24 = sum(d * r for d, r in pairs)
    if shift24 % 24:
        raise NonIntegralExpansionError(
            f"leading exponent {shift24}/24 is not integral")
    shift = shift24 // 24
    L = M + shift
    dense = [1] + [0] * (L - 1)
    for d, r in pairs:
        pent_d = _rescale_exponents(_pentagonal_series(L), d, L)
        for _ in range(r):
            dense = _sparse_multiply(dense, pent_d, L)
    coeffs = ([0] * (shift - 1) + dense)[:M]
    canonical = sorted(pairs)
    dual = sorted((N // d, r) for d, r in pairs)
    fricke = (-1) ** (weight // 2) if canonical == dual else None
    return QExpansion(weight, N, coeffs, fricke=fricke)


def level11_qexp(M: int) -> QExpansion:
    """The weight-2 level-11 form eta(tau)^2 eta(11 tau)^2."""
    f = eta_product(11, [(1, 2), (11, 2)], M)
    f.form_id = "11a"
    return f


BUILTIN_FORMS = {
    "delta": delta_qexp,
    "11a": level11_qexp,
}


# -- certified evaluation ----------------------------------------------------

def geometric_tail_bound(C, s, decay, M, precision: int = 64):
    """Upper bound for sum_{n > M} C n^s e^{-decay n}, or +inf.

    Uses the ratio test: the terms decrease geometrically once
    e^{-decay} ((M+2)/(M+1))^s < 1.
    """
    with workprec(precision):
        C = mpf(C.numerator) / C.denominator if isinstance(C, Fraction) else mpf(C)
        r = mp.e ** (-mpf(decay))
        ratio = r * (mpf(M + 2) / (M + 1)) ** s
        if ratio >= 1:
            return mp.inf
        first = C * mpf(M + 1) ** s * r ** (M + 1)
        return first / (1 - ratio)


def required_terms(C, s, decay, eps, precision: int = 64) -> int:
    """Smallest power-of-two-ish M with geometric_tail_bound below eps."""
    M = 8
    while M < 1 << 22:
        if geometric_tail_bound(C, s, decay, M, precision) <= eps:
            lo, hi = M // 2, M
            while lo + 1 < hi:
                mid = (lo + hi) // 2
                if geometric_tail_bound(C, s, decay, mid, precision) <= eps:
                    hi = mid
                else:
                    lo = mid
            return hi
        M *= 2
    raise AccuracyUnreachableError("tail bound does not converge")


def eval_qexp(f: QExpansion, tau, precision: int):
    """Evaluate sum a_n e^{2 pi i n tau} with a certified tail bound.

    Raises AccuracyUnreachableError (carrying the required number of terms)
    when the stored truncation cannot reach 2^-precision accuracy relative
    to max(1, |value|).
    """
    if isinstance(tau, BigComplex):
        tau = tau.to_mpc()
    with workprec(precision + _GUARD):
        tau = mpc(tau)
        y = tau.imag
        if y <= 0:
            raise ValueError("tau must lie in the upper half-plane")
        s = f.weight // 2 + 1
        eps = mpf(2) ** (-(precision + 4))
        bound = geometric_tail_bound(
            f.tail_constant, s, 2 * mp.pi * y, f.terms, precision)
        if bound > eps:
            need = required_terms(f.tail_constant, s, 2 * mp.pi * y, eps)
            raise AccuracyUnreachableError(
                f"{f.terms} terms give tail bound {bound}; "
                f"need about {need} terms", required_terms=need)
        q = mp.e ** (2j * mp.pi * tau)
        qn = mpc(1)
        total = mpc(0)
        for a in f.coeffs:
            qn *= q
            if a:
                total += _frac_mpf(a) * qn
        return BigComplex.from_mpc(total, precision)


def _frac_mpf(x: Fraction):
    return mpf(x.numerator) / mpf(x.denominator)


# -- Hecke operators ---------------------------------------------------------

def hecke(f: QExpansion, p: int, out_len: int | None = None) -> QExpansion:
    """T_p: (T_p f)_n = a_{np} + p^{k-1} a_{n/p} (second term when p | n).

    Needs p * out_len stored coefficients; p must not divide the level.
    """
    if p < 2 or any(p % q == 0 for q in range(2, isqrt(p) + 1)):
        raise ValueError(f"{p} is not prime")
    if f.level % p == 0:
        raise ValueError(f"p = {p} divides the level {f.level}")
    if out_len is None:
        out_len = f.terms // p
    if p * out_len > f.terms:
        raise InsufficientTermsError(
            f"need {p * out_len} coefficients, have {f.terms}")
    pk = Fraction(p) ** (f.weight - 1)
    out = []
    for n in range(1, out_len + 1):
        c = f.a(n * p)
        if n % p == 0:
            c += pk * f.a(n // p)
        out.append(c)
    return QExpansion(f.weight, f.level, out, f.fricke, None)


def hecke_eigenvalue(f: QExpansion, p: int) -> Fraction:
    """a_p of a normalized eigenform, verified coefficientwise via T_p."""
    if not f.is_normalized():
        raise ValueError("form is not a normalized eigenform candidate")
    tp = hecke(f, p)
    ap = f.a(p)
    for n in range(1, tp.terms + 1):
        if tp.a(n) != ap * f.a(n):
            raise ValueError(
                f"not an eigenform: (T_{p}f)_{n} != a_{p} a_{n}")
    return ap


# -- completed L-values ------------------------------------------------------

def _incomplete_gamma_int(s: int, x):
    """Gamma(s, x) = (s-1)! e^{-x} sum_{j<s} x^j/j! for integer s >= 1."""
    total = mpf(0)
    term = mpf(1)
    for j in range(s):
        if j:
            term = term * x / j
        total += term
    return factorial(s - 1) * mp.e ** (-x) * total


def l_value(f: QExpansion, s: int, precision: int):
    """Completed L-value  Lambda(f, s) = int_0^inf f(iy) y^{s-1} dy.

    Splits the integral at y0 = 1/sqrt(N) and folds the lower part through
    the Fricke involution:
    Lambda(s) = I(s) + w i^k N^{k/2 - s} I(k - s),
    I(s) = sum_n a_n (2 pi n)^{-s} Gamma(s, 2 pi n y0).
    Certified error below 2^{-precision/2}.
    """
    k, N = f.weight, f.level
    if not 1 <= s <= k - 1:
        raise ValueError(f"s = {s} is outside the critical strip 1..{k - 1}")
    if f.fricke is None:
        raise ValueError("form has no Fricke eigenvalue; cannot fold")
    with workprec(precision + _GUARD):
        y0 = 1 / mp.sqrt(N)
        eps = mpf(2) ** (-(precision // 2 + 8))
        if 2 * mp.pi * (f.terms + 1) * y0 < 2 * k:
            raise AccuracyUnreachableError(
                "too few terms for the incomplete-gamma tail regime")
        # For x = 2 pi n y0 >= 2s, Gamma(s, x) <= 2 x^{s-1} e^{-x}, so the
        # n-th term of I(sv) is at most (C/pi) n^{k/2} y0^{sv-1} e^{-x};
        # the folded part carries an extra N^{k/2-s}.
        scale = (2 / mp.pi) * max(
            mpf(1), y0 ** (s - 1), y0 ** (k - s - 1)) * (
            1 + mpf(N) ** abs(mpf(k) / 2 - s))
        bound = geometric_tail_bound(
            f.tail_constant, mpf(k) / 2, 2 * mp.pi * y0, f.terms,
            precision) * scale
        if bound > eps:
            need = required_terms(f.tail_constant, mpf(k) / 2,
                                  2 * mp.pi * y0, eps / scale)
            raise AccuracyUnreachableError(
                f"{f.terms} terms give L-value tail {bound}; "
                f"need about {need}", required_terms=need)

        def partial(sv: int):
            total = mpf(0)
            for n in range(1, f.terms + 1):
                a = f.coeffs[n - 1]
                if a:
                    x = 2 * mp.pi * n * y0
                    total += (_frac_mpf(a) * _incomplete_gamma_int(sv, x)
                              / (2 * mp.pi * n) ** sv)
            return total

        w = f.fricke
        value = partial(s) + w * mpc(0, 1) ** (k % 4) * \
            mpf(N) ** (mpf(k) / 2 - s) * partial(k - s)
        return BigComplex.from_mpc(value, precision)


# -- dimension formulas (level 1 oracle) ------------------------------------

def dim_modular_forms_level1(k: int) -> int:
    """dim M_k(SL2(Z)) by the classical formula."""
    if k < 0 or k % 2:
        return 0
    if k == 0:
        return 1
    return k // 12 if k % 12 == 2 else k // 12 + 1


def dim_cusp_forms_level1(k: int) -> int:
    if k < 12 or k % 2:
        return 0
    return dim_modular_forms_level1(k) - 1


# -- file ingestion and cache ------------------------------------------------

def load_qexp(path) -> QExpansion:
    with open(path, "r", encoding="utf-8") as fh:
        return QExpansion.from_json(json.load(fh))


def save_qexp(f: QExpansion, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(f.to_json(), fh)


class ExpansionCache:
    """Directory cache of generated expansions keyed by (form id, M)."""

    def __init__(self, directory):
        import os
        self.directory = directory
        os.makedirs(directory, exist_ok=True)

    def path(self, form_id: str, M: int):
        import os
        return os.path.join(self.directory, f"{form_id}_{M}.json")

    def get(self, form_id: str, M: int) -> QExpansion | None:
        import os
        p = self.path(form_id, M)
        if os.path.exists(p):
            return load_qexp(p)
        return None

    def put(self, f: QExpansion) -> None:
        if not f.form_id:
            raise ValueError("only named forms are cached")
        save_qexp(f, self.path(f.form_id, f.terms))


def builtin_form(name: str, M: int, cache: ExpansionCache | None = None
                 ) -> QExpansion:
    if name not in BUILTIN_FORMS:
        raise KeyError(f"unknown form {name!r}; have {sorted(BUILTIN_FORMS)}")
    if cache is not None:
        hit = cache.get(name, M)
        if hit is not None:
            return hit
    f = BUILTIN_FORMS[name](M)
    if cache is not None:
        cache.put(f)
    return f
