"""Period integrals of cusp forms and numerical weight-k cocycles.

Every path integral  int P(1,-tau) f(tau) dtau  is routed through the cusp
at infinity and decomposed into vertical rays.  Rays starting below
Im = 0.3 are folded into the standard fundamental domain with SL2(Z)
elements, and cusp-to-cusp paths are split along continued-fraction
convergents, so each surviving ray starts at height >= sqrt(3)/2 and the
q-expansion converges at machine-certifiable speed.  Folding by a matrix
sigma outside the level group replaces f by the slashed form f|sigma whose
expansion is known at prime level from the Fricke eigenvalue.

Cocycle values r(gamma)(P) = int_{z0}^{gamma z0} P(1,-tau) f(tau) dtau are
returned as polynomials via the dual realization, so that
pair_V(r(gamma), P) evaluates the underlying functional.
"""

from __future__ import annotations

import random
from fractions import Fraction
from math import comb, factorial

from mpmath import mp, mpc, mpf, workprec

from ._linalg import lstsq_complex, rational_kernel_dim, rational_rank
from .errors import (
    AccuracyUnreachableError,
    NonCuspidalAtCuspError,
    WeightMismatchError,
)
from .polynomials import (
    GroupElement,
    HomPoly,
    IDENTITY,
    INVERSION,
    REFLECTION,
    TRANSLATION,
    act,
    action_matrix,
    dual_to_poly,
    pair_V,
    reflect,
)
from .qexp import (
    QExpansion,
    dim_cusp_forms_level1,
    dim_modular_forms_level1,
    geometric_tail_bound,
    hecke_eigenvalue,
    required_terms,
)
from .scalars import BigComplex

_GUARD = 32
_MIN_RAY_HEIGHT = 0.3

LEVEL1_GENERATORS = {"S": INVERSION, "T": TRANSLATION}


def conjugate_by_reflection(g: GroupElement) -> GroupElement:
    """omega g omega with omega = diag(1,-1): flips the off-diagonal signs."""
    return GroupElement(g.a, -g.b, -g.c, g.d)


class GroupWord:
    """Word in named generators with exponents +-1."""

    __slots__ = ("generators", "letters")

    def __init__(self, generators, letters=()):
        self.generators = dict(generators)
        self.letters = tuple((str(n), int(e)) for n, e in letters)
        for n, e in self.letters:
            if n not in self.generators:
                raise KeyError(f"unknown generator {n!r}")
            if e not in (1, -1):
                raise ValueError("letter exponents must be +-1")

    @classmethod
    def from_string(cls, generators, text: str) -> "GroupWord":
        """Parse words like "S T^-1 S" or "S,T,T"."""
        letters = []
        for tok in text.replace(",", " ").split():
            if "^" in tok:
                name, e = tok.split("^")
                letters.append((name, int(e and e or 1)))
            else:
                letters.append((tok, 1))
        expanded = []
        for name, e in letters:
            sign = 1 if e > 0 else -1
            expanded.extend((name, sign) for _ in range(abs(e)))
        return cls(generators, expanded)

    @classmethod
    def random(cls, generators, rng: random.Random, max_len: int = 6,
               min_len: int = 1) -> "GroupWord":
        names = sorted(generators)
        n = rng.randint(min_len, max_len)
        letters = [(rng.choice(names), rng.choice((1, -1))) for _ in range(n)]
        return cls(generators, letters)

    def matrix(self) -> GroupElement:
        g = IDENTITY
        for name, e in self.letters:
            m = self.generators[name]
            g = g * (m if e == 1 else m.inv())
        return g

    def __mul__(self, other: "GroupWord") -> "GroupWord":
        if self.generators != other.generators:
            raise ValueError("words over different generator sets")
        return GroupWord(self.generators, self.letters + other.letters)

    def __repr__(self):
        body = " ".join(n if e == 1 else f"{n}^-1" for n, e in self.letters)
        return f"GroupWord({body or '1'})"


# -- endpoints ---------------------------------------------------------------

INF = ("inf",)


def _orbit_point(M: GroupElement, s: Fraction):
    return ("orbit", M, Fraction(s))


def _endpoint_value(end, wp: int):
    """Numeric value of an interior endpoint."""
    kind = end[0]
    with workprec(wp):
        if kind == "orbit":
            _, M, s = end
            z = mpc(0, mpf(s.numerator) / s.denominator)
            num = _frac(M.a) * z + _frac(M.b)
            den = _frac(M.c) * z + _frac(M.d)
            return num / den
        if kind == "raw":
            return mpc(end[1])
    raise ValueError(f"endpoint {end} has no interior value")


def _apply_to_endpoint(g: GroupElement, end):
    kind = end[0]
    if kind == "inf":
        if g.c == 0:
            return INF
        return ("cusp", Fraction(g.a, g.c))
    if kind == "cusp":
        r = end[1]
        num = g.a * r + g.b
        den = g.c * r + g.d
        if den == 0:
            return INF
        return ("cusp", Fraction(num, den))
    if kind == "orbit":
        _, M, s = end
        return _orbit_point(g * M, s)
    if kind == "raw":
        z = end[1]
        num = _frac(g.a) * z + _frac(g.b)
        den = _frac(g.c) * z + _frac(g.d)
        return ("raw", num / den)
    raise ValueError(f"bad endpoint {end!r}")


def _endpoint_key(end):
    kind = end[0]
    if kind == "inf":
        return INF
    if kind == "cusp":
        return ("cusp", end[1])
    if kind == "orbit":
        return ("orbit", end[1].key(), end[2])
    return ("raw", repr(end[1]))


def _frac(q: Fraction):
    return mpf(q.numerator) / mpf(q.denominator)


def normalize_base(base):
    """Accept 'inf', a positive rational height, or i*s as complex."""
    if base in ("inf", "oo", None) or base == INF:
        return INF
    if isinstance(base, (int, Fraction)):
        s = Fraction(base)
    elif isinstance(base, str) and base.endswith("i"):
        s = Fraction(base[:-1] or 1)
    elif isinstance(base, complex):
        if base.real != 0:
            raise ValueError("interior base points must be purely imaginary")
        s = Fraction(base.imag)
    else:
        raise ValueError(f"unsupported base point {base!r}")
    if s <= 0:
        raise ValueError("base height must be positive")
    return _orbit_point(IDENTITY, s)


# -- fundamental domain and continued fractions ------------------------------

def _reduce_to_fundamental_domain(z, wp: int):
    """gamma in SL2(Z) with Im(gamma z) >= sqrt(3)/2; returns (gamma, z')."""
    with workprec(wp):
        g = IDENTITY
        z = mpc(z)
        for _ in range(10000):
            n = int(mp.nint(z.real))
            if n:
                z -= n
                g = GroupElement(1, -n, 0, 1) * g
            if abs(z) < 1 - mpf(2) ** (-wp // 2):
                z = -1 / z
                g = INVERSION * g
            else:
                return g, z
        raise AccuracyUnreachableError("fundamental domain reduction stalled")


def _cusp_path_pieces(r: Fraction):
    """Unimodular pieces of the geodesic path {infinity -> r}.

    Returns matrices h_j with det 1 such that the path is the concatenation
    of {h_j 0 -> h_j infinity} over j.
    """
    p, q = r.numerator, r.denominator
    cf = []
    while True:
        a, rem = divmod(p, q)
        cf.append(a)
        if rem == 0:
            break
        p, q = q, rem
    pieces = []
    p_prev, q_prev = 1, 0
    p_cur, q_cur = cf[0], 1
    sign = -1  # (-1)^{j+1} at j = 0
    pieces.append(GroupElement(p_cur, sign * p_prev, q_cur, sign * q_prev))
    for j in range(1, len(cf)):
        p_prev, p_cur = p_cur, cf[j] * p_cur + p_prev
        q_prev, q_cur = q_cur, cf[j] * q_cur + q_prev
        sign = -sign
        pieces.append(GroupElement(p_cur, sign * p_prev, q_cur, sign * q_prev))
    return pieces


# -- the integration engine --------------------------------------------------

class PeriodEngine:
    """Shared caches for all period integrals of one form at one precision."""

    def __init__(self, f: QExpansion, precision: int = 128):
        self.f = f
        self.k = f.weight
        self.level = f.level
        self.precision = int(precision)
        self.wp = self.precision + _GUARD
        self._moments = {}
        self._action_cols = {}
        self._value_cache = {}
        if getattr(f, "constant_term", 0):
            raise NonCuspidalAtCuspError(
                "period paths reach cusps; the form must be cuspidal")

    # ---- slashed expansions

    def _slash_data(self, sigma: GroupElement):
        """(width, scale, phase) with (f|sigma)(w) = scale * sum a_n
        zeta_width^{n phase} e^{2 pi i n w / width}."""
        N = self.level
        if N == 1:
            return 1, Fraction(1), 0
        c = sigma.c
        if c.denominator != 1 or sigma.a.denominator != 1:
            raise ValueError("slash matrices must be integral")
        if int(c) % N == 0:
            return 1, Fraction(1), 0
        if any(N % q == 0 for q in range(2, N) if q * q <= N):
            raise ValueError(f"composite level {N} is not supported here")
        if self.f.fricke is None:
            raise ValueError(
                "expansion at a finite cusp needs the Fricke eigenvalue")
        cinv = pow(int(c) % N, -1, N)
        m = (int(sigma.d) * cinv) % N
        scale = Fraction(self.f.fricke, N ** (self.k // 2))
        return N, scale, m

    # ---- vertical ray moments

    def _ray_moments(self, end, sigma: GroupElement):
        """V_m = int_{z0}^{i inf} tau^m (f|sigma)(tau) dtau, m = 0..k-2.

        Returns (list of mpc, tail bound mpf).  Cached per (endpoint, sigma).
        """
        key = (_endpoint_key(end), sigma.key())
        hit = self._moments.get(key)
        if hit is not None:
            return hit
        k, wp = self.k, self.wp
        m = k - 2
        width, scale, phase = self._slash_data(sigma)
        with workprec(wp):
            z0 = _endpoint_value(end, wp)
            y0 = z0.imag
            if y0 <= 0:
                raise ValueError("ray must start in the upper half-plane")
            decay = 2 * mp.pi * y0 / width
            # |int term| <= e^{-decay n} (1+|z0|)^m m! max(1,(h/2pi)^{m+1})
            K = ((1 + abs(z0)) ** m * factorial(m)
                 * max(mpf(1), (mpf(width) / (2 * mp.pi)) ** (m + 1)))
            C = self.f.tail_constant * abs(scale)
            eps = mpf(2) ** (-wp)
            M = self.f.terms
            bound = geometric_tail_bound(C, Fraction(k, 2) + 1, decay, M) * K
            if bound > eps:
                need = required_terms(C, Fraction(k, 2) + 1, decay, eps / K)
                raise AccuracyUnreachableError(
                    f"ray at height {float(y0):.3g} (width {width}) needs "
                    f"about {need} coefficients, have {M}",
                    required_terms=need)
            zpow = [mpc(1)]
            for _ in range(m):
                zpow.append(zpow[-1] * z0)
            ipow = [mpc(0, 1) ** (l % 4) for l in range(m + 1)]
            fact = [mpf(factorial(l)) for l in range(m + 1)]
            zeta = (mp.e ** (2j * mp.pi / width) if width > 1 else mpc(1))
            qh = mp.e ** (2j * mp.pi * z0 / width)
            qn = mpc(1)
            scl = _frac(scale)
            V = [mpc(0)] * (m + 1)
            for n in range(1, M + 1):
                qn *= qh
                a = self.f.coeffs[n - 1]
                if not a:
                    continue
                b = scl * _frac(a) * qn
                if width > 1 and phase:
                    b *= zeta ** ((n * phase) % width)
                base = mpf(width) / (2 * mp.pi * n)
                # A_l = l! base^{l+1}
                Al = base
                terms = [fact[0] * base]
                for l in range(1, m + 1):
                    Al *= base
                    terms.append(fact[l] * Al)
                for mm in range(m + 1):
                    s = mpc(0)
                    for l in range(mm + 1):
                        s += comb(mm, l) * zpow[mm - l] * ipow[l] * terms[l]
                    V[mm] += mpc(0, 1) * b * s
            result = (V, bound)
        self._moments[key] = result
        return result

    # ---- task assembly: J(end) = int_{i inf}^{end}

    def _tasks(self, end, A: GroupElement, sigma: GroupElement, sign: int,
               out: list):
        kind = end[0]
        if kind == "inf":
            return
        if kind == "cusp":
            for h in _cusp_path_pieces(end[1]):
                B = h.inv() * A
                out.append((sign, B, _orbit_point(IDENTITY, Fraction(1)),
                            sigma * h))
                out.append((-sign, INVERSION.inv() * B,
                            _orbit_point(IDENTITY, Fraction(1)),
                            sigma * h * INVERSION))
            return
        z = _endpoint_value(end, self.wp)
        if z.imag >= _MIN_RAY_HEIGHT:
            out.append((-sign, A, end, sigma))
            return
        g0, _ = _reduce_to_fundamental_domain(z, self.wp)
        moved = _apply_to_endpoint(g0, end)
        sigma_new = sigma * g0.inv()
        self._tasks(moved, g0 * A, sigma_new, sign, out)
        self._tasks(_apply_to_endpoint(g0, INF), g0 * A, sigma_new, -sign, out)

    def _action_columns(self, A: GroupElement):
        key = A.key()
        hit = self._action_cols.get(key)
        if hit is None:
            cols = action_matrix(A, self.k)
            with workprec(self.wp):
                hit = [[_frac(x) for x in col] for col in cols]
            self._action_cols[key] = hit
        return hit

    def _resolve(self, tasks):
        """Functional vector F_a = value on monomial x^a y^{m-a}, plus bound."""
        m = self.k - 2
        with workprec(self.wp):
            F = [mpc(0)] * (m + 1)
            err = mpf(0)
            for sign, A, end, sigma in tasks:
                V, bound = self._ray_moments(end, sigma)
                cols = self._action_columns(A)
                colmax = mpf(0)
                for a in range(m + 1):
                    s = mpc(0)
                    col = cols[a]
                    for i in range(m + 1):
                        ci = col[i]
                        if ci:
                            if (m - i) % 2:
                                s -= ci * V[m - i]
                            else:
                                s += ci * V[m - i]
                    F[a] += sign * s
                    colmax = max(colmax, sum(abs(x) for x in col))
                err += bound * colmax
            return F, err

    def J(self, end, extra: GroupElement = IDENTITY,
          sigma: GroupElement = IDENTITY):
        """int_{i inf}^{end} of (extra * P)(1,-tau) (f|sigma)(tau) dtau."""
        tasks = []
        self._tasks(end, extra, sigma, 1, tasks)
        return self._resolve(tasks)

    # ---- cocycle values

    def cocycle_vector(self, gamma: GroupElement, base):
        """Values of int_{base}^{gamma base} on the monomial basis."""
        base = normalize_base(base) if not isinstance(base, tuple) else base
        key = ("coc", gamma.key(), _endpoint_key(base))
        hit = self._value_cache.get(key)
        if hit is not None:
            return hit
        t1 = []
        self._tasks(_apply_to_endpoint(gamma, base), IDENTITY, IDENTITY, 1, t1)
        F1, e1 = self._resolve(t1)
        t0 = []
        self._tasks(base, IDENTITY, IDENTITY, 1, t0)
        F0, e0 = self._resolve(t0)
        with workprec(self.wp):
            result = ([a - b for a, b in zip(F1, F0)], e1 + e0)
        self._value_cache[key] = result
        return result

    def cocycle_poly(self, gamma: GroupElement, base) -> HomPoly:
        F, _ = self.cocycle_vector(gamma, base)
        return self.realize(F)

    def realize(self, F) -> HomPoly:
        vals = [BigComplex.from_mpc(v, self.precision) for v in F]
        return dual_to_poly(self.k, vals)

    def es_vector(self, gamma: GroupElement, base, parity: str | None):
        """Plain, even or odd cocycle values on the monomial basis.

        parity "+" / "-" adds / subtracts the reflection-conjugated cocycle
        r^omega(gamma)(P) = r(omega gamma omega)(omega.P).
        """
        F, e = self.cocycle_vector(gamma, base)
        if parity is None:
            return F, e
        if parity not in ("+", "-"):
            raise ValueError("parity must be '+', '-' or None")
        Fc, ec = self.cocycle_vector(conjugate_by_reflection(gamma), base)
        m = self.k - 2
        with workprec(self.wp):
            tw = [
                (Fc[a] if (m - a) % 2 == 0 else -Fc[a]) for a in range(m + 1)
            ]
            if parity == "+":
                return [x + y for x, y in zip(F, tw)], e + ec
            return [x - y for x, y in zip(F, tw)], e + ec


# -- public operations --------------------------------------------------------

def period_integral(f: QExpansion, P: HomPoly, z0, z1, precision: int = 128,
                    engine: PeriodEngine | None = None):
    """int_{z0}^{z1} P(1,-tau) f(tau) dtau with a certified error bound.

    Endpoints are 'inf', complex numbers in the upper half-plane, or exact
    rationals (cusps, cuspidal forms only).  Returns (BigComplex, bound).
    """
    if P.k != f.weight:
        raise WeightMismatchError(
            f"polynomial weight {P.k} vs form weight {f.weight}")
    eng = engine or PeriodEngine(f, precision)

    def to_end(z):
        if z in ("inf", "oo", None):
            return INF
        if isinstance(z, (int, Fraction)) and not isinstance(z, bool):
            return ("cusp", Fraction(z))
        if isinstance(z, BigComplex):
            z = z.to_mpc()
        z = mpc(z)
        if z.imag <= 0:
            raise ValueError("interior endpoints must have Im > 0")
        return ("raw", z)

    end0, end1 = to_end(z0), to_end(z1)
    F1, e1 = eng.J(end1)
    F0, e0 = eng.J(end0)
    with workprec(eng.wp):
        pnum = [
            c.to_numeric(eng.precision).to_mpc() if hasattr(c, "to_numeric")
            else mpc(c.to_mpc() if isinstance(c, BigComplex) else c)
            for c in P.coeffs
        ]
        total = mpc(0)
        for a, pa in enumerate(pnum):
            if pa:
                total += pa * (F1[a] - F0[a])
        scale = sum(abs(p) for p in pnum) + mpf(1)
        bound = (e1 + e0) * scale
    return BigComplex.from_mpc(total, eng.precision), bound


def es_cocycle(f: QExpansion, parity: str | None, gamma, base="inf",
               precision: int = 128,
               engine: PeriodEngine | None = None) -> HomPoly:
    """Eichler-Shimura cocycle value as a polynomial (dual realization).

    gamma may be a GroupWord or a GroupElement.  parity None gives the plain
    period cocycle; "+" / "-" give the even / odd combinations
    r(gamma) +- reflect(r(omega gamma omega)).
    """
    eng = engine or PeriodEngine(f, precision)
    g = gamma.matrix() if isinstance(gamma, GroupWord) else gamma
    F, _ = eng.es_vector(g, normalize_base(base), parity)
    return eng.realize(F)


class Cocycle:
    """1-cocycle on a generator set, with a direct evaluator.

    Values are polynomials realizing dual-space vectors.  Extension to words
    uses r(g1 g2) = r(g1) + g1 . r(g2) with the polynomial action.
    """

    def __init__(self, k: int, generators, evaluator, base, precision: int):
        self.k = k
        self.generators = dict(generators)
        self.evaluator = evaluator
        self.base = base
        self.precision = precision
        self._gen_values = {}

    def value_matrix(self, g: GroupElement) -> HomPoly:
        return self.evaluator(g)

    def value_generator(self, name: str) -> HomPoly:
        if name not in self._gen_values:
            self._gen_values[name] = self.evaluator(self.generators[name])
        return self._gen_values[name]

    def value_word(self, word: GroupWord) -> HomPoly:
        """Extension along the cocycle law, using generator values only."""
        total = HomPoly.zero(self.k).numeric(self.precision)
        prefix = IDENTITY
        for name, e in word.letters:
            gmat = self.generators[name]
            gval = self.value_generator(name)
            if e == 1:
                term = gval
                total = total + (act(prefix, term) if prefix != IDENTITY
                                 else term)
                prefix = prefix * gmat
            else:
                ginv = gmat.inv()
                term = act(ginv, gval).scale(-1)
                total = total + (act(prefix, term) if prefix != IDENTITY
                                 else term)
                prefix = prefix * ginv
        return total

    def reflected(self) -> "Cocycle":
        """The conjugated cocycle r^omega(g) = reflect(r(omega g omega))."""
        def ev(g, _self=self):
            return reflect(_self.evaluator(conjugate_by_reflection(g)))
        return Cocycle(self.k, self.generators, ev, self.base, self.precision)

    def combine(self, other: "Cocycle", c0, c1) -> "Cocycle":
        def ev(g, a=self, b=other):
            return a.evaluator(g).scale(c0) + b.evaluator(g).scale(c1)
        return Cocycle(self.k, self.generators, ev, self.base, self.precision)


def make_es_cocycle(f: QExpansion, parity: str | None, base="inf",
                    precision: int = 128, generators=None,
                    engine: PeriodEngine | None = None) -> Cocycle:
    eng = engine or PeriodEngine(f, precision)
    gens = dict(generators) if generators else dict(LEVEL1_GENERATORS)
    nbase = normalize_base(base)

    def ev(g: GroupElement):
        F, _ = eng.es_vector(g, nbase, parity)
        return eng.realize(F)

    return Cocycle(f.weight, gens, ev, nbase, precision)


def parity_decompose(r: Cocycle):
    """Split into omega-even and omega-odd parts; their sum returns r."""
    rw = r.reflected()
    half = Fraction(1, 2)
    return r.combine(rw, half, half), r.combine(rw, half, -half)


# -- coboundaries -------------------------------------------------------------

def _poly_vector(W: HomPoly, precision: int):
    out = []
    for c in W.coeffs:
        if isinstance(c, BigComplex):
            out.append(c.to_mpc())
        else:
            out.append(c.to_numeric(precision).to_mpc())
    return out


def solve_coboundary(k: int, gens, targets, precision: int):
    """Least-squares m with  act(g) m - m  matching the target values.

    gens: list of GroupElement; targets: list of HomPoly (coefficient
    vectors of the target cochain).  Returns (m as HomPoly, residual).
    """
    wp = precision + _GUARD
    m = k - 1
    rows = []
    rhs = []
    with workprec(wp):
        for g, W in zip(gens, targets):
            cols = action_matrix(g, k)
            tv = _poly_vector(W, precision)
            for i in range(m):
                row = [(_frac(cols[a][i]) - (1 if a == i else 0))
                       for a in range(m)]
                rows.append(row)
                rhs.append(tv[i])
        sol, res = lstsq_complex(rows, rhs, wp)
    mpoly = HomPoly(k, [BigComplex.from_mpc(v, precision) for v in sol])
    return mpoly, res


def coboundary_of(k: int, g: GroupElement, mpoly: HomPoly) -> HomPoly:
    return act(g, mpoly) - mpoly


def cochain_sup_norm(W: HomPoly) -> float:
    return float(max(abs(_as_abs(c)) for c in W.coeffs))


def _as_abs(c):
    if isinstance(c, BigComplex):
        return abs(c)
    return abs(c.to_numeric(64).to_mpc())


# -- checks -------------------------------------------------------------------

def cocycle_law_check(f: QExpansion, base="inf", precision: int = 128,
                      trials: int = 20, max_len: int = 6, seed: int = 0,
                      generators=None, tolerance: float = 1e-20,
                      engine: PeriodEngine | None = None):
    """r(w1 w2) against r(w1) + w1 r(w2), both by direct integration."""
    eng = engine or PeriodEngine(f, precision)
    gens = dict(generators) if generators else dict(LEVEL1_GENERATORS)
    rng = random.Random(seed)
    nbase = normalize_base(base)
    worst = mpf(0)
    for _ in range(trials):
        w1 = GroupWord.random(gens, rng, max_len)
        w2 = GroupWord.random(gens, rng, max_len)
        g1, g2 = w1.matrix(), w2.matrix()
        lhs = eng.cocycle_poly(g1 * g2, nbase)
        r1 = eng.cocycle_poly(g1, nbase)
        r2 = eng.cocycle_poly(g2, nbase)
        rhs = r1 + act(g1, r2)
        diff = lhs - rhs
        scale = max(1.0, cochain_sup_norm(rhs))
        worst = max(worst, cochain_sup_norm(diff) / scale)
    return {
        "check": "cocycle_law",
        "k": f.weight,
        "level": f.level,
        "base": str(base),
        "trials": trials,
        "seed": seed,
        "max_residual": float(worst),
        "tolerance": tolerance,
        "pass": float(worst) <= tolerance,
    }


def manin_check(f: QExpansion, precision: int = 128,
                tolerance: float = 1e-20,
                engine: PeriodEngine | None = None):
    """Level-1 relations of the period polynomial rho = r(S), base infinity.

    rho + S rho = 0  and  rho + U rho + U^2 rho = 0 for the order-6 element
    U = T S acting through the polynomial realization.
    """
    if f.level != 1:
        raise ValueError("Manin relations are checked at level 1")
    eng = engine or PeriodEngine(f, precision)
    rho = eng.cocycle_poly(INVERSION, INF)
    U = TRANSLATION * INVERSION
    two = rho + act(INVERSION, rho)
    three = rho + act(U, rho) + act(U * U, rho)
    scale = max(1.0, cochain_sup_norm(rho))
    r2 = cochain_sup_norm(two) / scale
    r3 = cochain_sup_norm(three) / scale
    worst = max(r2, r3)
    return {
        "check": "manin_relations",
        "k": f.weight,
        "residual_order2": float(r2),
        "residual_order3": float(r3),
        "max_residual": float(worst),
        "tolerance": tolerance,
        "pass": float(worst) <= tolerance,
    }


def base_point_check(f: QExpansion, precision: int = 128,
                     tolerance: float = 1e-18, generators=None,
                     bases=(1, 2),
                     engine: PeriodEngine | None = None):
    """Cocycles at two interior bases differ by an explicit coboundary."""
    eng = engine or PeriodEngine(f, precision)
    gens = dict(generators) if generators else dict(LEVEL1_GENERATORS)
    names = sorted(gens)
    b1 = normalize_base(bases[0])
    b2 = normalize_base(bases[1])
    targets = []
    for n in names:
        g = gens[n]
        targets.append(eng.cocycle_poly(g, b1) - eng.cocycle_poly(g, b2))
    mpoly, _ = solve_coboundary(f.weight, [gens[n] for n in names],
                                targets, precision)
    worst = 0.0
    scale = max([1.0] + [cochain_sup_norm(t) for t in targets])
    for n, target in zip(names, targets):
        diff = target - coboundary_of(f.weight, gens[n], mpoly)
        worst = max(worst, cochain_sup_norm(diff) / scale)
    return {
        "check": "base_point_coboundary",
        "k": f.weight,
        "bases": [str(b) for b in bases],
        "max_residual": worst,
        "tolerance": tolerance,
        "pass": worst <= tolerance,
    }


# -- Hecke action on cocycles -------------------------------------------------

def hecke_coset_reps(p: int):
    """Right-coset representatives of the level-p double coset."""
    reps = [GroupElement(1, j, 0, p) for j in range(p)]
    reps.append(GroupElement(p, 0, 0, 1))
    return reps


def _coset_permutation(gamma: GroupElement, reps, level: int):
    """gamma_i = alpha_i gamma alpha_{sigma(i)}^{-1} in Gamma_0(level)."""
    out = []
    for alpha in reps:
        found = None
        for beta in reps:
            cand = alpha * gamma * beta.inv()
            if cand.is_integral() and cand.det == 1 \
                    and int(cand.c) % level == 0:
                found = cand
                break
        if found is None:
            raise ValueError("coset permutation failed; is gamma in the group?")
        out.append(found)
    return out


def hecke_operator_vector(eng: PeriodEngine, gamma: GroupElement, p: int,
                          base):
    """(T_p r)(gamma) on the monomial basis:
    sum_i r(gamma_i)(alpha_i . P)."""
    reps = hecke_coset_reps(p)
    gammas = _coset_permutation(gamma, reps, eng.level)
    m = eng.k - 2
    with workprec(eng.wp):
        out = [mpc(0)] * (m + 1)
        for alpha, gi in zip(reps, gammas):
            Fi, _ = eng.cocycle_vector(gi, base)
            cols = eng._action_columns(alpha)
            for a in range(m + 1):
                s = mpc(0)
                for i in range(m + 1):
                    if cols[a][i]:
                        s += cols[a][i] * Fi[i]
                out[a] += s
        return out


def hecke_equivariance(f: QExpansion, p: int, base="i",
                       precision: int = 128, generators=None,
                       tolerance: float = 1e-15,
                       engine: PeriodEngine | None = None):
    """Fit (T_p r)(gamma) = a r(gamma) + (gamma m - m) over the generators.

    The fitted scalar a must match the expansion eigenvalue a_p.
    """
    eng = engine or PeriodEngine(f, precision)
    gens = dict(generators) if generators else dict(LEVEL1_GENERATORS)
    names = sorted(gens)
    nbase = normalize_base(base)
    k = f.weight
    m = k - 1
    rows = []
    rhs = []
    data = []
    with workprec(eng.wp):
        for n in names:
            g = gens[n]
            lhs = hecke_operator_vector(eng, g, p, nbase)
            F, _ = eng.cocycle_vector(g, nbase)
            cols = action_matrix(g, k)
            data.append((g, lhs, F, cols))
            for i in range(m):
                row = [F[i]]
                row.extend(_frac(cols[a][i]) - (1 if a == i else 0)
                           for a in range(m))
                rows.append(row)
                rhs.append(lhs[i])
        sol, _ = lstsq_complex(rows, rhs, eng.wp)
        fitted = sol[0]
        worst = mpf(0)
        scale = max([mpf(1)] + [abs(x) for _, lhs, _, _ in data for x in lhs])
        for g, lhs, F, cols in data:
            for i in range(m):
                model = fitted * F[i]
                for a in range(m):
                    model += (_frac(cols[a][i]) - (1 if a == i else 0)) \
                        * sol[1 + a]
                worst = max(worst, abs(lhs[i] - model) / scale)
        ap = hecke_eigenvalue(f, p)
        rel = abs(fitted - _frac(ap)) / max(mpf(1), abs(_frac(ap)))
    return {
        "check": "hecke_equivariance",
        "k": f.weight,
        "level": f.level,
        "p": p,
        "eigenvalue_expansion": str(ap),
        "eigenvalue_fitted_re": float(fitted.real),
        "eigenvalue_fitted_im": float(fitted.imag),
        "eigenvalue_rel_error": float(rel),
        "fit_residual": float(worst),
        "tolerance": tolerance,
        "pass": float(worst) <= tolerance and float(rel) <= 1e-12,
    }


# -- parity isotypy -----------------------------------------------------------

def parity_isotypy_check(f: QExpansion, parity: str, base="inf",
                         precision: int = 128, tolerance: float = 1e-15,
                         generators=None,
                         engine: PeriodEngine | None = None):
    """The opposite-parity part of an even/odd cocycle is a coboundary."""
    eng = engine or PeriodEngine(f, precision)
    gens = dict(generators) if generators else dict(LEVEL1_GENERATORS)
    names = sorted(gens)
    coc = make_es_cocycle(f, parity, base, precision, gens, engine=eng)
    plus, minus = parity_decompose(coc)
    off = minus if parity == "+" else plus
    on = plus if parity == "+" else minus
    targets = [off.value_generator(n) for n in names]
    mpoly, _ = solve_coboundary(f.weight, [gens[n] for n in names], targets,
                                precision)
    scale = max([1.0] + [cochain_sup_norm(on.value_generator(n))
                         for n in names])
    worst = 0.0
    recomb = 0.0
    for n, target in zip(names, targets):
        diff = target - coboundary_of(f.weight, gens[n], mpoly)
        worst = max(worst, cochain_sup_norm(diff) / scale)
        total = plus.value_generator(n) + minus.value_generator(n)
        recomb = max(recomb, cochain_sup_norm(
            total - coc.value_generator(n)) / scale)
    return {
        "check": "parity_isotypy",
        "k": f.weight,
        "parity": parity,
        "off_part_residual": worst,
        "recombination_residual": recomb,
        "max_residual": max(worst, recomb),
        "tolerance": tolerance,
        "pass": max(worst, recomb) <= tolerance,
    }


# -- cohomology dimension (level 1) ------------------------------------------

def cohomology_dim(k: int) -> int:
    """dim H^1(SL2(Z), V(k) dual) by exact rational linear algebra.

    Cocycles are determined by (r(S), r(U)) with U = TS subject to
    (1+S) r(S) = 0 and (1+U+U^2) r(U) = 0; coboundaries are
    ((1-S) m, (1-U) m).
    """
    if k < 2 or k % 2:
        raise ValueError("k must be an even integer >= 2")
    n = k - 1
    S = INVERSION
    U = TRANSLATION * INVERSION

    def mat(g):
        cols = action_matrix(g, k)
        return [[cols[a][i] for a in range(n)] for i in range(n)]

    def matmul(A, B):
        return [[sum(A[i][l] * B[l][j] for l in range(n)) for j in range(n)]
                for i in range(n)]

    def add(*Ms):
        return [[sum(M[i][j] for M in Ms) for j in range(n)] for i in range(n)]

    def eye(c=1):
        return [[Fraction(c if i == j else 0) for j in range(n)]
                for i in range(n)]

    MS = mat(S)
    MU = mat(U)
    MU2 = matmul(MU, MU)
    dim_zs = rational_kernel_dim(add(eye(), MS))
    dim_zu = rational_kernel_dim(add(eye(), MU, MU2))
    minus = eye(-1)
    stacked = [row[:] for row in add(eye(), matmul(minus, MS))]
    stacked += add(eye(), matmul(minus, MU))
    dim_b = rational_rank(stacked)
    return dim_zs + dim_zu - dim_b


def cohomology_dim_report(kmax: int = 24):
    table = []
    ok = True
    for k in range(2, kmax + 1, 2):
        got = cohomology_dim(k)
        want = dim_modular_forms_level1(k) + dim_cusp_forms_level1(k)
        table.append({"k": k, "dim_H1": got, "dim_Mk_plus_Sk": want,
                      "match": got == want})
        ok = ok and got == want
    return {
        "check": "eichler_shimura_dimension",
        "kmax": kmax,
        "table": table,
        "pass": ok,
    }


# -- rationality detection ----------------------------------------------------

def detect_rational(x, max_denominator: int = 10 ** 6, eps: float = 1e-25):
    """Nearest fraction with bounded denominator, or None if not close."""
    xf = mpf(x)
    cand = Fraction(float(xf)).limit_denominator(max_denominator)
    if abs(xf - _frac(cand)) <= mpf(eps) * max(1, abs(xf)):
        return cand
    return None


def period_rationality_report(precisions=(128, 192),
                              max_denominator: int = 10 ** 6,
                              lvalue_tolerance: float = 1e-20,
                              terms: int = 400):
    """Rationality of normalized period-polynomial coefficient ratios.

    For the weight-12 level-1 form: the even and odd parts of r(S) at base
    infinity are proportional to critical completed L-values; their
    normalized ratios must be rational with bounded denominator at both
    precisions, and must match the L-value ratios computed independently.
    """
    from .qexp import builtin_form, l_value

    results = {}
    ratios_by_prec = {}
    for prec in precisions:
        f = builtin_form("delta", terms)
        eng = PeriodEngine(f, prec)
        F, _ = eng.cocycle_vector(INVERSION, INF)
        with workprec(prec + _GUARD):
            # F_a = -(int_0^{i inf}) of (-tau)^{10-a}: proportional to
            # Lambda(11-a) up to a power of i; same-parity ratios are real.
            even = [a for a in range(0, 11, 2)]
            odd = [a for a in range(1, 11, 2)]
            ratios = {}
            for group, name in ((even, "even"), (odd, "odd")):
                ref = group[-1]
                for a in group[:-1]:
                    val = F[a] / F[ref]
                    ratios[f"{name}:F{a}/F{ref}"] = val
            ratios_by_prec[prec] = ratios
    checks = []
    ok = True
    base_prec = precisions[0]
    for key, val in ratios_by_prec[base_prec].items():
        if abs(val.imag) > mpf(10) ** (-20) * (1 + abs(val)):
            ok = False
            checks.append({"ratio": key, "rational": None,
                           "note": "ratio not real"})
            continue
        cand = detect_rational(val.real, max_denominator)
        stable = True
        for prec in precisions[1:]:
            other = ratios_by_prec[prec][key]
            cand2 = detect_rational(other.real, max_denominator)
            stable = stable and (cand2 == cand)
        good = cand is not None and stable
        ok = ok and good
        checks.append({
            "ratio": key,
            "rational": None if cand is None else f"{cand}",
            "stable_across_precisions": stable,
        })
    # cross-check against completed L-values: F_a ratios within one parity
    # class equal +-Lambda(11-a)/Lambda(11-ref)
    f = builtin_form("delta", terms)
    prec = precisions[0]
    eng = PeriodEngine(f, prec)
    F, _ = eng.cocycle_vector(INVERSION, INF)
    lmax = mpf(0)
    with workprec(prec + _GUARD):
        for group in ([0, 2, 4, 6, 8, 10], [1, 3, 5, 7, 9]):
            ref = group[-1]
            Lref = l_value(f, 11 - ref, prec).to_mpc()
            for a in group[:-1]:
                La = l_value(f, 11 - a, prec).to_mpc()
                lhs = F[a] / F[ref]
                rhs = La / Lref
                lmax = max(lmax, min(abs(lhs - rhs), abs(lhs + rhs))
                           / max(mpf(1), abs(rhs)))
    ok = ok and float(lmax) <= lvalue_tolerance
    return {
        "check": "period_rationality",
        "k": 12,
        "ratios": checks,
        "lvalue_cross_residual": float(lmax),
        "lvalue_tolerance": lvalue_tolerance,
        "pass": ok,
    }
