"""Regular singular points of u'' + r(z) u = 0, where r dz^2 = S(G)/2 + Q.

Indicial roots come from the double-pole coefficient of r; the log-term
coefficient is the obstruction met by the Frobenius recurrence for the
smaller exponent at index lambda1 - lambda2.  With exact input every step is
exact, so "the log term vanishes" is decided without tolerances.

The point at infinity goes through the change of variable z = 1/w, under
which r dz^2 becomes r(1/w) w^-4 dw^2 (Moebius maps have zero Schwarzian, so
r dz^2 transforms as a quadratic differential).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable

from .algebra import (
    INF,
    Polynomial,
    RationalMap,
    SpherePoint,
    is_inf,
    point_key,
    point_to_json,
    roots,
    same_point,
)
from .gaussian import GaussianRational, is_exact
from .surface import MeroDifferential, SurfaceData, end_report, nondegeneracy_check, schwarzian

POSITIVE_INTEGER = "PositiveInteger"
REAL_NON_INTEGER = "RealNonInteger"
OTHER = "Other"

FLOAT_INT_TOL = 1e-9


class IrregularSingularPoint(ValueError):
    pass


@dataclass(frozen=True)
class E0Coefficient:
    r: RationalMap
    singular_points: tuple
    flags: tuple = ()

    def __call__(self, z):
        return self.r(z)

    def to_json(self) -> dict:
        return {
            "r": self.r.to_json(),
            "singular_points": [[point_to_json(p), o] for p, o in self.singular_points],
            "flags": list(self.flags),
        }


@dataclass(frozen=True)
class FrobeniusReport:
    point: SpherePoint
    c_minus2: object
    lambda1: object
    lambda2: object
    diff_class: str
    log_term: object = None

    @property
    def log_free(self) -> bool:
        return self.diff_class == POSITIVE_INTEGER and self.log_term == 0

    def to_json(self) -> dict:
        return {
            "point": point_to_json(self.point),
            "c_minus2": _scalar_json(self.c_minus2),
            "lambda1": _scalar_json(self.lambda1),
            "lambda2": _scalar_json(self.lambda2),
            "diff_class": self.diff_class,
            "log_term": None if self.log_term is None else _scalar_json(self.log_term),
        }


@dataclass
class Classification:
    case: str
    reasons: list = field(default_factory=list)
    ends: list = field(default_factory=list)
    reports: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "reasons": list(self.reasons),
            "ends": [e.to_json() for e in self.ends],
            "frobenius": [r.to_json() for r in self.reports],
        }


def _scalar_json(v):
    if is_exact(v):
        return GaussianRational.coerce(v).to_strings()
    v = complex(v)
    return [v.real, v.imag]


# --------------------------------------------------------------------------
# the coefficient r
# --------------------------------------------------------------------------


def _local(r: RationalMap, p: SpherePoint) -> RationalMap:
    """r in a coordinate t centred at p (t = z - p, or t = 1/z at infinity)."""
    if is_inf(p):
        # r(1/w)/w^4, cancelling powers of w by hand instead of a gcd
        m = r.degree
        num, den = r.num.reversed(m), r.den.reversed(m)
        lead_zeros = m - r.num.degree if not r.num.is_zero() else 0
        cut = min(lead_zeros, 4)
        zero = GaussianRational(0) if r.exact else 0j
        num = Polynomial(num.coeffs[cut:], exact=r.exact)
        den = Polynomial([zero] * (4 - cut) + list(den.coeffs), exact=r.exact)
        return RationalMap(num, den, _reduced=True)
    # a translation keeps num and den coprime, so no new gcd is needed
    return RationalMap(r.num.taylor_shift(p), r.den.taylor_shift(p), _reduced=True)


@lru_cache(maxsize=64)
def _half_schwarzian(G: RationalMap) -> RationalMap:
    half = GaussianRational(Fraction(1, 2)) if G.exact else 0.5
    return schwarzian(G).coeff * half


@lru_cache(maxsize=256)
def _den_roots(den: Polynomial) -> list:
    return roots(den) if den.degree > 0 else []


def e0_coefficient(G: RationalMap, Q: MeroDifferential, ends: Iterable[SpherePoint] = ()) -> E0Coefficient:
    """r = S(G)/2 + Q with its poles (including infinity) and their orders."""
    if G.is_constant():
        raise ValueError("G must be nonconstant")
    if Q.weight != 2 or not Q.rational:
        raise ValueError("Q must be a rational quadratic differential")
    S2 = _half_schwarzian(G)
    r = S2 + Q.coeff
    sing: list = []
    if r.den.degree > 0:
        # poles of r sit among the poles of its two summands
        cands: list = []
        for p, _ in _den_roots(S2.den) + _den_roots(Q.coeff.den):
            if not any(same_point(p, c) for c in cands):
                cands.append(p)
        for p in cands:
            m = r.den.order_at(p)
            if m > 0:
                sing.append((p, m))
    if not r.is_zero():
        o_inf = _local(r, INF).order_at(0)
        if o_inf < 0:
            sing.append((INF, -o_inf))
    flags = []
    for p, m in sing:
        if m > 2:
            flags.append(f"pole of order {m} at {p}: irregular singular point")
    for p in ends:
        dj = Q.order_at(p)
        if dj < -2:
            flags.append(f"ord Q = {dj} < -2 at end {p}")
    sing.sort(key=lambda t: point_key(t[0]))
    return E0Coefficient(r, tuple(sing), tuple(flags))


def _as_r(r) -> RationalMap:
    return r.r if isinstance(r, E0Coefficient) else r


def _laurent_q(r: RationalMap, p: SpherePoint, n: int) -> list:
    """Taylor coefficients q_0..q_n of t^2 r(p + t) at t = 0."""
    loc = _local(r, p)
    if loc.is_zero():
        zero = GaussianRational(0) if r.exact else 0j
        return [zero] * (n + 1)
    zero = GaussianRational(0) if loc.exact else 0j
    v = loc.den.order_at(zero)
    u = loc.num.order_at(zero) if v == 0 else 0
    if u - v < -2:
        raise IrregularSingularPoint(f"pole of order {v - u} at {p}: irregular singular point")
    # t^2 num / den with the t^v factor of den cancelled
    a = [zero] * (2 - v) + list(loc.num.coeffs)
    b = list(loc.den.coeffs[v:])
    a += [zero] * (n + 1 - len(a))
    b += [zero] * (n + 1 - len(b))
    q = []
    for k in range(n + 1):
        s = a[k] - _csum((b[j] * q[k - j] for j in range(1, k + 1)), zero)
        q.append(s / b[0])
    return q


def _exact_sqrt(D):
    """Square root of a Gaussian rational, exact when it is a perfect square."""
    s = cmath.sqrt(complex(D))
    if is_exact(D):
        D = GaussianRational.coerce(D)
        for den in (10**4, 10**8):
            cand = GaussianRational.approximate(s, den)
            if cand * cand == D:
                return cand if (cand.re > 0 or (cand.re == 0 and cand.im >= 0)) else -cand
    return s


def _csum(terms, zero):
    """Exact sum for Gaussian rationals, compensated (fsum) sum for floats."""
    terms = list(terms)
    if not terms:
        return zero
    if all(is_exact(t) for t in terms):
        return sum(terms, zero)
    cs = [complex(t) for t in terms]
    return complex(math.fsum(c.real for c in cs), math.fsum(c.imag for c in cs))


def _classify_diff(diff) -> tuple[str, int | None]:
    if is_exact(diff):
        d = GaussianRational.coerce(diff)
        if d.im == 0 and d.re.denominator == 1 and d.re > 0:
            return POSITIVE_INTEGER, int(d.re)
        if d.im == 0 and d.re.denominator != 1:
            return REAL_NON_INTEGER, None
        return OTHER, None
    d = complex(diff)
    if abs(d.imag) > FLOAT_INT_TOL * max(1.0, abs(d)):
        return OTHER, None
    n = round(d.real)
    if abs(d.real - n) <= FLOAT_INT_TOL * max(1.0, abs(d.real)):
        return (POSITIVE_INTEGER, n) if n > 0 else (OTHER, None)
    return REAL_NON_INTEGER, None


def _ordered_roots(q0):
    one = GaussianRational(1) if is_exact(q0) else 1.0
    half = GaussianRational(Fraction(1, 2)) if is_exact(q0) else 0.5
    s = _exact_sqrt(one - 4 * q0)
    return (one + s) * half, (one - s) * half, s


def indicial(r, p: SpherePoint) -> tuple:
    """Roots of lambda (lambda - 1) + c_{-2} = 0 at p, larger real part first."""
    q0 = _laurent_q(_as_r(r), p, 0)[0]
    l1, l2, _ = _ordered_roots(q0)
    return l1, l2


def log_term(r, p: SpherePoint):
    """Obstruction to a log-free second solution at a resonant point.

    With u = sum a_k t^(k + lambda2), a_0 = 1 and t^2 r = sum q_j t^j, the
    recurrence (s(s-1) + q_0)|_{s = lambda2 + k} a_k = -sum_{j>=1} q_j a_{k-j}
    degenerates at k = N = lambda1 - lambda2; the returned value is
    sum_{j=1..N} q_j a_{N-j}, which vanishes exactly when no log term is needed.
    """
    r = _as_r(r)
    q0 = _laurent_q(r, p, 0)[0]
    _, l2, diff = _ordered_roots(q0)
    cls, N = _classify_diff(diff)
    if cls != POSITIVE_INTEGER:
        raise ValueError(f"no integer resonance at {p} (lambda1 - lambda2 = {diff})")
    q = _laurent_q(r, p, N)
    exact = all(is_exact(x) for x in q) and is_exact(l2)
    zero = GaussianRational(0) if exact else 0j
    if not exact:
        q = [complex(x) for x in q]
        l2 = complex(l2)
    a = [GaussianRational(1) if exact else 1 + 0j]
    for k in range(1, N):
        s = l2 + k
        F = s * (s - 1) + q[0]
        rhs = -_csum((q[j] * a[k - j] for j in range(1, k + 1)), zero)
        a.append(rhs / F)
    return _csum((q[j] * a[N - j] for j in range(1, N + 1)), zero)


def frobenius_report(r, p: SpherePoint) -> FrobeniusReport:
    r = _as_r(r)
    q0 = _laurent_q(r, p, 0)[0]
    l1, l2, diff = _ordered_roots(q0)
    cls, _ = _classify_diff(diff)
    lt = log_term(r, p) if cls == POSITIVE_INTEGER else None
    return FrobeniusReport(p, q0, l1, l2, cls, lt)


# --------------------------------------------------------------------------
# reducibility hypotheses
# --------------------------------------------------------------------------


def _ordered_ends(data: SurfaceData) -> list:
    finite = [p for p in data.M.punctures if not is_inf(p)]
    inf = [p for p in data.M.punctures if is_inf(p)]
    return finite + inf


def classify_reducibility(data: SurfaceData) -> Classification:
    """Check the hypotheses for the 3-parameter (i) / 1-parameter (ii) families."""
    out = Classification("Inconclusive")
    if data.genus != 0:
        out.reasons.append("genus must be 0")
        return out
    ends = _ordered_ends(data)
    k = len(ends)
    if k < 2:
        out.reasons.append("need at least two ends")
        return out
    G, Q = data.G, data.Q
    nd = nondegeneracy_check(G, Q, data.M)
    if not nd.passed:
        out.reasons.append("hypothesis (a) fails: ord Q differs from the branching order of G on M")
    for p in ends:
        er = end_report(G, Q, p)
        out.ends.append(er)
        if er.pole_order_omega_sharp < 2:
            out.reasons.append(f"hypothesis (b) fails at end {p}: mu_sharp - d_j = {er.pole_order_omega_sharp}")
    r = e0_coefficient(G, Q).r
    finite_ends = ends[: k - 1]
    for p in finite_ends:
        dj = Q.order_at(p)
        if dj < -2:
            out.reasons.append(f"ord Q = {dj} < -2 at end {p}")
            continue
        rep = frobenius_report(r, p)
        out.reports.append(rep)
        if rep.lambda1 == rep.lambda2:
            out.reasons.append(f"indicial roots coincide at {p}")
    if out.reasons:
        return out
    reps = out.reports
    if all(rep.log_free for rep in reps):
        out.case = "i"
        return out
    # case (ii): one end may carry a real non-integer difference, placed last
    for idx, rep in enumerate(reps):
        others = reps[:idx] + reps[idx + 1 :]
        if rep.diff_class == REAL_NON_INTEGER and all(o.log_free for o in others):
            out.case = "ii"
            if idx != len(reps) - 1:
                out.reasons.append(f"finite end {point_to_json(rep.point)} taken as p_(k-1)")
            return out
    for rep in reps:
        if rep.diff_class == POSITIVE_INTEGER and rep.log_term != 0:
            out.reasons.append(f"log-term coefficient nonzero at {point_to_json(rep.point)}")
        elif rep.diff_class != POSITIVE_INTEGER:
            out.reasons.append(f"lambda1 - lambda2 not a positive integer at {point_to_json(rep.point)}")
    return out


# --------------------------------------------------------------------------
# theta scans
# --------------------------------------------------------------------------


@dataclass
class ScanRow:
    theta: object
    log_terms: list
    vanishing: bool
    excluded: str | None = None

    def to_json(self) -> dict:
        return {
            "theta": str(self.theta),
            "log_terms": [[point_to_json(p), None if c is None else _scalar_json(c)] for p, c in self.log_terms],
            "vanishing": self.vanishing,
            "excluded": self.excluded,
        }


def theta_scan(make: Callable[[object], SurfaceData], thetas: Iterable) -> list[ScanRow]:
    """Log-term coefficients at every resonant finite end for each theta."""
    rows = []
    for th in thetas:
        try:
            data = make(th)
        except ValueError as exc:
            rows.append(ScanRow(th, [], False, str(exc)))
            continue
        if data.Q.is_zero():
            rows.append(ScanRow(th, [], False, "Hopf differential vanishes identically"))
            continue
        r = e0_coefficient(data.G, data.Q).r
        terms = []
        for p in _ordered_ends(data):
            if is_inf(p):
                continue
            rep = frobenius_report(r, p)
            terms.append((p, rep.log_term))
        vanish = bool(terms) and all(c is not None and c == 0 for _, c in terms)
        rows.append(ScanRow(th, terms, vanish))
    return rows


def parse_scan(spec: str) -> list[Fraction]:
    """'a:b:step' as exact decimals, endpoints included."""
    try:
        a, b, step = (Fraction(x) for x in spec.split(":"))
    except ValueError:
        raise ValueError(f"theta scan must look like a:b:step, got {spec!r}") from None
    if step <= 0 or b < a:
        raise ValueError("theta scan needs step > 0 and a <= b")
    n = int((b - a) / step)
    return [a + i * step for i in range(n + 1)]


__all__ = [
    "Classification",
    "E0Coefficient",
    "FrobeniusReport",
    "IrregularSingularPoint",
    "OTHER",
    "POSITIVE_INTEGER",
    "REAL_NON_INTEGER",
    "classify_reducibility",
    "e0_coefficient",
    "frobenius_report",
    "indicial",
    "log_term",
    "parse_scan",
    "theta_scan",
]
