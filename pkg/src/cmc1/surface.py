"""Weierstrass and dual Weierstrass data.

Holds the Hopf differential, the dual 1-form, Schwarzian derivatives, end
orders, the nondegeneracy audit and the dual total absolute curvature.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebra import (
    INF,
    Polynomial,
    RationalMap,
    SpherePoint,
    branch_points,
    derivative,
    is_inf,
    local_multiplicity,
    point_from_json,
    point_key,
    point_to_json,
    same_point,
)
from .expr import ExprFunction, schwarzian_value
from .ramify import MATCH_TOL, PuncturedSphere

H3 = "H3"
S31 = "S31"


class QuadratureError(ArithmeticError):
    def __init__(self, message: str, trace: list):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class MeroDifferential:
    """coeff(z) dz**weight.

    ``coeff`` is a :class:`RationalMap` (all order computations need this) or
    any callable ``coeff(z, state=None)`` for multivalued data.
    """

    coeff: object
    weight: int

    def __post_init__(self):
        if self.weight not in (1, 2):
            raise ValueError("weight must be 1 (dz) or 2 (dz^2)")

    @property
    def rational(self) -> bool:
        return isinstance(self.coeff, RationalMap)

    def _rat(self) -> RationalMap:
        if not self.rational:
            raise TypeError("order computations need a rational coefficient")
        return self.coeff

    def is_zero(self) -> bool:
        return self.rational and self.coeff.is_zero()

    def __call__(self, z, state=None) -> complex:
        if self.rational:
            return complex(self.coeff(z))
        return complex(self.coeff(z, state))

    def order_at(self, p: SpherePoint) -> int:
        """Order at p; at infinity dz = -w^-2 dw shifts the order by -2*weight."""
        R = self._rat()
        if R.is_zero():
            raise ValueError("order of the zero differential is undefined")
        if is_inf(p):
            return R.order_at(INF) - 2 * self.weight
        return R.order_at(p)

    def divisor(self) -> list[tuple[SpherePoint, int]]:
        R = self._rat()
        out = [(p, o) for p, o in R.zeros_and_poles() if not is_inf(p)]
        o_inf = self.order_at(INF)
        if o_inf:
            out.append((INF, o_inf))
        return out

    def divisor_degree(self) -> int:
        return sum(o for _, o in self.divisor())

    def to_json(self) -> dict:
        return {"weight": self.weight, **self._rat().to_json()}


@dataclass(frozen=True)
class EndReport:
    end: SpherePoint
    mu_sharp: int
    d_j: int
    pole_order_omega_sharp: int
    complete: bool
    algebraic: bool
    regular: bool = True

    def to_json(self) -> dict:
        return {
            "end": point_to_json(self.end),
            "mu_sharp": self.mu_sharp,
            "d_j": self.d_j,
            "pole_order_omega_sharp": self.pole_order_omega_sharp,
            "complete": self.complete,
            "algebraic": self.algebraic,
            "regular": self.regular,
        }


@dataclass
class NondegeneracyReport:
    checked: list = field(default_factory=list)
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"passed": self.passed, "checked": self.checked, "violations": self.violations}


@dataclass
class SchwarzReport:
    max_residual: float
    tol: float
    samples: int
    points: list

    @property
    def passed(self) -> bool:
        return bool(self.max_residual < self.tol)

    def to_json(self) -> dict:
        return {
            "max_residual": self.max_residual,
            "tol": self.tol,
            "samples": self.samples,
            "passed": self.passed,
        }


@dataclass
class SurfaceData:
    """A Weierstrass package: G, Q on a punctured sphere, optionally g.

    ``base`` is the reference point where the holomorphic null lift equals
    the identity.  When ``g`` is absent the frame is developed from two
    solutions of u'' + r u = 0 (see :mod:`cmc1.develop`).
    """

    name: str
    G: RationalMap
    Q: MeroDifferential
    M: PuncturedSphere
    ambient: str = H3
    g: ExprFunction | None = None
    base: complex = 1 + 0j
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.ambient not in (H3, S31):
            raise ValueError(f"ambient must be {H3} or {S31}")
        if self.Q.weight != 2:
            raise ValueError("Hopf differential must have weight 2")

    @property
    def genus(self) -> int:
        return self.M.genus

    def omega(self, z: complex, state=None) -> complex:
        """Weierstrass 1-form coefficient Q/dg."""
        if self.g is None:
            raise ValueError(f"{self.name}: no secondary Gauss map given")
        return self.Q(z) / self.g.derivative_value(z, state)

    def singular_points(self) -> list[complex]:
        """Finite points where data, S(G) or the frame equation can blow up."""
        pts: list = list(self.M.finite_punctures())
        Qc = self.Q.coeff
        if isinstance(Qc, RationalMap) and Qc.den.degree > 0:
            pts += [r for r, _ in _roots(Qc.den)]
        if self.G.den.degree > 0:
            pts += [r for r, _ in _roots(self.G.den)]
        pts += [c for c, _ in branch_points(self.G) if not is_inf(c)]
        out: list[complex] = []
        for p in pts:
            c = complex(p)
            if all(abs(c - q) > 1e-12 for q in out):
                out.append(c)
        return out

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "ambient": self.ambient,
            "genus": self.genus,
            "punctures": [point_to_json(p) for p in self.M.punctures],
            "G": self.G.to_json(),
            "Q": self.Q._rat().to_json(),
            "g": self.g.prefix() if self.g is not None else None,
            "base": [self.base.real, self.base.imag],
            "params": {k: str(v) for k, v in self.params.items()},
        }

    @classmethod
    def from_json(cls, data: dict) -> "SurfaceData":
        if data.get("genus", 0) != 0:
            raise ValueError("surface files describe genus-0 data only")
        g = data.get("g")
        base = data.get("base", [1.0, 0.0])
        return cls(
            name=data["name"],
            G=RationalMap.from_json(data["G"]),
            Q=MeroDifferential(RationalMap.from_json(data["Q"]), 2),
            M=PuncturedSphere(tuple(point_from_json(p) for p in data.get("punctures", []))),
            ambient=data.get("ambient", H3),
            g=ExprFunction(g) if g else None,
            base=complex(*base) if isinstance(base, (list, tuple)) else complex(base),
            params=dict(data.get("params", {})),
        )


def _roots(p: Polynomial):
    from .algebra import roots

    return roots(p)


# --------------------------------------------------------------------------
# operations
# --------------------------------------------------------------------------


class _HopfCoeff:
    def __init__(self, g: ExprFunction, omega: Callable):
        self.g, self.omega = g, omega

    def __call__(self, z, state=None):
        w = self.omega(z, state) if not isinstance(self.omega, RationalMap) else complex(self.omega(z))
        return w * self.g.derivative_value(z, state)


def hopf(g, omega: MeroDifferential) -> MeroDifferential:
    """Q = omega dg."""
    if omega.weight != 1:
        raise ValueError("omega must be a 1-form")
    if isinstance(g, RationalMap) and omega.rational:
        return MeroDifferential(omega.coeff * derivative(g), 2)
    if isinstance(g, RationalMap):
        from .expr import Rational

        g = ExprFunction(Rational(g))
    if not isinstance(g, ExprFunction):
        raise TypeError("g must be a RationalMap or an ExprFunction")
    return MeroDifferential(_HopfCoeff(g, omega.coeff), 2)


def dual_omega(G: RationalMap, Q: MeroDifferential) -> MeroDifferential:
    """The dual Weierstrass 1-form -Q/dG."""
    if Q.weight != 2:
        raise ValueError("Q must be a quadratic differential")
    dG = derivative(G)
    if dG.is_zero():
        raise ZeroDivisionError("dG vanishes identically")
    return MeroDifferential(-(Q._rat() / dG), 1)


class _SchwarzCoeff:
    def __init__(self, f: ExprFunction):
        self.f = f

    def __call__(self, z, state=None):
        return schwarzian_value(self.f, z, state)


def schwarzian(h) -> MeroDifferential:
    """S(h) dz^2, exact for rational h, by third-order jets otherwise."""
    if isinstance(h, RationalMap):
        if h.is_constant():
            raise ZeroDivisionError("h' vanishes identically")
        # with W = N'D - ND' (so h' = W/D^2):
        # S(h) = (2 W W'' D - 3 W'^2 D - 4 D'' W^2 + 4 W W' D') / (2 W^2 D)
        N, D = h.num, h.den
        W = N.derivative() * D - N * D.derivative()
        W1, W2 = W.derivative(), W.derivative().derivative()
        D1, D2 = D.derivative(), D.derivative().derivative()
        num = (W * W2 * 2 - W1 * W1 * 3) * D + (W1 * D1 - W * D2) * W * 4
        return MeroDifferential(RationalMap(num, W * W * D * 2), 2)
    if isinstance(h, ExprFunction):
        return MeroDifferential(_SchwarzCoeff(h), 2)
    raise TypeError("h must be a RationalMap or an ExprFunction")


def _sample_annulus(rng: np.random.Generator, r_in: float, r_out: float) -> complex:
    r = math.sqrt(rng.uniform(r_in * r_in, r_out * r_out))
    t = rng.uniform(0, 2 * math.pi)
    return complex(r * math.cos(t), r * math.sin(t))


def verify_schwarz(
    data: SurfaceData,
    samples: int = 50,
    tol: float = 1e-8,
    seed: int = 0,
    annulus: tuple[float, float] = (0.25, 2.0),
    clearance: float = 0.05,
) -> SchwarzReport:
    """Max of |S(g) - S(G) - 2Q| over random points off the singular set."""
    if data.g is None:
        raise ValueError("verify_schwarz needs both g and G")
    rng = np.random.default_rng(seed)
    SG = schwarzian(data.G)
    sing = data.singular_points()
    pts, worst = [], 0.0
    attempts = 0
    while len(pts) < samples:
        attempts += 1
        if attempts > 100 * samples:
            raise RuntimeError("could not find sample points away from singularities")
        z = _sample_annulus(rng, *annulus)
        if any(abs(z - s) < clearance for s in sing):
            continue
        try:
            if abs(data.g.derivative_value(z)) < 1e-10:
                continue
            val = schwarzian_value(data.g, z) - SG(z) - 2 * data.Q(z)
        except (ZeroDivisionError, OverflowError, ValueError):
            continue
        if not np.isfinite(val):
            continue
        pts.append(z)
        worst = max(worst, abs(val))
    return SchwarzReport(float(worst), tol, samples, pts)


def end_report(G: RationalMap, Q: MeroDifferential, p: SpherePoint) -> EndReport:
    """Branching order of G, order of Q and pole order of the dual 1-form at an end."""
    if Q.is_zero():
        raise ValueError("Hopf differential vanishes identically")
    mu = local_multiplicity(G, p) - 1
    dj = Q.order_at(p)
    pole = mu - dj
    return EndReport(p, mu, dj, pole, complete=pole >= 1, algebraic=pole >= 2)


def nondegeneracy_check(G: RationalMap, Q: MeroDifferential, M: PuncturedSphere) -> NondegeneracyReport:
    """Audit, at every special point of M, that ord Q equals the branching
    order of G and that the dual 1-form vanishes to twice the pole order of G."""
    rep = NondegeneracyReport()
    if Q.is_zero():
        rep.violations.append({"point": None, "reason": "Q vanishes identically"})
        return rep
    omega_sharp = dual_omega(G, Q)
    candidates: list = [p for p, _ in Q.divisor()]
    candidates += [p for p, _ in branch_points(G)]
    candidates += [p for p, o in G.zeros_and_poles() if o < 0]
    pts: list = []
    for p in candidates:
        if not any(same_point(p, q, MATCH_TOL) for q in pts):
            pts.append(p)
    for q in sorted(pts, key=point_key):
        if M.is_puncture(q):
            continue
        bo = local_multiplicity(G, q) - 1
        oq = Q.order_at(q)
        pole = max(0, -G.order_at(q))
        ow = omega_sharp.order_at(q)
        entry = {"point": point_to_json(q), "ord_Q": oq, "branching": bo, "ord_omega_sharp": ow, "pole_G": pole}
        rep.checked.append(entry)
        if oq != bo:
            rep.violations.append({**entry, "reason": "ord Q != branching order of G"})
        elif ow != 2 * pole:
            rep.violations.append({**entry, "reason": "ord omega_sharp != 2 * pole order of G"})
    return rep


# --------------------------------------------------------------------------
# dual total absolute curvature
# --------------------------------------------------------------------------

_GL_X, _GL_W = np.polynomial.legendre.leggauss(7)


def _fs_density(R: RationalMap) -> Callable[[np.ndarray], np.ndarray]:
    """4|R'|^2/(1+|R|^2)^2 written through num/den so poles are harmless."""
    N, D = R.num.to_float(), R.den.to_float()
    dN, dD = N.derivative(), D.derivative()

    def f(z):
        n, d = N.eval_array(z), D.eval_array(z)
        w = dN.eval_array(z) * d - n * dD.eval_array(z)
        s = np.abs(n) ** 2 + np.abs(d) ** 2
        return 4 * np.abs(w) ** 2 / (s * s)

    return f


def _rect_integral(f, r0, r1, t0, t1) -> float:
    xr = 0.5 * (r1 - r0) * _GL_X + 0.5 * (r1 + r0)
    xt = 0.5 * (t1 - t0) * _GL_X + 0.5 * (t1 + t0)
    R, T = np.meshgrid(xr, xt, indexing="ij")
    vals = f(R * np.exp(1j * T)) * R
    w = np.outer(_GL_W, _GL_W) * 0.25 * (r1 - r0) * (t1 - t0)
    return float(np.sum(vals * w))


def _disk_integral(f, rel_tol: float, max_rects: int, trace: list) -> float:
    """Adaptive tensor Gauss-Legendre cubature of f over the closed unit disk."""

    def split(rect):
        r0, r1, t0, t1 = rect
        rm, tm = 0.5 * (r0 + r1), 0.5 * (t0 + t1)
        return [(r0, rm, t0, tm), (rm, r1, t0, tm), (r0, rm, tm, t1), (rm, r1, tm, t1)]

    def assess(rect):
        coarse = _rect_integral(f, *rect)
        fine = math.fsum(_rect_integral(f, *c) for c in split(rect))
        return fine, abs(fine - coarse)

    heap: list = []
    n_r, n_t = 4, 8
    for i in range(n_r):
        for j in range(n_t):
            rect = (i / n_r, (i + 1) / n_r, 2 * math.pi * j / n_t, 2 * math.pi * (j + 1) / n_t)
            val, err = assess(rect)
            heapq.heappush(heap, (-err, rect, val))
    while True:
        total = math.fsum(v for _, _, v in heap)
        err = math.fsum(-e for e, _, _ in heap)
        trace.append({"rects": len(heap), "value": total, "error": err})
        if err <= rel_tol * max(abs(total), 1e-300):
            return total
        if len(heap) >= max_rects:
            raise QuadratureError(
                f"cubature did not reach relative tolerance {rel_tol:g} with {len(heap)} cells", trace
            )
        _, rect, _ = heapq.heappop(heap)
        for c in split(rect):
            val, e = assess(c)
            heapq.heappush(heap, (-e, c, val))


def dual_total_curvature(G: RationalMap, rel_tol: float = 1e-7, max_rects: int = 20000) -> float:
    """Integral of 4|dG|^2/(1+|G|^2)^2 over the sphere (|z|<=1 plus |1/z|<=1).

    Analytically this is 4*pi*deg G.  Returned as the nonnegative integral.
    """
    if G.is_constant():
        raise ValueError("G must be nonconstant")
    trace: list = []
    inner = _disk_integral(_fs_density(G), rel_tol, max_rects, trace)
    outer = _disk_integral(_fs_density(G.infinity_chart()), rel_tol, max_rects, trace)
    return math.fsum([inner, outer])


__all__ = [
    "EndReport",
    "H3",
    "MeroDifferential",
    "NondegeneracyReport",
    "QuadratureError",
    "S31",
    "SchwarzReport",
    "SurfaceData",
    "dual_omega",
    "dual_total_curvature",
    "end_report",
    "hopf",
    "nondegeneracy_check",
    "schwarzian",
    "verify_schwarz",
]
