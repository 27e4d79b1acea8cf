"""Value distribution of a hyperbolic Gauss map on a punctured sphere.

Everything discrete here (multiplicities, counts, the totally ramified value
number and the bounds it is compared against) is an exact integer or
``Fraction``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import (
    INF,
    RationalMap,
    SpherePoint,
    branch_points,
    eval_map,
    is_inf,
    local_multiplicity,
    point_key,
    point_to_json,
    preimages,
    same_point,
)

MATCH_TOL = 1e-8


@dataclass(frozen=True)
class PuncturedSphere:
    """The Riemann sphere minus finitely many ends."""

    punctures: tuple = ()
    genus: int = 0

    def __post_init__(self):
        pts = tuple(self.punctures)
        object.__setattr__(self, "punctures", pts)
        if self.genus != 0:
            raise ValueError("function-level analysis supports genus 0 only; use DivisorData")
        for i, a in enumerate(pts):
            for b in pts[i + 1 :]:
                if same_point(a, b, MATCH_TOL):
                    raise ValueError(f"duplicate puncture {a}")

    @property
    def k(self) -> int:
        return len(self.punctures)

    def is_puncture(self, p: SpherePoint) -> bool:
        return any(same_point(p, q, MATCH_TOL) for q in self.punctures)

    def finite_punctures(self) -> list:
        return [p for p in self.punctures if not is_inf(p)]

    def to_json(self) -> dict:
        return {"genus": self.genus, "punctures": [point_to_json(p) for p in self.punctures]}


@dataclass(frozen=True)
class DivisorData:
    """Integer bookkeeping for a compact surface of any genus.

    ``ends`` holds (mu_sharp, d_j) per end: the branching order of G there
    and the order of the Hopf differential.
    """

    genus: int
    ends: tuple
    degree: int

    def __post_init__(self):
        object.__setattr__(self, "ends", tuple(tuple(e) for e in self.ends))
        if self.genus < 0 or self.degree < 1:
            raise ValueError("genus must be >= 0 and degree >= 1")
        for mu, _ in self.ends:
            if mu < 0:
                raise ValueError("branching orders are nonnegative")


@dataclass(frozen=True)
class RamificationReport:
    exceptional: tuple
    ramified: tuple
    nu: Fraction
    bound: Fraction
    ratio: Fraction
    valid: bool
    degree: int
    k: int
    genus: int = 0

    @property
    def D_G(self) -> int:
        return len(self.exceptional)

    def to_json(self) -> dict:
        return {
            "D_G": self.D_G,
            "exceptional": [point_to_json(p) for p in self.exceptional],
            "ramified": [[point_to_json(b), n] for b, n in self.ramified],
            "nu": str(self.nu),
            "bound": str(self.bound),
            "ratio": str(self.ratio),
            "valid": self.valid,
            "degree": self.degree,
            "k": self.k,
            "genus": self.genus,
        }


@dataclass(frozen=True)
class BoundResult:
    ratio: Fraction
    bound: Fraction
    valid: bool

    def __iter__(self):
        return iter((self.ratio, self.bound, self.valid))


@dataclass
class DivisorReport:
    consistent: bool
    complete: bool
    algebraic_type: bool
    degree_bound: bool
    algebraic_degree_bound: bool | None
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "consistent": self.consistent,
            "complete": self.complete,
            "algebraic_type": self.algebraic_type,
            "degree_bound": self.degree_bound,
            "algebraic_degree_bound": self.algebraic_degree_bound,
            "violations": list(self.violations),
        }


@dataclass(frozen=True)
class FaceReport:
    holds: bool
    equality: bool
    ratio: Fraction
    bound: Fraction
    ratio_strict: bool
    max_exceptional: int = 3

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "equality": self.equality,
            "ratio": str(self.ratio),
            "bound": str(self.bound),
            "ratio_strict": self.ratio_strict,
            "max_exceptional": self.max_exceptional,
        }


def _require_nonconstant(G: RationalMap):
    if G.is_constant():
        raise ValueError("hyperbolic Gauss map must be nonconstant")


def _puncture_fibers(G: RationalMap, M: PuncturedSphere) -> list[tuple[SpherePoint, SpherePoint, int]]:
    """(puncture, G(puncture), multiplicity) for every end."""
    return [(p, eval_map(G, p), local_multiplicity(G, p)) for p in M.punctures]


def _dedupe(values: list) -> list:
    out: list = []
    for v in values:
        if not any(same_point(v, u, MATCH_TOL) for u in out):
            out.append(v)
    return out


def _fiber_in_M(G: RationalMap, b: SpherePoint, M: PuncturedSphere) -> list[tuple[SpherePoint, int]]:
    """Preimages of b lying in M (punctures removed), with multiplicities."""
    fiber = preimages(G, b)
    return [(z, m) for z, m in fiber if not M.is_puncture(z)]


def exceptional_values(G: RationalMap, M: PuncturedSphere) -> list[SpherePoint]:
    """Values of the sphere that G omits on M.

    G is surjective on the sphere, so an omitted value has all of its
    preimages among the punctures; the candidates are therefore the values
    G(p_j), and w is omitted exactly when the multiplicities of G at the
    punctures over w add up to deg G.
    """
    _require_nonconstant(G)
    d = G.degree
    fibers = _puncture_fibers(G, M)
    out = []
    for w in _dedupe([w for _, w, _ in fibers]):
        total = sum(m for _, v, m in fibers if same_point(v, w, MATCH_TOL))
        if total == d:
            out.append(w)
    return sorted(out, key=point_key)


def candidate_values(G: RationalMap, M: PuncturedSphere) -> list[SpherePoint]:
    """Critical values together with the values at the punctures.

    Off this set G is an unbranched d-sheeted covering over points not hit
    by a puncture, so no other value can be totally ramified or omitted.
    """
    crit = [eval_map(G, c) for c, _ in branch_points(G)]
    at_ends = [eval_map(G, p) for p in M.punctures]
    return _dedupe(crit + at_ends)


def totally_ramified_values(G: RationalMap, M: PuncturedSphere) -> list[tuple[SpherePoint, int]]:
    """Non-exceptional values whose every preimage in M branches, with min multiplicity."""
    _require_nonconstant(G)
    omitted = exceptional_values(G, M)
    out = []
    for b in candidate_values(G, M):
        if any(same_point(b, a, MATCH_TOL) for a in omitted):
            continue
        fiber = _fiber_in_M(G, b, M)
        if fiber and all(m >= 2 for _, m in fiber):
            out.append((b, min(m for _, m in fiber)))
    return sorted(out, key=lambda t: point_key(t[0]))


def osserman_bound(genus: int, k: int, d: int, algebraic: bool = False) -> BoundResult:
    """The ratio (genus - 1 + k/2)/d and the bound 2 + 2*ratio on nu_G."""
    if d < 1:
        raise ValueError("degree must be positive")
    if genus < 0 or k < 0:
        raise ValueError("genus and number of ends must be nonnegative")
    ratio = (Fraction(genus - 1) + Fraction(k, 2)) / d
    bound = 2 + 2 * ratio
    valid = ratio < 1 if algebraic else ratio <= 1
    return BoundResult(ratio, bound, valid)


def nu_value(G: RationalMap, M: PuncturedSphere, algebraic: bool = False) -> RamificationReport:
    """Exceptional values, totally ramified values and nu_G with its bound."""
    exc = exceptional_values(G, M)
    ram = totally_ramified_values(G, M)
    nu = Fraction(len(exc)) + sum((1 - Fraction(1, n) for _, n in ram), Fraction(0))
    b = osserman_bound(M.genus, M.k, G.degree, algebraic)
    return RamificationReport(
        exceptional=tuple(exc),
        ramified=tuple(ram),
        nu=nu,
        bound=b.bound,
        ratio=b.ratio,
        valid=b.valid,
        degree=G.degree,
        k=M.k,
        genus=M.genus,
    )


def divisor_consistency(D: DivisorData, algebraic: bool = False) -> DivisorReport:
    """Audit an integer end package against the Riemann-Roch count for the dual 1-form."""
    violations = []
    pole_orders = [mu - dj for mu, dj in D.ends]
    k = len(D.ends)
    lhs = 2 * D.degree - sum(pole_orders)
    consistent = lhs == 2 * D.genus - 2
    if not consistent:
        violations.append(
            f"2d - sum(mu_sharp - d_j) = {lhs}, expected 2*genus - 2 = {2 * D.genus - 2}"
        )
    complete = all(p >= 1 for p in pole_orders)
    algebraic_type = all(p >= 2 for p in pole_orders)
    for j, p in enumerate(pole_orders):
        if p < 1:
            violations.append(f"end {j}: mu_sharp - d_j = {p} < 1 (incomplete)")
        elif algebraic and p < 2:
            violations.append(f"end {j}: mu_sharp - d_j = {p} < 2 (not algebraic)")
    degree_bound = Fraction(D.degree) >= Fraction(D.genus - 1) + Fraction(k, 2)
    if not degree_bound:
        violations.append("d < genus - 1 + k/2")
    alg_bound = None
    if algebraic:
        alg_bound = D.degree >= D.genus - 1 + k
        if not alg_bound:
            violations.append("d < genus - 1 + k")
    return DivisorReport(consistent, complete, algebraic_type, degree_bound, alg_bound, violations)


def max_exceptional_bound(genus: int, has_nonembedded_end: bool = False) -> int:
    """Largest number of omitted values for a non-flat algebraic surface."""
    if genus == 0:
        return 2
    if genus == 1 and has_nonembedded_end:
        return 2
    return 3


def face_inequality(genus: int, k: int, d: int) -> FaceReport:
    """2d >= 2*genus - 2 + 2k for a complete face with regular ends."""
    if d < 1:
        raise ValueError("degree must be positive (all ends regular)")
    lhs, rhs = 2 * d, 2 * genus - 2 + 2 * k
    ratio = (Fraction(genus - 1) + Fraction(k, 2)) / d
    return FaceReport(
        holds=lhs >= rhs,
        equality=lhs == rhs,
        ratio=ratio,
        bound=2 + 2 * ratio,
        ratio_strict=ratio < 1,
    )


__all__ = [
    "BoundResult",
    "DivisorData",
    "DivisorReport",
    "FaceReport",
    "PuncturedSphere",
    "RamificationReport",
    "candidate_values",
    "divisor_consistency",
    "exceptional_values",
    "face_inequality",
    "max_exceptional_bound",
    "nu_value",
    "osserman_bound",
    "totally_ramified_values",
    "INF",
]
