"""Built-in surfaces with their expected value-distribution data.

Each entry builds a :class:`SurfaceData` from a few named parameters
(exact rationals or Gaussian rationals) and knows the (D_G, nu_G, bound)
triple it must reproduce.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Callable

from .algebra import INF, RationalMap, is_inf
from .expr import Const, ExprFunction, Var, power, sqrt, tan
from .expr import log as elog
from .gaussian import GaussianRational
from .ramify import PuncturedSphere
from .surface import H3, S31, MeroDifferential, SurfaceData


class UnknownSurface(KeyError):
    pass


def parse_scalar(text: str) -> GaussianRational:
    """'3', '-1/2', '0.25', 'i', '2i', '1-3/4i' as an exact Gaussian rational."""
    s = text.strip().replace(" ", "").replace("j", "i")
    try:
        if not s.endswith("i"):
            return GaussianRational(Fraction(s))
        body = s[:-1]
        # split before the last sign that is not an exponent sign
        cut = 0
        for k in range(1, len(body)):
            if body[k] in "+-" and body[k - 1] not in "eE":
                cut = k
        re_s, im_s = body[:cut], body[cut:]
        if im_s in ("", "+", "-"):
            im_s += "1"
        return GaussianRational(Fraction(re_s) if re_s else Fraction(0), Fraction(im_s))
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"cannot read {text!r} as a number") from None


def _real(x) -> Fraction:
    x = GaussianRational.coerce(x)
    if x.im != 0:
        raise ValueError(f"{x} must be real")
    return x.re


def _integer(x) -> int:
    r = _real(x)
    if r.denominator != 1:
        raise ValueError(f"{x} must be an integer")
    return int(r)


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    summary: str
    defaults: dict
    build_fn: Callable = field(repr=False)
    expected_fn: Callable = field(repr=False)
    face: bool = False
    note: str = ""

    def params(self, **overrides) -> dict:
        unknown = set(overrides) - set(self.defaults)
        if unknown:
            raise ValueError(f"{self.name}: unknown parameter(s) {sorted(unknown)}; expected {sorted(self.defaults)}")
        p = dict(self.defaults)
        p.update(overrides)
        return p

    def build(self, **overrides) -> SurfaceData:
        p = self.params(**overrides)
        data = self.build_fn(**p)
        return replace(data, params={k: _fmt(v) for k, v in p.items()})

    def expected(self, **overrides) -> tuple:
        return self.expected_fn(**self.params(**overrides))

    def to_json(self) -> dict:
        d, nu, b = self.expected()
        return {
            "name": self.name,
            "summary": self.summary,
            "ambient": S31 if self.face else H3,
            "defaults": {k: _fmt(v) for k, v in self.defaults.items()},
            "expected": {"D_G": d, "nu": str(nu), "bound": str(b)},
            "note": self.note,
        }


def _fmt(v) -> str:
    if isinstance(v, tuple):
        return ",".join(_fmt(x) for x in v)
    return str(v)


def _z() -> RationalMap:
    return RationalMap.z(exact=True)


def _gq(x) -> GaussianRational:
    return GaussianRational.coerce(x)


def _expr_const(c) -> Const:
    return Const(_gq(c))


# --------------------------------------------------------------------------
# builders
# --------------------------------------------------------------------------


def _voss(name: str, a: tuple) -> SurfaceData:
    z = _z()
    pts = tuple(_gq(x) for x in a)
    if len(set(pts)) != len(pts):
        raise ValueError("Voss poles must be distinct")
    prod = RationalMap.const(GaussianRational(1))
    for p in pts:
        prod = prod * (z - p)
    Q = MeroDifferential(-1 / prod, 2)
    base = _voss_base(pts)
    return SurfaceData(name, z, Q, PuncturedSphere(pts + (INF,)), H3, None, base)


def _voss_base(pts) -> complex:
    cands = [0.5j, -0.5j, 0.5 + 0.5j, -0.5 - 0.5j, 2j, 0.25 + 0.75j]
    return max(cands, key=lambda c: min(abs(c - complex(p)) for p in pts))


def _voss_k3(a=(GaussianRational(-1), GaussianRational(1))):
    if len(a) != 2:
        raise ValueError("voss-k3 needs two poles")
    return _voss("voss-k3", a)


def _voss_k4(a=(GaussianRational(-1), GaussianRational(1), GaussianRational(0, 1))):
    if len(a) != 3:
        raise ValueError("voss-k4 needs three poles")
    return _voss("voss-k4", a)


def _power(n=GaussianRational(2), theta=GaussianRational(1)):
    n = _integer(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    if _gq(theta) == 0:
        raise ValueError("theta must be nonzero")
    z = _z()
    Q = MeroDifferential(_gq(theta) * z ** (n - 1), 2)
    return SurfaceData("power-n", z**n, Q, PuncturedSphere((INF,)), H3, None, 1 + 0j)


def _enneper_dual(theta=GaussianRational(1)):
    th = _gq(theta)
    if th == 0:
        raise ValueError("theta must be nonzero")
    g = ExprFunction(tan(sqrt(_expr_const(th)) * Var()))
    Q = MeroDifferential(RationalMap.const(th), 2)
    return SurfaceData("enneper-cousin-dual", _z(), Q, PuncturedSphere((INF,)), H3, g, 0j)


def _catenoid(n=GaussianRational(1), l=GaussianRational(Fraction(1, 2))):
    n, l = _integer(n), _real(l)
    if n < 1 or l <= 0 or l == n:
        raise ValueError("catenoid cousin needs n >= 1, l > 0, l != n")
    z = _z()
    c = Fraction(n * n) - l * l
    g = ExprFunction(_expr_const(c / (4 * l)) * power(Var(), _expr_const(l)))
    Q = MeroDifferential(GaussianRational(c / 4) / z**2, 2)
    return SurfaceData("catenoid-cousin", z**n, Q, PuncturedSphere((GaussianRational(0), INF)), H3, g, 1 + 0j)


@lru_cache(maxsize=1)
def _prop27_G() -> RationalMap:
    z = _z()
    return ((z - 1) / z) ** 3


def _prop27(theta=GaussianRational(-2)):
    th = _gq(theta)
    if th == 0:
        raise ValueError("theta must be nonzero")
    z = _z()
    Q = MeroDifferential(th / (z * (z - 1)), 2)
    M = PuncturedSphere((GaussianRational(0), GaussianRational(1), INF))
    return SurfaceData("prop27-surface", _prop27_G(), Q, M, H3, None, 0.5 + 0.5j)


def _elliptic(mu=GaussianRational(Fraction(1, 2))):
    mu = _real(mu)
    if mu <= 0 or mu == 1:
        raise ValueError("elliptic catenoid needs mu > 0, mu != 1")
    z = _z()
    g = ExprFunction(power(Var(), _expr_const(mu)))
    Q = MeroDifferential(GaussianRational((1 - mu * mu) / 4) / z**2, 2)
    return SurfaceData("elliptic-catenoid", z, Q, PuncturedSphere((GaussianRational(0), INF)), S31, g, 1 + 0j)


def _parabolic():
    z = _z()
    L = elog(Var())
    g = ExprFunction((L + 1) / (L - 1))
    Q = MeroDifferential(GaussianRational(Fraction(1, 4)) / z**2, 2)
    return SurfaceData("parabolic-catenoid", z, Q, PuncturedSphere((GaussianRational(0), INF)), S31, g, 2 + 0j)


F = Fraction

_ENTRIES = [
    CatalogEntry(
        "voss-k3",
        "Voss cousin: G = z, Q = -dz^2/prod(z - a_j), two finite ends",
        {"a": (GaussianRational(-1), GaussianRational(1))},
        _voss_k3,
        lambda a: (3, F(3), F(3)),
        note="frame via the (E.0) pair; lives on the universal cover",
    ),
    CatalogEntry(
        "voss-k4",
        "Voss cousin: G = z, Q = -dz^2/prod(z - a_j), three finite ends",
        {"a": (GaussianRational(-1), GaussianRational(1), GaussianRational(0, 1))},
        _voss_k4,
        lambda a: (4, F(4), F(4)),
        note="frame via the (E.0) pair; lives on the universal cover",
    ),
    CatalogEntry(
        "power-n",
        "G = z^n, Q = theta z^(n-1) dz^2 on the plane",
        {"n": GaussianRational(2), "theta": GaussianRational(1)},
        _power,
        lambda n, theta: (1, 2 - F(1, _integer(n)), 2 - F(1, _integer(n))),
    ),
    CatalogEntry(
        "enneper-cousin-dual",
        "g = tan(sqrt(theta) z), Q = theta dz^2, G = z",
        {"theta": GaussianRational(1)},
        _enneper_dual,
        lambda theta: (1, F(1), F(1)),
        note="frame normalized at z0 = 0",
    ),
    CatalogEntry(
        "catenoid-cousin",
        "g = (n^2 - l^2)/(4l) z^l, Q = (n^2 - l^2)/(4z^2) dz^2, G = z^n",
        {"n": GaussianRational(1), "l": GaussianRational(F(1, 2))},
        _catenoid,
        lambda n, l: (2, F(2), F(2)),
    ),
    CatalogEntry(
        "prop27-surface",
        "G = ((z-1)/z)^3, Q = theta dz^2/(z(z-1)); log-free at theta = -2, -6",
        {"theta": GaussianRational(-2)},
        _prop27,
        lambda theta: (2, F(2), F(7, 3)),
        note="frame via the (E.0) pair, normalized at z0 = 1/2 + i/2",
    ),
    CatalogEntry(
        "elliptic-catenoid",
        "face in de Sitter space: g = z^mu, Q = (1 - mu^2)/(4z^2) dz^2, G = z",
        {"mu": GaussianRational(F(1, 2))},
        _elliptic,
        lambda mu: (2, F(2), F(2)),
        face=True,
    ),
    CatalogEntry(
        "parabolic-catenoid",
        "face in de Sitter space: g = (log z + 1)/(log z - 1), Q = dz^2/(4z^2), G = z",
        {},
        _parabolic,
        lambda: (2, F(2), F(2)),
        face=True,
        note="frame normalized at z0 = 2",
    ),
]

_BY_NAME = {e.name: e for e in _ENTRIES}


def catalog_list() -> list[CatalogEntry]:
    return list(_ENTRIES)


def lookup(name: str) -> CatalogEntry:
    try:
        return _BY_NAME[name]
    except KeyError:
        raise UnknownSurface(f"unknown surface {name!r}; known: {', '.join(_BY_NAME)}") from None


def parse_params(pairs) -> dict:
    """['n=3', 'a=-1,1,i'] -> {'n': 3, 'a': (-1, 1, i)}."""
    out = {}
    for item in pairs or ():
        if "=" not in item:
            raise ValueError(f"parameter {item!r} must look like key=value")
        k, v = item.split("=", 1)
        vals = tuple(parse_scalar(x) for x in v.split(","))
        out[k.strip()] = vals if "," in v or k.strip() == "a" else vals[0]
    return out


def build(name: str, **params) -> SurfaceData:
    return lookup(name).build(**params)


def to_float(data: SurfaceData) -> SurfaceData:
    """Same surface with floating coefficients and punctures."""
    Qc = data.Q.coeff
    pts = tuple(p if is_inf(p) else complex(p) for p in data.M.punctures)
    return replace(
        data,
        G=data.G.to_float(),
        Q=MeroDifferential(Qc.to_float() if isinstance(Qc, RationalMap) else Qc, data.Q.weight),
        M=PuncturedSphere(pts, data.M.genus),
    )


__all__ = [
    "CatalogEntry",
    "UnknownSurface",
    "build",
    "catalog_list",
    "lookup",
    "parse_params",
    "parse_scalar",
    "to_float",
]
