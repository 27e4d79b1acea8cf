"""Polynomials and rational maps on the Riemann sphere.

Two arithmetic modes share one interface.  A polynomial is *exact* when every
coefficient is a :class:`~cmc1.gaussian.GaussianRational` and *floating* when
every coefficient is a Python ``complex``.  Mixing the two promotes to floating.

The point at infinity is the singleton :data:`INF`; everything at infinity is
computed in the chart ``w = 1/z``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from .gaussian import GaussianRational, is_exact

__all__ = [
    "INF",
    "Infinity",
    "Polynomial",
    "RationalMap",
    "RootFindingError",
    "SpherePoint",
    "branch_points",
    "derivative",
    "eval_map",
    "is_inf",
    "local_multiplicity",
    "mobius",
    "preimages",
    "reduce",
    "roots",
    "same_point",
]

CLUSTER_RADIUS = 1e-7
_BORDERLINE_RADIUS = 1e-2
_ZERO_REL = 1e-12


class Infinity:
    """The point at infinity of the Riemann sphere."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INF"

    def __str__(self) -> str:
        return "inf"

    def __reduce__(self):
        return (Infinity, ())


INF = Infinity()
Scalar = Union[complex, GaussianRational]
SpherePoint = Union[complex, GaussianRational, Infinity]


class RootFindingError(ArithmeticError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (backward residual {residual:.3e})")
        self.residual = residual


def is_inf(p) -> bool:
    return p is INF


def same_point(a: SpherePoint, b: SpherePoint, tol: float = 1e-9) -> bool:
    """Equality on the sphere; exact when both points are exact."""
    if is_inf(a) or is_inf(b):
        return is_inf(a) and is_inf(b)
    if is_exact(a) and is_exact(b):
        return GaussianRational.coerce(a) == GaussianRational.coerce(b)
    a, b = complex(a), complex(b)
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def _to_scalar(c, exact: bool) -> Scalar:
    if exact:
        return GaussianRational.coerce(c)
    return complex(c)


def _is_zero(c) -> bool:
    return c == 0


# --------------------------------------------------------------------------
# Polynomial
# --------------------------------------------------------------------------


class Polynomial:
    """Univariate complex polynomial, coefficients in ascending degree."""

    __slots__ = ("coeffs", "exact")

    def __init__(self, coeffs: Iterable = (), exact: bool | None = None):
        coeffs = list(coeffs)
        if exact is None:
            exact = all(is_exact(c) for c in coeffs)
        cs = [_to_scalar(c, exact) for c in coeffs]
        while cs and _is_zero(cs[-1]):
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "exact", exact)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    @classmethod
    def z(cls, exact: bool = True) -> "Polynomial":
        return cls([0, 1], exact=exact)

    @classmethod
    def const(cls, c, exact: bool | None = None) -> "Polynomial":
        return cls([c], exact=exact)

    @classmethod
    def from_roots(cls, rts: Iterable, exact: bool | None = None) -> "Polynomial":
        p = cls([1], exact=True if exact is None else exact)
        for r in rts:
            p = p * cls([-r, 1], exact=exact)
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> Scalar:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def scale(self) -> float:
        return max((abs(complex(c)) for c in self.coeffs), default=0.0)

    # conversion ------------------------------------------------------------
    def to_float(self) -> "Polynomial":
        if not self.exact:
            return self
        return Polynomial([complex(c) for c in self.coeffs], exact=False)

    def to_exact(self) -> "Polynomial":
        if self.exact:
            return self
        return Polynomial([GaussianRational.coerce(c) for c in self.coeffs], exact=True)

    def as_array(self) -> np.ndarray:
        return np.array([complex(c) for c in self.coeffs], dtype=complex)

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        return Polynomial([other], exact=is_exact(other))

    # evaluation ------------------------------------------------------------
    def __call__(self, x):
        if self.exact and is_exact(x):
            x = GaussianRational.coerce(x)
            acc = GaussianRational(0)
        else:
            x = complex(x)
            acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * x + (c if isinstance(acc, GaussianRational) else complex(c))
        return acc

    def eval_array(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        acc = np.zeros_like(z)
        for c in reversed(self.coeffs):
            acc = acc * z + complex(c)
        return acc

    # arithmetic ------------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        exact = self.exact and other.exact
        n = max(len(self.coeffs), len(other.coeffs))
        zero = GaussianRational(0) if exact else 0j
        a = list(self.coeffs) + [zero] * (n - len(self.coeffs))
        b = list(other.coeffs) + [zero] * (n - len(other.coeffs))
        if not exact:
            a, b = [complex(c) for c in a], [complex(c) for c in b]
        return Polynomial([x + y for x, y in zip(a, b)], exact=exact)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial([-c for c in self.coeffs], exact=self.exact)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        exact = self.exact and other.exact
        if self.is_zero() or other.is_zero():
            return Polynomial([], exact=exact)
        a = self.coeffs if exact else [complex(c) for c in self.coeffs]
        b = other.coeffs if exact else [complex(c) for c in other.coeffs]
        zero = GaussianRational(0) if exact else 0j
        out = [zero] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if _is_zero(x):
                continue
            for j, y in enumerate(b):
                out[i + j] = out[i + j] + x * y
        return Polynomial(out, exact=exact)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be nonnegative integers")
        result = Polynomial([1], exact=self.exact)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            other = self._coerce(other)
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def divmod(self, other: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        exact = self.exact and other.exact
        rem = list(self.coeffs) if exact else [complex(c) for c in self.coeffs]
        div = list(other.coeffs) if exact else [complex(c) for c in other.coeffs]
        dn = len(div) - 1
        if len(rem) - 1 < dn:
            return Polynomial([], exact=exact), Polynomial(rem, exact=exact)
        zero = GaussianRational(0) if exact else 0j
        quot = [zero] * (len(rem) - dn)
        lead = div[-1]
        for k in range(len(rem) - 1 - dn, -1, -1):
            q = rem[k + dn] / lead
            quot[k] = q
            if _is_zero(q):
                continue
            for j in range(dn + 1):
                rem[k + j] = rem[k + j] - q * div[j]
        rem = rem[:dn]
        return Polynomial(quot, exact=exact), Polynomial(rem, exact=exact)

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def derivative(self) -> "Polynomial":
        return Polynomial([k * c for k, c in enumerate(self.coeffs)][1:], exact=self.exact)

    def monic(self) -> "Polynomial":
        if self.is_zero():
            return self
        lead = self.lead
        return Polynomial([c / lead for c in self.coeffs], exact=self.exact)

    def taylor_shift(self, a) -> "Polynomial":
        """Coefficients of t -> p(a + t)."""
        exact = self.exact and is_exact(a)
        a = _to_scalar(a, exact)
        cs = list(self.coeffs) if exact else [complex(c) for c in self.coeffs]
        n = len(cs)
        for i in range(n):
            for k in range(n - 2, i - 1, -1):
                cs[k] = cs[k] + a * cs[k + 1]
        return Polynomial(cs, exact=exact)

    def reversed(self, n: int | None = None) -> "Polynomial":
        """t**n * p(1/t); n defaults to the degree."""
        if n is None:
            n = self.degree
        if n < self.degree:
            raise ValueError("reversal degree below polynomial degree")
        zero = GaussianRational(0) if self.exact else 0j
        cs = list(self.coeffs) + [zero] * (n + 1 - len(self.coeffs))
        return Polynomial(cs[::-1], exact=self.exact)

    def trim(self, rel: float = _ZERO_REL) -> "Polynomial":
        """Drop floating leading coefficients negligible against the scale."""
        if self.exact or self.is_zero():
            return self
        s = self.scale()
        cs = list(self.coeffs)
        while cs and abs(cs[-1]) <= rel * s:
            cs.pop()
        return Polynomial(cs, exact=False)

    def order_at(self, a) -> int:
        """Multiplicity of ``a`` as a root (0 if not a root)."""
        if self.is_zero():
            raise ValueError("order of the zero polynomial is undefined")
        shifted = self.taylor_shift(a)
        if shifted.exact:
            k = 0
            while _is_zero(shifted.coeffs[k]):
                k += 1
            return k
        # floating: the first Taylor coefficient that is not negligible,
        # measured against the size of the polynomial near a
        r = max(1.0, abs(complex(a)))
        ref = sum(abs(complex(c)) * r**i for i, c in enumerate(self.coeffs))
        for k, c in enumerate(shifted.coeffs):
            tol = 1e-9 * ref * r ** (-k)
            if abs(c) > tol:
                return k
        return shifted.degree

    # gcd / square-free ---------------------------------------------------------
    def gcd(self, other: "Polynomial") -> "Polynomial":
        other = self._coerce(other)
        if self.exact and other.exact:
            a, b = self.monic(), other.monic()
            while not b.is_zero():
                if b.degree == 0:
                    return Polynomial([1], exact=True)
                a, b = b, (a % b).monic()
            return a
        return _float_gcd(self.to_float(), other.to_float())

    def square_free(self) -> list[tuple["Polynomial", int]]:
        """Yun's square-free decomposition; exact mode only."""
        if not self.exact:
            raise ValueError("square-free decomposition needs exact coefficients")
        if self.degree < 1:
            return []
        f = self.monic()
        out = []
        fp = f.derivative()
        a = f.gcd(fp)
        b = f // a
        c = fp // a
        d = c - b.derivative()
        i = 1
        while b.degree > 0:
            a = b.gcd(d)
            if a.degree > 0:
                out.append((a, i))
            b = b // a
            c = d // a
            d = c - b.derivative()
            i += 1
        return out

    # serialization -------------------------------------------------------------
    def to_json(self) -> list:
        if self.exact:
            return [c.to_strings() for c in self.coeffs]
        return [[complex(c).real, complex(c).imag] for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Sequence) -> "Polynomial":
        if not data:
            return cls([], exact=True)
        if any(isinstance(x, str) for pair in data for x in _pair(pair)):
            return cls([GaussianRational.from_strings(*map(str, _pair(p))) for p in data], exact=True)
        return cls([complex(*_pair(p)) for p in data], exact=False)

    def __repr__(self) -> str:
        return f"Polynomial({[str(c) for c in self.coeffs]}, exact={self.exact})"

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if _is_zero(c):
                continue
            terms.append(f"{c}" if k == 0 else f"{c}*z" if k == 1 else f"{c}*z^{k}")
        return " + ".join(terms)


def _pair(p):
    if isinstance(p, (list, tuple)):
        return tuple(p) if len(p) == 2 else (p[0], 0)
    return (p, 0)


def _float_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Common-root gcd for floating polynomials."""
    a, b = a.trim(), b.trim()
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    if a.degree == 0 or b.degree == 0:
        return Polynomial([1], exact=False)
    ra = roots(a)
    rb = [(complex(r), m) for r, m in roots(b)]
    common = []
    for r, m in ra:
        r = complex(r)
        for i, (s, n) in enumerate(rb):
            if abs(r - s) <= 1e-7 * max(1.0, abs(r)):
                k = min(m, n)
                common.extend([(r + s) / 2] * k)
                rb[i] = (s, n - k)
                break
    return Polynomial.from_roots(common, exact=False)


# --------------------------------------------------------------------------
# roots
# --------------------------------------------------------------------------


_EPS = float(np.finfo(float).eps)


def _aberth(coeffs: np.ndarray, maxiter: int = 800, tol: float = 1e-15) -> tuple[np.ndarray, bool]:
    """Aberth-Ehrlich simultaneous iteration on a monic-normalizable polynomial."""
    from numpy.polynomial import polynomial as P

    n = len(coeffs) - 1
    a = coeffs / coeffs[-1]
    if n == 1:
        return np.array([-a[0]]), True
    # Fujiwara bound for the initial circle
    radius = 2 * max(abs(a[n - k]) ** (1.0 / k) for k in range(1, n + 1))
    radius = max(radius, 1e-3)
    z = radius * 0.5 * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.4))
    da = P.polyder(a)
    converged = False
    for _ in range(maxiter):
        p = P.polyval(z, a)
        dp = P.polyval(z, da)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            offs = inv.sum(axis=1)
            w = ratio / (1 - ratio * offs)
        w = np.where(np.isfinite(w), w, 0.0)
        z = z - w
        if np.all(np.abs(w) <= tol * np.maximum(1.0, np.abs(z))):
            converged = True
            break
        # multiple roots converge only linearly; stop once every root is a
        # backward-stable root of the coefficients
        az = np.abs(z)
        ref = P.polyval(az, np.abs(a))
        if np.all(np.abs(P.polyval(z, a)) <= 8 * n * _EPS * ref):
            converged = True
            break
    return z, converged


def _backward_residual(coeffs: np.ndarray, z: complex) -> float:
    from numpy.polynomial import polynomial as P

    num = abs(P.polyval(z, coeffs))
    den = sum(abs(c) * abs(z) ** k for k, c in enumerate(coeffs))
    return num / den if den else 0.0


def _float_simple_roots(p: Polynomial) -> list[complex]:
    """Roots of a polynomial assumed to have (mostly) simple roots."""
    c = p.as_array()
    z, converged = _aberth(c)
    worst = max((_backward_residual(c, r) for r in z), default=0.0)
    if not converged and worst > 1e-8:
        raise RootFindingError("root finder did not converge", worst)
    # Newton polish against the original coefficients
    from numpy.polynomial import polynomial as P

    dc = P.polyder(c)
    out = []
    for r in z:
        for _ in range(3):
            d = P.polyval(r, dc)
            if d == 0:
                break
            step = P.polyval(r, c) / d
            cand = r - step
            if _backward_residual(c, cand) <= _backward_residual(c, r):
                r = cand
            else:
                break
        out.append(complex(r))
    return out


def _exact_recovery(f: Polynomial, r: complex) -> Scalar:
    """Snap a floating root to a Gaussian rational when that is exactly a root."""
    for den in (10**3, 10**6):
        cand = GaussianRational.approximate(r, den)
        if abs(complex(cand) - r) <= 1e-6 * max(1.0, abs(r)) and f(cand) == 0:
            return cand
    return r


def _components(pts: list[complex], radius: float) -> list[list[complex]]:
    n = len(pts)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(pts[i] - pts[j]) <= radius * max(1.0, abs(pts[i])):
                parent[find(i)] = find(j)
    groups: dict[int, list[complex]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(pts[i])
    return list(groups.values())


def _cluster(p: Polynomial, pts: list[complex]) -> list[tuple[complex, int]]:
    """Merge nearly coincident roots and assign multiplicities.

    Groups within the borderline radius are accepted only when p and its
    first m-1 derivatives vanish at the group centroid; otherwise they are
    split at a smaller radius, down to the plain clustering radius.
    """
    out: list[tuple[complex, int]] = []

    def split(group: list[complex], radius: float):
        for comp in _components(group, radius):
            m = len(comp)
            c = sum(comp) / m
            if m == 1:
                out.append((c, 1))
                continue
            c = _newton(_nth_derivative(p, m - 1), c)
            if radius <= CLUSTER_RADIUS or _derivatives_vanish(p, c, m):
                out.append((c, m))
            else:
                split(comp, radius / 10)

    split(list(pts), _BORDERLINE_RADIUS)
    return out


def _nth_derivative(p: Polynomial, n: int) -> Polynomial:
    for _ in range(n):
        p = p.derivative()
    return p


def _newton(p: Polynomial, x: complex, steps: int = 8) -> complex:
    """A few guarded Newton steps; never moves to a worse residual."""
    dp = p.derivative()
    for _ in range(steps):
        d = dp(x)
        if d == 0:
            break
        cand = x - p(x) / d
        if abs(p(cand)) >= abs(p(x)):
            break
        x = cand
    return complex(x)


def _derivatives_vanish(p: Polynomial, c: complex, m: int) -> bool:
    """True when p, p', ..., p^(m-1) are negligible at c."""
    shifted = p.to_float().taylor_shift(c)
    r = max(1.0, abs(c))
    ref = sum(abs(complex(a)) * r**i for i, a in enumerate(p.coeffs))
    for k in range(min(m, len(shifted.coeffs))):
        if abs(shifted.coeffs[k]) > 1e-13 * ref * r ** (-k):
            return False
    return True


def roots(p: Polynomial) -> list[tuple[Scalar, int]]:
    """All roots of ``p`` with multiplicities summing to its degree.

    Exact polynomials are split by square-free decomposition, so
    multiplicities are exact; each square-free factor is solved in floating
    point and a root is returned as a Gaussian rational whenever it is one.
    Floating polynomials use Aberth iteration followed by cluster merging.
    """
    if p.is_zero():
        raise ValueError("roots of the zero polynomial are undefined")
    if p.degree == 0:
        return []
    if p.exact:
        out: list[tuple[Scalar, int]] = []
        for factor, mult in p.square_free():
            if factor.degree == 1:
                out.append((-factor.coeffs[0] / factor.coeffs[1], mult))
                continue
            for r in _float_simple_roots(factor):
                out.append((_exact_recovery(factor, r), mult))
        return out
    p = p.trim()
    k = 0
    while p.coeffs[k] == 0:
        k += 1
    rest = Polynomial(p.coeffs[k:], exact=False)
    pts = _float_simple_roots(rest) if rest.degree > 0 else []
    out = _cluster(rest, pts)
    return out + [(0j, k)] if k else out


# --------------------------------------------------------------------------
# Rational maps
# --------------------------------------------------------------------------


class RationalMap:
    """Reduced quotient num/den of polynomials, as a map from the sphere to itself.

    The denominator is normalized to be monic, so equal maps have equal
    representations in exact mode.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, *, _reduced: bool = False):
        if not isinstance(num, Polynomial):
            num = Polynomial([num]) if not isinstance(num, (list, tuple)) else Polynomial(num)
        if den is None:
            den = Polynomial([1], exact=num.exact)
        elif not isinstance(den, Polynomial):
            den = Polynomial([den]) if not isinstance(den, (list, tuple)) else Polynomial(den)
        exact = num.exact and den.exact
        if not exact:
            num, den = num.to_float().trim(), den.to_float().trim()
        if den.is_zero():
            raise ZeroDivisionError("zero map denominator")
        if not _reduced:
            g = num.gcd(den) if not num.is_zero() else den.monic()
            if g.degree > 0:
                num, den = num // g, den // g
                if not exact:
                    num, den = num.trim(), den.trim()
        lead = den.lead
        if lead != 1:
            num = Polynomial([c / lead for c in num.coeffs], exact=exact)
            den = Polynomial([c / lead for c in den.coeffs], exact=exact)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RationalMap is immutable")

    # constructors ------------------------------------------------------------
    @classmethod
    def z(cls, exact: bool = True) -> "RationalMap":
        return cls(Polynomial.z(exact))

    @classmethod
    def const(cls, c) -> "RationalMap":
        return cls(Polynomial([c]))

    # basic properties ------------------------------------------------------------
    @property
    def exact(self) -> bool:
        return self.num.exact and self.den.exact

    @property
    def degree(self) -> int:
        return max(self.num.degree, self.den.degree, 0)

    def is_constant(self) -> bool:
        return self.num.degree <= 0 and self.den.degree == 0

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def to_float(self) -> "RationalMap":
        return RationalMap(self.num.to_float(), self.den.to_float(), _reduced=True)

    # evaluation ----------------------------------------------------------------
    def __call__(self, p: SpherePoint) -> SpherePoint:
        return eval_map(self, p)

    def eval_array(self, z: np.ndarray) -> np.ndarray:
        return self.num.eval_array(z) / self.den.eval_array(z)

    # arithmetic -------------------------------------------------------------------
    def _coerce(self, other) -> "RationalMap":
        if isinstance(other, RationalMap):
            return other
        if isinstance(other, Polynomial):
            return RationalMap(other)
        return RationalMap(Polynomial([other]))

    def __add__(self, other):
        o = self._coerce(other)
        return RationalMap(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalMap(-self.num, self.den, _reduced=True)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return RationalMap(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.is_zero():
            raise ZeroDivisionError("zero map denominator")
        return RationalMap(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise ValueError("rational map powers must be integers")
        if n < 0:
            return RationalMap(self.den ** (-n), self.num ** (-n), _reduced=True)
        return RationalMap(self.num**n, self.den**n, _reduced=True)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMap):
            try:
                other = self._coerce(other)
            except TypeError:
                return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def derivative(self) -> "RationalMap":
        return derivative(self)

    def compose(self, inner: "RationalMap") -> "RationalMap":
        """self(inner(z))."""
        m = self.degree
        a, b = inner.num, inner.den

        def homog(p: Polynomial) -> Polynomial:
            acc = Polynomial([], exact=p.exact and a.exact)
            for k, c in enumerate(p.coeffs):
                acc = acc + (a**k) * (b ** (m - k)) * c
            return acc

        return RationalMap(homog(self.num), homog(self.den))

    def infinity_chart(self) -> "RationalMap":
        """The map w -> self(1/w)."""
        m = self.degree
        return RationalMap(self.num.reversed(m), self.den.reversed(m))

    # local data -----------------------------------------------------------------
    def order_at(self, p: SpherePoint) -> int:
        """Order of the function at p: zeros positive, poles negative."""
        if self.is_zero():
            raise ValueError("order of the zero map is undefined")
        if is_inf(p):
            return self.den.degree - self.num.degree
        return self.num.order_at(p) - self.den.order_at(p)

    def local_multiplicity(self, p: SpherePoint) -> int:
        return local_multiplicity(self, p)

    def zeros_and_poles(self) -> list[tuple[SpherePoint, int]]:
        """Divisor of the function on the sphere (points of nonzero order)."""
        out: list[tuple[SpherePoint, int]] = []
        if self.is_zero():
            raise ValueError("divisor of the zero map is undefined")
        for r, m in roots(self.num) if self.num.degree > 0 else []:
            out.append((r, m))
        for r, m in roots(self.den) if self.den.degree > 0 else []:
            out.append((r, -m))
        o = self.order_at(INF)
        if o:
            out.append((INF, o))
        return out

    # serialization -----------------------------------------------------------------
    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "RationalMap":
        den = data.get("den") or [["1", "0"]]
        return cls(Polynomial.from_json(data["num"]), Polynomial.from_json(den))

    def __repr__(self) -> str:
        return f"RationalMap(({self.num}) / ({self.den}))"


def reduce(num: Polynomial, den: Polynomial) -> RationalMap:
    """Reduced form of num/den."""
    if den.is_zero():
        raise ZeroDivisionError("zero map denominator")
    return RationalMap(num, den)


def mobius(a, b, c, d) -> RationalMap:
    """z -> (a z + b) / (c z + d)."""
    if a * d - b * c == 0:
        raise ValueError("degenerate Mobius transformation")
    return RationalMap(Polynomial([b, a]), Polynomial([d, c]))


def eval_map(R: RationalMap, p: SpherePoint) -> SpherePoint:
    """R(p) on the sphere; total, with infinity handled by degree comparison."""
    if is_inf(p):
        dn, dd = R.num.degree, R.den.degree
        if R.num.is_zero():
            return R.num(0) if R.exact else 0j
        if dn > dd:
            return INF
        if dn < dd:
            return GaussianRational(0) if R.exact else 0j
        return R.num.lead / R.den.lead
    dv = R.den(p)
    if dv == 0:
        return INF
    nv = R.num(p)
    return nv / dv


def derivative(R: RationalMap) -> RationalMap:
    """Quotient-rule derivative, reduced."""
    n, d = R.num, R.den
    return RationalMap(n.derivative() * d - n * d.derivative(), d * d)


def local_multiplicity(R: RationalMap, z0: SpherePoint) -> int:
    """Order of vanishing of R - R(z0) at z0 (pole order when R(z0) is infinite)."""
    if R.is_constant():
        raise ValueError("local multiplicity of a constant map is undefined")
    if is_inf(z0):
        return local_multiplicity(R.infinity_chart(), GaussianRational(0) if R.exact else 0j)
    w = eval_map(R, z0)
    if is_inf(w):
        return R.den.order_at(z0)
    return (R.num - R.den * w).order_at(z0)


def preimages(R: RationalMap, w: SpherePoint) -> list[tuple[SpherePoint, int]]:
    """Points of R^{-1}(w) with multiplicities; they sum to deg R."""
    if R.is_constant():
        raise ValueError("preimages of a constant map are undefined")
    d = R.degree
    if is_inf(w):
        out: list[tuple[SpherePoint, int]] = list(roots(R.den)) if R.den.degree > 0 else []
        extra = R.num.degree - R.den.degree
    else:
        P = R.num - R.den * w
        if not P.exact:
            P = P.trim()
        out = list(roots(P)) if P.degree > 0 else []
        extra = d - max(P.degree, 0)
    if extra > 0:
        out.append((INF, extra))
    return out


def critical_points(R: RationalMap) -> list[tuple[SpherePoint, int]]:
    """Finite critical points with branching orders, from the Wronskian num'den - num den'."""
    W = R.num.derivative() * R.den - R.num * R.den.derivative()
    if not W.exact:
        W = W.trim()
    if W.is_zero():
        raise ValueError("constant map has no branch structure")
    return list(roots(W)) if W.degree > 0 else []


def branch_points(R: RationalMap) -> list[tuple[SpherePoint, int]]:
    """All points with multiplicity >= 2 and their branching orders (multiplicity - 1)."""
    if R.is_constant():
        raise ValueError("branch points of a constant map are undefined")
    out = critical_points(R)
    b_inf = local_multiplicity(R, INF) - 1
    if b_inf > 0:
        out.append((INF, b_inf))
    return out


def point_to_json(p: SpherePoint):
    if is_inf(p):
        return "inf"
    if is_exact(p):
        return GaussianRational.coerce(p).to_strings()
    p = complex(p)
    return [p.real, p.imag]


def point_from_json(data) -> SpherePoint:
    if isinstance(data, str):
        if data.lower() in ("inf", "infinity", "oo"):
            return INF
        return GaussianRational(Fraction(data))
    if isinstance(data, (int, Fraction)):
        return GaussianRational(data)
    if isinstance(data, float):
        return complex(data)
    re, im = _pair(data)
    if isinstance(re, str) or isinstance(im, str):
        return GaussianRational.from_strings(str(re), str(im))
    if isinstance(re, int) and isinstance(im, int):
        return GaussianRational(re, im)
    return complex(re, im)


def point_key(p: SpherePoint) -> tuple:
    """Sort key putting finite points first, then infinity."""
    if is_inf(p):
        return (1, 0.0, 0.0)
    c = complex(p)
    return (0, c.real, c.imag)


def as_sphere_point(x) -> SpherePoint:
    if is_inf(x):
        return x
    if isinstance(x, float) and math.isinf(x):
        return INF
    if is_exact(x):
        return GaussianRational.coerce(x)
    return complex(x)
