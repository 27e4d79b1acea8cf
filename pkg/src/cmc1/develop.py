"""Analytic continuation of the holomorphic null lift and its ambient images.

The frame solves dF = F A dz with A = [[g, -g^2], [1, -g]] Q/dg, so trace A
vanishes and det F is conserved.  When a surface carries no secondary Gauss
map, two solutions u1, u2 of u'' + r u = 0 (r dz^2 = S(G)/2 + Q) are
integrated alongside F; g = u1/u2 then has S(g) = 2r and the connection
reads A = (Q/W) [[u1 u2, -u1^2], [u2^2, -u1 u2]] with W = u1' u2 - u1 u2'.
Starting from u1 = 0, u1' = 1, u2 = 1, u2' = 0 gives W = 1 and g(z0) = 0.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import RK45

from .algebra import INF, RationalMap, SpherePoint, is_inf
from .expr import ExprFunction
from .frobenius import e0_coefficient
from .surface import H3, S31, SurfaceData

E3 = np.diag([1.0 + 0j, -1.0 + 0j])
CLASS_TOL = 1e-6
RTOL = 1e-10
ATOL = 1e-12


class IntegrationError(RuntimeError):
    def __init__(self, message: str, z: complex):
        super().__init__(f"{message} (near z = {z:.6g})")
        self.z = z


class ClearanceError(ValueError):
    pass


# --------------------------------------------------------------------------
# paths
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Line:
    a: complex
    b: complex

    @property
    def length(self) -> float:
        return abs(self.b - self.a)

    def point(self, s: float) -> complex:
        L = self.length
        return self.a if L == 0 else self.a + (self.b - self.a) * (s / L)

    def tangent(self, s: float) -> complex:
        L = self.length
        return 0j if L == 0 else (self.b - self.a) / L

    def distance(self, pts: np.ndarray) -> np.ndarray:
        d = self.b - self.a
        if d == 0:
            return np.abs(pts - self.a)
        t = np.clip(((pts - self.a) * np.conj(d)).real / abs(d) ** 2, 0.0, 1.0)
        return np.abs(pts - (self.a + t * d))

    @property
    def start(self) -> complex:
        return self.a

    @property
    def end(self) -> complex:
        return self.b

    def to_json(self) -> dict:
        return {"type": "line", "from": [self.a.real, self.a.imag], "to": [self.b.real, self.b.imag]}


@dataclass(frozen=True)
class Arc:
    """Circular arc from angle t0 to t1 (radians, either direction)."""

    center: complex
    radius: float
    t0: float
    t1: float

    @property
    def length(self) -> float:
        return self.radius * abs(self.t1 - self.t0)

    def _angle(self, s: float) -> float:
        L = self.length
        return self.t0 if L == 0 else self.t0 + (self.t1 - self.t0) * (s / L)

    def point(self, s: float) -> complex:
        return self.center + self.radius * cmath.exp(1j * self._angle(s))

    def tangent(self, s: float) -> complex:
        sgn = 1.0 if self.t1 >= self.t0 else -1.0
        return sgn * 1j * cmath.exp(1j * self._angle(s))

    def distance(self, pts: np.ndarray) -> np.ndarray:
        lo, hi = min(self.t0, self.t1), max(self.t0, self.t1)
        rel = pts - self.center
        # angle of each point measured forward from lo
        phi = np.mod(np.angle(rel) - lo, 2 * math.pi)
        inside = (hi - lo >= 2 * math.pi) | (phi <= hi - lo)
        ends = np.minimum(np.abs(pts - self.start), np.abs(pts - self.end))
        return np.where(inside, np.abs(np.abs(rel) - self.radius), ends)

    @property
    def start(self) -> complex:
        return self.point(0.0)

    @property
    def end(self) -> complex:
        return self.point(self.length)

    def to_json(self) -> dict:
        return {
            "type": "arc",
            "center": [self.center.real, self.center.imag],
            "radius": self.radius,
            "from_angle": self.t0,
            "to_angle": self.t1,
        }


@dataclass(frozen=True)
class PathSpec:
    segments: tuple
    clearance: float = 0.05

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if self.clearance <= 0:
            raise ValueError("clearance must be positive")
        for s1, s2 in zip(self.segments, self.segments[1:]):
            if abs(s1.end - s2.start) > 1e-12 * max(1.0, abs(s1.end)):
                raise ValueError(f"path segments not connected at {s1.end} / {s2.start}")

    @property
    def start(self) -> complex:
        return self.segments[0].start

    @property
    def end(self) -> complex:
        return self.segments[-1].end

    @property
    def length(self) -> float:
        return sum(s.length for s in self.segments)

    @classmethod
    def polyline(cls, points, clearance: float = 0.05) -> "PathSpec":
        pts = [complex(p) for p in points]
        if len(pts) == 1:
            pts = pts * 2
        return cls(tuple(Line(a, b) for a, b in zip(pts, pts[1:])), clearance)

    @classmethod
    def circle(cls, center: complex, radius: float, start_angle: float = 0.0, turns: float = 1.0,
               clearance: float = 0.05) -> "PathSpec":
        """Counterclockwise for turns > 0."""
        return cls((Arc(complex(center), radius, start_angle, start_angle + 2 * math.pi * turns),), clearance)

    def samples(self, spacing: float) -> list[complex]:
        out = []
        for seg in self.segments:
            n = max(2, int(math.ceil(seg.length / spacing)) + 1)
            out += [seg.point(seg.length * i / (n - 1)) for i in range(n)]
        return out

    def to_json(self) -> dict:
        return {"segments": [s.to_json() for s in self.segments], "clearance": self.clearance}

    @classmethod
    def from_json(cls, data) -> "PathSpec":
        """Either {"points": [[x, y], ...]} or {"segments": [...]}; optional "clearance"."""
        if isinstance(data, list):
            data = {"points": data}
        clearance = float(data.get("clearance", 0.05))
        if "points" in data:
            return cls.polyline([complex(*p) for p in data["points"]], clearance)
        segs = []
        for s in data["segments"]:
            if s["type"] == "line":
                segs.append(Line(complex(*s["from"]), complex(*s["to"])))
            elif s["type"] == "arc":
                segs.append(Arc(complex(*s["center"]), float(s["radius"]), float(s["from_angle"]), float(s["to_angle"])))
            else:
                raise ValueError(f"unknown segment type {s['type']!r}")
        return cls(tuple(segs), clearance)


# --------------------------------------------------------------------------
# connection
# --------------------------------------------------------------------------


@dataclass
class FrameState:
    z: complex
    F: np.ndarray
    branch_state: tuple | None = None
    aux: np.ndarray | None = None
    det_drift: float = 0.0
    arclength: float = 0.0
    steps: int = 0

    def g_value(self, data: SurfaceData) -> complex:
        if data.g is not None:
            return data.g(self.z, self.branch_state)
        u1, _, u2, _ = self.aux
        return u1 / u2 if u2 != 0 else complex("inf")

    def to_json(self) -> dict:
        return {
            "z": [self.z.real, self.z.imag],
            "F": [[[v.real, v.imag] for v in row] for row in self.F],
            "det": [complex(np.linalg.det(self.F)).real, complex(np.linalg.det(self.F)).imag],
            "branch_state": list(self.branch_state) if self.branch_state is not None else None,
            "det_drift": self.det_drift,
            "arclength": self.arclength,
            "steps": self.steps,
        }


def _float_eval(R: RationalMap):
    """Fast complex evaluation of a rational map at finite points."""
    num = [complex(c) for c in reversed(R.num.coeffs)]
    den = [complex(c) for c in reversed(R.den.coeffs)]

    def f(z: complex) -> complex:
        a = 0j
        for c in num:
            a = a * z + c
        b = 0j
        for c in den:
            b = b * z + c
        return a / b

    return f


def _connection(data: SurfaceData) -> "_Connection":
    """Per-surface connection, cached on the data object."""
    conn = data.__dict__.get("_connection")
    if conn is None:
        conn = _Connection(data)
        data.__dict__["_connection"] = conn
    return conn


class _Connection:
    """A(z) for a surface, in one of two modes (explicit g, or (E.0) pair)."""

    def __init__(self, data: SurfaceData):
        self.data = data
        self.Q = _float_eval(data.Q.coeff) if data.Q.rational else data.Q
        self.use_g = data.g is not None
        self.singular = np.array([complex(s) for s in data.singular_points()], dtype=complex)
        if not self.use_g:
            self.r = _float_eval(e0_coefficient(data.G, data.Q).r)

    @property
    def size(self) -> int:
        return 4 if self.use_g else 8

    def initial(self, z0: complex, F0: np.ndarray, state, aux):
        y = np.zeros(self.size, dtype=complex)
        y[:4] = F0.reshape(4)
        if self.use_g:
            state = self.data.g.track(z0, state)
        else:
            y[4:] = aux if aux is not None else np.array([0, 1, 1, 0], dtype=complex)
        return y, state

    def rhs(self, z: complex, dz: complex, y: np.ndarray, state) -> np.ndarray:
        F11, F12, F21, F22 = y[:4]
        out = np.empty_like(y)
        q = complex(self.Q(z))
        if self.use_g:
            d = self.data.g.jet(z, 1, state).derivatives()
            g, dg = d[0], d[1]
            w = q / dg
            a, b = F11 * g + F12, F21 * g + F22
            out[0], out[1], out[2], out[3] = a * w, -g * a * w, b * w, -g * b * w
        else:
            u1, v1, u2, v2 = y[4:]
            W = v1 * u2 - u1 * v2
            c = q / W
            m11, m12, m21 = u1 * u2 * c, -u1 * u1 * c, u2 * u2 * c
            out[0] = F11 * m11 + F12 * m21
            out[1] = F11 * m12 - F12 * m11
            out[2] = F21 * m11 + F22 * m21
            out[3] = F21 * m12 - F22 * m11
            rz = complex(self.r(z))
            out[4], out[5], out[6], out[7] = v1, -rz * u1, v2, -rz * u2
        return out * dz

    def advance_state(self, z: complex, state):
        return self.data.g.track(z, state) if self.use_g else None


def _segment_distance(sing: np.ndarray, seg) -> tuple[float, complex | None]:
    """Distance from a segment to the singular set and the nearest singular point."""
    if len(sing) == 0:
        return math.inf, None
    d = seg.distance(sing)
    k = int(np.argmin(d))
    return float(d[k]), complex(sing[k])


def continue_frame(
    data: SurfaceData,
    path: PathSpec,
    F0=None,
    *,
    start: FrameState | None = None,
    rtol: float = RTOL,
    atol: float = ATOL,
    check_clearance: bool = True,
) -> FrameState:
    """Develop the frame along path from F0 (identity by default) at path.start.

    ``start`` carries over F, branch state and the (E.0) pair from an earlier
    continuation ending at path.start.
    """
    conn = _connection(data)
    seg_steps = []
    for seg in path.segments:
        dist, where = _segment_distance(conn.singular, seg)
        if check_clearance and dist < path.clearance * (1 - 1e-9):
            raise ClearanceError(f"path passes within {dist:.3g} of singular point {where:.6g}")
        # keeps branch tracking and step control well inside the regular disk
        seg_steps.append(max(path.clearance, min(dist, 1e3)) / 2)
    z = path.start
    if start is not None:
        if abs(start.z - z) > 1e-9 * max(1.0, abs(z)):
            raise ValueError("start state is not at the beginning of the path")
        F = np.array(start.F, dtype=complex)
        y, state = conn.initial(z, F, start.branch_state, start.aux)
        drift0, arc0, steps = start.det_drift, start.arclength, start.steps
    else:
        F = np.eye(2, dtype=complex) if F0 is None else np.array(F0, dtype=complex)
        y, state = conn.initial(z, F, None, None)
        drift0, arc0, steps = 0.0, 0.0, 0
    det0 = F[0, 0] * F[1, 1] - F[0, 1] * F[1, 0]
    drift = drift0
    for seg, max_step in zip(path.segments, seg_steps):
        L = seg.length
        if L == 0:
            continue
        cur = {"state": state}

        def fun(s, yy, seg=seg, cur=cur):
            return conn.rhs(seg.point(s), seg.tangent(s), yy, cur["state"])

        solver = RK45(fun, 0.0, y, L, rtol=rtol, atol=atol, max_step=max_step)
        while solver.status == "running":
            msg = solver.step()
            if solver.status == "failed":
                raise IntegrationError(f"integration failed: {msg}", seg.point(solver.t))
            steps += 1
            zt = seg.point(solver.t)
            if not np.all(np.isfinite(solver.y)):
                raise IntegrationError("frame blew up", zt)
            cur["state"] = conn.advance_state(zt, cur["state"])
            Fy = solver.y
            det = Fy[0] * Fy[3] - Fy[1] * Fy[2]
            drift = max(drift, drift0 + abs(det - det0))
        y = solver.y
        state = cur["state"]
        z = seg.end
    F = y[:4].reshape(2, 2).copy()
    aux = None if conn.use_g else y[4:].copy()
    return FrameState(z, F, state, aux, float(drift), arc0 + path.length, steps)


# --------------------------------------------------------------------------
# monodromy
# --------------------------------------------------------------------------


@dataclass
class Monodromy:
    matrix: np.ndarray
    cls: str
    su2_defect: float
    su11_defect: float
    identity_defect: float
    det_drift: float
    path: PathSpec = field(repr=False, default=None)

    def to_json(self) -> dict:
        return {
            "matrix": [[[v.real, v.imag] for v in row] for row in self.matrix],
            "class": self.cls,
            "su2_defect": self.su2_defect,
            "su11_defect": self.su11_defect,
            "identity_defect": self.identity_defect,
            "det_drift": self.det_drift,
            "path": self.path.to_json() if self.path is not None else None,
        }


def classify_matrix(M: np.ndarray, tol: float = CLASS_TOL, ambient: str = H3) -> tuple[str, float, float]:
    """SU(2), SU(1,1) or SL(2,C); matrices in both groups get the ambient's group."""
    Mh = M.conj().T
    su2 = float(np.linalg.norm(M @ Mh - np.eye(2)))
    su11 = float(np.linalg.norm(M @ E3 @ Mh - E3))
    order = [("SU(1,1)", su11), ("SU(2)", su2)] if ambient == S31 else [("SU(2)", su2), ("SU(1,1)", su11)]
    for name, defect in order:
        if defect < tol:
            return name, su2, su11
    return "SL(2,C)", su2, su11


def loop_path(data: SurfaceData, basepoint: complex, puncture: SpherePoint, radius: float | None = None,
              clearance: float | None = None) -> PathSpec:
    """Keyhole loop from basepoint around exactly one puncture, positively oriented.

    Around infinity the circle is traversed clockwise (positive as seen
    from infinity).
    """
    b = complex(basepoint)
    sing = [complex(s) for s in data.singular_points()]
    if is_inf(puncture):
        R = max([abs(s) for s in sing] + [abs(b)]) * 1.5 + 1.0
        if radius is not None:
            R = radius
        u = b / abs(b) if b != 0 else 1.0
        p_on = u * R
        t0 = cmath.phase(u)
        segs = [Line(b, p_on), Arc(0j, R, t0, t0 - 2 * math.pi), Line(p_on, b)]
        gap = min([R - abs(s) for s in sing] + [R - abs(b)])
    else:
        p = complex(puncture)
        others = [s for s in sing if abs(s - p) > 1e-9]
        near = min([abs(s - p) for s in others], default=abs(b - p) * 2)
        rho = radius if radius is not None else min(abs(b - p), near) / 2
        u = (b - p) / abs(b - p)
        p_on = p + rho * u
        t0 = cmath.phase(u)
        segs = [Line(b, p_on), Arc(p, rho, t0, t0 + 2 * math.pi), Line(p_on, b)]
        gap = min([rho] + [abs(s - p) - rho for s in others])
    segs = [s for s in segs if s.length > 0]
    cl = clearance if clearance is not None else min(0.05, gap / 2)
    return PathSpec(tuple(segs), cl)


def frame_at(data: SurfaceData, z: complex, rtol: float = RTOL, atol: float = ATOL) -> FrameState:
    """Frame at z, continued along the segment from the catalog base point."""
    path = PathSpec.polyline([data.base, z], clearance=_default_clearance(data, [data.base, z]))
    return continue_frame(data, path, rtol=rtol, atol=atol)


def _default_clearance(data: SurfaceData, pts) -> float:
    sing = [complex(s) for s in data.singular_points()]
    if not sing:
        return 0.05
    path = PathSpec.polyline(pts, clearance=1.0)
    d = min(float(seg.distance(np.array(sing)).min()) for seg in path.segments)
    if d == 0:
        raise ClearanceError("segment from the base point hits a singular point")
    return min(0.05, d / 2)


def monodromy(data: SurfaceData, basepoint: complex | None = None, puncture: SpherePoint = INF, *,
              radius: float | None = None, rtol: float = RTOL, atol: float = ATOL,
              tol: float = CLASS_TOL) -> Monodromy:
    """Left monodromy M with F_end = M F_start for the frame normalized at data.base.

    FF* (resp. F e3 F*) is single-valued along the loop iff M lies in SU(2)
    (resp. SU(1,1)) up to sign.
    """
    b = complex(data.base if basepoint is None else basepoint)
    if abs(b - complex(data.base)) > 0:
        st = frame_at(data, b, rtol, atol)
    else:
        conn = _connection(data)
        _, state = conn.initial(b, np.eye(2, dtype=complex), None, None)
        st = FrameState(b, np.eye(2, dtype=complex), state, None if conn.use_g else np.array([0, 1, 1, 0], dtype=complex))
    path = loop_path(data, b, puncture, radius)
    end = continue_frame(data, path, start=st, rtol=rtol, atol=atol)
    M = end.F @ np.linalg.inv(st.F)
    cls, su2, su11 = classify_matrix(M, tol, data.ambient)
    ident = float(np.linalg.norm(M - np.eye(2)))
    return Monodromy(M, cls, su2, su11, ident, end.det_drift, path)


def ode_monodromy(r: RationalMap, center: complex, radius: float, rtol: float = 1e-12, atol: float = 1e-14) -> np.ndarray:
    """Monodromy of the fundamental matrix [[u1, u2], [u1', u2']] of u'' + r u = 0 around a circle."""
    rf = r.to_float() if r.exact else r
    arc = Arc(complex(center), radius, 0.0, 2 * math.pi)

    def fun(s, y):
        z, dz = arc.point(s), arc.tangent(s)
        rz = complex(rf(z))
        return np.array([y[1], -rz * y[0], y[3], -rz * y[2]]) * dz

    solver = RK45(fun, 0.0, np.array([1, 0, 0, 1], dtype=complex), arc.length, rtol=rtol, atol=atol,
                  max_step=radius / 4)
    while solver.status == "running":
        msg = solver.step()
        if solver.status == "failed":
            raise IntegrationError(msg, arc.point(solver.t))
    u1, v1, u2, v2 = solver.y
    return np.array([[u1, u2], [v1, v2]])


# --------------------------------------------------------------------------
# ambient points
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AmbientPoint:
    ambient: str
    minkowski: tuple
    ball: tuple | None = None
    singular: bool = False

    def quadric(self) -> float:
        x0, x1, x2, x3 = self.minkowski
        return -x0 * x0 + x1 * x1 + x2 * x2 + x3 * x3

    def to_json(self) -> dict:
        return {
            "ambient": self.ambient,
            "minkowski": list(self.minkowski),
            "ball": list(self.ball) if self.ball is not None else None,
            "singular": self.singular,
        }


def _hermitian_coords(X: np.ndarray, F: np.ndarray) -> tuple:
    det = F[0, 0] * F[1, 1] - F[0, 1] * F[1, 0]
    if abs(det - 1) >= 1e-6:
        raise ValueError(f"frame has det {det:.6g}, expected 1")
    scale = max(1.0, float(np.abs(X).max()))
    if abs(X[0, 1] - np.conj(X[1, 0])) > 1e-9 * scale or abs(X[0, 0].imag) > 1e-9 * scale or abs(X[1, 1].imag) > 1e-9 * scale:
        raise ValueError("matrix is not Hermitian")
    f11, f22, f12 = X[0, 0].real, X[1, 1].real, X[0, 1]
    return ((f11 + f22) / 2, float(f12.real), float(f12.imag), (f11 - f22) / 2)


def point_h3(F) -> AmbientPoint:
    F = np.asarray(F, dtype=complex)
    x = _hermitian_coords(F @ F.conj().T, F)
    x0, x1, x2, x3 = x
    ball = (x1 / (1 + x0), x2 / (1 + x0), x3 / (1 + x0))
    return AmbientPoint(H3, tuple(float(v) for v in x), tuple(float(v) for v in ball))


def point_s31(F, g_value: complex, threshold: float = 1e-3) -> AmbientPoint:
    F = np.asarray(F, dtype=complex)
    x = _hermitian_coords(F @ E3 @ F.conj().T, F)
    sing = bool(cmath.isfinite(g_value) and abs(abs(g_value) - 1) < threshold)
    return AmbientPoint(S31, tuple(float(v) for v in x), None, sing)


def ambient_point(data: SurfaceData, state: FrameState, threshold: float = 1e-3) -> AmbientPoint:
    if data.ambient == S31:
        return point_s31(state.F, state.g_value(data), threshold)
    return point_h3(state.F)


def singular_locus(g: ExprFunction, xlim=(-2.0, 2.0), ylim=(-2.0, 2.0), n: int = 201,
                   avoid=(), avoid_radius: float = 1e-3) -> list[np.ndarray]:
    """Curves |g| = 1 by marching squares on an n x n grid (principal branches)."""
    from skimage.measure import find_contours

    xs = np.linspace(*xlim, n)
    ys = np.linspace(*ylim, n)
    Z = xs[None, :] + 1j * ys[:, None]
    with np.errstate(all="ignore"):
        val = np.abs(g.eval_array(Z)) - 1.0
    bad = ~np.isfinite(val)
    for p in avoid:
        bad |= np.abs(Z - complex(p)) < avoid_radius
    # no level set may be drawn through cells touching an undefined sample
    val = np.where(bad, 0.0, val)
    curves = []
    for c in find_contours(val, 0.0, mask=~bad):
        row, col = c[:, 0], c[:, 1]
        x = np.interp(col, np.arange(n), xs)
        y = np.interp(row, np.arange(n), ys)
        curves.append(x + 1j * y)
    return curves


__all__ = [
    "AmbientPoint",
    "Arc",
    "ClearanceError",
    "FrameState",
    "IntegrationError",
    "Line",
    "Monodromy",
    "PathSpec",
    "ambient_point",
    "classify_matrix",
    "continue_frame",
    "frame_at",
    "loop_path",
    "monodromy",
    "ode_monodromy",
    "point_h3",
    "point_s31",
    "singular_locus",
]
