"""Grid meshes of developed surfaces and their OBJ / PLY export.

Frames are carried from vertex to vertex along a breadth-first spanning tree
of grid edges, so every vertex is reached by exactly one continuation path.
Polar grids keep a duplicate seam column at angle t0 + 2 pi; the seam
vertices are reached the long way round and their mismatch measures the
monodromy's effect on the ambient point.
"""

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .develop import (
    Arc,
    ClearanceError,
    IntegrationError,
    Line,
    PathSpec,
    ambient_point,
    continue_frame,
    frame_at,
)
from .surface import H3, S31, SurfaceData

log = logging.getLogger(__name__)

POLAR = "polar"
CARTESIAN = "cartesian"


@dataclass(frozen=True)
class DomainGrid:
    """Polar grid about ``center`` (rows: radii, columns: angles) or a cartesian rectangle.

    ``lo``/``hi`` are (r_min, r_max) for polar grids and the corners
    (x_min + i y_min, x_max + i y_max) for cartesian ones.
    """

    chart: str
    lo: complex
    hi: complex
    resolution: tuple
    center: complex = 0j
    exclusion: float = 0.05
    angle0: float = 0.0
    log_radial: bool = True

    def __post_init__(self):
        if self.chart not in (POLAR, CARTESIAN):
            raise ValueError(f"chart must be {POLAR!r} or {CARTESIAN!r}")
        n1, n2 = self.resolution
        if n1 < 2 or n2 < 2:
            raise ValueError("resolution must be at least 2 x 2")
        if self.exclusion <= 0:
            raise ValueError("exclusion radius must be positive")
        if self.chart == POLAR:
            r0, r1 = float(np.real(self.lo)), float(np.real(self.hi))
            if not 0 < r0 < r1:
                raise ValueError("polar grid needs 0 < r_min < r_max")
        else:
            if not (self.lo.real < self.hi.real and self.lo.imag < self.hi.imag):
                raise ValueError("cartesian grid needs lo < hi in both coordinates")

    @classmethod
    def polar(cls, r_min, r_max, n_r, n_theta, center=0j, exclusion=0.05, angle0=0.0) -> "DomainGrid":
        return cls(POLAR, complex(r_min), complex(r_max), (n_r, n_theta), complex(center), exclusion, angle0)

    @classmethod
    def cartesian(cls, x0, x1, y0, y1, nx, ny, exclusion=0.05) -> "DomainGrid":
        return cls(CARTESIAN, complex(x0, y0), complex(x1, y1), (nx, ny), 0j, exclusion)

    @property
    def shape(self) -> tuple[int, int]:
        """(rows, columns); polar grids carry one extra seam column."""
        n1, n2 = self.resolution
        return (n1, n2 + 1) if self.chart == POLAR else (n2, n1)

    def radii(self) -> np.ndarray:
        r0, r1 = self.lo.real, self.hi.real
        n = self.resolution[0]
        return np.geomspace(r0, r1, n) if self.log_radial else np.linspace(r0, r1, n)

    def angles(self) -> np.ndarray:
        n = self.resolution[1]
        return self.angle0 + 2 * math.pi * np.arange(n + 1) / n

    def points(self) -> np.ndarray:
        if self.chart == POLAR:
            r, t = self.radii(), self.angles()
            return self.center + r[:, None] * np.exp(1j * t[None, :])
        nx, ny = self.resolution
        xs = np.linspace(self.lo.real, self.hi.real, nx)
        ys = np.linspace(self.lo.imag, self.hi.imag, ny)
        return xs[None, :] + 1j * ys[:, None]

    def cell_size(self) -> float:
        """Largest edge length of the grid."""
        P = self.points()
        return float(max(np.abs(np.diff(P, axis=0)).max(), np.abs(np.diff(P, axis=1)).max()))

    def edge_segment(self, a: tuple, b: tuple):
        """The path between adjacent grid vertices a and b."""
        P = self.points()
        if self.chart == POLAR and a[0] == b[0]:
            r = self.radii()[a[0]]
            t = self.angles()
            return Arc(self.center, float(r), float(t[a[1]]), float(t[b[1]]))
        return Line(complex(P[a]), complex(P[b]))

    def to_json(self) -> dict:
        return {
            "chart": self.chart,
            "lo": [self.lo.real, self.lo.imag],
            "hi": [self.hi.real, self.hi.imag],
            "resolution": list(self.resolution),
            "center": [self.center.real, self.center.imag],
            "exclusion": self.exclusion,
            "angle0": self.angle0,
        }


@dataclass
class SurfaceMesh:
    ambient: str
    grid: DomainGrid
    zs: np.ndarray
    vertices: list
    faces: list
    singular_vertices: set = field(default_factory=set)
    metadata: dict = field(default_factory=dict)

    @property
    def shape(self) -> tuple[int, int]:
        return self.zs.shape

    def index(self, i: int, j: int) -> int:
        return i * self.shape[1] + j

    def valid(self) -> list[int]:
        return [k for k, v in enumerate(self.vertices) if v is not None]

    def max_quadric_error(self) -> float:
        target = -1.0 if self.ambient == H3 else 1.0
        errs = [abs(v.quadric() - target) for v in self.vertices if v is not None]
        return max(errs, default=0.0)

    def to_json(self) -> dict:
        return {
            "ambient": self.ambient,
            "grid": self.grid.to_json(),
            "vertices": len(self.valid()),
            "faces": len(self.faces),
            "singular_vertices": len(self.singular_vertices),
            "max_quadric_error": self.max_quadric_error(),
            **{k: v for k, v in self.metadata.items() if k != "crossings"},
        }


def _neighbors(shape, v):
    i, j = v
    for di, dj in ((0, 1), (1, 0), (0, -1), (-1, 0)):
        a, b = i + di, j + dj
        if 0 <= a < shape[0] and 0 <= b < shape[1]:
            yield (a, b)


def _blocked(zs: np.ndarray, sing: list, radius: float) -> np.ndarray:
    out = np.zeros(zs.shape, dtype=bool)
    for s in sing:
        out |= np.abs(zs - s) < radius
    return out


def build_mesh(data: SurfaceData, grid: DomainGrid, *, rtol: float = 1e-10, atol: float = 1e-12,
               threshold: float | None = None) -> SurfaceMesh:
    """Develop the frame over the grid and map every reachable vertex to the ambient space."""
    zs = grid.points()
    shape = zs.shape
    sing = [complex(s) for s in data.singular_points()]
    blocked = _blocked(zs, sing, grid.exclusion)
    clearance = grid.exclusion / 2
    if threshold is None:
        threshold = 1e-3
    warnings: list[str] = []

    free = [(i, j) for i in range(shape[0]) for j in range(shape[1]) if not blocked[i, j]]
    if not free:
        raise ValueError("every grid vertex lies inside an exclusion disk")
    root = min(free, key=lambda v: (abs(zs[v] - data.base), v))
    states: dict = {}
    try:
        states[root] = frame_at(data, complex(zs[root]), rtol, atol)
    except (ClearanceError, IntegrationError) as exc:
        raise ValueError(f"cannot reach the grid from the base point: {exc}") from exc

    queue = deque([root])
    while queue:
        v = queue.popleft()
        for w in _neighbors(shape, v):
            if w in states or blocked[w]:
                continue
            path = PathSpec((grid.edge_segment(v, w),), clearance)
            try:
                states[w] = continue_frame(data, path, start=states[v], rtol=rtol, atol=atol)
            except (ClearanceError, IntegrationError) as exc:
                warnings.append(f"edge {v}->{w} dropped: {exc}")
                log.warning("edge %s->%s dropped: %s", v, w, exc)
                continue
            queue.append(w)

    vertices: list = [None] * (shape[0] * shape[1])
    singular: set = set()
    gvals: dict = {}
    drift = 0.0
    for (i, j), st in states.items():
        k = i * shape[1] + j
        try:
            pt = ambient_point(data, st, threshold)
        except ValueError as exc:
            warnings.append(f"vertex {(i, j)} dropped: {exc}")
            continue
        vertices[k] = pt
        drift = max(drift, st.det_drift)
        if data.ambient == S31:
            gvals[(i, j)] = st.g_value(data)
            if pt.singular:
                singular.add(k)

    crossings = []
    if data.ambient == S31:
        crossings = _singular_band(data, grid, states, gvals, singular, shape)

    faces = []
    for i in range(shape[0] - 1):
        for j in range(shape[1] - 1):
            quad = [i * shape[1] + j, i * shape[1] + j + 1, (i + 1) * shape[1] + j + 1, (i + 1) * shape[1] + j]
            if all(vertices[q] is not None for q in quad):
                faces.append(quad)

    meta = {
        "surface": data.name,
        "root": [int(root[0]), int(root[1])],
        "det_drift": drift,
        "warnings": warnings,
        "crossings": crossings,
    }
    if grid.chart == POLAR:
        meta["seam_mismatch"] = _seam_mismatch(vertices, shape)
    return SurfaceMesh(data.ambient, grid, zs, vertices, faces, singular, meta)


def _seam_mismatch(vertices: list, shape) -> float | None:
    worst = None
    for i in range(shape[0]):
        a, b = vertices[i * shape[1]], vertices[i * shape[1] + shape[1] - 1]
        if a is None or b is None:
            continue
        d = float(np.linalg.norm(np.subtract(a.minkowski, b.minkowski)))
        worst = d if worst is None else max(worst, d)
    return worst


def _singular_band(data, grid, states, gvals, singular, shape) -> list:
    """Flag the vertex nearer to each |g| = 1 crossing, located by one bisection."""
    crossings = []
    for v, gv in gvals.items():
        for w in ((v[0] + 1, v[1]), (v[0], v[1] + 1)):
            if w not in gvals:
                continue
            fa, fb = abs(gvals[v]) - 1, abs(gvals[w]) - 1
            if not (np.isfinite(fa) and np.isfinite(fb)) or fa * fb > 0 or fa == fb:
                continue
            seg = grid.edge_segment(v, w)
            mid = seg.point(seg.length / 2)
            if data.g is not None:
                fm = abs(data.g(mid, states[v].branch_state)) - 1
            else:
                half = PathSpec((_half(seg),), grid.exclusion / 2)
                fm = abs(continue_frame(data, half, start=states[v]).g_value(data)) - 1
            if fa * fm <= 0:
                near, t = v, 0.5 * fa / (fa - fm) if fa != fm else 0.25
            else:
                near, t = w, 0.5 + 0.5 * fm / (fm - fb) if fm != fb else 0.75
            singular.add(near[0] * shape[1] + near[1])
            z = seg.point(seg.length * t)
            crossings.append([z.real, z.imag])
    return crossings


def _half(seg):
    if isinstance(seg, Arc):
        return Arc(seg.center, seg.radius, seg.t0, (seg.t0 + seg.t1) / 2)
    return Line(seg.a, (seg.a + seg.b) / 2)


# --------------------------------------------------------------------------
# export
# --------------------------------------------------------------------------

BALL = "ball"
MINKOWSKI = "minkowski"


def _coords(mesh: SurfaceMesh, model: str):
    if model not in (BALL, MINKOWSKI):
        raise ValueError(f"model must be {BALL!r} or {MINKOWSKI!r}")
    if model == BALL and mesh.ambient != H3:
        raise ValueError("the ball model is only defined for hyperbolic space; use minkowski")
    keep = mesh.valid()
    if not keep:
        raise ValueError("mesh has no vertices")
    remap = {k: n for n, k in enumerate(keep)}
    xyz = []
    for k in keep:
        v = mesh.vertices[k]
        xyz.append(v.ball if model == BALL else v.minkowski[1:])
    faces = [[remap[q] for q in f] for f in mesh.faces]
    return keep, xyz, faces


def export(mesh: SurfaceMesh, path, fmt: str | None = None, model: str = BALL) -> Path:
    """Write OBJ (positions + faces) or ASCII PLY (positions, x0, singular flag)."""
    path = Path(path)
    fmt = (fmt or path.suffix.lstrip(".")).lower()
    if fmt not in ("obj", "ply"):
        raise ValueError("format must be obj or ply")
    keep, xyz, faces = _coords(mesh, model)
    lines = []
    if fmt == "obj":
        lines.append(f"# {mesh.metadata.get('surface', '')} {mesh.ambient} {model}")
        lines += [f"v {x:.12g} {y:.12g} {z:.12g}" for x, y, z in xyz]
        lines += ["f " + " ".join(str(q + 1) for q in f) for f in faces]
    else:
        lines += [
            "ply",
            "format ascii 1.0",
            f"comment surface {mesh.metadata.get('surface', '')} ambient {mesh.ambient} model {model}",
            f"element vertex {len(xyz)}",
            "property double x",
            "property double y",
            "property double z",
            "property double x0",
            "property uchar singular",
            f"element face {len(faces)}",
            "property list uchar int vertex_indices",
            "end_header",
        ]
        for k, (x, y, z) in zip(keep, xyz):
            flag = 1 if k in mesh.singular_vertices else 0
            lines.append(f"{x:.12g} {y:.12g} {z:.12g} {mesh.vertices[k].minkowski[0]:.12g} {flag}")
        lines += [f"{len(f)} " + " ".join(map(str, f)) for f in faces]
    path.write_text("\n".join(lines) + "\n")
    return path


__all__ = [
    "BALL",
    "CARTESIAN",
    "DomainGrid",
    "MINKOWSKI",
    "POLAR",
    "SurfaceMesh",
    "build_mesh",
    "export",
]
