"""Figures written next to CLI reports (matplotlib, Agg backend)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .algebra import branch_points, is_inf  # noqa: E402
from .surface import H3, SurfaceData  # noqa: E402


def _save(fig, path) -> Path:
    path = Path(path)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_data(data: SurfaceData, path, extent: float | None = None) -> Path:
    """Punctures, branch points of G and the |g| = 1 locus when g is known."""
    fig, ax = plt.subplots(figsize=(5, 5))
    ends = [complex(p) for p in data.M.punctures if not is_inf(p)]
    crit = [complex(c) for c, _ in branch_points(data.G) if not is_inf(c)]
    pts = ends + crit + [complex(data.base)]
    R = extent or max([abs(p) for p in pts] + [1.0]) * 1.6
    if data.g is not None:
        from .develop import singular_locus

        for c in singular_locus(data.g, (-R, R), (-R, R), n=161, avoid=ends):
            ax.plot(c.real, c.imag, "-", color="tab:orange", lw=1)
    if ends:
        ax.plot([p.real for p in ends], [p.imag for p in ends], "kx", ms=9, label="ends")
    if crit:
        ax.plot([p.real for p in crit], [p.imag for p in crit], "o", mfc="none", color="tab:blue", label="branch points of G")
    ax.plot([data.base.real], [data.base.imag], "g.", ms=10, label="base point")
    ax.set_xlim(-R, R)
    ax.set_ylim(-R, R)
    ax.set_aspect("equal")
    ax.set_title(data.name)
    ax.legend(loc="upper right", fontsize=8)
    return _save(fig, path)


def plot_theta_scan(rows, path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 3.5))
    if rows and rows[0].log_terms:
        n = max(len(r.log_terms) for r in rows)
        for k in range(n):
            th, mag = [], []
            for r in rows:
                if r.excluded or k >= len(r.log_terms) or r.log_terms[k][1] is None:
                    continue
                th.append(float(r.theta))
                mag.append(abs(complex(r.log_terms[k][1])))
            label = str(rows[0].log_terms[k][0]) if rows[0].log_terms else str(k)
            ax.semilogy(th, np.maximum(mag, 1e-17), ".-", label=f"end {label}")
    for r in rows:
        if r.vanishing:
            ax.axvline(float(r.theta), color="k", lw=0.5, ls=":")
    ax.set_xlabel("theta")
    ax.set_ylabel("|log-term coefficient|")
    ax.legend(fontsize=8)
    return _save(fig, path)


def plot_path(path_spec, path, singular=()) -> Path:
    fig, ax = plt.subplots(figsize=(5, 5))
    pts = np.array(path_spec.samples(0.01))
    ax.plot(pts.real, pts.imag, "-", color="tab:blue")
    ax.plot([pts[0].real], [pts[0].imag], "g.", ms=10)
    s = [complex(p) for p in singular]
    if s:
        ax.plot([p.real for p in s], [p.imag for p in s], "kx", ms=8)
    ax.set_aspect("equal")
    return _save(fig, path)


def plot_mesh(mesh, path) -> Path:
    fig = plt.figure(figsize=(6, 6))
    ax = fig.add_subplot(projection="3d")
    rows, cols = mesh.shape
    X = np.full((rows, cols, 3), np.nan)
    for k, v in enumerate(mesh.vertices):
        if v is None:
            continue
        X[k // cols, k % cols] = v.ball if mesh.ambient == H3 else v.minkowski[1:]
    ax.plot_wireframe(X[..., 0], X[..., 1], X[..., 2], lw=0.4, color="tab:blue")
    if mesh.singular_vertices:
        S = np.array([X[k // cols, k % cols] for k in sorted(mesh.singular_vertices)])
        ax.scatter(S[:, 0], S[:, 1], S[:, 2], color="tab:red", s=4)
    ax.set_title(f"{mesh.metadata.get('surface', '')} ({'ball' if mesh.ambient == H3 else 'x1, x2, x3'})")
    return _save(fig, path)


__all__ = ["plot_data", "plot_mesh", "plot_path", "plot_theta_scan"]
