"""Command line interface: ``cmc1 <verb> ...``, JSON on stdout (or ``--out``).

Exit status is 0 when every check in the report passes, 1 when a check
fails and 2 for usage errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import catalog as cat
from .algebra import INF, RationalMap, branch_points, is_inf, point_to_json
from .develop import (
    ClearanceError,
    IntegrationError,
    PathSpec,
    ambient_point,
    continue_frame,
    frame_at,
    monodromy,
)
from .frobenius import classify_reducibility, e0_coefficient, frobenius_report, parse_scan, theta_scan
from .gaussian import GaussianRational
from .mesh import BALL, CARTESIAN, MINKOWSKI, POLAR, DomainGrid, build_mesh, export
from .ramify import DivisorData, divisor_consistency, face_inequality, max_exceptional_bound, nu_value
from .surface import (
    S31,
    QuadratureError,
    SurfaceData,
    dual_omega,
    dual_total_curvature,
    end_report,
    nondegeneracy_check,
    verify_schwarz,
)


class UsageError(Exception):
    pass


def _json_default(o):
    if isinstance(o, GaussianRational):
        return o.to_strings()
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if o is INF:
        return "inf"
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _emit(obj: dict, out: str | None):
    text = json.dumps(obj, indent=2, default=_json_default)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


# --------------------------------------------------------------------------
# surface loading
# --------------------------------------------------------------------------


def _to_exact(data: SurfaceData) -> SurfaceData:
    def ex(R: RationalMap) -> RationalMap:
        return RationalMap(R.num.to_exact(), R.den.to_exact())

    from .ramify import PuncturedSphere
    from .surface import MeroDifferential

    pts = tuple(p if is_inf(p) else GaussianRational.approximate(complex(p), 10**12) for p in data.M.punctures)
    return replace(data, G=ex(data.G), Q=MeroDifferential(ex(data.Q.coeff), data.Q.weight), M=PuncturedSphere(pts))


def load_surface(args) -> tuple[SurfaceData, cat.CatalogEntry | None, dict]:
    name = args.surface
    try:
        params = cat.parse_params(getattr(args, "param", None))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    entry = None
    if Path(name).suffix == ".json" or Path(name).is_file():
        if params:
            raise UsageError("--param only applies to catalog surfaces")
        try:
            data = SurfaceData.from_json(json.loads(Path(name).read_text()))
        except (OSError, KeyError, ValueError) as exc:
            raise UsageError(f"cannot read surface file {name}: {exc}") from None
    else:
        try:
            entry = cat.lookup(name)
            data = entry.build(**params)
        except cat.UnknownSurface as exc:
            raise UsageError(exc.args[0]) from None
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if getattr(args, "float", False):
        data = cat.to_float(data)
    elif getattr(args, "exact", False) and not (data.G.exact and data.Q.coeff.exact):
        data = _to_exact(data)
    return data, entry, params


# --------------------------------------------------------------------------
# verbs
# --------------------------------------------------------------------------


def cmd_catalog(args) -> tuple[dict, bool]:
    entries = cat.catalog_list()
    if args.name:
        entries = [cat.lookup(args.name)]
    out = []
    ok = True
    for e in entries:
        item = e.to_json()
        if args.check:
            data = e.build()
            r = nu_value(data.G, data.M)
            got = (r.D_G, r.nu, r.bound)
            item["computed"] = {"D_G": got[0], "nu": str(got[1]), "bound": str(got[2])}
            item["match"] = got == e.expected()
            ok &= item["match"]
        out.append(item)
    return {"surfaces": out}, ok


def analyze_report(data: SurfaceData, expected=None, seed: int = 0, samples: int = 50,
                   curvature: bool = True) -> tuple[dict, dict]:
    """Composite report and a dict of named pass/fail checks."""
    checks: dict = {}
    rep = nu_value(data.G, data.M)
    out: dict = {"surface": data.to_json(), "ramification": rep.to_json()}
    if expected is not None:
        d, nu, b = expected
        out["expected"] = {"D_G": d, "nu": str(nu), "bound": str(b)}
        checks["expected_values"] = (rep.D_G, rep.nu, rep.bound) == (d, nu, b)
    bps = branch_points(data.G)
    rh = sum(b for _, b in bps)
    out["branch_points"] = [[point_to_json(p), m] for p, m in bps]
    checks["riemann_hurwitz"] = rh == 2 * data.G.degree - 2
    nd = nondegeneracy_check(data.G, data.Q, data.M)
    out["nondegeneracy"] = nd.to_json()
    ends = [end_report(data.G, data.Q, p) for p in data.M.punctures]
    out["ends"] = [e.to_json() for e in ends]
    div = divisor_consistency(DivisorData(0, [(e.mu_sharp, e.d_j) for e in ends], data.G.degree))
    out["divisor"] = div.to_json()
    if nd.passed:
        checks["divisor_consistency"] = div.consistent
    out["dual_omega"] = dual_omega(data.G, data.Q).to_json()
    e0 = e0_coefficient(data.G, data.Q, data.M.punctures)
    out["e0"] = e0.to_json()
    try:
        out["reducibility"] = classify_reducibility(data).to_json()
    except ValueError as exc:
        out["reducibility"] = {"case": "Inconclusive", "reasons": [str(exc)]}
    if data.ambient == S31:
        face = face_inequality(data.genus, data.M.k, data.G.degree)
        out["face"] = face.to_json()
        checks["face_inequality"] = face.holds
        checks["face_exceptional_gate"] = rep.D_G <= face.max_exceptional
    elif data.G.degree >= 1 and rep.valid:
        out["max_exceptional"] = max_exceptional_bound(data.genus)
    if curvature:
        try:
            ta = dual_total_curvature(data.G)
            out["dual_total_curvature"] = {"value": ta, "over_4pi": ta / (4 * math.pi), "degree": data.G.degree}
            checks["dual_total_curvature"] = abs(ta / (4 * math.pi) - data.G.degree) < 0.01 * data.G.degree
        except QuadratureError as exc:
            out["dual_total_curvature"] = {"error": str(exc)}
            checks["dual_total_curvature"] = False
    if data.g is not None:
        sch = verify_schwarz(data, samples=samples, seed=seed)
        out["schwarz"] = sch.to_json()
        checks["schwarz"] = sch.passed
    out["checks"] = checks
    return out, checks


def cmd_analyze(args):
    data, entry, params = load_surface(args)
    expected = entry.expected(**params) if entry is not None else None
    out, checks = analyze_report(data, expected, seed=args.seed, samples=args.samples, curvature=not args.no_curvature)
    if args.fig:
        from .plotting import plot_data

        out["figure"] = str(plot_data(data, args.fig))
    return out, all(checks.values())


def cmd_frobenius(args):
    data, entry, params = load_surface(args)
    e0 = e0_coefficient(data.G, data.Q, data.M.punctures)
    pts = [p for p, _ in e0.singular_points]
    reports = []
    for p in pts:
        try:
            reports.append(frobenius_report(e0, p).to_json())
        except ValueError as exc:
            reports.append({"point": point_to_json(p), "error": str(exc)})
    out = {"surface": data.name, "e0": e0.to_json(), "singular_points": reports}
    if args.theta_scan:
        if entry is None or "theta" not in entry.defaults:
            raise UsageError("--theta-scan needs a catalog surface with a theta parameter")
        try:
            thetas = parse_scan(args.theta_scan)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        others = {k: v for k, v in params.items() if k != "theta"}

        def make(th):
            return entry.build(theta=GaussianRational(th), **others)

        rows = theta_scan(make, thetas)
        out["scan"] = [r.to_json() for r in rows]
        out["vanishing_locus"] = [str(r.theta) for r in rows if r.vanishing]
        if args.fig:
            from .plotting import plot_theta_scan

            out["figure"] = str(plot_theta_scan(rows, args.fig))
    return out, True


def _load_path(text: str) -> PathSpec:
    p = Path(text)
    try:
        raw = json.loads(p.read_text()) if p.is_file() else json.loads(text)
        return PathSpec.from_json(raw)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"bad path specification: {exc}") from None


DRIFT_PER_LENGTH = 1e-8


def cmd_develop(args):
    data, _, _ = load_surface(args)
    path = _load_path(args.path)
    start = None
    if abs(path.start - complex(data.base)) > 1e-12:
        start = frame_at(data, path.start, args.rtol, args.atol)
    st = continue_frame(data, path, start=start, rtol=args.rtol, atol=args.atol)
    pt = ambient_point(data, st)
    out = {"surface": data.name, "base": data.base, "frame": st.to_json(), "point": pt.to_json()}
    ok = st.det_drift <= DRIFT_PER_LENGTH * max(1.0, st.arclength)
    out["checks"] = {"det_drift": ok}
    if args.fig:
        from .plotting import plot_path

        out["figure"] = str(plot_path(path, args.fig, data.singular_points()))
    return out, ok


def _parse_complex(text: str) -> complex:
    try:
        return complex(cat.parse_scalar(text))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_monodromy(args):
    data, _, _ = load_surface(args)
    ends = data.M.punctures
    if not 0 <= args.around < len(ends):
        raise UsageError(f"--around must index one of the {len(ends)} ends {[point_to_json(p) for p in ends]}")
    p = ends[args.around]
    base = _parse_complex(args.basepoint) if args.basepoint else None
    m = monodromy(data, base, p, radius=args.radius, rtol=args.rtol, atol=args.atol)
    out = {"surface": data.name, "around": point_to_json(p), **m.to_json()}
    ok = m.det_drift <= DRIFT_PER_LENGTH * max(1.0, m.path.length)
    out["checks"] = {"det_drift": ok}
    if args.fig:
        from .plotting import plot_path

        out["figure"] = str(plot_path(m.path, args.fig, data.singular_points()))
    return out, ok


def _floats(text: str, n: int, what: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"{what} must be {n} comma-separated numbers") from None
    if len(vals) != n:
        raise UsageError(f"{what} must be {n} comma-separated numbers")
    return vals


def _grid(args, data: SurfaceData) -> DomainGrid:
    chart = args.chart or (POLAR if any(not is_inf(p) and complex(p) == 0 for p in data.M.punctures) else CARTESIAN)
    try:
        if chart == POLAR:
            r0, r1 = _floats(args.range or "0.25,4", 2, "--range")
            n1, n2 = (int(x) for x in _floats(args.resolution or "12,24", 2, "--resolution"))
            center = _parse_complex(args.center) if args.center else 0j
            return DomainGrid.polar(r0, r1, n1, n2, center, args.exclusion)
        x0, x1, y0, y1 = _floats(args.range or "-1,1,-1,1", 4, "--range")
        n1, n2 = (int(x) for x in _floats(args.resolution or "15,15", 2, "--resolution"))
        return DomainGrid.cartesian(x0, x1, y0, y1, n1, n2, args.exclusion)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


QUADRIC_TOL = 1e-6


def _mesh(args):
    data, _, _ = load_surface(args)
    grid = _grid(args, data)
    mesh = build_mesh(data, grid, rtol=args.rtol, atol=args.atol)
    out = {"surface": data.name, **mesh.to_json()}
    err = mesh.max_quadric_error()
    checks = {"quadric": err < QUADRIC_TOL, "nonempty": bool(mesh.faces)}
    return data, mesh, out, checks


def cmd_mesh(args):
    data, mesh, out, checks = _mesh(args)
    if args.vertices:
        out["points"] = [v.to_json() if v is not None else None for v in mesh.vertices]
    if args.fig:
        from .plotting import plot_mesh

        out["figure"] = str(plot_mesh(mesh, args.fig))
    out["checks"] = checks
    return out, all(checks.values())


def cmd_export(args):
    data, mesh, out, checks = _mesh(args)
    model = args.model or (BALL if data.ambient != S31 else MINKOWSKI)
    try:
        path = export(mesh, args.file, args.format, model)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out["file"] = str(path)
    out["model"] = model
    if args.fig:
        from .plotting import plot_mesh

        out["figure"] = str(plot_mesh(mesh, args.fig))
    out["checks"] = checks
    return out, all(checks.values())


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write JSON here instead of stdout")
    common.add_argument("--seed", type=int, default=0, help="seed for all random sampling")
    common.add_argument("--fig", help="also render a figure to this file (png, pdf, svg)")
    mode = common.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="exact Gaussian-rational arithmetic")
    mode.add_argument("--float", action="store_true", help="floating-point arithmetic")

    surf = argparse.ArgumentParser(add_help=False)
    surf.add_argument("--surface", required=True, help="catalog name or surface JSON file")
    surf.add_argument("--param", action="append", metavar="KEY=VALUE", help="catalog parameter (repeatable)")

    tol = argparse.ArgumentParser(add_help=False)
    tol.add_argument("--rtol", type=float, default=1e-10)
    tol.add_argument("--atol", type=float, default=1e-12)

    p = argparse.ArgumentParser(prog="cmc1", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="verb", required=True)

    c = sub.add_parser("catalog", parents=[common], help="list built-in surfaces")
    c.add_argument("--name")
    c.add_argument("--check", action="store_true", help="recompute and compare the expected values")
    c.set_defaults(func=cmd_catalog)

    a = sub.add_parser("analyze", parents=[common, surf], help="value distribution and structural checks")
    a.add_argument("--samples", type=int, default=50)
    a.add_argument("--no-curvature", action="store_true", help="skip the dual total curvature quadrature")
    a.set_defaults(func=cmd_analyze)

    f = sub.add_parser("frobenius", parents=[common, surf], help="indicial roots and log terms")
    f.add_argument("--theta-scan", metavar="A:B:STEP")
    f.set_defaults(func=cmd_frobenius)

    d = sub.add_parser("develop", parents=[common, surf, tol], help="continue the frame along a path")
    d.add_argument("--path", required=True, help="path JSON (inline or file)")
    d.set_defaults(func=cmd_develop)

    m = sub.add_parser("monodromy", parents=[common, surf, tol], help="frame monodromy around an end")
    m.add_argument("--around", type=int, required=True, help="index into the list of ends")
    m.add_argument("--basepoint")
    m.add_argument("--radius", type=float)
    m.set_defaults(func=cmd_monodromy)

    for verb, func, helptext in (("mesh", cmd_mesh, "grid mesh summary"), ("export", cmd_export, "write OBJ or PLY")):
        s = sub.add_parser(verb, parents=[common, surf, tol], help=helptext)
        s.add_argument("--chart", choices=[POLAR, CARTESIAN])
        s.add_argument("--range", help="r_min,r_max (polar) or x0,x1,y0,y1 (cartesian)")
        s.add_argument("--resolution", help="n1,n2")
        s.add_argument("--center", help="polar center")
        s.add_argument("--exclusion", type=float, default=0.05)
        if verb == "mesh":
            s.add_argument("--vertices", action="store_true", help="include every vertex in the JSON")
        else:
            s.add_argument("--file", required=True, help="output .obj or .ply")
            s.add_argument("--format", choices=["obj", "ply"])
            s.add_argument("--model", choices=[BALL, MINKOWSKI])
        s.set_defaults(func=func)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out, ok = args.func(args)
    except (UsageError, cat.UnknownSurface, ClearanceError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        print(json.dumps({"error": msg}), file=sys.stderr)
        return 2
    except IntegrationError as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 1
    _emit(out, args.out)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
