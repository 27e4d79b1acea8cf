"""The nine acceptance criteria, each at its stated tolerance and time budget.

Every criterion is a function returning (ok, detail); the pytest wrappers
record the outcome so the terminal summary prints one PASS/FAIL line per
criterion.  Running this file directly prints the same lines.
"""

from __future__ import annotations

import sys
import time
from fractions import Fraction

import numpy as np
import pytest

import conftest
import oracles
from cmc1 import catalog
from cmc1.algebra import INF, RationalMap, branch_points, mobius
from cmc1.develop import PathSpec, continue_frame, monodromy
from cmc1.frobenius import e0_coefficient, indicial, log_term, theta_scan
from cmc1.gaussian import GaussianRational
from cmc1.mesh import DomainGrid, build_mesh
from cmc1.ramify import DivisorData, PuncturedSphere, divisor_consistency, face_inequality, nu_value, osserman_bound
from cmc1.surface import MeroDifferential, end_report, nondegeneracy_check, schwarzian, verify_schwarz
from cmc1.surface import dual_total_curvature

F = Fraction
DRIFT_PER_LENGTH = 1e-8


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


# --------------------------------------------------------------------------
# 1. ramification table
# --------------------------------------------------------------------------


def criterion_1():
    cases = [("voss-k3", {}, (3, F(3), F(3))), ("voss-k4", {}, (4, F(4), F(4)))]
    cases += [("power-n", {"n": GaussianRational(n)}, (1, 2 - F(1, n), 2 - F(1, n))) for n in range(1, 7)]
    cases += [("catenoid-cousin", {"n": GaussianRational(n)}, (2, F(2), F(2))) for n in range(1, 5)]
    datas = [(name, catalog.build(name, **p), want) for name, p, want in cases]

    def run():
        return [(name, want, nu_value(d.G, d.M)) for name, d, want in datas]

    results, dt = _timed(run)
    bad = [f"{name}: got {(r.D_G, r.nu, r.bound)}" for name, want, r in results
           if (r.D_G, r.nu, r.bound) != want or not isinstance(r.nu, Fraction)]
    ok = not bad and dt < 1.0
    return ok, f"{len(results)} surfaces exact, {dt:.2f}s (< 1 s)" + ("; " + "; ".join(bad) if bad else "")


# --------------------------------------------------------------------------
# 2. bound formula
# --------------------------------------------------------------------------


def criterion_2():
    fails = []
    if osserman_bound(0, 3, 2).bound != F(5, 2):
        fails.append("osserman_bound(0,3,2) != 5/2")
    for n in range(1, 11):
        if osserman_bound(0, 2, n).bound != 2:
            fails.append(f"osserman_bound(0,2,{n}) != 2")
    # ratio exactly 1: (0, 4, 1) has (-1 + 2)/1 = 1
    if osserman_bound(0, 4, 1).ratio != 1 or not osserman_bound(0, 4, 1).valid:
        fails.append("ratio 1 should be admissible without the algebraic flag")
    if osserman_bound(0, 4, 1, algebraic=True).valid:
        fails.append("algebraic flag accepted ratio 1")
    return not fails, "5/2, 2 for n=1..10, ratio 1 rejected when algebraic" if not fails else "; ".join(fails)


# --------------------------------------------------------------------------
# 3. Frobenius analysis of the three-ended family
# --------------------------------------------------------------------------


def criterion_3():
    grid = oracles.fraction_grid(F(-10), F(0), F(1, 10))
    entry = catalog.lookup("prop27-surface")

    def run():
        rows = theta_scan(lambda th: entry.build(theta=GaussianRational(th)), grid)
        roots = set()
        for th in grid:
            if th == 0:
                continue
            d = entry.build(theta=GaussianRational(th))
            r = e0_coefficient(d.G, d.Q)
            for p in (GaussianRational(0), GaussianRational(1)):
                roots.add(indicial(r, p))
        return rows, roots

    (rows, roots), dt = _timed(run)
    fails = []
    want_roots = {(GaussianRational(2), GaussianRational(-1))}
    if roots != want_roots:
        fails.append(f"indicial roots {roots}")
    excluded = [r.theta for r in rows if r.excluded]
    if excluded != [F(0)]:
        fails.append(f"excluded {excluded}, expected only theta = 0")
    vanish = sorted(r.theta for r in rows if r.vanishing)
    if vanish != [F(-6), F(-2)]:
        fails.append(f"vanishing locus {vanish}")

    # floating cross-check of every nonvanishing grid point
    worst_small = np.inf
    for th in grid:
        if th == 0 or th in (-2, -6):
            continue
        d = catalog.to_float(entry.build(theta=GaussianRational(th)))
        r = e0_coefficient(d.G, d.Q)
        m = min(abs(complex(log_term(r, p))) for p in (0j, 1 + 0j))
        worst_small = min(worst_small, m)
    if not worst_small > 1e-12:
        fails.append(f"floating log term as small as {worst_small:.3g}")
    if dt >= 5.0:
        fails.append(f"runtime {dt:.2f}s")
    detail = f"roots (2,-1) at 0 and 1; vanishing {{-6,-2}}; min float |c| off locus {worst_small:.3g}; {dt:.2f}s (< 5 s)"
    return not fails, detail if not fails else "; ".join(fails)


# --------------------------------------------------------------------------
# 4. dual total curvature
# --------------------------------------------------------------------------


def criterion_4():
    z = RationalMap.z()
    rng = np.random.default_rng(4)
    maps = [("z", z), ("z^2", z**2), ("z^3", z**3), ("((z-1)/z)^3", ((z - 1) / z) ** 3)]
    for d in (4, 5):
        while True:
            R = RationalMap(oracles.random_poly(rng, d), oracles.random_poly(rng, d - 1))
            if R.degree == d:
                break
        maps.append((f"random degree {d}", R))

    def run():
        return [(name, R.degree, dual_total_curvature(R) / (4 * np.pi)) for name, R in maps]

    rows, dt = _timed(run)
    bad = [f"{n}: {v:.5f} vs {d}" for n, d, v in rows if abs(v - d) > 0.01 * d]
    prop = catalog.build("prop27-surface")
    ta = dual_total_curvature(prop.G)
    if abs(ta - 12 * np.pi) > 0.01 * 12 * np.pi:
        bad.append(f"prop27 TA {ta:.6f} vs 12 pi")
    if dt >= 30:
        bad.append(f"runtime {dt:.1f}s")
    worst = max(abs(v - d) / d for _, d, v in rows)
    return not bad, f"worst relative error {worst:.2e}, prop27 TA/pi = {ta / np.pi:.6f}; {dt:.2f}s (< 30 s)" + (
        "; " + "; ".join(bad) if bad else "")


# --------------------------------------------------------------------------
# 5. Riemann-Hurwitz and divisor consistency
# --------------------------------------------------------------------------


def admissible_pair(rng):
    """Random (G, Q, ends) with Q = -W/P: the dual form D^2/P dz vanishes to order 2m at poles of G."""
    while True:
        G = oracles.random_map(rng, 4)
        W = G.num.derivative() * G.den - G.num * G.den.derivative()
        k = int(rng.integers(1, 4))
        pts = []
        while len(pts) < k:
            a = oracles.gaussian_int(rng, 3)
            if a not in pts:
                pts.append(a)
        P = RationalMap.const(GaussianRational(1))
        for a in pts:
            P = P * (RationalMap.z() - a) ** int(rng.integers(1, 3))
        Q = MeroDifferential(RationalMap(W) * GaussianRational(-1) / P, 2)
        M = PuncturedSphere(tuple(pts) + (INF,))
        if nondegeneracy_check(G, Q, M).passed:
            return G, Q, M


def criterion_5():
    rng = np.random.default_rng(5)
    bad = []
    for _ in range(200):
        R = oracles.random_map(rng, 6)
        total = sum(b for _, b in branch_points(R))
        if total != 2 * R.degree - 2:
            bad.append(f"{R}: {total}")
    inconsistent = 0
    for _ in range(100):
        G, Q, M = admissible_pair(rng)
        ends = tuple((e.mu_sharp, e.d_j) for e in (end_report(G, Q, p) for p in M.punctures))
        if not divisor_consistency(DivisorData(0, ends, G.degree)).consistent:
            inconsistent += 1
    ok = not bad and inconsistent == 0
    return ok, f"200 maps: sum of branch orders = 2d-2 ({len(bad)} failures); 100 pairs: {inconsistent} inconsistent"


# --------------------------------------------------------------------------
# 6. Schwarzian identity
# --------------------------------------------------------------------------


def criterion_6():
    cat = catalog.build("catenoid-cousin", n=GaussianRational(2), l=GaussianRational(F(1, 2)))
    enn = catalog.build("enneper-cousin-dual", theta=GaussianRational(1))
    r1 = verify_schwarz(cat, samples=50, tol=1e-8, seed=6)
    r2 = verify_schwarz(enn, samples=50, tol=1e-8, seed=6)
    rng = np.random.default_rng(6)
    cocycle_fail = 0
    for _ in range(20):
        h = oracles.random_map(rng, 4)
        while True:
            a, b, c, d = (oracles.gaussian_int(rng, 3) for _ in range(4))
            if a * d - b * c != 0:
                break
        T = mobius(a, b, c, d)
        if schwarzian(T.compose(h)).coeff != schwarzian(h).coeff:
            cocycle_fail += 1
    ok = r1.passed and r2.passed and len(r1.points) == 50 and cocycle_fail == 0
    return ok, (f"residuals {r1.max_residual:.2e} (catenoid), {r2.max_residual:.2e} (Enneper dual); "
                f"cocycle exact on 20 pairs ({cocycle_fail} failures)")


# --------------------------------------------------------------------------
# 7. monodromy
# --------------------------------------------------------------------------


def criterion_7():
    cat = catalog.build("catenoid-cousin")
    enn = catalog.build("enneper-cousin-dual")
    m1 = monodromy(cat, puncture=GaussianRational(0))
    m2 = monodromy(enn, basepoint=0.5, puncture=INF, radius=1.0)
    seg = continue_frame(enn, PathSpec.polyline([0, 1]))
    runs = [(m1.det_drift, m1.path.length), (m2.det_drift, m2.path.length), (seg.det_drift, seg.arclength)]
    drift = max(d / L for d, L in runs)
    su2 = float(np.linalg.norm(m1.matrix @ m1.matrix.conj().T - np.eye(2)))
    ok = su2 < 1e-6 and m1.cls == "SU(2)" and m2.identity_defect < 1e-8 and drift < DRIFT_PER_LENGTH
    return ok, (f"catenoid |MM*-I| = {su2:.2e} ({m1.cls}); Enneper dual |M-I| = {m2.identity_defect:.2e}; "
                f"max det drift per unit length {drift:.2e}")


# --------------------------------------------------------------------------
# 8. ambient invariants on meshes
# --------------------------------------------------------------------------


def criterion_8():
    cat = build_mesh(catalog.build("catenoid-cousin"), DomainGrid.polar(0.2, 5, 14, 24))
    egrid = DomainGrid.polar(0.3, 3, 21, 24)
    ell = build_mesh(catalog.build("elliptic-catenoid"), egrid)
    enn = build_mesh(catalog.build("enneper-cousin-dual"), DomainGrid.cartesian(-1, 1, -1, 1, 11, 11))
    par = build_mesh(catalog.build("parabolic-catenoid"), DomainGrid.polar(0.3, 3, 11, 16))
    meshes = [cat, ell, enn, par]
    quad = max(m.max_quadric_error() for m in meshes)
    counts = [len(m.valid()) for m in meshes]
    full = all(c == m.grid.shape[0] * m.grid.shape[1] for c, m in zip(counts, meshes))

    radii = egrid.radii()
    # the grid cell straddling |z| = 1, measured radially
    cell = max(b - a for a, b in zip(radii, radii[1:]) if a <= 1 <= b)
    zs = egrid.points().ravel()
    band = sorted(ell.singular_vertices)
    off = max(abs(abs(zs[k]) - 1) for k in band) if band else np.inf
    cols = {k % egrid.shape[1] for k in band}
    seam = cat.metadata["seam_mismatch"]
    ok = full and quad < 1e-6 and band and off <= cell and len(cols) == egrid.shape[1] and seam < 1e-6
    return bool(ok), (f"{sum(counts)} vertices, max quadric error {quad:.2e}; singular band of {len(band)} vertices, "
                      f"max ||z|-1| = {off:.3f} <= cell {cell:.3f}; seam mismatch {seam:.2e}")


# --------------------------------------------------------------------------
# 9. face inequality
# --------------------------------------------------------------------------


def criterion_9():
    fails = []
    r = face_inequality(0, 2, 1)
    if not (r.holds and r.equality):
        fails.append("(0,2,1) is not an equality")
    faces = [e for e in catalog.catalog_list() if e.face]
    variants = [catalog.build("elliptic-catenoid", mu=GaussianRational(mu)) for mu in (F(1, 3), F(1, 2), F(2), F(5, 2))]
    variants += [e.build() for e in faces]
    for d in variants:
        rep = nu_value(d.G, d.M)
        fr = face_inequality(0, d.M.k, d.G.degree)
        if not (fr.holds and fr.equality):
            fails.append(f"{d.name}: face inequality not an equality")
        if rep.D_G > fr.max_exceptional or fr.max_exceptional != 3 or (rep.D_G, rep.nu) != (2, 2):
            fails.append(f"{d.name}: D_G = {rep.D_G}, nu = {rep.nu}")
    return not fails, f"(0,2,1) equality; D_G = nu_G = 2 <= 3 on {len(variants)} face instances" if not fails else "; ".join(fails)


# --------------------------------------------------------------------------

CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9}


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_acceptance_criterion(k):
    t0 = time.perf_counter()
    try:
        ok, detail = CRITERIA[k]()
    except Exception as exc:  # recorded as FAIL, then re-raised for the traceback
        conftest.ACCEPTANCE[k] = (False, f"raised {type(exc).__name__}: {exc}")
        raise
    conftest.ACCEPTANCE_SECONDS[k] = time.perf_counter() - t0
    conftest.ACCEPTANCE[k] = (ok, detail)
    print(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def test_acceptance_total_runtime():
    """Desk-scale budget: the nine criteria together in under two minutes."""
    if len(conftest.ACCEPTANCE_SECONDS) < len(CRITERIA):
        pytest.skip("needs the full criterion run")
    assert sum(conftest.ACCEPTANCE_SECONDS.values()) < 120


if __name__ == "__main__":
    failed = 0
    for k, fn in CRITERIA.items():
        ok, detail = fn()
        failed += not ok
        print(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
    sys.exit(1 if failed else 0)
