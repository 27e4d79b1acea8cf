from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from cmc1 import catalog
from cmc1.algebra import INF, RationalMap, derivative, mobius
from cmc1.expr import Const, ExprFunction, Var, power
from cmc1.gaussian import GaussianRational as GR
from cmc1.ramify import PuncturedSphere
from cmc1.surface import (
    H3,
    MeroDifferential,
    QuadratureError,
    SurfaceData,
    dual_omega,
    dual_total_curvature,
    end_report,
    hopf,
    nondegeneracy_check,
    schwarzian,
    verify_schwarz,
)

z = RationalMap.z()
F = Fraction
one = RationalMap.const(GR(1))


def _md(R, w=2):
    return MeroDifferential(R, w)


# hopf / dual -----------------------------------------------------------------------


def test_hopf_examples():
    assert hopf(z, _md(one, 1)).coeff == one
    assert hopf(z**2, _md(one, 1)).coeff == 2 * z


def test_hopf_catenoid_roundtrip():
    n, l = 2, F(1, 2)
    c = (n * n - l * l) / (4 * l)
    g = ExprFunction(Const(GR(c)) * power(Var(), Const(GR(l))))
    Qc = GR((n * n - l * l) / 4) / z**2
    # omega = Q/dg, then omega dg gives back Q
    Qf = Qc.to_float()
    omega = MeroDifferential(lambda w, state=None: complex(Qf(w)) / g.derivative_value(w), 1)
    Q = hopf(g, omega)
    for w in (0.7, 1.3 + 0.4j, -0.2 + 2j):
        assert abs(Q(w) - complex(Qc.to_float()(w))) < 1e-12


def test_dual_omega_examples():
    th = GR(3)
    assert dual_omega(z, _md(RationalMap.const(th))).coeff == RationalMap.const(-th)
    for n in range(1, 5):
        c = GR(F(5, 7))
        got = dual_omega(z**n, _md(c / z**2)).coeff
        assert got == (-c / n) / z ** (n + 1)
    prod = (z + 1) * (z - 1) * (z - GR(0, 1))
    assert dual_omega(z, _md(one / prod)).coeff == -one / prod


def test_duality_negates_hopf():
    rng = np.random.default_rng(0)
    for _ in range(10):
        g = oracles.random_map(rng, 3)
        omega = _md(oracles.random_map(rng, 3), 1)
        Q = hopf(g, omega)
        G = oracles.random_map(rng, 3)
        w_sharp = dual_omega(G, Q)
        assert (w_sharp.coeff * derivative(G)) == -Q.coeff


def test_dual_omega_needs_nonconstant_G():
    with pytest.raises(ZeroDivisionError):
        dual_omega(RationalMap.const(GR(2)), _md(one))


# Schwarzian -------------------------------------------------------------------------


def test_schwarzian_examples():
    assert schwarzian(z).coeff.is_zero()
    for n in range(1, 7):
        assert schwarzian(z**n).coeff == GR(F(1 - n * n, 2)) / z**2
    assert schwarzian(((z - 1) / z) ** 3).coeff == GR(-4) / (z**2 * (z - 1) ** 2)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31))
def test_schwarzian_matches_sympy(seed):
    h = oracles.random_map(np.random.default_rng(seed), 4)
    assert oracles.same_ratio(schwarzian(h).coeff, oracles.quotient_schwarzian(h))


def test_schwarzian_float_mode():
    h = ((z - 1) / z) ** 3
    Sf = schwarzian(h.to_float()).coeff
    for w in (0.3 + 0.1j, 2.0, -1 - 1j):
        assert abs(complex(Sf(w)) - (-4 / (w * w * (w - 1) ** 2))) < 1e-9


def test_expression_schwarzian_matches_sympy():
    th = sp.Rational(3, 2)
    g_sym = sp.tan(sp.sqrt(th) * oracles.Z)
    S_sym = sp.lambdify(oracles.Z, oracles.sym_schwarzian(g_sym))
    data = catalog.build("enneper-cousin-dual", theta=GR(F(3, 2)))
    S = schwarzian(data.g).coeff
    for w in (0.1 + 0.2j, 0.5, -0.3 + 0.4j):
        assert abs(S(w) - complex(S_sym(w))) < 1e-10


def test_schwarzian_of_constant_rejected():
    with pytest.raises(ZeroDivisionError):
        schwarzian(RationalMap.const(GR(1)))


def test_verify_schwarz_examples():
    cat = catalog.build("catenoid-cousin", n=GR(2), l=GR(F(1, 2)))
    assert verify_schwarz(cat, samples=50).passed
    enn = catalog.build("enneper-cousin-dual", theta=GR(1))
    assert verify_schwarz(enn, samples=50).passed
    # g and G Moebius-equal with Q = 0
    G = (z + 1) / (z - 2)
    data = SurfaceData("moebius", G, _md(RationalMap(0)), PuncturedSphere((INF,)), H3, ExprFunction("(/ (+ z 1) (- z 2))"))
    rep = verify_schwarz(data, samples=20)
    assert rep.max_residual < 1e-12


def test_verify_schwarz_detects_wrong_Q():
    cat = catalog.build("catenoid-cousin", n=GR(2), l=GR(F(1, 2)))
    wrong = SurfaceData(cat.name, cat.G, _md(cat.Q.coeff * GR(2)), cat.M, H3, cat.g)
    assert not verify_schwarz(wrong, samples=10).passed


def test_verify_schwarz_needs_g():
    with pytest.raises(ValueError):
        verify_schwarz(catalog.build("prop27-surface"))


# ends and nondegeneracy ---------------------------------------------------------------


def test_end_report_examples():
    c = GR(F(3, 4))
    for n in range(1, 5):
        r = end_report(z**n, _md(c / z**2), GR(0))
        assert (r.mu_sharp, r.d_j, r.pole_order_omega_sharp, r.algebraic) == (n - 1, -2, n + 1, True)
        r = end_report(z**n, _md(GR(2) * z ** (n - 1)), INF)
        assert (r.mu_sharp, r.d_j, r.pole_order_omega_sharp, r.algebraic) == (n - 1, -n - 3, 2 * n + 2, True)
    r = end_report(z, _md(one), INF)
    assert (r.mu_sharp, r.d_j, r.pole_order_omega_sharp) == (0, -4, 4)


def test_end_report_matches_dual_form_order():
    # metric (1 + |G|^2)|omega_sharp|: divisor of omega_sharp plus twice the poles of G
    G, Q = ((z - 1) / z) ** 3, _md(GR(-2) / (z * (z - 1)))
    ws = dual_omega(G, Q)
    for p in (GR(0), GR(1), INF):
        g_poles = max(0, -G.order_at(p))
        assert end_report(G, Q, p).pole_order_omega_sharp == -ws.order_at(p) + 2 * g_poles


def test_nondegeneracy_examples():
    cat = catalog.build("catenoid-cousin")
    assert nondegeneracy_check(cat.G, cat.Q, cat.M).passed
    bad = nondegeneracy_check(z**2, _md(one), PuncturedSphere((INF,)))
    assert not bad.passed
    assert bad.violations[0]["point"] == ["0", "0"] and bad.violations[0]["branching"] == 1
    prop = catalog.build("prop27-surface")
    assert nondegeneracy_check(prop.G, prop.Q, prop.M).passed


def test_dual_form_divisor_degree():
    rng = np.random.default_rng(3)
    for _ in range(15):
        G = oracles.random_map(rng, 4)
        Q = _md(oracles.random_map(rng, 4))
        assert dual_omega(G, Q).divisor_degree() == -2


# dual total curvature --------------------------------------------------------------------


@pytest.mark.parametrize("G,d", [(z, 1), (((z - 1) / z) ** 3, 3), (z**2, 2)])
def test_dual_total_curvature_examples(G, d):
    assert abs(dual_total_curvature(G) - 4 * math.pi * d) < 0.01 * 4 * math.pi * d


def test_dual_total_curvature_against_quadrature():
    G = (z**2 + GR(0, 1)) / (z - 2)

    def dens(w):
        g = (w * w + 1j) / (w - 2)
        dg = (w * w - 4 * w - 1j) / (w - 2) ** 2
        return 4 * np.abs(dg) ** 2 / (1 + np.abs(g) ** 2) ** 2

    # polar tensor rule on the unit disk, outside through z = 1/w
    x, wx = np.polynomial.legendre.leggauss(200)
    r, wr = (x + 1) / 2, wx / 2
    t = np.linspace(0, 2 * math.pi, 400, endpoint=False)
    R, T = np.meshgrid(r, t)
    W = R * np.exp(1j * T)
    inner = dens(W)
    outer = dens(1 / W) / np.abs(W) ** 4
    total = ((inner + outer) * R).sum(axis=0) @ wr * (2 * math.pi / len(t))
    assert abs(total - 4 * math.pi * 2) < 1e-6
    assert abs(dual_total_curvature(G) - total) < 1e-6 * total


def test_dual_total_curvature_reports_nonconvergence():
    with pytest.raises(QuadratureError):
        dual_total_curvature(z**5 * 40, rel_tol=1e-14, max_rects=40)


# serialization ----------------------------------------------------------------------------


def test_surface_json_roundtrip():
    for name in ("catenoid-cousin", "prop27-surface", "parabolic-catenoid"):
        d = catalog.build(name)
        back = SurfaceData.from_json(d.to_json())
        assert back.G == d.G and back.Q.coeff == d.Q.coeff
        assert back.M.punctures == d.M.punctures and back.ambient == d.ambient
        if d.g is not None:
            for w in (0.7 + 0.2j, 1.5):
                assert abs(back.g(w) - d.g(w)) < 1e-14


def test_mobius_kernel():
    T = mobius(GR(2), GR(1), GR(1), GR(3))
    assert schwarzian(T).coeff.is_zero()
