from fractions import Fraction as F

import numpy as np
import pytest
import sympy as sp

import oracles
from cmc1 import catalog
from cmc1.algebra import INF, RationalMap
from cmc1.develop import ode_monodromy
from cmc1.frobenius import (
    OTHER,
    POSITIVE_INTEGER,
    REAL_NON_INTEGER,
    IrregularSingularPoint,
    _laurent_q,
    classify_reducibility,
    e0_coefficient,
    frobenius_report,
    indicial,
    log_term,
    parse_scan,
    theta_scan,
)
from cmc1.gaussian import GaussianRational as GR
from cmc1.surface import MeroDifferential

z = RationalMap.z()
Z = oracles.Z


def prop27_r(theta):
    d = catalog.build("prop27-surface", theta=GR(theta))
    return e0_coefficient(d.G, d.Q).r


def prop27_r_sym(theta):
    return -2 / (Z**2 * (Z - 1) ** 2) + theta / (Z * (Z - 1))


# e0 coefficient ---------------------------------------------------------------------------


@pytest.mark.parametrize("theta", [F(-2), F(3, 5), F(-6)])
def test_e0_prop27(theta):
    r = prop27_r(theta)
    assert r == GR(-2) / (z**2 * (z - 1) ** 2) + GR(theta) / (z * (z - 1))


def test_e0_flat_gauss_map():
    e = e0_coefficient(z, MeroDifferential(RationalMap.const(GR(F(7, 3))), 2))
    assert e.r == RationalMap.const(GR(F(7, 3)))
    # r is constant, so infinity carries a pole of order 4 and nothing finite is singular
    assert e.singular_points == ((INF, 4),)


@pytest.mark.parametrize("n,c", [(1, F(1)), (3, F(2)), (4, F(-1, 2))])
def test_e0_power(n, c):
    e = e0_coefficient(z**n, MeroDifferential(GR(c) / z**2, 2))
    want = sp.cancel(oracles.sym_schwarzian(Z**n) / 2 + sp.Rational(c.numerator, c.denominator) / Z**2)
    assert oracles.same_function(oracles.sym_map(e.r), want)
    assert e.r == GR(F(1 - n * n, 4) + c) / z**2


def test_e0_flags_irregular_end():
    e = e0_coefficient(z, MeroDifferential(RationalMap.const(GR(1)) / z**3, 2), ends=[GR(0)])
    assert any("ord Q = -3" in f for f in e.flags)
    assert any("irregular" in f for f in e.flags)


def test_e0_rejects_constant_gauss_map():
    with pytest.raises(ValueError):
        e0_coefficient(RationalMap.const(GR(2)), MeroDifferential(z, 2))


# indicial roots ---------------------------------------------------------------------------


@pytest.mark.parametrize("p", [GR(0), GR(1)])
@pytest.mark.parametrize("theta", [F(-2), F(-4), F(5, 3)])
def test_indicial_prop27_theta_independent(p, theta):
    assert indicial(prop27_r(theta), p) == (GR(2), GR(-1))


def test_indicial_trivial():
    r = RationalMap.const(GR(0)) / z**2
    assert indicial(r, GR(0)) == (GR(1), GR(0))


def test_indicial_sum_is_one_on_random_double_poles():
    rng = np.random.default_rng(5)
    for _ in range(20):
        c = oracles.gaussian_int(rng, 5) / GR(int(rng.integers(1, 6)))
        r = (c + z * oracles.gaussian_int(rng)) / (z**2 * (z - 3))
        l1, l2 = indicial(r, GR(0))
        assert l1 + l2 == GR(1)
        lam = sp.Symbol("lam")
        c_m2 = sp.limit(oracles.sym_map(r) * Z**2, Z, 0)
        want = sp.solve(lam * (lam - 1) + c_m2, lam)
        got = [complex(l1), complex(l2)]
        for w in want:
            assert min(abs(complex(w) - g) for g in got) < 1e-12


def test_indicial_irregular():
    with pytest.raises(IrregularSingularPoint, match="irregular singular point"):
        indicial(RationalMap.const(GR(1)) / z**3, GR(0))
    with pytest.raises(IrregularSingularPoint):
        indicial(RationalMap.const(GR(1)), INF)


def test_infinity_chart_matches_finite_chart():
    # k/z^2 is invariant under z -> 1/w as a quadratic differential
    for k in (F(3, 16), F(-2), F(5)):
        r = GR(k) / z**2
        assert indicial(r, INF) == indicial(r, GR(0))


def test_laurent_at_infinity_matches_sympy():
    w = sp.Symbol("w")
    r = prop27_r(F(-3))
    want = sp.series(prop27_r_sym(-3).subs(Z, 1 / w) / w**4 * w**2, w, 0, 5).removeO()
    got = _laurent_q(r, INF, 4)
    for k in range(5):
        assert oracles.sym_scalar(got[k]) == want.coeff(w, k)


def test_laurent_at_finite_point_matches_sympy():
    t = sp.Symbol("t")
    r = prop27_r(F(7, 2))
    want = sp.series(prop27_r_sym(sp.Rational(7, 2)).subs(Z, 1 + t) * t**2, t, 0, 6).removeO()
    got = _laurent_q(r, GR(1), 5)
    for k in range(6):
        assert oracles.sym_scalar(got[k]) == want.coeff(t, k)


# log term ---------------------------------------------------------------------------------


@pytest.mark.parametrize("theta,p", [(-2, 0), (-2, 1), (-6, 0), (-6, 1)])
def test_log_term_vanishes(theta, p):
    assert log_term(prop27_r(F(theta)), GR(p)) == 0


@pytest.mark.parametrize("theta", [-4, -1, 1, F(1, 2)])
def test_log_term_nonzero(theta):
    assert log_term(prop27_r(F(theta)), GR(0)) != 0


def test_log_obstruction_polynomial_roots():
    th = sp.Symbol("theta")
    for p in (0, 1):
        c = oracles.log_obstruction(prop27_r_sym(th), p, -1, 3)
        # theta = 0 is a root too, but there Q vanishes and no surface exists
        assert set(sp.solve(c, th)) == {-2, -6, 0}
        assert sp.Poly(c, th).degree() <= 3
    r0 = GR(-2) / (z**2 * (z - 1) ** 2)
    assert log_term(r0, GR(0)) == 0 and log_term(r0, GR(1)) == 0


@pytest.mark.parametrize("theta", [F(-4), F(3), F(-7, 3), F(1, 9)])
def test_log_term_matches_ansatz(theta):
    want = oracles.log_obstruction(prop27_r_sym(sp.Rational(theta.numerator, theta.denominator)), 0, -1, 3)
    assert oracles.sym_scalar(log_term(prop27_r(theta), GR(0))) == sp.nsimplify(want)


def test_log_term_general_resonance():
    # u'' + (c/z^2 + b/z) u = 0 with lambda1 - lambda2 = 2: c = -3/4
    for b in (F(0), F(1), F(2, 5)):
        r = GR(F(-3, 4)) / z**2 + GR(b) / z
        want = oracles.log_obstruction(-sp.Rational(3, 4) / Z**2 + sp.Rational(b.numerator, b.denominator) / Z,
                                        0, sp.Rational(-1, 2), 2)
        got = log_term(r, GR(0))
        assert oracles.sym_scalar(got) == sp.nsimplify(want)
        assert (got == 0) == (b == 0)


def test_log_term_float_mode():
    assert abs(log_term(prop27_r(F(-2)).to_float(), 0j)) < 1e-12
    assert abs(log_term(prop27_r(F(-4)).to_float(), 0j)) > 1e-3


def test_log_term_needs_resonance():
    with pytest.raises(ValueError, match="no integer resonance"):
        log_term(GR(F(3, 16)) / z**2, GR(0))


@pytest.mark.parametrize("theta,log_free", [(-2, True), (-6, True), (-4, False)])
def test_ode_monodromy_agrees_with_log_term(theta, log_free):
    # integer exponents: local monodromy is the identity iff no log term
    M = ode_monodromy(prop27_r(F(theta)), 0j, 0.5)
    dev = np.abs(M - np.eye(2)).max()
    assert (dev < 1e-7) == log_free, dev


def test_frobenius_report_fields():
    rep = frobenius_report(prop27_r(F(-2)), GR(0))
    assert rep.diff_class == POSITIVE_INTEGER and rep.log_free
    assert rep.c_minus2 == GR(-2)
    assert rep.to_json()["lambda1"] == ["2", "0"]
    rep = frobenius_report(GR(F(3, 16)) / z**2, GR(0))
    assert rep.diff_class == REAL_NON_INTEGER and rep.log_term is None
    rep = frobenius_report(GR(1) / z**2, GR(0))
    assert rep.diff_class == OTHER and rep.lambda1 + rep.lambda2 == GR(1)


# classification ---------------------------------------------------------------------------


def test_classify_prop27():
    assert classify_reducibility(catalog.build("prop27-surface", theta=GR(-2))).case == "i"
    assert classify_reducibility(catalog.build("prop27-surface", theta=GR(-6))).case == "i"
    out = classify_reducibility(catalog.build("prop27-surface", theta=GR(-4)))
    assert out.case == "Inconclusive"
    assert any("log-term" in r for r in out.reasons)


def test_classify_catenoid():
    out = classify_reducibility(catalog.build("catenoid-cousin", n=GR(1), l=GR(F(1, 2))))
    assert out.case == "ii"
    assert out.reports[0].lambda1 - out.reports[0].lambda2 == GR(F(1, 2))


def test_classify_reports_hypothesis_failures():
    # G = z, Q = dz^2 on C: one end only
    out = classify_reducibility(catalog.build("enneper-cousin-dual"))
    assert out.case == "Inconclusive" and out.reasons


# theta scans ------------------------------------------------------------------------------


def test_parse_scan():
    assert parse_scan("-1:0:0.25") == [F(-1), F(-3, 4), F(-1, 2), F(-1, 4), F(0)]
    assert len(parse_scan("-10:0:0.1")) == 101
    for bad in ("1:0:0.1", "0:1:0", "0:1", "a:b:c"):
        with pytest.raises(ValueError):
            parse_scan(bad)


def test_theta_scan_locus():
    rows = theta_scan(lambda th: catalog.build("prop27-surface", theta=GR(th)), parse_scan("-10:0:1"))
    assert {r.theta for r in rows if r.vanishing} == {F(-2), F(-6)}
    zero = [r for r in rows if r.theta == 0][0]
    assert zero.excluded and not zero.vanishing
