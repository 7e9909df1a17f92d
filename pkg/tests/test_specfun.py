import math

import mpmath as mp
import pytest

from tribeta import specfun

mp.mp.dps = 40


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


@pytest.mark.parametrize("x", [1e-6, 0.1, 1.0, 2.0, 2.5, 10.0, 60.0])
def test_bessel_k0_matches_mpmath(x):
    got = specfun.bessel_k0(x)
    want = float(mp.besselk(0, x))
    assert rel(got.value, want) < 1e-13
    assert got.est_error >= 0


@pytest.mark.parametrize("a,b,x", [(0.5, 1.5, 3.0), (2.0, 3.5, -20.0), (51.0, 50.5, 200.0), (1.0, 1.0, 1.0), (-3.0, 2.0, 5.0)])
def test_hyp1f1_matches_mpmath(a, b, x):
    got = specfun.hyp1f1(a, b, x)
    want = mp.hyp1f1(a, b, x)
    assert abs(got.log_value - float(mp.log(abs(want)))) < 1e-12


def test_hyp1f1_huge_returns_split_form():
    got = specfun.hyp1f1(500.0, 1.0, 2000.0)
    want = float(mp.log(mp.hyp1f1(500, 1, 2000)))
    assert got.log_scale > 0
    assert abs(got.log_value - want) / want < 1e-13


@pytest.mark.parametrize("a,b,c,x", [(1.5, 1.5, 2.0, 0.5), (50.5, 50.5, 51.0, 0.5), (0.25, 1.0, 3.0, -0.7)])
def test_hyp2f1_series(a, b, c, x):
    assert rel(float(specfun.hyp2f1(a, b, c, x)), float(mp.hyp2f1(a, b, c, x))) < 1e-12


def test_hyp2f1_terminating_exact():
    assert rel(specfun.hyp2f1_terminating(7, 2.5, 1.5, 0.3).value, float(mp.hyp2f1(-7, 2.5, 1.5, 0.3))) < 1e-13
    with pytest.raises(specfun.SpecFunDomainError):
        specfun.hyp2f1_terminating(-1, 1.0, 1.0, 0.5)


@pytest.mark.parametrize("x", [0.5, 30.0, 400.0])
def test_hyp2f2_matches_mpmath(x):
    got = specfun.hyp2f2(51.0, 51.0, 50.5, 1.0, x)
    want = mp.hyp2f2(51, 51, 50.5, 1, x)
    assert abs(got.log_value - float(mp.log(want))) < 1e-11


@pytest.mark.parametrize("nu,x", [(-0.5, 0.0), (-0.5, 1.3), (-2.0, -1.0), (-20.5, 3.0), (-60.0, 10.0), (-0.1, 0.5)])
def test_pcf_d_matches_mpmath(nu, x):
    got = specfun.pcf_d(nu, x)
    want = mp.pcfd(nu, x)
    assert abs(got.log_value - float(mp.log(abs(want)))) < 1e-10


def test_domain_errors():
    with pytest.raises(specfun.SpecFunDomainError):
        specfun.bessel_k0(0.0)
    with pytest.raises(specfun.SpecFunDomainError):
        specfun.hyp1f1(1.0, -2.0, 1.0)
    with pytest.raises(specfun.SpecFunDomainError):
        specfun.pcf_d(0.5, 1.0)
    with pytest.raises(specfun.SpecFunDomainError):
        specfun.gamma_ln(0.0)


def test_budget_exhaustion_raises():
    with pytest.raises(specfun.SpecFunAccuracyError):
        specfun.hyp1f1(1.0, 1.0, 1e4, budget=50)


def test_pochhammer_and_gamma():
    assert specfun.pochhammer(0.5, 4) == pytest.approx(0.5 * 1.5 * 2.5 * 3.5, rel=1e-15)
    assert specfun.pochhammer(3.0, 0) == 1.0
    assert specfun.gamma_ln(10.0) == pytest.approx(math.log(362880.0), rel=1e-15)
