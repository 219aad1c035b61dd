import math

import mpmath as mp
import numpy as np
import pytest

from cespot.errors import DivergenceError, ParameterPoleError
from cespot.specfun import (
    SeriesEvalPolicy,
    erf_fn,
    gauss_2f1,
    hermite_h,
    hyp2f1_complex,
    hyp2f1_derivatives,
    kummer_1f1,
    kummer_derivatives,
    kummer_scaled,
    laguerre_l,
    legendre_even_odd,
    legendre_origin,
    legendre_pq,
    log_gamma_ratio,
    log_gamma_sign,
)

mp.mp.dps = 30


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


@pytest.mark.parametrize("x", [0.3, 2.5, 17.2, -0.5, -1.5, -2.7, -7.25])
def test_log_gamma_sign_against_mpmath(x):
    res = log_gamma_sign(x)
    g = mp.gamma(x)
    assert res.sign == (1 if g > 0 else -1)
    assert abs(res.log_abs - float(mp.log(abs(g)))) < 1e-13


def test_log_gamma_sign_pole():
    with pytest.raises(ParameterPoleError):
        log_gamma_sign(-3.0)


def test_gamma_ratio_with_denominator_pole_is_zero():
    assert log_gamma_ratio(0.5, 0.0).value == 0.0
    with pytest.raises(ParameterPoleError):
        log_gamma_ratio(-2.0, 0.5)


@pytest.mark.parametrize("num,den", [(0.525, 0.025), (-5.0 + 0.5, 1.5), (-2.5, -3.5), (40.3, 38.1)])
def test_log_gamma_ratio_against_mpmath(num, den):
    assert rel(log_gamma_ratio(num, den).value, float(mp.gamma(num) / mp.gamma(den))) < 1e-13


def test_erf():
    x = np.linspace(-4, 4, 17)
    ref = np.array([float(mp.erf(v)) for v in x])
    assert np.max(np.abs(erf_fn(x) - ref)) < 1e-15


@pytest.mark.parametrize("a,b", [(-0.475, 0.5), (0.3, 1.5), (2.25, 3.0), (-3.0, 0.5), (1.7, -0.5), (-4.6, 2.3)])
def test_kummer_against_mpmath(a, b):
    z = np.array([-60.0, -12.0, -1.3, 0.0, 0.4, 3.0, 25.0, 70.0])
    got = kummer_1f1(a, b, z)
    for zi, gi in zip(z, got):
        ref = float(mp.hyp1f1(a, b, zi))
        assert abs(gi - ref) <= 1e-12 * max(abs(ref), 1e-300) + 1e-300


def test_kummer_scaled_reaches_huge_arguments():
    s = kummer_scaled(0.3, 1.5, np.array([900.0]))
    ref = mp.log(mp.hyp1f1(0.3, 1.5, 900))
    assert abs(s.log_abs()[0] - float(ref)) < 1e-11


def test_kummer_polynomial_case():
    # 1F1(-1, 1/2, -x^2) = 1 + 2 x^2
    x = np.linspace(-3, 3, 13)
    assert np.allclose(kummer_1f1(-1.0, 0.5, -x * x), 1 + 2 * x * x, rtol=1e-15, atol=0)


def test_kummer_parameter_pole():
    with pytest.raises(ParameterPoleError):
        kummer_1f1(0.5, -2.0, np.array([1.0]))


def test_kummer_derivatives():
    a, b = 0.35, 1.25
    z = np.array([-5.0, 0.7, 9.0])
    m, dm, d2m = (s.value() for s in kummer_derivatives(a, b, z, order=2))
    for i, zi in enumerate(z):
        f = lambda t: mp.hyp1f1(a, b, t)
        assert rel(dm[i], float(mp.diff(f, zi))) < 1e-12
        assert rel(d2m[i], float(mp.diff(f, zi, 2))) < 1e-11


def test_kummer_derivatives_of_constant():
    out = kummer_derivatives(0.0, -1.0 + 0.5, np.array([0.3]), order=2)
    assert out[0].value()[0] == 1.0
    assert out[1].value()[0] == 0.0


def test_policy_validation():
    with pytest.raises(ValueError):
        SeriesEvalPolicy(max_terms=0)


@pytest.mark.parametrize("a,b,c", [(0.3, -1.2, 0.5), (-1.5, 2.25, 1.5), (1.0, 1.5, 2.5), (0.75, 0.25, 1.0)])
def test_gauss_against_mpmath(a, b, c):
    z = np.array([-0.99, -0.9, 0.0, 0.3, 0.75, 0.97])
    got = gauss_2f1(a, b, c, z)
    for zi, gi in zip(z, got):
        ref = float(mp.re(mp.hyp2f1(a, b, c, zi)))
        assert abs(gi - ref) <= 1e-11 * max(1.0, abs(ref))


def test_gauss_spec_examples():
    assert gauss_2f1(0.3, 0.7, 1.1, np.array([0.0]))[0] == 1.0
    assert rel(gauss_2f1(1.0, 1.0, 2.0, np.array([0.5]))[0], 2 * math.log(2.0)) < 1e-13


def test_gauss_summation_at_one():
    # F(-3/2, 1/2; 1/2; 1) = Γ(1/2)Γ(3/2)/(Γ(2)Γ(0)) reduces to (1-z)^(3/2) -> 0
    assert abs(gauss_2f1(-1.5, 0.5, 0.5, np.array([1.0]))[0]) < 1e-14
    ref = float(mp.gamma(2.5) * mp.gamma(0.7) / (mp.gamma(2.2) * mp.gamma(1.0)))
    assert rel(gauss_2f1(0.3, 1.5, 2.5, np.array([1.0]))[0], ref) < 1e-13


def test_gauss_divergent_at_one():
    with pytest.raises(DivergenceError):
        gauss_2f1(0.5, 0.7, 1.0, np.array([1.0]))


def test_gauss_outside_domain():
    with pytest.raises(ValueError):
        gauss_2f1(0.5, 0.7, 1.0, np.array([-2.0]))


def test_gauss_conjugate_parameters_are_real():
    a, b, c = 0.25 + 1.0j, 0.25 - 1.0j, 0.5
    z = np.array([-0.5, 0.2, 0.9])
    got = hyp2f1_complex(a, b, c, z)
    for zi, gi in zip(z, got):
        ref = mp.hyp2f1(a, b, c, zi)
        assert abs(gi.imag) < 1e-12
        assert rel(gi.real, float(mp.re(ref))) < 1e-12


def test_gauss_logarithmic_case():
    # c - a - b = 0 needs the degenerate connection formula near z = 1
    a, b, c = 0.5, 0.5, 1.0
    z = np.array([0.9, 0.999, 0.999999])
    got = gauss_2f1(a, b, c, z)
    for zi, gi in zip(z, got):
        assert rel(gi, float(mp.hyp2f1(a, b, c, zi))) < 1e-11


def test_gauss_derivatives():
    a, b, c = 0.4, -0.7, 1.5
    z = np.array([-0.8, 0.2, 0.8])
    f, df, d2f = hyp2f1_derivatives(a, b, c, z, order=2)
    for i, zi in enumerate(z):
        fn = lambda t: mp.hyp2f1(a, b, c, t)
        assert rel(df[i], float(mp.diff(fn, zi))) < 1e-10
        assert rel(d2f[i], float(mp.diff(fn, zi, 2))) < 1e-9


@pytest.mark.parametrize("n", [0, 1, 2, 5, 9])
def test_hermite(n):
    x = np.linspace(-3, 3, 7)
    ref = np.array([float(mp.hermite(n, v)) for v in x])
    assert np.allclose(hermite_h(n, x), ref, rtol=1e-14, atol=1e-12)


@pytest.mark.parametrize("n,nu", [(0, 0.5), (1, 2.0), (3, 6.6), (6, 0.0)])
def test_laguerre(n, nu):
    # explicit sum as the reference (mpmath's hypergeometric path stalls at x = 0)
    x = np.linspace(0, 12, 9)
    ref = np.array([float(sum((-1) ** k * mp.binomial(n + nu, n - k) * mp.mpf(v) ** k / mp.factorial(k)
                              for k in range(n + 1))) for v in x])
    assert np.allclose(laguerre_l(n, nu, x), ref, rtol=1e-13, atol=1e-12)


def test_laguerre_negative_index_is_zero():
    assert np.all(laguerre_l(-1, 1.0, np.array([0.5, 2.0])) == 0.0)


@pytest.mark.parametrize("nu,mu", [(2.3, 0.7), (3.0, 1.2), (4.5, -0.5), (1.6, 2.2)])
def test_ferrers_against_mpmath(nu, mu):
    # the origin is covered by test_legendre_origin_values; mpmath can stall there
    x = np.array([-0.95, -0.4, 0.05, 0.3, 0.8])
    p, q = legendre_pq(nu, mu, x)
    for i, xi in enumerate(x):
        ref_p = float(mp.re(mp.legenp(nu, mu, xi, type=2)))
        ref_q = float(mp.re(mp.legenq(nu, mu, xi, type=2)))
        assert abs(p[i] - ref_p) <= 1e-10 * max(1.0, abs(ref_p))
        assert abs(q[i] - ref_q) <= 1e-10 * max(1.0, abs(ref_q))


def test_legendre_origin_values():
    nu, mu = 2.3, 0.7
    org = legendre_origin(nu, mu)
    assert abs(org.p0 - float(mp.legenp(nu, mu, 0, type=2))) < 1e-12
    assert abs(org.dp0 - float(mp.diff(lambda t: mp.legenp(nu, mu, t, type=2), 0))) < 1e-10
    assert abs(org.q0 - float(mp.re(mp.legenq(nu, mu, 0, type=2)))) < 1e-12


def test_legendre_even_odd_parameters():
    (ae, be, ce), (ao, bo, co) = legendre_even_odd(2.0, 0.5)
    assert (ce, co) == (0.5, 1.5)
    assert (ae, be) == pytest.approx((-1.25, 1.25))
    assert (ao, bo) == pytest.approx((-0.75, 1.75))
