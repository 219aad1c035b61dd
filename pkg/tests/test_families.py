import math

import mpmath as mp
import numpy as np
import pytest
from scipy import integrate

from cespot.errors import BoundStateError
from cespot.families import (
    FAMILIES,
    GAMMA_SIGN,
    MIXING,
    POSITIVITY,
    DeformationParams,
    bagrov_samsonov_potential,
    get_family,
    hermite_imaginary,
    seed_phi,
    special_case_u,
    spectrum_plus,
)

# (family, parameters, lowest levels checked)
LEVEL_CASES = [
    ("linear_oscillator", dict(b=0.0), 4),
    ("morse", dict(gamma=3.5, rho=3.0), 3),
    ("rosen_morse", dict(gamma=4.0, b=1.0), 3),
    ("radial_oscillator", dict(gamma=0.5, b=1.0), 3),
    ("hydrogen", dict(gamma=2.8, a=1.0, rho=0.9), 3),
    ("poschl_teller", dict(gamma=2.0, rho=1.0), 3),
]


def params(fid, **kw):
    return FAMILIES[fid].make_params(**kw)


def test_catalog_ids():
    assert set(FAMILIES) == {"linear_oscillator", "morse", "rosen_morse", "radial_oscillator",
                             "hydrogen", "poschl_teller"}
    with pytest.raises(ValueError):
        get_family("square_well")


def test_seed_phi_examples():
    x = np.array([1.0])
    phi, dphi = seed_phi("linear_oscillator", params("linear_oscillator"), grid=x)
    assert phi.samples[0] == 1.0 and dphi.samples[0] == 1.0
    phi, _ = seed_phi("hydrogen", params("hydrogen", gamma=2.0, a=1.0), grid=x)
    assert phi.samples[0] == pytest.approx(-1.5)
    x = np.array([math.pi / 4])
    phi, dphi = seed_phi("poschl_teller", params("poschl_teller", gamma=2.0), grid=x)
    assert phi.samples[0] == pytest.approx(2.0)
    assert dphi.samples[0] == pytest.approx(4.0)


def test_spectrum_plus_examples():
    line = spectrum_plus("linear_oscillator", params("linear_oscillator", b=0.0), 0)
    assert line.energy == 1.0
    x = line.psi.grid
    assert np.allclose(line.psi.samples, math.pi ** -0.25 * np.exp(-0.5 * x * x), atol=1e-15)
    assert spectrum_plus("morse", params("morse", gamma=3.0, rho=3.0), 1).energy == pytest.approx(4.0)
    assert spectrum_plus("poschl_teller", params("poschl_teller", gamma=2.0, b=0.0), 0).energy == pytest.approx(2.5)
    assert spectrum_plus("radial_oscillator", params("radial_oscillator", gamma=0.5, b=0.0), 1).energy == pytest.approx(4.0)


def test_bound_counts():
    morse = FAMILIES["morse"]
    assert morse.bound_count(params("morse", gamma=3.0, rho=3.0)) == 2
    assert morse.bound_count(params("morse", gamma=3.5, rho=3.0)) == 3
    assert morse.bound_count(params("morse", gamma=1.0, rho=1.0)) == 0
    assert FAMILIES["linear_oscillator"].bound_count(params("linear_oscillator")) == math.inf
    with pytest.raises(BoundStateError):
        spectrum_plus("morse", params("morse", gamma=3.0, rho=3.0), 2)


@pytest.mark.parametrize("fid,kw,levels", LEVEL_CASES)
def test_psi_plus_orthonormal(fid, kw, levels):
    fam = FAMILIES[fid]
    p = fam.make_params(**kw)
    lo, hi = fam.domain.lower, fam.domain.upper
    psis = [fam.psi_plus(p, n)[0] for n in range(levels)]
    for i in range(levels):
        for j in range(i + 1):
            val = integrate.quad(lambda t: float(psis[i](np.array([t]))[0] * psis[j](np.array([t]))[0]),
                                 lo, hi, limit=400, epsabs=1e-11)[0]
            assert abs(val - (1.0 if i == j else 0.0)) < 1e-6


@pytest.mark.parametrize("fid,kw,levels", LEVEL_CASES)
def test_psi_plus_solves_schroedinger(fid, kw, levels):
    fam = FAMILIES[fid]
    p = fam.make_params(**kw)
    lo, hi = fam.display
    x = np.linspace(lo, hi, 101)[1:-1]
    h = 1e-4
    for n in range(levels):
        psi, dpsi = fam.psi_plus(p, n)
        # closed-form derivative against a central difference
        fd = (psi(x + h) - psi(x - h)) / (2 * h)
        scale = np.max(np.abs(dpsi(x))) + 1.0
        assert np.max(np.abs(fd - dpsi(x))) < 1e-6 * scale
        d2 = (dpsi(x + h) - dpsi(x - h)) / (2 * h)
        res = -0.5 * d2 + (fam.v_plus(p, x) - fam.energy_plus(p, n)) * psi(x)
        assert np.max(np.abs(res)) < 1e-5 * scale


def test_energy_positivity_matches_b_bound():
    lho = FAMILIES["linear_oscillator"]
    assert lho.energy_plus(params("linear_oscillator", b=-1.99), 0) > 0
    assert lho.energy_plus(params("linear_oscillator", b=-2.0), 0) == 0
    hyd = FAMILIES["hydrogen"]
    g, a = 2.8, 1.0
    assert hyd.energy_plus(params("hydrogen", gamma=g, a=a, rho=a / (g + 1) + 1e-6), 0) > 0
    assert hyd.energy_plus(params("hydrogen", gamma=g, a=a, rho=a / (g + 1) - 1e-6), 0) < 0


def test_thresholds():
    lho = FAMILIES["linear_oscillator"]
    assert lho.threshold(params("linear_oscillator", b=-1.9)) == pytest.approx(0.08569, abs=5e-6)
    morse = FAMILIES["morse"]
    assert morse.threshold(params("morse", gamma=3.0, rho=3.0, beta=1.0)) == pytest.approx(-4 / 45, rel=1e-12)
    hyd = FAMILIES["hydrogen"]
    assert hyd.threshold(params("hydrogen", gamma=2.8, a=1.0, rho=1 / 2.8)) == pytest.approx(-4.39554e-4, rel=1e-5)
    pt = FAMILIES["poschl_teller"]
    ref = float(mp.gamma(0.5) * mp.gamma(2.5) / (mp.gamma(2) * mp.gamma(1)))
    assert pt.threshold(params("poschl_teller", gamma=2.0, rho=1.0)) == pytest.approx(ref, rel=1e-12)


def test_condition_names():
    lho = FAMILIES["linear_oscillator"]
    bad = {c.name for c in lho.conditions(params("linear_oscillator", b=-1.9, beta=0.1)) if not c.holds}
    assert bad == {MIXING}
    hyd = FAMILIES["hydrogen"]
    bad = {c.name for c in hyd.conditions(params("hydrogen", gamma=2.8, a=1.0, rho=0.2)) if not c.holds}
    assert POSITIVITY in bad
    bad = {c.name for c in hyd.conditions(params("hydrogen", gamma=2.8, a=1.0, rho=0.6)) if not c.holds}
    assert GAMMA_SIGN in bad and POSITIVITY not in bad


def test_mixing_normalization():
    lho = FAMILIES["linear_oscillator"]
    q = lho.normalize(params("linear_oscillator", alpha=2.0, beta=0.5))
    assert (q.alpha, q.beta) == (1.0, 0.25)
    morse = FAMILIES["morse"]
    q = morse.normalize(params("morse", gamma=3.0, rho=3.0, alpha=0.5, beta=2.0))
    assert (q.alpha, q.beta) == (0.25, 1.0)
    with pytest.raises(ValueError):
        DeformationParams(0.0, 0.0, 0.0)


def test_unknown_parameter():
    with pytest.raises(ValueError):
        FAMILIES["morse"].make_params(rho=1.0, delta=2.0)
    with pytest.raises(ValueError):
        FAMILIES["morse"].make_params(rho=1.0, b=2.0)


@pytest.mark.parametrize("fid,kw", [
    ("linear_oscillator", dict(b=0.7)),
    ("morse", dict(gamma=3.0, rho=2.6)),
    ("radial_oscillator", dict(gamma=1.2, b=-1.0)),
    ("hydrogen", dict(gamma=2.8, a=1.0, rho=0.9)),
    ("poschl_teller", dict(gamma=2.0, rho=1.0)),
    ("poschl_teller", dict(gamma=2.0, rho=1.5, rho_imaginary=True)),
])
def test_wronskian_follows_abel(fid, kw):
    fam = FAMILIES[fid]
    p = fam.make_params(**kw)
    lo, hi = fam.display
    x = np.linspace(lo, hi, 61)
    u1, du1 = (s.value() for s in fam.fundamental(p, 1, x))
    u2, du2 = (s.value() for s in fam.fundamental(p, 2, x))
    weight = np.exp(2 * fam.phi_antiderivative(p, x))
    wr = (u1 * du2 - du1 * u2) * weight
    # measured against the size of the two products, which cancel far out
    size = (np.abs(u1 * du2) + np.abs(du1 * u2)) * weight
    c = np.median(wr)
    assert abs(c) > 0
    assert np.max(np.abs(wr - c) / np.maximum(size, abs(c))) < 1e-8


def test_rosen_morse_wronskian():
    # u = even + odd part; the decaying solution is their difference, so the
    # rounding scale of each u is |even| + |odd| (recovered from u(x), u(-x))
    fam = FAMILIES["rosen_morse"]
    p = fam.make_params(gamma=3.0, b=1.0)
    x = np.linspace(-5, 5, 61)
    vals = [[s.value() for s in fam.fundamental(p, k, x)] for k in (1, 2)]
    mirror = [fam.fundamental(p, k, -x, 0)[0].value() for k in (1, 2)]
    scale = [0.5 * (np.abs(v[0] + m) + np.abs(v[0] - m)) for v, m in zip(vals, mirror)]
    (u1, du1), (u2, du2) = vals
    weight = np.exp(2 * fam.phi_antiderivative(p, x))
    wr = (u1 * du2 - du1 * u2) * weight
    c = np.median(wr)
    rate = np.abs(du1) / np.maximum(np.abs(u1), 1e-300)
    size = (scale[0] * np.abs(du2) + scale[0] * rate * np.abs(u2) + np.abs(du1 * u2)
            + np.abs(u1 * du2)) * weight
    assert np.max(np.abs(wr - c) / np.maximum(size, abs(c))) < 1e-8


def test_rosen_morse_against_ferrers():
    fam = FAMILIES["rosen_morse"]
    g, b = 3.0, 1.0
    p = fam.make_params(gamma=g, b=b)
    mu = math.sqrt(g * g + b)
    x = np.linspace(-3, 3, 13)
    u1 = fam.fundamental(p, 1, x, 0)[0].value()
    u2 = fam.fundamental(p, 2, x, 0)[0].value()
    for xi, a1, a2 in zip(x, u1, u2):
        c = mp.cosh(xi) ** (-g)
        t = mp.tanh(xi)
        assert abs(a1 - float(mp.re(mp.legenp(g - 1, mu, t, type=2)) * c)) < 1e-10
        assert abs(a2 - float(mp.re(mp.legenq(g - 1, mu, t, type=2)) * c)) < 1e-10


def test_special_cases():
    x = np.linspace(-3, 3, 13)
    assert np.allclose(special_case_u("mielnik", x, gamma=1.0), 1.0 + 0.5 * math.sqrt(math.pi) * np.vectorize(math.erf)(x))
    assert np.allclose(special_case_u("bagrov_samsonov", x, N=1), 1 + 2 * x * x)
    xr = np.linspace(0.1, 3, 7)
    assert np.all(special_case_u("hydrogen_b0", xr, gamma=2.0, a=1.0, beta=0.0) == 1.0)
    with pytest.raises(ValueError):
        special_case_u("radial_b0", xr, l=-1.0)
    with pytest.raises(ValueError):
        special_case_u("bagrov_samsonov", x, N=0)


def test_hermite_imaginary():
    x = np.linspace(-2, 2, 9)
    # i^-2 H_2(ix) = 4x^2 + 2
    assert np.allclose(hermite_imaginary(2, x), 4 * x * x + 2)
    for n in range(6):
        ref = [float(mp.re(mp.hermite(n, 1j * v) / (1j) ** n)) for v in x]
        assert np.allclose(hermite_imaginary(n, x), ref, rtol=1e-13)


def test_bagrov_samsonov_first_order():
    x = np.linspace(-3, 3, 25)
    # N=1 closed form: x²/2 - 8/h2 + 16 (h1/h2)² + 3/2 with h1 = 2x, h2 = 4x²+2
    h2 = 4 * x * x + 2
    expected = 0.5 * x * x - 8 / h2 + 16 * (2 * x / h2) ** 2 + 1.5
    assert np.allclose(bagrov_samsonov_potential(1, x), expected, rtol=1e-14)
