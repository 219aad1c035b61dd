import math

import numpy as np
import pytest

from cespot.construction import Deformation, spectrum_minus
from cespot.errors import SingularityError
from cespot.families import FAMILIES
from cespot.verifier import (
    Discretization,
    compare_spectra,
    count_nodes,
    numeric_spectrum,
    oracle_window,
    richardson,
    verify,
    wavefunction_checks,
)


def ho(x):
    return 0.5 * x * x


def test_discretization_invariants():
    d = Discretization.uniform(-10, 10, 4000)
    assert d.spacing == pytest.approx(20 / 4001)
    assert d.nodes()[0] == pytest.approx(-10 + d.spacing)
    with pytest.raises(ValueError):
        Discretization.uniform(0, 1, 63)
    with pytest.raises(ValueError):
        Discretization.uniform(1, 0, 100)


def test_numeric_spectrum_oscillator():
    # the raw 3-point grid is O(h²): level 2 is off by 1e-5, one Richardson step fixes it
    coarse_d = Discretization.uniform(-10, 10, 4000)
    fine_d = coarse_d.with_points(8000)
    coarse = numeric_spectrum(ho, coarse_d, 3)
    fine = numeric_spectrum(ho, fine_d, 3)
    assert coarse == sorted(coarse)
    assert np.allclose(coarse, [0.5, 1.5, 2.5], atol=2e-5)
    ext = richardson(coarse, fine, coarse_d.spacing / fine_d.spacing)
    assert np.max(np.abs(np.array(ext) - [0.5, 1.5, 2.5])) < 1e-6


def test_numeric_spectrum_poschl_teller_seed():
    pt = FAMILIES["poschl_teller"]
    p = pt.make_params(gamma=2.0, b=0.0)
    d = Discretization.uniform(-math.pi / 2, math.pi / 2, 4000)
    got = numeric_spectrum(lambda x: pt.v_plus(p, x), d, 2)
    assert np.max(np.abs(np.array(got) - [2.5, 6.0])) < 1e-5


def test_numeric_spectrum_box():
    d = Discretization.uniform(0, math.pi, 4000)
    assert numeric_spectrum(lambda x: 0 * x, d, 1)[0] == pytest.approx(0.5, abs=1e-7)


def test_numeric_spectrum_is_deterministic():
    d = Discretization.uniform(-8, 8, 500)
    assert numeric_spectrum(ho, d, 4) == numeric_spectrum(ho, d, 4)


def test_numeric_spectrum_errors():
    d = Discretization.uniform(-1, 1, 100)
    with pytest.raises(ValueError):
        numeric_spectrum(ho, d, 26)
    with pytest.raises(SingularityError):
        with np.errstate(divide="ignore"):
            numeric_spectrum(lambda x: 1.0 / (x - d.nodes()[10]), d, 1)


def test_richardson_removes_quadratic_error():
    exact = 3.0
    c, f = exact + 0.4 * 4, exact + 0.4
    assert richardson([c], [f], 2.0) == [pytest.approx(exact)]


def test_compare_spectra_examples():
    rep = compare_spectra([0.0, 1.0, 2.0], [1e-8, 1.0000001, 2.0000002], 1e-5)
    assert rep.passed
    rep = compare_spectra([0.0], [0.1], 1e-5)
    assert not rep.passed
    assert rep.levels[0].abs_err == pytest.approx(0.1)
    with pytest.raises(ValueError):
        compare_spectra([0.0, 1.0], [0.0], 1e-5)
    with pytest.raises(ValueError):
        compare_spectra([], [], 1e-5)


def test_compare_spectra_reports_second_order():
    coarse_d = Discretization.uniform(-10, 10, 1000)
    fine_d = coarse_d.with_points(2001)
    coarse = numeric_spectrum(ho, coarse_d, 3)
    fine = numeric_spectrum(ho, fine_d, 3)
    rep = compare_spectra([0.5, 1.5, 2.5], fine, 1e-6, coarse=coarse,
                          spacing_ratio=coarse_d.spacing / fine_d.spacing)
    assert rep.passed
    assert rep.grid_refinement_slope >= 1.9


def test_lho_spectrum_against_oracle():
    fam = FAMILIES["linear_oscillator"]
    p = fam.make_params(b=-1.9, beta=0.05)
    lines = spectrum_minus(fam, p, 4)
    assert [ln.energy for ln in lines] == pytest.approx([0.0, 0.05, 1.05, 2.05])
    d = Deformation(fam, p)
    win = oracle_window(d.v_minus, fam, d.params, lines[-1].energy)
    num = numeric_spectrum(d.v_minus, Discretization.from_window(win, 8000), 4)
    assert compare_spectra(lines, num, 1e-4).passed


def test_count_nodes():
    x = np.linspace(-5, 5, 1001)
    assert count_nodes(np.exp(-x * x)) == 0
    assert count_nodes(x * np.exp(-x * x)) == 1
    assert count_nodes((8 * x**3 - 12 * x) * np.exp(-x * x / 2)) == 3


def test_wavefunction_checks_oscillator():
    fam = FAMILIES["linear_oscillator"]
    p = fam.make_params(b=0.0)
    lines = spectrum_minus(fam, p, 4)
    d = Deformation(fam, p)
    disc = Discretization.from_window(oracle_window(d.v_minus, fam, d.params, 3.0), 2000)
    rep = wavefunction_checks(lines, d.v_minus, disc)
    assert [c.nodes for c in rep.lines] == [0, 1, 2, 3]
    assert rep.nodes_ok
    # 3-point ψ'' at h = 1e-3 leaves an O(h²) residual
    assert rep.lines[0].residual < 1e-5
    assert rep.gram_deviation < 1e-8


def test_wavefunction_checks_morse_top_state():
    fam = FAMILIES["morse"]
    p = fam.make_params(gamma=3.0, rho=3.0, alpha=0.0, beta=1.0)
    lines = spectrum_minus(fam, p, 3)
    d = Deformation(fam, p)
    disc = Discretization.from_window(oracle_window(d.v_minus, fam, d.params, lines[-1].energy), 2000)
    rep = wavefunction_checks(lines, d.v_minus, disc, h=1e-3)
    assert rep.lines[2].residual <= 1e-4
    assert rep.nodes_ok


@pytest.mark.parametrize("fid,kw,levels", [
    ("linear_oscillator", dict(b=-1.9, beta=0.05), 4),
    ("morse", dict(gamma=3.0, rho=3.0, alpha=0.0, beta=1.0), 3),
    ("radial_oscillator", dict(gamma=0.5, b=-1.0), 4),
    ("poschl_teller", dict(gamma=2.0, rho=1.0, beta=1.0), 4),
])
def test_verify_end_to_end(fid, kw, levels):
    fam = FAMILIES[fid]
    ver = verify(fam, fam.make_params(**kw), levels, 1e-5)
    assert ver.report.passed, ver.report.as_dict()
    assert ver.report.grid_refinement_slope is None or ver.report.grid_refinement_slope >= 1.9
