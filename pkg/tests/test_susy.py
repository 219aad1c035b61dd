import math

import numpy as np
import pytest

from cespot.errors import BrokenSusyError, GridMismatchError, SingularityError
from cespot.fields import Domain, ScalarField, same_grid
from cespot.susy import (
    Charge,
    Superpotential,
    SusyType,
    apply_supercharge,
    classify_susy,
    intertwining_residual,
    orient,
    partner_potentials,
    zero_mode,
)

GRID = np.linspace(-6, 6, 241)


def oscillator(scale=1.0, grid=GRID):
    # W = scale * x split as Φ = x, f = (scale - 1) x
    return Superpotential.from_functions(
        lambda x: np.asarray(x, dtype=float),
        lambda x: (scale - 1.0) * np.asarray(x, dtype=float),
        Domain.full_line(), grid,
        w_prime=lambda x: np.full(np.shape(x), scale),
        antiderivative=lambda x: 0.5 * scale * np.asarray(x, dtype=float) ** 2,
    )


def test_partner_potentials_of_oscillator():
    vp, vm = partner_potentials(oscillator())
    i0 = np.argmin(np.abs(GRID))
    assert vp.samples[i0] == pytest.approx(0.5)
    assert vm.samples[i0] == pytest.approx(-0.5)
    assert np.allclose(vp.samples - vm.samples, 1.0)


def test_partner_potentials_need_derivative():
    w = Superpotential.from_functions(np.sin, lambda x: 0 * x, Domain.full_line(), GRID)
    with pytest.raises(ValueError):
        partner_potentials(w)


def test_superpotential_rejects_singular_samples():
    grid = np.linspace(-1, 1, 5)
    with pytest.raises(SingularityError):
        with np.errstate(divide="ignore"):
            Superpotential.from_functions(lambda x: 1.0 / x, lambda x: 0 * x, Domain.full_line(), grid)


def test_superpotential_grid_inside_domain():
    with pytest.raises(ValueError):
        Superpotential.from_functions(lambda x: x, lambda x: 0 * x, Domain.half_line(), np.linspace(0, 1, 5))


def test_grid_mismatch():
    a = ScalarField(np.sin, np.linspace(0, 1, 5))
    b = ScalarField(np.cos, np.linspace(0, 1, 6))
    with pytest.raises(GridMismatchError):
        same_grid(a, b)


def test_annihilation_of_ground_state():
    w = oscillator()
    psi = ScalarField(lambda x: np.exp(-0.5 * x * x), GRID)
    dpsi = ScalarField(lambda x: -x * np.exp(-0.5 * x * x), GRID)
    assert np.max(np.abs(apply_supercharge(Charge.A, w, psi, dpsi).samples)) < 1e-15
    # A† raises: A† ψ0 = √2 x ψ0
    up = apply_supercharge("A_dagger", w, psi, dpsi).samples
    assert np.allclose(up, math.sqrt(2) * GRID * psi.samples)


def test_classification():
    assert classify_susy(oscillator()) is SusyType.UNBROKEN
    # W = x + 1/x on the half line: both exp(∓∫W) fail at one end
    grid = np.linspace(0.05, 6, 100)
    w = Superpotential.from_functions(
        lambda x: x + 1.0 / x, lambda x: 0 * x, Domain.half_line(), grid,
        w_prime=lambda x: 1.0 - 1.0 / x**2, antiderivative=lambda x: 0.5 * x * x + np.log(x),
        far=(0.0, 1e4))
    assert classify_susy(w) is SusyType.BROKEN


def test_flipped_superpotential_is_oriented():
    w = oscillator().flipped()
    assert classify_susy(w) is SusyType.UNBROKEN
    with pytest.raises(BrokenSusyError):
        zero_mode(w)
    oriented, flipped = orient(w)
    assert flipped
    assert oriented.sign == 1.0
    assert np.allclose(oriented.w.samples, GRID)


def test_zero_mode_is_normalized_gaussian():
    psi = zero_mode(oscillator())
    exact = math.pi ** -0.25 * np.exp(-0.5 * GRID**2)
    assert np.max(np.abs(psi.samples - exact)) < 1e-12


def test_zero_mode_of_broken_susy():
    grid = np.linspace(0.05, 6, 50)
    w = Superpotential.from_functions(
        lambda x: x + 1.0 / x, lambda x: 0 * x, Domain.half_line(), grid,
        w_prime=lambda x: 1.0 - 1.0 / x**2, antiderivative=lambda x: 0.5 * x * x + np.log(x),
        far=(0.0, 1e4))
    with pytest.raises(BrokenSusyError):
        zero_mode(w)


def test_intertwining_relation():
    # W = tanh-type kink, checked on a compactly concentrated test function
    grid = np.linspace(-8, 8, 161)
    w = Superpotential.from_functions(
        lambda x: 2 * np.tanh(x), lambda x: 0 * x, Domain.full_line(), grid,
        w_prime=lambda x: 2 / np.cosh(x) ** 2, antiderivative=lambda x: 2 * np.log(np.cosh(x)))
    vp, vm = partner_potentials(w)
    test = ScalarField(lambda x: np.exp(-((x - 0.3) ** 2)) * (1 + x), grid)
    assert intertwining_residual(w, vp, vm, test) < 1e-6


def test_intertwining_rejects_wide_test_function():
    w = oscillator()
    vp, vm = partner_potentials(w)
    wide = ScalarField(lambda x: np.ones_like(x), GRID)
    with pytest.raises(ValueError):
        intertwining_residual(w, vp, vm, wide)
