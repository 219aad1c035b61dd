"""Catalog of the published figure settings and the data behind them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .construction import Deformation, admissibility_check
from .errors import CesError
from .families import GAMMA_SIGN, POSITIVITY, DeformationParams, FamilySpec, get_family

# |V| above this is reported through the flag column instead of being clipped
SINGULAR_LEVEL = 1e6

# reserved parameter names understood besides the family's own
MIXING_NAMES = ("b", "alpha", "beta", "rho", "rho_i")


def build_params(family: FamilySpec | str, values: Mapping[str, float]) -> DeformationParams:
    """DeformationParams from a flat name -> value map.

    ``rho`` and ``rho_i`` (imaginary ρ, given as ρ/i) replace ``b``.
    """
    fam = get_family(family)
    values = dict(values)
    unknown = set(values) - set(MIXING_NAMES) - set(fam.param_names)
    if unknown:
        raise ValueError(f"unknown parameters for {fam.id}: {sorted(unknown)}")
    extra = {k: float(values[k]) for k in fam.param_names if k in values}
    kw: dict = {"alpha": float(values.get("alpha", 1.0)), "beta": float(values.get("beta", 0.0))}
    given = [k for k in ("b", "rho", "rho_i") if k in values]
    if len(given) > 1:
        raise ValueError(f"give only one of b, rho, rho_i (got {given})")
    if "rho" in values:
        kw["rho"] = float(values["rho"])
    elif "rho_i" in values:
        kw["rho"] = float(values["rho_i"])
        kw["rho_imaginary"] = True
    elif "b" in values:
        kw["b"] = float(values["b"])
    return fam.make_params(**kw, **extra)


def frange(start: float, stop: float, step: float) -> list[float]:
    """Inclusive arithmetic range, rounded to 12 digits so the values are reproducible."""
    if step <= 0 or not (math.isfinite(start) and math.isfinite(stop)):
        raise ValueError("range needs finite ends and a positive step")
    n = int(math.floor((stop - start) / step + 1e-9))
    return [round(start + i * step, 12) for i in range(n + 1)]


@dataclass(frozen=True)
class Sweep:
    name: str
    values: tuple[float, ...]

    @classmethod
    def span(cls, name: str, start: float, stop: float, step: float, extra=()) -> "Sweep":
        vals = sorted(set(frange(start, stop, step)) | {round(float(v), 12) for v in extra})
        return cls(name, tuple(vals))


@dataclass(frozen=True)
class FigureSpec:
    """Fixed parameters, one swept parameter and the output x grid of a figure.

    ``derived`` computes further parameters from the current point (used for
    the β(b) coupling of the first figure).  ``expected_inadmissible`` is the
    predicate on the swept value for which the figure is known to show singularities.
    """

    figure_id: int
    family: str
    fixed: Mapping[str, float]
    swept: Sweep
    grid: tuple[float, float, int]
    description: str
    expected_inadmissible: Callable[[float], bool]
    derived: Callable[[FamilySpec, dict], dict] | None = None
    raster: tuple[Sweep, Sweep] | None = None

    def params_at(self, value: float) -> DeformationParams:
        vals = dict(self.fixed)
        vals[self.swept.name] = value
        if self.derived is not None:
            vals.update(self.derived(get_family(self.family), vals))
        return build_params(self.family, vals)

    def x_grid(self) -> np.ndarray:
        lo, hi, n = self.grid
        return np.linspace(lo, hi, n)


def lho_beta_of_b(fam: FamilySpec, vals: dict) -> dict:
    """β = 1.5 Γ(b/4+1)/Γ((b+2)/4), i.e. three quarters of the mixing bound."""
    b = vals["b"]
    num, den = b / 4 + 1, (b + 2) / 4
    if den <= 0 and den == math.floor(den):
        return {"beta": 0.0}
    return {"beta": 1.5 * math.gamma(num) / math.gamma(den)}


_LHO_B19 = 2 * math.gamma(-1.9 / 4 + 1) / math.gamma(0.1 / 4)
_HYD_BOUND = -4.39554e-4
_PT_BOUND = 2.35619


def _catalog() -> dict[int, FigureSpec]:
    lho_grid = (-5.0, 5.0, 401)
    morse_grid = (-2.0, 8.0, 401)
    pt_grid = (-1.55, 1.55, 401)
    hyd_grid = (0.01, 2.0, 400)
    figs = [
        FigureSpec(1, "linear_oscillator", {"alpha": 1.0}, Sweep.span("b", -2.5, 3.0, 0.25),
                   lho_grid, "LHO, alpha=1, beta=1.5*G(b/4+1)/G((b+2)/4), b in [-2.5, 3]",
                   lambda v: v <= -2.0, derived=lho_beta_of_b),
        FigureSpec(2, "linear_oscillator", {"alpha": 1.0, "b": -1.9},
                   Sweep.span("beta", -0.12, 0.12, 0.02,
                              extra=(-0.08579, -0.08559, 0.08559, 0.08579)),
                   lho_grid, "LHO, alpha=1, b=-1.9, beta swept across the bound 0.08569",
                   lambda v: abs(v) >= _LHO_B19),
        FigureSpec(3, "morse", {"alpha": 0.0, "beta": 1.0, "gamma": 1.0}, Sweep.span("rho", 0.0, 4.0, 0.25),
                   morse_grid, "Morse, alpha=0, gamma=1, rho in [0, 4]",
                   lambda v: not (0.5 < v < 1.5 or 2.5 < v < 3.5)),
        FigureSpec(4, "morse", {"beta": 1.0, "gamma": 3.0, "rho": 3.0},
                   Sweep.span("alpha", -0.2, 0.2, 0.04, extra=(-0.0888, -0.0889)),
                   morse_grid, "Morse, gamma=rho=3, alpha swept across -4/45",
                   lambda v: v <= -4.0 / 45.0),
        FigureSpec(5, "radial_oscillator", {"alpha": 1.0, "beta": 0.0, "gamma": 0.5},
                   Sweep.span("b", -5.0, 3.0, 0.5, extra=(-4.0001, -3.9999)),
                   (0.02, 5.0, 400), "radial oscillator, gamma=0.5, b in [-5, 3]",
                   lambda v: v <= -4.0),
        FigureSpec(6, "hydrogen", {"a": 1.0, "beta": 0.0}, Sweep("gamma", ()),
                   (0.0, 0.0, 0), "hydrogen, a=1: (gamma, rho) map of the positivity and gamma-sign conditions",
                   lambda v: False,
                   raster=(Sweep.span("gamma", 0.05, 5.0, 0.05), Sweep.span("rho", 0.02, 3.0, 0.02))),
        FigureSpec(7, "hydrogen", {"a": 1.0, "beta": 0.0, "gamma": 2.8}, Sweep.span("rho", 0.25, 6.0, 0.25),
                   hyd_grid, "hydrogen, a=1, beta=0, gamma=2.8, rho in [0.25, 6]",
                   lambda v: not (5 / 16 < v < 5 / 11 or 5 / 6 < v < 5)),
        FigureSpec(8, "hydrogen", {"a": 1.0, "gamma": 2.8, "rho": 1 / 2.8},
                   Sweep.span("beta", -1e-3, 1e-3, 2e-4, extra=(-4.39e-4, -4.40e-4)),
                   (0.01, 40.0, 800), "hydrogen, a=1, gamma=2.8, rho=a/gamma, beta swept across -4.39554e-4",
                   lambda v: v <= _HYD_BOUND),
        FigureSpec(9, "poschl_teller", {"alpha": 1.0, "beta": 0.0, "gamma": 2.0}, Sweep.span("rho", 0.0, 3.25, 0.25),
                   pt_grid, "Poschl-Teller, beta=0, gamma=2, rho in [0, 3.25]",
                   lambda v: v >= 3.0),
        FigureSpec(10, "poschl_teller", {"alpha": 1.0, "beta": 0.0, "gamma": 2.0}, Sweep.span("rho_i", 0.0, 4.0, 0.25),
                   pt_grid, "Poschl-Teller, beta=0, gamma=2, imaginary rho, rho/i in [0, 4]",
                   lambda v: False),
        FigureSpec(11, "poschl_teller", {"alpha": 1.0, "gamma": 2.0, "rho": 1.0},
                   Sweep.span("beta", -3.0, 3.0, 0.5, extra=(-2.3563, -2.3561, 2.3561, 2.3563)),
                   pt_grid, "Poschl-Teller, gamma=2, rho=1, beta swept across 2.35619",
                   lambda v: abs(v) >= _PT_BOUND),
    ]
    return {f.figure_id: f for f in figs}


FIGURES: dict[int, FigureSpec] = _catalog()


def get_figure(figure_id: int) -> FigureSpec:
    try:
        return FIGURES[int(figure_id)]
    except (KeyError, ValueError):
        raise ValueError(f"unknown figure id {figure_id!r}; known: {sorted(FIGURES)}") from None


# ---------------------------------------------------------------------------
# curve data


@dataclass(frozen=True)
class Curve:
    value: float
    params: DeformationParams
    x: np.ndarray
    v_minus: np.ndarray
    singular: np.ndarray
    report: object  # ConditionReport


def potential_samples(family: FamilySpec | str, params: DeformationParams, x: np.ndarray):
    """V- on ``x`` without an admissibility gate, plus the |V| > 1e6 flag."""
    try:
        with np.errstate(all="ignore"):
            v = np.asarray(Deformation(family, params).v_minus(x), dtype=float)
    except CesError:
        v = np.full_like(x, np.nan)
    singular = ~np.isfinite(v) | (np.abs(np.nan_to_num(v, nan=np.inf)) > SINGULAR_LEVEL)
    return v, singular


def figure_curve(spec: FigureSpec, value: float) -> Curve:
    p = spec.params_at(value)
    x = spec.x_grid()
    v, singular = potential_samples(spec.family, p, x)
    return Curve(value, p, x, v, singular, admissibility_check(spec.family, p))


@dataclass(frozen=True)
class RasterCell:
    gamma: float
    rho: float
    positivity: bool
    gamma_sign: bool

    @property
    def region(self) -> str:
        if not self.positivity:
            return "positivity"
        if not self.gamma_sign:
            return "gamma-sign"
        return "allowed"


def hydrogen_raster(spec: FigureSpec) -> list[RasterCell]:
    """Closed-form positivity and Γ-sign verdicts on the (γ, ρ) raster."""
    fam = get_family(spec.family)
    gammas, rhos = spec.raster
    cells = []
    for g in gammas.values:
        for r in rhos.values:
            p = build_params(fam, {**spec.fixed, "gamma": g, "rho": r})
            conds = {c.name: c.holds for c in fam.conditions(p)}
            cells.append(RasterCell(g, r, bool(conds.get(POSITIVITY, False)), bool(conds.get(GAMMA_SIGN, False))))
    return cells
