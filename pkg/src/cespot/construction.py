"""The deformation pipeline: u = α u1 + β u2 solving u'' + 2Φu' - bu = 0,
f = u'/u, W = Φ + f, the CES partner V-, admissibility and the analytic
spectrum of H- obtained through the supercharges.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    BoundStateError,
    CesError,
    ClassificationError,
    ConvergenceError,
    InadmissibleError,
    ParameterPoleError,
)
from .families import (
    Condition,
    DeformationParams,
    FamilySpec,
    get_family,
)
from .fields import ScalarField
from .numerics import mapped_derivatives, mapping_for
from .scaled import Scaled
from .susy import SusyAnalysis, SusyType, Superpotential, analyse_susy, zero_mode

log = logging.getLogger(__name__)

ZERO_TOL = 1e-12
U_HAS_ZERO = "u-has-zero"
U_UNDEFINED = "u-undefined"
SUSY_TYPE = "susy-type"
EXPLICIT_TOL = 1e-9


@dataclass(frozen=True)
class ConditionReport:
    admissible: bool
    violated: tuple[str, ...]
    first_zero: float | None
    susy_type: SusyType | None
    closed_form_ok: bool = True
    numeric_ok: bool = True
    conditions: tuple[Condition, ...] = ()
    params: DeformationParams | None = None

    def __post_init__(self):
        if self.admissible and (self.violated or self.first_zero is not None):
            raise ValueError("an admissible report cannot carry violations or a zero of u")

    def as_dict(self) -> dict:
        out = {
            "admissible": self.admissible,
            "violated": list(self.violated),
            "first_zero": self.first_zero,
            "susy_type": None if self.susy_type is None else self.susy_type.value,
            "closed_form_ok": self.closed_form_ok,
            "numeric_ok": self.numeric_ok,
        }
        if self.params is not None:
            out["alpha"] = self.params.alpha
            out["beta"] = self.params.beta
        return out


@dataclass(frozen=True)
class SpectralLine:
    n: int
    energy: float
    psi: ScalarField
    psi_prime: ScalarField
    norm_constant: float = 1.0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("level index must be non-negative")


# ---------------------------------------------------------------------------
# a deformation of one seed


class Deformation:
    """Closed-form u, f = u'/u and derived fields for one family and parameter set."""

    def __init__(self, family: FamilySpec | str, params: DeformationParams):
        self.family = get_family(family)
        errs = self.family.domain_errors(params)
        if errs:
            raise ValueError("; ".join(errs))
        self.raw = params
        self.params = self.family.normalize(params)

    # --- u and its derivatives ---------------------------------------------

    def parts(self, x, order: int = 1) -> list[Scaled]:
        return self.family.u_parts(self.params, x, order)

    def u(self, x):
        return self.parts(x, 0)[0].value()

    def u_prime(self, x):
        return self.parts(x, 1)[1].value()

    def log_abs_u(self, x):
        return self.parts(x, 0)[0].log_abs()

    def f(self, x):
        u, du = self.parts(x, 1)
        return du.ratio(u)

    def f_and_prime(self, x):
        u, du, d2u = self.parts(x, 2)
        f = du.ratio(u)
        return f, d2u.ratio(u) - f * f

    def f_prime(self, x):
        return self.f_and_prime(x)[1]

    # --- superpotential and potentials --------------------------------------

    def phi(self, x):
        return self.family.phi(self.params, x)

    def w(self, x):
        return self.phi(x) + self.f(x)

    def w_prime(self, x):
        return self.family.phi_prime(self.params, x) + self.f_prime(x)

    def antiderivative(self, x):
        x = np.asarray(x, dtype=float)
        return self.family.phi_antiderivative(self.params, x) + self.log_abs_u(x)

    def v_plus(self, x):
        return self.family.v_plus(self.params, x)

    def v_minus(self, x):
        """Family closed form of V-."""
        x = np.asarray(x, dtype=float)
        return self.family.v_minus_explicit(self.params, x, self.f(x))

    def v_minus_generic(self, x):
        """(Φ² - Φ')/2 + f(2Φ + f) - b/2, valid for any seed."""
        x = np.asarray(x, dtype=float)
        ph, dph, f = self.phi(x), self.family.phi_prime(self.params, x), self.f(x)
        return 0.5 * ph * ph - 0.5 * dph + f * (2 * ph + f) - 0.5 * self.params.b

    def v_minus_from_w(self, x):
        """(W² - W')/2 with W' from the closed-form u''."""
        x = np.asarray(x, dtype=float)
        f, df = self.f_and_prime(x)
        w = self.phi(x) + f
        return 0.5 * (w * w - self.family.phi_prime(self.params, x) - df)

    def superpotential(self, grid=None) -> Superpotential:
        grid = self.family.default_grid() if grid is None else np.asarray(grid, dtype=float)
        return Superpotential.from_functions(
            self.phi, self.f, self.family.domain, grid,
            w_prime=self.w_prime, antiderivative=self.antiderivative, far=self.family.far(self.params))


# ---------------------------------------------------------------------------
# operations


def _family_grid(family: FamilySpec, grid) -> np.ndarray:
    return family.default_grid() if grid is None else np.asarray(grid, dtype=float)


def fundamental_u(family, params: DeformationParams, grid=None) -> tuple[ScalarField, ScalarField]:
    """u = α u1 + β u2 and u' on the family grid."""
    d = Deformation(family, params)
    grid = _family_grid(d.family, grid)
    # the raw (not normalized) combination, as requested by the caller
    raw = d.family.u_parts

    def u(x):
        return raw(d.raw, x, 0)[0].value()

    def du(x):
        return raw(d.raw, x, 1)[1].value()

    return ScalarField(u, grid), ScalarField(du, grid)


def ode_residual(family, params: DeformationParams, x) -> float:
    """max relative residual of u'' + 2Φu' - bu = 0."""
    fam = get_family(family)
    x = np.asarray(x, dtype=float)
    u, du, d2u = fam.u_parts(params, x, 2)
    scale = d2u.log_abs()
    # compare all three terms at a common scale to keep far tails finite
    ref = np.maximum(np.maximum(u.log_abs(), du.log_abs()), scale)
    uu, dd, d2 = u.at_scale(ref), du.at_scale(ref), d2u.at_scale(ref)
    ph = fam.phi(params, x)
    res = d2 + 2 * ph * dd - params.b * uu
    # terms that vanish at special points (e.g. x = 0) are floored by |u| + |u'|
    size = np.abs(d2) + np.abs(2 * ph * dd) + np.abs(params.b * uu) + np.abs(uu) + np.abs(dd)
    return float(np.max(np.abs(res) / size))


def riccati_residual(phi: ScalarField, f: ScalarField, f_prime: ScalarField, b: float) -> float:
    """max |f² + 2Φf + f' - b| on the common grid."""
    from .fields import same_grid

    same_grid(phi, f, f_prime)
    p, fv, dfv = phi.samples, f.samples, f_prime.samples
    return float(np.max(np.abs(fv * fv + 2 * p * fv + dfv - b)))


def deformation_fields(family, params: DeformationParams, grid=None):
    """(Φ, f, f') as fields on the family grid."""
    d = Deformation(family, params)
    grid = _family_grid(d.family, grid)
    return (ScalarField(d.phi, grid), ScalarField(d.f, grid), ScalarField(d.f_prime, grid))


# --- numeric zero scan -------------------------------------------------------


def _bisect(fn: Callable[[float], float], a: float, b: float, fa: float) -> float:
    for _ in range(200):
        if abs(b - a) <= ZERO_TOL * max(1.0, abs(a)):
            break
        m = 0.5 * (a + b)
        fm = fn(m)
        if fm == 0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def zero_scan(d: Deformation) -> float | None:
    """First zero of u on the family scan grid (far points included), or None."""
    x = d.family.scan_points(d.params)
    with np.errstate(all="ignore"):
        u = d.parts(x, 0)[0]
    sg = np.sign(u.mant)
    if np.any(~np.isfinite(u.mant)):
        raise ConvergenceError("u is not finite on the scan grid")
    hits: list[float] = []
    exact = np.nonzero(sg == 0)[0]
    if exact.size:
        hits.append(float(x[exact[0]]))
    change = np.nonzero(sg[:-1] * sg[1:] < 0)[0]
    if change.size:
        i = int(change[0])

        def sign_at(t: float) -> float:
            return float(np.sign(d.parts(np.array([t]), 0)[0].mant[0]))

        hits.append(_bisect(sign_at, float(x[i]), float(x[i + 1]), float(sg[i])))
    return min(hits) if hits else None


def numeric_analysis(d: Deformation) -> tuple[list[str], float | None, SusyAnalysis | None]:
    """Numeric verdict: zero scan of u, then classification of W."""
    try:
        z = zero_scan(d)
    except ParameterPoleError:
        return [U_UNDEFINED], None, None
    if z is not None:
        return [U_HAS_ZERO], z, None
    try:
        analysis = analyse_susy(d.superpotential())
    except ClassificationError as exc:
        log.info("classification failed: %s", exc)
        return [SUSY_TYPE], None, None
    violated = []
    if analysis.flipped or analysis.susy_type is not d.family.susy_type_seed:
        violated.append(SUSY_TYPE)
    return violated, None, analysis


def admissibility_check(family, params: DeformationParams) -> ConditionReport:
    """Closed-form conditions of the family and an independent numeric scan;
    admissible needs both."""
    fam = get_family(family)
    errs = fam.domain_errors(params)
    if errs:
        cond = Condition("parameter-domain", False, detail="; ".join(errs))
        return ConditionReport(False, ("parameter-domain",), None, None, False, False, (cond,), params)
    d = Deformation(fam, params)
    conds = tuple(fam.conditions(params))
    closed_violations = [c.name for c in conds if not c.holds]
    num_violations, first_zero, analysis = numeric_analysis(d)
    violated = tuple(dict.fromkeys(closed_violations + num_violations))
    susy = None if analysis is None else (
        analysis.susy_type if not analysis.flipped else SusyType.UNBROKEN)
    return ConditionReport(
        admissible=not violated,
        violated=violated,
        first_zero=first_zero,
        susy_type=susy,
        closed_form_ok=not closed_violations,
        numeric_ok=not num_violations,
        conditions=conds,
        params=d.params,
    )


def require_admissible(family, params: DeformationParams) -> ConditionReport:
    rep = admissibility_check(family, params)
    if not rep.admissible:
        raise InadmissibleError(
            f"{get_family(family).id}: inadmissible parameters ({', '.join(rep.violated)})", list(rep.violated))
    return rep


def ces_potential(family, params: DeformationParams, grid=None, check: bool = True) -> ScalarField:
    """V- on the family grid from the family's closed form, cross-checked
    against the seed-independent assembly."""
    if check:
        require_admissible(family, params)
    d = Deformation(family, params)
    grid = _family_grid(d.family, grid)
    field_ = ScalarField(d.v_minus, grid)
    generic = d.v_minus_generic(grid)
    scale = np.maximum(1.0, np.abs(generic))
    dev = float(np.max(np.abs(field_.samples - generic) / scale))
    if dev > EXPLICIT_TOL:
        raise CesError(f"explicit and generic V- disagree by {dev:.3g}")
    return field_


def v_plus_field(family, params: DeformationParams, grid=None) -> ScalarField:
    fam = get_family(family)
    return ScalarField(lambda x: fam.v_plus(params, x), _family_grid(fam, grid))


# --- spectrum of H- ----------------------------------------------------------


def available_levels(family, params: DeformationParams) -> float:
    fam = get_family(family)
    extra = 1 if fam.susy_type_seed is SusyType.UNBROKEN else 0
    return fam.bound_count(params) + extra


def _transformed_line(d: Deformation, n_plus: int, index: int, grid) -> SpectralLine:
    """ψ- = A†ψ+ / sqrt(E+), with ψ-' from the Schrödinger equation of H+."""
    fam, p = d.family, d.params
    e = fam.energy_plus(p, n_plus)
    if not e > 0:
        raise CesError(f"E+_{n_plus} = {e} is not positive")
    psi, dpsi = fam.psi_plus(p, n_plus)
    c = 1.0 / math.sqrt(2.0 * e)

    def out(x):
        x = np.asarray(x, dtype=float)
        return c * (-dpsi(x) + d.w(x) * psi(x))

    def dout(x):
        x = np.asarray(x, dtype=float)
        ps, dps = psi(x), dpsi(x)
        w = d.w(x)
        wp = d.w_prime(x)
        # ψ'' = 2(V+ - E)ψ
        return c * (-2.0 * (fam.v_plus(p, x) - e) * ps + wp * ps + w * dps)

    return SpectralLine(index, e, ScalarField(out, grid), ScalarField(dout, grid), 1.0 / math.sqrt(e))


def spectrum_minus(family, params: DeformationParams, n_max: int, grid=None) -> list[SpectralLine]:
    """The lowest ``n_max`` levels of H- with unit-normalized eigenfunctions.

    Unbroken seeds: line 0 is the zero mode and line n+1 comes from ψ_n+.
    Broken seeds: line n comes from ψ_n+.
    """
    rep = require_admissible(family, params)
    d = Deformation(family, params)
    fam = d.family
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    avail = available_levels(fam, params)
    if n_max > avail:
        raise BoundStateError(f"{fam.id}: {n_max} levels requested but H- has {avail}")
    grid = _family_grid(fam, grid)
    lines: list[SpectralLine] = []
    if rep.susy_type is SusyType.UNBROKEN:
        w = d.superpotential(grid)
        z = zero_mode(w)
        # recover C from one interior sample
        x_mid = grid[len(grid) // 2]
        c = float(z(np.array([x_mid]))[0] * math.exp(float(d.antiderivative(np.array([x_mid]))[0])))

        def dz(x, z=z):
            return -d.w(x) * z(x)

        lines.append(SpectralLine(0, 0.0, z, ScalarField(dz, grid), c))
        for n in range(n_max - 1):
            lines.append(_transformed_line(d, n, n + 1, grid))
    else:
        for n in range(n_max):
            lines.append(_transformed_line(d, n, n, grid))
    return lines


def annihilation_residual(family, params: DeformationParams, zero: SpectralLine, x) -> float:
    """sup|Aψ0-| / sup|ψ0-| on x, with Aψ = (ψ' + Wψ)/√2 and the closed-form W."""
    d = Deformation(family, params)
    m = mapping_for(d.family.domain)
    y = m.y(np.asarray(x, dtype=float))
    # ψ' by differences in the mapped coordinate, independent of the closed form
    psi, dpsi, _ = mapped_derivatives(zero.psi, m, y)
    a = (dpsi + d.w(m.x(y)) * psi) / math.sqrt(2.0)
    return float(np.nanmax(np.abs(a)) / np.nanmax(np.abs(psi)))
