"""The six shape-invariant seed families: Φ, domains, H+ spectra, closed-form
fundamental solutions u1, u2 of u'' + 2Φu' - bu = 0, closed-form condition
sets and explicit V- formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Callable, Mapping

import numpy as np
from scipy import integrate as sci_integrate
from scipy import special as sc

from .errors import BoundStateError, ParameterPoleError
from .fields import Domain, ScalarField
from .scaled import Scaled
from .specfun import (
    erf_fn,
    gauss_2f1,
    hermite_h,
    hyp2f1_derivatives,
    kummer_derivatives,
    kummer_scaled,
    laguerre_l,
    legendre_origin,
    log_gamma_ratio,
    log_gamma_sign,
)
from .susy import SusyType

SQRT_PI = math.sqrt(math.pi)
SCAN_NODES = 2048


# ---------------------------------------------------------------------------
# parameters


@dataclass(frozen=True)
class DeformationParams:
    """Riccati constant b, mixing coefficients (α, β) and family parameters.

    ``extra`` holds γ and, for the hydrogen family, the coupling a.
    """

    b: float
    alpha: float = 1.0
    beta: float = 0.0
    extra: Mapping[str, float] = field(default_factory=dict)
    rho_imaginary: bool = False

    def __post_init__(self):
        if self.alpha == 0 and self.beta == 0:
            raise ValueError("(alpha, beta) must not both vanish")
        object.__setattr__(self, "extra", MappingProxyType({k: float(v) for k, v in dict(self.extra).items()}))
        for name, v in (("b", self.b), ("alpha", self.alpha), ("beta", self.beta)):
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite")

    @property
    def gamma(self) -> float:
        return self.extra.get("gamma", 0.0)

    @property
    def a(self) -> float:
        return self.extra.get("a", 1.0)

    def with_mixing(self, alpha: float, beta: float) -> "DeformationParams":
        return replace(self, alpha=float(alpha), beta=float(beta))

    def as_dict(self) -> dict:
        out = {"b": self.b, "alpha": self.alpha, "beta": self.beta}
        out.update(dict(sorted(self.extra.items())))
        if self.rho_imaginary:
            out["rho_imaginary"] = True
        return out

    def __hash__(self):
        return hash((self.b, self.alpha, self.beta, tuple(sorted(self.extra.items())), self.rho_imaginary))

    def __eq__(self, other):
        if not isinstance(other, DeformationParams):
            return NotImplemented
        return (self.b, self.alpha, self.beta, dict(self.extra), self.rho_imaginary) == (
            other.b, other.alpha, other.beta, dict(other.extra), other.rho_imaginary)


@dataclass(frozen=True)
class Condition:
    name: str
    holds: bool
    value: float = math.nan
    bound: float = math.nan
    detail: str = ""


# condition names used in reports
POSITIVITY = "positivity-of-H+"
GAMMA_SIGN = "gamma-ratio-sign"
MIXING = "mixing-bound"
SUSY_PRESERVATION = "susy-preservation"
PARAMETER_DOMAIN = "parameter-domain"


# ---------------------------------------------------------------------------
# assembling u = sum of  coef * q(x) * exp(L(x)) * G(s(x))


@dataclass
class _Term:
    coef: float
    q: tuple            # q, q', q''
    logp: tuple         # L, L', L''
    s: tuple            # s, s', s''
    kernel: Callable    # order -> list of Scaled [G, G_s, G_ss] at s


def _assemble(terms: list[_Term], order: int) -> list[Scaled]:
    out: list[Scaled | None] = [None] * (order + 1)
    for t in terms:
        if t.coef == 0:
            continue
        q, dq, d2q = t.q
        lp, dlp, d2lp = t.logp
        s, ds, d2s = t.s
        g = t.kernel(order)
        e = Scaled(np.full_like(np.asarray(lp, dtype=float), t.coef), np.asarray(lp, dtype=float))
        parts = [e * g[0] * q]
        if order >= 1:
            a1 = dq + q * dlp
            parts.append(e * (g[0] * a1 + g[1] * (q * ds)))
        if order >= 2:
            a2 = d2q + 2 * dq * dlp + q * (d2lp + dlp * dlp)
            parts.append(e * (g[0] * a2 + g[1] * (2 * a1 * ds + q * d2s) + g[2] * (q * ds * ds)))
        for k, p in enumerate(parts):
            out[k] = p if out[k] is None else out[k] + p
    for k in range(order + 1):
        if out[k] is None:
            raise ValueError("u has no non-zero terms")
    return out  # type: ignore[return-value]


def _kummer_kernel(a: float, b: float, s: np.ndarray):
    return lambda order: kummer_derivatives(a, b, s, order)


def _gauss_kernel(a, b, c, s: np.ndarray, w: np.ndarray):
    def k(order):
        return [Scaled.of(v) for v in hyp2f1_derivatives(a, b, c, s, order, one_minus_z=w)]
    return k


def _ones(x):
    return np.ones_like(x), np.zeros_like(x), np.zeros_like(x)


def _zeros3(x):
    return np.zeros_like(x), np.zeros_like(x), np.zeros_like(x)


def _log_cosh(x):
    ax = np.abs(x)
    return ax + np.log1p(np.exp(-2 * ax)) - math.log(2.0)


def _gamma_fn(x: float) -> float:
    g = log_gamma_sign(x)
    return g.sign * math.exp(g.log_abs)


# ---------------------------------------------------------------------------
# family base class


class FamilySpec:
    """One shape-invariant seed family.  Instances are immutable catalogs."""

    id: str = ""
    title: str = ""
    domain: Domain
    susy_type_seed: SusyType = SusyType.UNBROKEN
    param_names: tuple[str, ...] = ("gamma",)
    display: tuple[float, float] = (-5.0, 5.0)
    search: tuple[float, float] = (-50.0, 50.0)
    rho_name: str | None = None  # name of the ρ-type reparametrization of b

    # --- parameters -----------------------------------------------------

    def defaults(self) -> dict[str, float]:
        return {"gamma": 1.0}

    def make_params(self, b: float | None = None, alpha: float = 1.0, beta: float = 0.0,
                    rho: float | None = None, rho_imaginary: bool = False, **extra) -> DeformationParams:
        ex = self.defaults()
        ex.update({k: float(v) for k, v in extra.items()})
        unknown = set(ex) - set(self.param_names)
        if unknown:
            raise ValueError(f"unknown parameters for {self.id}: {sorted(unknown)}")
        if rho is not None:
            if b is not None:
                raise ValueError("give either b or rho, not both")
            b = self.b_from_rho(ex, float(rho), rho_imaginary)
        if b is None:
            b = 0.0
        return DeformationParams(float(b), float(alpha), float(beta), ex, rho_imaginary)

    def b_from_rho(self, extra: Mapping[str, float], rho: float, imaginary: bool = False) -> float:
        raise ValueError(f"{self.id} has no rho parametrization")

    def domain_errors(self, p: DeformationParams) -> list[str]:
        if "gamma" in self.param_names and not p.gamma > 0:
            return ["gamma must be positive"]
        return []

    def normalize(self, p: DeformationParams) -> DeformationParams:
        """Fix the gauge of (α, β); only their ratio enters V-."""
        return p

    # --- seed -----------------------------------------------------------

    def phi(self, p: DeformationParams, x): raise NotImplementedError
    def phi_prime(self, p: DeformationParams, x): raise NotImplementedError
    def phi_antiderivative(self, p: DeformationParams, x): raise NotImplementedError

    def v_plus(self, p: DeformationParams, x):
        """V+ = (Φ² + Φ')/2 + b/2 (shape-invariant seed shifted by b/2)."""
        x = np.asarray(x, dtype=float)
        return 0.5 * (self.phi(p, x) ** 2 + self.phi_prime(p, x)) + 0.5 * p.b

    def seed_phi(self, p: DeformationParams, grid=None) -> tuple[ScalarField, ScalarField]:
        grid = self.default_grid() if grid is None else grid
        return (ScalarField(lambda x: self.phi(p, x), grid),
                ScalarField(lambda x: self.phi_prime(p, x), grid))

    def default_grid(self, n: int = 801) -> np.ndarray:
        return np.linspace(self.display[0], self.display[1], n)

    # --- fundamental solutions ------------------------------------------

    def u_terms(self, p: DeformationParams, which: int, x: np.ndarray) -> list[_Term]:
        raise NotImplementedError

    def fundamental(self, p: DeformationParams, which: int, x, order: int = 1) -> list[Scaled]:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return _assemble(self.u_terms(p, which, x), order)

    def u_parts(self, p: DeformationParams, x, order: int = 1) -> list[Scaled]:
        """[u, u', ...] for u = α u1 + β u2 (skipping a vanishing coefficient)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        terms = []
        for coef, which in ((p.alpha, 1), (p.beta, 2)):
            if coef != 0:
                for t in self.u_terms(p, which, x):
                    t.coef *= coef
                    terms.append(t)
        return _assemble(terms, order)

    # --- conditions -----------------------------------------------------

    def b_lower_bound(self, p: DeformationParams) -> float:
        raise NotImplementedError

    def conditions(self, p: DeformationParams) -> list[Condition]:
        raise NotImplementedError

    def threshold(self, p: DeformationParams) -> float | None:
        """The closed-form bound on the free mixing coefficient, if any."""
        return None

    # --- spectrum of H+ ---------------------------------------------------

    def bound_count(self, p: DeformationParams) -> float:
        return math.inf

    def energy_plus(self, p: DeformationParams, n: int) -> float:
        raise NotImplementedError

    def psi_plus(self, p: DeformationParams, n: int) -> tuple[Callable, Callable]:
        raise NotImplementedError

    def check_level(self, p: DeformationParams, n: int) -> None:
        if n < 0 or n >= self.bound_count(p):
            raise BoundStateError(f"{self.id}: level {n} beyond bound-state count {self.bound_count(p)}")

    def spectrum_plus(self, p: DeformationParams, n: int, grid=None):
        """(E_n+, ψ_n+, ψ_n+') with closed-form, unit-normalized ψ."""
        from .construction import SpectralLine

        self.check_level(p, n)
        e = self.energy_plus(p, n)
        psi, dpsi = self.psi_plus(p, n)
        grid = self.default_grid() if grid is None else grid
        return SpectralLine(n, e, ScalarField(psi, grid), ScalarField(dpsi, grid), 1.0)

    # --- V- -------------------------------------------------------------

    def v_minus_explicit(self, p: DeformationParams, x, f):
        raise NotImplementedError

    # --- numerics ---------------------------------------------------------

    def far(self, p: DeformationParams) -> tuple[float, float]:
        return (-1e4, 1e4)

    def scan_points(self, p: DeformationParams) -> np.ndarray:
        """Compactified scan nodes plus far points, sorted."""
        raise NotImplementedError

    def scan_scale(self, p: DeformationParams) -> float:
        return 2.0


def _scan_full_line(scale: float, far: tuple[float, float]) -> np.ndarray:
    t = (np.arange(SCAN_NODES) + 0.5) / SCAN_NODES * 2.0 - 1.0
    x = scale * t / (1.0 - t * t)
    x = x[(x > far[0]) & (x < far[1])]
    return np.unique(np.concatenate([x, [far[0], far[1], 0.0]]))


def _scan_half_line(scale: float, far_hi: float) -> np.ndarray:
    t = (np.arange(SCAN_NODES) + 0.5) / SCAN_NODES
    x = scale * t / (1.0 - t)
    x = x[x < far_hi]
    return np.unique(np.concatenate([[1e-12], x, [far_hi]]))


# ---------------------------------------------------------------------------
# linear harmonic oscillator


class LinearOscillator(FamilySpec):
    id = "linear_oscillator"
    title = "linear harmonic oscillator"
    domain = Domain.full_line()
    param_names = ()
    display = (-5.0, 5.0)
    search = (-60.0, 60.0)

    def defaults(self):
        return {}

    def domain_errors(self, p):
        return []

    def normalize(self, p):
        if p.alpha != 0:
            return p.with_mixing(1.0, p.beta / p.alpha)
        return p.with_mixing(0.0, 1.0)

    def phi(self, p, x):
        return np.asarray(x, dtype=float) * 1.0

    def phi_prime(self, p, x):
        return np.ones_like(np.asarray(x, dtype=float))

    def phi_antiderivative(self, p, x):
        return 0.5 * np.asarray(x, dtype=float) ** 2

    def u_terms(self, p, which, x):
        s = (-x * x, -2 * x, np.full_like(x, -2.0))
        if which == 1:
            return [_Term(1.0, _ones(x), _zeros3(x), s, _kummer_kernel(-p.b / 4, 0.5, s[0]))]
        q = (x, np.ones_like(x), np.zeros_like(x))
        return [_Term(1.0, q, _zeros3(x), s, _kummer_kernel((2 - p.b) / 4, 1.5, s[0]))]

    def b_lower_bound(self, p):
        return -2.0

    def threshold(self, p):
        """2Γ(b/4+1)/Γ((b+2)/4): bound on |β/α|."""
        try:
            return 2.0 * log_gamma_ratio(p.b / 4 + 1, (p.b + 2) / 4).value
        except ParameterPoleError:
            return math.nan

    def conditions(self, p):
        q = self.normalize(p)
        bound = self.threshold(p)
        ratio = abs(q.beta) if q.alpha != 0 else math.inf
        return [
            Condition(POSITIVITY, p.b > -2.0, p.b, -2.0, "b > -2"),
            Condition(MIXING, bool(ratio < bound), ratio, bound, "|β/α| < 2Γ(b/4+1)/Γ((b+2)/4)"),
        ]

    def energy_plus(self, p, n):
        return n + 1.0 + 0.5 * p.b

    def psi_plus(self, p, n):
        c = (2.0**n * math.factorial(n) * SQRT_PI) ** -0.5

        def psi(x):
            x = np.asarray(x, dtype=float)
            return c * hermite_h(n, x) * np.exp(-0.5 * x * x)

        def dpsi(x):
            x = np.asarray(x, dtype=float)
            hm = hermite_h(n - 1, x) if n > 0 else 0.0 * x
            return c * (2 * n * hm - x * hermite_h(n, x)) * np.exp(-0.5 * x * x)

        return psi, dpsi

    def v_minus_explicit(self, p, x, f):
        x = np.asarray(x, dtype=float)
        return 0.5 * x * x - 0.5 * (p.b + 1) + f * (2 * x + f)

    def scan_points(self, p):
        return _scan_full_line(self.scan_scale(p), self.far(p))


# ---------------------------------------------------------------------------
# Morse


class Morse(FamilySpec):
    id = "morse"
    title = "Morse oscillator"
    domain = Domain.full_line()
    display = (-2.0, 8.0)
    search = (-30.0, 200.0)
    rho_name = "rho"

    def defaults(self):
        return {"gamma": 3.0}

    def b_from_rho(self, extra, rho, imaginary=False):
        if imaginary:
            raise ValueError("imaginary rho is not defined for the Morse family")
        return rho * rho - extra["gamma"] ** 2

    def rho(self, p):
        r2 = p.gamma**2 + p.b
        if r2 < 0:
            raise ValueError("gamma^2 + b must be non-negative")
        return math.sqrt(r2)

    def domain_errors(self, p):
        errs = super().domain_errors(p)
        if p.gamma**2 + p.b < 0:
            errs.append("gamma^2 + b must be non-negative")
        return errs

    def normalize(self, p):
        if p.beta != 0:
            return p.with_mixing(p.alpha / p.beta, 1.0)
        return p.with_mixing(1.0, 0.0)

    def phi(self, p, x):
        return p.gamma - np.exp(-np.asarray(x, dtype=float))

    def phi_prime(self, p, x):
        return np.exp(-np.asarray(x, dtype=float))

    def phi_antiderivative(self, p, x):
        x = np.asarray(x, dtype=float)
        return p.gamma * x + np.exp(-x)

    def u_terms(self, p, which, x):
        g, r = p.gamma, self.rho(p)
        sgn = 1.0 if which == 1 else -1.0
        k = g + sgn * r
        e = np.exp(-x)
        s = (-2 * e, 2 * e, -2 * e)
        logp = (-k * x, np.full_like(x, -k), np.zeros_like(x))
        return [_Term(1.0, _ones(x), logp, s, _kummer_kernel(k, 1 + sgn * 2 * r, s[0]))]

    def b_lower_bound(self, p):
        # ρ > γ - 1  <=>  b > (γ-1)² - γ² when γ > 1
        return (max(p.gamma - 1.0, 0.0)) ** 2 - p.gamma**2

    def _ratio(self, p):
        r, g = self.rho(p), p.gamma
        return log_gamma_ratio(1 - 2 * r, 1 - r - g)

    def threshold(self, p):
        """-2^(2ρ) Γ(1-2ρ)Γ(1+ρ-γ) / (Γ(1+2ρ)Γ(1-ρ-γ)): lower bound on α (β = 1)."""
        r, g = self.rho(p), p.gamma
        try:
            r1 = self._ratio(p)
            r2 = log_gamma_ratio(1 + r - g, 1 + 2 * r)
        except ParameterPoleError:
            return math.nan
        if r1.sign == 0 or r2.sign == 0:
            return 0.0
        return -r1.sign * r2.sign * math.exp(2 * r * math.log(2.0) + r1.log_abs + r2.log_abs)

    def conditions(self, p):
        if p.gamma**2 + p.b < 0:
            return [Condition(POSITIVITY, False, math.nan, math.nan, "ρ must be real")]
        q = self.normalize(p)
        r, g = self.rho(p), p.gamma
        out = [Condition(POSITIVITY, r > g - 1, r, g - 1, "ρ > γ - 1"),
               Condition(SUSY_PRESERVATION, p.beta != 0, p.beta, 0.0, "β ≠ 0")]
        try:
            ratio = self._ratio(p)
            out.append(Condition(GAMMA_SIGN, ratio.sign > 0, ratio.value, 0.0, "Γ(1-2ρ)/Γ(1-ρ-γ) > 0"))
        except ParameterPoleError:
            out.append(Condition(GAMMA_SIGN, False, math.inf, 0.0, "Γ(1-2ρ) has a pole"))
        bound = self.threshold(p)
        out.append(Condition(MIXING, bool(q.alpha > bound), q.alpha, bound, "α > bound (β = 1)"))
        return out

    def bound_count(self, p):
        return max(math.ceil(p.gamma - 1.0), 0) if p.gamma > 1 else 0

    def energy_plus(self, p, n):
        return -0.5 * (p.gamma - n - 1) ** 2 + 0.5 * (p.gamma**2 + p.b)

    def psi_plus(self, p, n):
        k = p.gamma - n - 1
        lg = log_gamma_sign(2 * p.gamma - n - 1)
        log_c = 0.5 * (math.log(2 * k) + math.lgamma(n + 1) - lg.log_abs) + k * math.log(2.0)

        def parts(x):
            x = np.asarray(x, dtype=float)
            with np.errstate(over="ignore", invalid="ignore"):
                e = np.exp(-x)
                env = np.exp(log_c - e - k * x)
                lag = laguerre_l(n, 2 * k, 2 * e)
                dlag = -laguerre_l(n - 1, 2 * k + 1, 2 * e) if n > 0 else 0.0 * x
            return e, env, lag, dlag

        # far left the envelope underflows while the polynomial overflows: ψ is 0 there
        def psi(x):
            _, env, lag, _ = parts(x)
            with np.errstate(invalid="ignore"):
                return np.where(env == 0, 0.0, env * lag)

        def dpsi(x):
            e, env, lag, dlag = parts(x)
            with np.errstate(invalid="ignore", over="ignore"):
                return np.where(env == 0, 0.0, env * ((e - k) * lag - 2 * e * dlag))

        return psi, dpsi

    def v_minus_explicit(self, p, x, f):
        x = np.asarray(x, dtype=float)
        e = np.exp(-x)
        g, r2 = p.gamma, p.gamma**2 + p.b
        return 0.5 * e * e - (g + 0.5) * e + g * g - 0.5 * r2 + f * (2 * g - 2 * e + f)

    def far(self, p):
        return (-600.0, 1e4)

    def scan_scale(self, p):
        return 3.0

    def scan_points(self, p):
        return _scan_full_line(self.scan_scale(p), self.far(p))


# ---------------------------------------------------------------------------
# symmetric Rosen-Morse


class RosenMorse(FamilySpec):
    id = "rosen_morse"
    title = "symmetric Rosen-Morse"
    domain = Domain.full_line()
    display = (-5.0, 5.0)
    search = (-40.0, 40.0)
    rho_name = "mu"

    def defaults(self):
        return {"gamma": 2.0}

    def b_from_rho(self, extra, rho, imaginary=False):
        if imaginary:
            raise ValueError("imaginary mu is not supported for the Rosen-Morse family")
        return rho * rho - extra["gamma"] ** 2

    def mu(self, p):
        m2 = p.gamma**2 + p.b
        if m2 < 0:
            raise ValueError("gamma^2 + b must be non-negative")
        return math.sqrt(m2)

    def domain_errors(self, p):
        errs = super().domain_errors(p)
        if p.gamma**2 + p.b < 0:
            errs.append("gamma^2 + b must be non-negative")
        return errs

    def phi(self, p, x):
        return p.gamma * np.tanh(np.asarray(x, dtype=float))

    def phi_prime(self, p, x):
        return p.gamma / np.cosh(np.asarray(x, dtype=float)) ** 2

    def phi_antiderivative(self, p, x):
        return p.gamma * _log_cosh(np.asarray(x, dtype=float))

    def u_terms(self, p, which, x):
        from .specfun import legendre_even_odd

        g, m = p.gamma, self.mu(p)
        nu = g - 1.0
        ce, co = self.origin_data(p)[which - 1]
        (ae, be, cc_e), (ao, bo, cc_o) = legendre_even_odd(nu, m)
        th = np.tanh(x)
        sech2 = 1.0 / np.cosh(x) ** 2
        s = (th * th, 2 * th * sech2, 2 * sech2 * (sech2 - 2 * th * th))
        k = m - g
        logp = (k * _log_cosh(x), k * th, k * sech2)
        odd_q = (th, sech2, -2 * sech2 * th)
        return [
            _Term(ce, _ones(x), logp, s, _gauss_kernel(ae, be, cc_e, s[0], sech2)),
            _Term(co, odd_q, logp, s, _gauss_kernel(ao, bo, cc_o, s[0], sech2)),
        ]

    def origin_data(self, p):
        """(u(0), u'(0)) of the two fundamental solutions.

        These are the Ferrers P and Q of degree γ-1 and order μ.  When μ - γ is
        a non-negative integer both vanish identically in the standard
        normalization, and the even/odd pair (1, 0), (0, 1) is used instead.
        """
        org = legendre_origin(p.gamma - 1.0, self.mu(p))
        det = org.p0 * org.dq0 - org.dp0 * org.q0
        size = (abs(org.p0) + abs(org.dp0)) * (abs(org.q0) + abs(org.dq0))
        if det == 0 or abs(det) <= 1e-12 * size:
            return (1.0, 0.0), (0.0, 1.0)
        return (org.p0, org.dp0), (org.q0, org.dq0)

    def b_lower_bound(self, p):
        return max(p.gamma - 1.0, 0.0) ** 2 - p.gamma**2

    def conditions(self, p):
        if p.gamma**2 + p.b < 0:
            return [Condition(POSITIVITY, False, math.nan, math.nan, "μ must be real")]
        m = self.mu(p)
        lim = max(p.gamma - 1.0, 0.0)
        return [Condition(POSITIVITY, m > lim, m, lim, "μ = sqrt(γ²+b) > max(γ-1, 0)")]

    def bound_count(self, p):
        return max(math.ceil(p.gamma - 1.0), 0) if p.gamma > 1 else 0

    def energy_plus(self, p, n):
        return 0.5 * (p.gamma**2 + p.b - (p.gamma - 1 - n) ** 2)

    def psi_plus(self, p, n):
        s = p.gamma - 1 - n
        log_n = 0.5 * (math.log(s) + math.lgamma(2 * p.gamma - 1 - n) - math.lgamma(n + 1))
        log_c = log_n - s * math.log(2.0) - math.lgamma(s + 1)
        a, b, c = -n, 2 * s + n + 1, s + 1

        def parts(x):
            x = np.asarray(x, dtype=float)
            with np.errstate(over="ignore"):
                sig = 1.0 / (1.0 + np.exp(2 * x))
                omsig = 1.0 / (1.0 + np.exp(-2 * x))
            f, df = hyp2f1_derivatives(a, b, c, np.atleast_1d(sig), 1, one_minus_z=np.atleast_1d(omsig))
            f, df = f.reshape(x.shape), df.reshape(x.shape)
            env = np.exp(log_c - s * _log_cosh(x))
            return x, env, f, df

        def psi(x):
            _, env, f, _ = parts(x)
            return env * f

        def dpsi(x):
            x, env, f, df = parts(x)
            th = np.tanh(x)
            sech2 = 1.0 / np.cosh(x) ** 2
            return env * (-s * th * f - 0.5 * sech2 * df)

        return psi, dpsi

    def v_minus_explicit(self, p, x, f):
        x = np.asarray(x, dtype=float)
        g = p.gamma
        return -g * (g + 1) / (2 * np.cosh(x) ** 2) + 0.5 * (g * g - p.b) + f * (2 * g * np.tanh(x) + f)

    def far(self, p):
        return (-300.0, 300.0)

    def scan_points(self, p):
        pts = _scan_full_line(self.scan_scale(p), self.far(p))
        return pts


# ---------------------------------------------------------------------------
# radial harmonic oscillator (broken SUSY, γ > 0)


class RadialOscillator(FamilySpec):
    id = "radial_oscillator"
    title = "radial harmonic oscillator (broken SUSY)"
    domain = Domain.half_line()
    susy_type_seed = SusyType.BROKEN
    display = (0.02, 5.0)
    search = (1e-6, 80.0)

    def defaults(self):
        return {"gamma": 0.5}

    def normalize(self, p):
        if p.alpha != 0:
            return p.with_mixing(1.0, p.beta / p.alpha)
        return p.with_mixing(0.0, 1.0)

    def phi(self, p, x):
        x = np.asarray(x, dtype=float)
        return x + p.gamma / x

    def phi_prime(self, p, x):
        x = np.asarray(x, dtype=float)
        return 1.0 - p.gamma / (x * x)

    def phi_antiderivative(self, p, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * x * x + p.gamma * np.log(x)

    def u_terms(self, p, which, x):
        g = p.gamma
        s = (-x * x, -2 * x, np.full_like(x, -2.0))
        if which == 1:
            return [_Term(1.0, _ones(x), _zeros3(x), s, _kummer_kernel(-p.b / 4, g + 0.5, s[0]))]
        k = 1 - 2 * g
        logp = (k * np.log(x), k / x, -k / (x * x))
        return [_Term(1.0, _ones(x), logp, s, _kummer_kernel(0.5 - p.b / 4 - g, 1.5 - g, s[0]))]

    def b_lower_bound(self, p):
        return -4 * p.gamma - 2

    def conditions(self, p):
        lim = self.b_lower_bound(p)
        return [Condition(POSITIVITY, p.b > lim, p.b, lim, "b > -4γ - 2"),
                Condition(SUSY_PRESERVATION, p.beta == 0 and p.alpha != 0, p.beta, 0.0, "β = 0")]

    def energy_plus(self, p, n):
        return 2 * n + 2 * p.gamma + 1 + 0.5 * p.b

    def psi_plus(self, p, n):
        g = p.gamma
        log_c = 0.5 * (math.log(2.0) + math.lgamma(n + 1) - math.lgamma(n + g + 0.5))

        def parts(x):
            x = np.asarray(x, dtype=float)
            env = np.exp(log_c + g * np.log(x) - 0.5 * x * x)
            lag = laguerre_l(n, g - 0.5, x * x)
            dlag = -laguerre_l(n - 1, g + 0.5, x * x) if n > 0 else 0.0 * x
            return x, env, lag, dlag

        def psi(x):
            _, env, lag, _ = parts(x)
            return env * lag

        def dpsi(x):
            x, env, lag, dlag = parts(x)
            return env * ((g / x - x) * lag + 2 * x * dlag)

        return psi, dpsi

    def psi_minus_closed(self, p, n, f):
        """Closed form of ψ_n- (the printed version lacks the Laguerre factor
        multiplying u'/(2xu))."""
        g = p.gamma
        log_c = 0.5 * (math.log(2.0) + math.lgamma(n + 1) - math.log(n + g + 0.5 + p.b / 4)
                       - math.lgamma(n + g + 0.5))

        def psi(x):
            x = np.asarray(x, dtype=float)
            env = np.exp(log_c + (g + 1) * np.log(x) - 0.5 * x * x)
            return env * (laguerre_l(n, g + 0.5, x * x) + f(x) / (2 * x) * laguerre_l(n, g - 0.5, x * x))

        return psi

    def v_minus_explicit(self, p, x, f):
        x = np.asarray(x, dtype=float)
        g = p.gamma
        return (0.5 * x * x + g * (g + 1) / (2 * x * x) + g - 0.5 * (p.b + 1)
                + f * (2 * x + 2 * g / x + f))

    def far(self, p):
        return (0.0, 1e4)

    def scan_points(self, p):
        return _scan_half_line(self.scan_scale(p), self.far(p)[1])


# ---------------------------------------------------------------------------
# hydrogen atom


class Hydrogen(FamilySpec):
    id = "hydrogen"
    title = "radial hydrogen atom"
    domain = Domain.half_line()
    param_names = ("gamma", "a")
    display = (0.01, 2.0)
    search = (1e-6, 400.0)
    rho_name = "rho"

    def defaults(self):
        return {"gamma": 2.8, "a": 1.0}

    def domain_errors(self, p):
        errs = super().domain_errors(p)
        if not p.a > 0:
            errs.append("a must be positive")
        if p.b + (p.a / p.gamma) ** 2 <= 0 if p.gamma > 0 else False:
            errs.append("b + a^2/gamma^2 must be positive")
        return errs

    def b_from_rho(self, extra, rho, imaginary=False):
        if imaginary:
            raise ValueError("imaginary rho is not defined for the hydrogen family")
        return rho * rho - (extra["a"] / extra["gamma"]) ** 2

    def rho(self, p):
        r2 = p.b + (p.a / p.gamma) ** 2
        if r2 <= 0:
            raise ValueError("b + a^2/gamma^2 must be positive")
        return math.sqrt(r2)

    def normalize(self, p):
        if p.alpha != 0:
            return p.with_mixing(1.0, p.beta / p.alpha)
        return p.with_mixing(0.0, 1.0)

    def phi(self, p, x):
        x = np.asarray(x, dtype=float)
        return p.a / p.gamma - p.gamma / x

    def phi_prime(self, p, x):
        x = np.asarray(x, dtype=float)
        return p.gamma / (x * x)

    def phi_antiderivative(self, p, x):
        x = np.asarray(x, dtype=float)
        return p.a * x / p.gamma - p.gamma * np.log(x)

    def u_terms(self, p, which, x):
        g, a, r = p.gamma, p.a, self.rho(p)
        lam = a / g + r
        s = (2 * r * x, np.full_like(x, 2 * r), np.zeros_like(x))
        if which == 1:
            logp = (-lam * x, np.full_like(x, -lam), np.zeros_like(x))
            return [_Term(1.0, _ones(x), logp, s, _kummer_kernel(-g - a / r, -2 * g, s[0]))]
        k = 2 * g + 1
        logp = (-lam * x + k * np.log(2 * r * x), -lam + k / x, -k / (x * x))
        return [_Term(1.0, _ones(x), logp, s, _kummer_kernel(g + 1 - a / r, 2 * g + 2, s[0]))]

    def b_lower_bound(self, p):
        return (p.a / (p.gamma + 1)) ** 2 - (p.a / p.gamma) ** 2

    def _ratio(self, p):
        r = self.rho(p)
        return log_gamma_ratio(-2 * p.gamma, -p.gamma - p.a / r)

    def threshold(self, p):
        """-Γ(-2γ)/Γ(-γ-a/ρ) · Γ(γ+1-a/ρ)/Γ(2γ+2): lower bound on β (α = 1)."""
        g, a = p.gamma, p.a
        r = self.rho(p)
        try:
            r1 = self._ratio(p)
        except ParameterPoleError:
            return math.nan
        try:
            r2 = log_gamma_ratio(g + 1 - a / r, 2 * g + 2)
        except ParameterPoleError:
            return -r1.sign * math.inf if r1.sign else 0.0
        if r1.sign == 0 or r2.sign == 0:
            return 0.0
        return -r1.sign * r2.sign * math.exp(r1.log_abs + r2.log_abs)

    def conditions(self, p):
        if p.b + (p.a / p.gamma) ** 2 <= 0:
            return [Condition(POSITIVITY, False, math.nan, math.nan, "ρ must be real and positive")]
        q = self.normalize(p)
        r, g, a = self.rho(p), p.gamma, p.a
        out = [Condition(POSITIVITY, r > a / (g + 1), r, a / (g + 1), "ρ > a/(γ+1)"),
               Condition(SUSY_PRESERVATION, p.alpha != 0, p.alpha, 0.0, "α ≠ 0")]
        try:
            ratio = self._ratio(p)
            out.append(Condition(GAMMA_SIGN, ratio.sign > 0, ratio.value, 0.0, "Γ(-2γ)/Γ(-γ-a/ρ) > 0"))
        except ParameterPoleError:
            out.append(Condition(GAMMA_SIGN, False, math.inf, 0.0, "Γ(-2γ) has a pole"))
        bound = self.threshold(p)
        out.append(Condition(MIXING, bool(q.beta > bound), q.beta, bound, "β > bound (α = 1)"))
        return out

    def energy_plus(self, p, n):
        return -p.a**2 / (2 * (n + p.gamma + 1) ** 2) + 0.5 * (p.b + (p.a / p.gamma) ** 2)

    def psi_plus(self, p, n):
        g, a = p.gamma, p.a
        kap = a / (n + g + 1)
        log_norm2 = -(2 * g + 3) * math.log(2 * kap) + math.log(2 * n + 2 * g + 2) \
            + math.lgamma(n + 2 * g + 2) - math.lgamma(n + 1)
        log_c = -0.5 * log_norm2

        def parts(x):
            x = np.asarray(x, dtype=float)
            env = np.exp(log_c + (g + 1) * np.log(x) - kap * x)
            lag = laguerre_l(n, 2 * g + 1, 2 * kap * x)
            dlag = -laguerre_l(n - 1, 2 * g + 2, 2 * kap * x) if n > 0 else 0.0 * x
            return x, env, lag, dlag

        def psi(x):
            _, env, lag, _ = parts(x)
            return env * lag

        def dpsi(x):
            x, env, lag, dlag = parts(x)
            return env * (((g + 1) / x - kap) * lag + 2 * kap * dlag)

        return psi, dpsi

    def v_minus_explicit(self, p, x, f):
        x = np.asarray(x, dtype=float)
        g, a = p.gamma, p.a
        r2 = p.b + (a / g) ** 2
        return (-a / x + g * (g - 1) / (2 * x * x) + a * a / (g * g) - 0.5 * r2
                + f * (2 * a / g - 2 * g / x + f))

    def far(self, p):
        return (0.0, 1e5)

    def scan_scale(self, p):
        return 2.0 * (p.gamma + 1) / p.a

    def scan_points(self, p):
        return _scan_half_line(self.scan_scale(p), self.far(p)[1])


# ---------------------------------------------------------------------------
# Pöschl-Teller


class PoschlTeller(FamilySpec):
    id = "poschl_teller"
    title = "symmetric Pöschl-Teller"
    domain = Domain.interval()
    display = (-1.5, 1.5)
    search = (-math.pi / 2, math.pi / 2)
    rho_name = "rho"

    def defaults(self):
        return {"gamma": 2.0}

    def b_from_rho(self, extra, rho, imaginary=False):
        g = extra["gamma"]
        return g * g + rho * rho if imaginary else g * g - rho * rho

    def rho(self, p) -> complex | float:
        r2 = p.gamma**2 - p.b
        if r2 >= 0:
            return math.sqrt(r2)
        return complex(0.0, math.sqrt(-r2))

    def domain_errors(self, p):
        errs = super().domain_errors(p)
        if p.rho_imaginary and p.gamma**2 - p.b > 0:
            errs.append("rho_imaginary requires b > gamma^2")
        return errs

    def normalize(self, p):
        if p.alpha != 0:
            return p.with_mixing(1.0, p.beta / p.alpha)
        return p.with_mixing(0.0, 1.0)

    def phi(self, p, x):
        return p.gamma * np.tan(np.asarray(x, dtype=float))

    def phi_prime(self, p, x):
        return p.gamma / np.cos(np.asarray(x, dtype=float)) ** 2

    def phi_antiderivative(self, p, x):
        return -p.gamma * np.log(np.cos(np.asarray(x, dtype=float)))

    def u_terms(self, p, which, x):
        g, r = p.gamma, self.rho(p)
        sn, cs = np.sin(x), np.cos(x)
        s = (sn * sn, 2 * sn * cs, 2 * (cs * cs - sn * sn))
        w = cs * cs
        if which == 1:
            return [_Term(1.0, _ones(x), _zeros3(x), s,
                          _gauss_kernel(-(g + r) / 2, -(g - r) / 2, 0.5, s[0], w))]
        q = (sn, cs, -sn)
        return [_Term(1.0, q, _zeros3(x), s,
                      _gauss_kernel((1 - g - r) / 2, (1 - g + r) / 2, 1.5, s[0], w))]

    def b_lower_bound(self, p):
        return -2 * p.gamma - 1

    def threshold(self, p):
        """2Γ(1+(γ+ρ)/2)Γ(1+(γ-ρ)/2) / (Γ((1+γ+ρ)/2)Γ((1+γ-ρ)/2)): bound on |β| (α = 1)."""
        g, r = p.gamma, self.rho(p)
        if isinstance(r, complex):
            z = complex(1 + g / 2, r.imag / 2)
            zz = complex((1 + g) / 2, r.imag / 2)
            return 2.0 * math.exp(2 * (sc.loggamma(z) - sc.loggamma(zz)).real)
        try:
            r1 = log_gamma_ratio(1 + (g + r) / 2, (1 + g + r) / 2)
            r2 = log_gamma_ratio(1 + (g - r) / 2, (1 + g - r) / 2)
        except ParameterPoleError:
            return math.nan
        return 2.0 * r1.value * r2.value

    def conditions(self, p):
        g = p.gamma
        r = self.rho(p)
        q = self.normalize(p)
        if isinstance(r, complex):
            pos = Condition(POSITIVITY, True, r.imag, math.nan, "ρ imaginary")
        else:
            pos = Condition(POSITIVITY, 0 <= r < g + 1, r, g + 1, "0 ≤ ρ < γ + 1")
        bound = self.threshold(p)
        val = abs(q.beta) if q.alpha != 0 else math.inf
        return [pos, Condition(MIXING, bool(val < bound), val, bound, "|β| < bound (α = 1)")]

    def energy_plus(self, p, n):
        return 0.5 * (p.gamma + 1 + n) ** 2 + 0.5 * (p.b - p.gamma**2)

    def psi_plus(self, p, n):
        g = p.gamma
        mu = g + 0.5
        log_n = 0.5 * (math.log(g + 1 + n) + math.lgamma(2 * g + 2 + n) - math.lgamma(n + 1))
        log_c = log_n - mu * math.log(2.0) - math.lgamma(mu + 1)
        a, b, c = -n, 2 * g + n + 2, g + 1.5

        def parts(x):
            x = np.asarray(x, dtype=float)
            sn, cs = np.sin(x), np.cos(x)
            sig = 0.5 * (1 - sn)
            f, df = hyp2f1_derivatives(a, b, c, np.atleast_1d(sig), 1,
                                       one_minus_z=np.atleast_1d(0.5 * (1 + sn)))
            return sn, cs, f.reshape(x.shape), df.reshape(x.shape)

        def psi(x):
            sn, cs, f, _ = parts(x)
            return math.exp(log_c) * np.abs(cs) ** (g + 1) * f

        def dpsi(x):
            sn, cs, f, df = parts(x)
            acs = np.abs(cs)
            return math.exp(log_c) * (-(g + 1) * acs**g * sn * f - 0.5 * acs ** (g + 2) * df)

        return psi, dpsi

    def v_minus_explicit(self, p, x, f):
        x = np.asarray(x, dtype=float)
        g = p.gamma
        r2 = g * g - p.b
        return g * (g - 1) / (2 * np.cos(x) ** 2) - g * g + 0.5 * r2 + f * (2 * g * np.tan(x) + f)

    def far(self, p):
        return (self.domain.lower, self.domain.upper)

    def scan_points(self, p):
        t = np.linspace(-1.0, 1.0, SCAN_NODES + 1)
        return (math.pi / 2) * t


# ---------------------------------------------------------------------------
# catalog

FAMILIES: dict[str, FamilySpec] = {
    f.id: f
    for f in (LinearOscillator(), Morse(), RosenMorse(), RadialOscillator(), Hydrogen(), PoschlTeller())
}


def get_family(family_id: str | FamilySpec) -> FamilySpec:
    if isinstance(family_id, FamilySpec):
        return family_id
    try:
        return FAMILIES[family_id]
    except KeyError:
        raise ValueError(f"unknown family {family_id!r}; known: {', '.join(FAMILIES)}") from None


def seed_phi(family, p: DeformationParams, grid=None) -> tuple[ScalarField, ScalarField]:
    return get_family(family).seed_phi(p, grid)


def spectrum_plus(family, p: DeformationParams, n: int, grid=None):
    return get_family(family).spectrum_plus(p, n, grid)


# ---------------------------------------------------------------------------
# special cases with their own closed forms


def hermite_imaginary(n: int, x):
    """i^(-n) H_n(i x), a real polynomial."""
    x = np.asarray(x, dtype=float)
    h_prev, h = np.zeros_like(x), np.ones_like(x)
    for k in range(n):
        h_prev, h = h, 2 * x * h + 2 * k * h_prev
    return h


def bagrov_samsonov_potential(N: int, x):
    """The N-th order Darboux partner of the oscillator (b = 4N, α = 1, β = 0)."""
    x = np.asarray(x, dtype=float)
    h2n = hermite_imaginary(2 * N, x)
    r0 = hermite_imaginary(2 * N - 2, x) / h2n
    r1 = hermite_imaginary(2 * N - 1, x) / h2n
    return 0.5 * x * x - 8 * N * (2 * N - 1) * r0 + 16 * N * N * r1 * r1 + 2 * N - 0.5


def special_case_u(case: str, x, **params) -> np.ndarray:
    """Closed forms of u for the classical special cases.

    ``mielnik``: b = 0, α = gamma, β = 1 for the oscillator.
    ``bagrov_samsonov``: b = 4N, α = 1, β = 0, normalized to u(0) = 1.
    ``radial_b0``: unbroken radial oscillator (l = -γ > 0), b = 0.
    ``hydrogen_b0``: ρ = a/γ (b = 0).
    """
    x = np.asarray(x, dtype=float)
    if case == "mielnik":
        return params.get("gamma", 1.0) + 0.5 * SQRT_PI * erf_fn(x)
    if case == "bagrov_samsonov":
        N = int(params["N"])
        if N < 1:
            raise ValueError("N must be a positive integer")
        return hermite_imaginary(2 * N, x) / hermite_imaginary(2 * N, 0.0)
    if case == "radial_b0":
        l = float(params["l"])
        if not l > 0:
            raise ValueError("the unbroken radial case needs l = -gamma > 0")
        alpha, beta = params.get("alpha", 1.0), params.get("beta", 1.0)
        ints = np.array([sci_integrate.quad(lambda t: t ** (2 * l) * math.exp(-t * t), 0.0, xi,
                                            epsabs=0.0, epsrel=1e-13, limit=200)[0] for xi in np.ravel(x)])
        return alpha + 2 * beta * ints.reshape(x.shape)
    if case == "hydrogen_b0":
        g, a = float(params["gamma"]), float(params.get("a", 1.0))
        alpha, beta = params.get("alpha", 1.0), params.get("beta", 0.0)
        ints = np.array([sci_integrate.quad(lambda t: t ** (2 * g) * math.exp(-t), 0.0, 2 * a * xi / g,
                                            epsabs=0.0, epsrel=1e-13, limit=200)[0] for xi in np.ravel(x)])
        return alpha + beta * (2 * g + 1) * ints.reshape(x.shape)
    raise ValueError(f"unknown special case {case!r}")


def radial_unbroken_u(l: float, alpha: float, beta: float, x) -> np.ndarray:
    """α u1 + β u2 of the radial family continued to γ = -l at b = 0 (generic form)."""
    x = np.asarray(x, dtype=float)
    u2 = x ** (1 + 2 * l) * kummer_scaled(0.5 + l, 1.5 + l, -x * x).value()
    return alpha + beta * u2
