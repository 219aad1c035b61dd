"""Special-function kernels: gamma with sign, erf, Kummer 1F1, Gauss 2F1,
Hermite, Laguerre and Ferrers-Legendre functions.

All routines accept numpy arrays for the argument ``z``/``x`` (parameters are
scalars) and are pure functions of their inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import special as sc

from .errors import ConvergenceError, DivergenceError, ParameterPoleError
from .scaled import Scaled

INT_TOL = 1e-12
# c - a - b closer than this to an integer uses the logarithmic 2F1 connection formulas
DEGENERATE_TOL = 1e-8
ASYMPTOTIC_Z = 40.0


@dataclass(frozen=True)
class SeriesEvalPolicy:
    max_terms: int = 500
    abs_tol: float = 1e-300
    rel_tol: float = 1e-14

    def __post_init__(self):
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")


DEFAULT_POLICY = SeriesEvalPolicy()


class LogGammaResult(NamedTuple):
    log_abs: float
    sign: int


class SignedLog(NamedTuple):
    """Real number ``sign * exp(log_abs)``; ``sign == 0`` encodes an exact zero."""

    log_abs: float
    sign: int

    @property
    def value(self) -> float:
        if self.sign == 0:
            return 0.0
        try:
            return self.sign * math.exp(self.log_abs)
        except OverflowError:
            return self.sign * math.inf


# ---------------------------------------------------------------------------
# gamma function helpers


def nonpositive_int(x, tol: float = INT_TOL):
    """Return ``-m`` if ``x`` is (within ``tol``) a non-positive integer, else None."""
    if isinstance(x, complex):
        if abs(x.imag) > tol:
            return None
        x = x.real
    r = round(x)
    if r <= 0 and abs(x - r) <= tol * max(1.0, abs(x)):
        return int(r)
    return None


def _near_int(x, tol: float = INT_TOL):
    r = round(x)
    if abs(x - r) <= tol * max(1.0, abs(x)):
        return int(r)
    return None


def _sinpi(x: float) -> float:
    r = x - 2.0 * round(x / 2.0)
    return math.sin(math.pi * r)


def log_gamma_sign(x: float) -> LogGammaResult:
    """``log|Γ(x)|`` and the sign of ``Γ(x)``; negative arguments use reflection."""
    x = float(x)
    if nonpositive_int(x) is not None:
        raise ParameterPoleError(f"Gamma has a pole at x={x}")
    if x > 0:
        return LogGammaResult(math.lgamma(x), 1)
    # Γ(x) Γ(1-x) = π / sin(πx)
    s = _sinpi(x)
    log_abs = math.log(math.pi / abs(s)) - math.lgamma(1.0 - x)
    return LogGammaResult(log_abs, 1 if s > 0 else -1)


def log_gamma_ratio(num: float, den: float) -> SignedLog:
    """``Γ(num)/Γ(den)`` in log space.

    When ``den - num`` is an integer the ratio is a finite Pochhammer product
    even if both arguments sit on poles; this is the limit the hypergeometric
    series themselves realize.
    """
    m = _near_int(den - num)
    if m is not None:
        if m >= 0:
            # Γ(num)/Γ(num+m) = 1/(num)_m
            prod = SignedLog(0.0, 1)
            for k in range(m):
                f = num + k
                if nonpositive_int(f) == 0 or f == 0:
                    raise ParameterPoleError(f"Gamma ratio Γ({num})/Γ({den}) is infinite")
                prod = SignedLog(prod.log_abs - math.log(abs(f)), prod.sign * (1 if f > 0 else -1))
            return prod
        # Γ(num)/Γ(num-k) = (num-k)_k
        prod = SignedLog(0.0, 1)
        for k in range(-m):
            f = den + k
            if abs(f) <= INT_TOL:
                return SignedLog(-math.inf, 0)
            prod = SignedLog(prod.log_abs + math.log(abs(f)), prod.sign * (1 if f > 0 else -1))
        return prod
    if nonpositive_int(num) is not None:
        raise ParameterPoleError(f"Gamma ratio Γ({num})/Γ({den}) is infinite")
    if nonpositive_int(den) is not None:
        return SignedLog(-math.inf, 0)
    gn, gd = log_gamma_sign(num), log_gamma_sign(den)
    return SignedLog(gn.log_abs - gd.log_abs, gn.sign * gd.sign)


def gamma_ratio(num: float, den: float) -> float:
    return log_gamma_ratio(num, den).value


def _cgamma_coef(nums, dens) -> complex:
    """prod Γ(nums) / prod Γ(dens) for complex arguments; zero if a denominator is a pole."""
    for d in dens:
        if nonpositive_int(complex(d)) is not None:
            return 0.0 + 0.0j
    for n in nums:
        if nonpositive_int(complex(n)) is not None:
            raise ParameterPoleError(f"Gamma pole at {n}")
    lg = sum(sc.loggamma(complex(n)) for n in nums) - sum(sc.loggamma(complex(d)) for d in dens)
    return complex(np.exp(lg))


# ---------------------------------------------------------------------------
# elementary kernels


def erf_fn(x):
    return sc.erf(x)


def hermite_h(n: int, x):
    """Physicists' Hermite polynomial by the three-term recurrence."""
    if n < 0:
        raise ValueError("n must be non-negative")
    x = np.asarray(x, dtype=float)
    h_prev, h = np.zeros_like(x), np.ones_like(x)
    for k in range(n):
        h_prev, h = h, 2.0 * x * h - 2.0 * k * h_prev
    return h if h.ndim else float(h)


def laguerre_l(n: int, nu: float, x):
    """Generalized Laguerre polynomial L_n^(nu)(x) by recurrence."""
    if n < 0:
        return np.zeros_like(np.asarray(x, dtype=float)) if np.ndim(x) else 0.0
    x = np.asarray(x, dtype=float)
    l_prev, l_cur = np.zeros_like(x), np.ones_like(x)
    for k in range(n):
        l_prev, l_cur = l_cur, ((2 * k + 1 + nu - x) * l_cur - (k + nu) * l_prev) / (k + 1)
    return l_cur if l_cur.ndim else float(l_cur)


# ---------------------------------------------------------------------------
# Kummer 1F1


def _kummer_poly_scaled(m: int, b: float, z: np.ndarray) -> Scaled:
    """1F1(-m, b, z), a polynomial of degree m, in scaled form for large |z|."""
    coefs = [1.0]
    for k in range(m):
        coefs.append(coefs[-1] * (-m + k) / ((b + k) * (k + 1)))
    big = np.abs(z) > 1.0
    mant = np.empty_like(z)
    scale = np.zeros_like(z)
    zs = z[~big]
    acc = np.zeros_like(zs)
    for c in reversed(coefs):
        acc = acc * zs + c
    mant[~big] = acc
    if big.any():
        zb = z[big]
        w = 1.0 / zb
        acc = np.zeros_like(zb)
        for c in coefs:
            acc = acc * w + c
        mant[big] = acc * np.sign(zb) ** m
        scale[big] = m * np.log(np.abs(zb))
    return Scaled(mant, scale)


def _kummer_series(a: float, b: float, z: np.ndarray, policy: SeriesEvalPolicy) -> np.ndarray:
    term = np.ones_like(z)
    total = np.ones_like(z)
    for k in range(policy.max_terms):
        term = term * ((a + k) / (b + k)) * z / (k + 1)
        total = total + term
        if np.all(np.abs(term) <= policy.rel_tol * np.abs(total) + policy.abs_tol):
            return total
    raise ConvergenceError(f"1F1({a}, {b}, z) series did not converge in {policy.max_terms} terms")


def _asymptotic_sum(p: float, q: float, inv: np.ndarray, policy: SeriesEvalPolicy) -> np.ndarray:
    """sum_s (p)_s (q)_s / s! * inv**s, truncated at its smallest term."""
    term = np.ones_like(inv)
    total = np.ones_like(inv)
    active = np.ones(inv.shape, dtype=bool)
    for s in range(policy.max_terms):
        new = term * (p + s) * (q + s) / (s + 1) * inv
        grow = np.abs(new) > np.abs(term)
        active &= ~grow
        total = np.where(active, total + new, total)
        term = np.where(active, new, term)
        active &= np.abs(new) > policy.rel_tol * np.abs(total) + policy.abs_tol
        if not active.any():
            break
    return total


def _kummer_asymptotic(a: float, b: float, z: np.ndarray, policy: SeriesEvalPolicy,
                       times_exp_minus_z: bool = False) -> Scaled:
    """Large positive z: Γ(b)/Γ(a) e^z z^(a-b) S1 + Γ(b)/Γ(b-a) cos(πa) z^(-a) S2.

    With ``times_exp_minus_z`` the result is multiplied by e^(-z) analytically,
    which keeps the Kummer-transformed branch free of cancellation in the
    exponent for huge |z|.
    """
    lz = np.log(z)
    inv = 1.0 / z
    gb = log_gamma_sign(b)
    e1 = 0.0 if times_exp_minus_z else z
    e2 = -z if times_exp_minus_z else 0.0
    out = Scaled(np.zeros_like(z), np.zeros_like(z))
    if nonpositive_int(a) is None:
        ga = log_gamma_sign(a)
        s1 = _asymptotic_sum(1.0 - a, b - a, inv, policy)
        out = out + Scaled(gb.sign * ga.sign * s1, gb.log_abs - ga.log_abs + e1 + (a - b) * lz)
    if nonpositive_int(b - a) is None:
        gba = log_gamma_sign(b - a)
        s2 = _asymptotic_sum(a, a - b + 1.0, -inv, policy)
        c = _cospi(a)
        out = out + Scaled(gb.sign * gba.sign * c * s2, gb.log_abs - gba.log_abs - a * lz + e2)
    return out


def kummer_scaled(a: float, b: float, z, policy: SeriesEvalPolicy = DEFAULT_POLICY,
                  method: str = "auto") -> Scaled:
    """1F1(a, b, z) as a :class:`Scaled` array.

    Negative ``z`` goes through the Kummer transform
    ``1F1(a,b,z) = e^z 1F1(b-a,b,-z)``; positive ``z`` above 40 uses the
    asymptotic expansion.  ``method="series"`` forces the plain power series
    (only sensible for moderate |z|).
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if method == "series":
        if nonpositive_int(b) is not None:
            raise ParameterPoleError(f"1F1({a}, {b}, z): b is a non-positive integer")
        return Scaled.of(_kummer_series(a, b, z, policy))
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    ma = nonpositive_int(a)
    nb = nonpositive_int(b)
    if ma is not None:
        m = -ma
        if nb is not None and -nb < m:
            raise ParameterPoleError(f"1F1({a}, {b}, z): b is a pole before the series terminates")
        return _kummer_poly_scaled(m, float(b), z)
    if nb is not None:
        raise ParameterPoleError(f"1F1({a}, {b}, z): b is a non-positive integer")

    mant = np.empty_like(z)
    scale = np.zeros_like(z)
    neg = z < 0
    near = neg & (z >= -ASYMPTOTIC_Z)
    if near.any():
        t = kummer_scaled(b - a, b, -z[near], policy)
        mant[near] = t.mant
        scale[near] = t.scale + z[near]
    far = z < -ASYMPTOTIC_Z
    if far.any():
        t = _kummer_asymptotic(b - a, b, -z[far], policy, times_exp_minus_z=True)
        mant[far] = t.mant
        scale[far] = t.scale
    small = (~neg) & (z <= ASYMPTOTIC_Z)
    if small.any():
        mant[small] = _kummer_series(a, b, z[small], policy)
    large = (~neg) & (z > ASYMPTOTIC_Z)
    if large.any():
        t = _kummer_asymptotic(a, b, z[large], policy)
        mant[large] = t.mant
        scale[large] = t.scale
    return Scaled(mant, scale)


def kummer_1f1(a: float, b: float, z, policy: SeriesEvalPolicy = DEFAULT_POLICY):
    scalar = np.ndim(z) == 0
    v = kummer_scaled(a, b, z, policy).value()
    return float(v[0]) if scalar else v


def kummer_derivatives(a: float, b: float, z, order: int = 2,
                       policy: SeriesEvalPolicy = DEFAULT_POLICY) -> list[Scaled]:
    """[M, dM/dz, d2M/dz2, ...] via d/dz 1F1(a,b,z) = (a/b) 1F1(a+1,b+1,z)."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    out = [kummer_scaled(a, b, z, policy)]
    coef = 1.0
    for k in range(1, order + 1):
        # once a factor vanishes the derivative is identically zero
        coef = 0.0 if coef == 0.0 or (a + k - 1) == 0 else coef * (a + k - 1) / (b + k - 1)
        if coef == 0.0:
            out.append(Scaled(np.zeros_like(z), np.zeros_like(z)))
        else:
            out.append(kummer_scaled(a + k, b + k, z, policy) * coef)
    return out


# ---------------------------------------------------------------------------
# Gauss 2F1


def _is_real(*vals) -> bool:
    return all(abs(complex(v).imag) == 0.0 for v in vals)


def _hyp_series(a, b, c, z, policy: SeriesEvalPolicy):
    dtype = complex if not _is_real(a, b, c) else float
    z = np.asarray(z, dtype=dtype)
    term = np.ones_like(z)
    total = np.ones_like(z)
    for k in range(policy.max_terms):
        term = term * ((a + k) * (b + k) / ((c + k) * (k + 1))) * z
        total = total + term
        if np.all(np.abs(term) <= policy.rel_tol * np.abs(total) + policy.abs_tol):
            return total
    raise ConvergenceError(f"2F1({a}, {b}; {c}; z) series did not converge in {policy.max_terms} terms")


def _hyp_generic_one(a, b, c, w, policy):
    s = c - a - b
    c1 = _cgamma_coef([c, s], [c - a, c - b])
    out = c1 * _hyp_series(a, b, 1 - s, w, policy)
    if np.any(w > 0):
        c2 = _cgamma_coef([c, -s], [a, b])
        if c2 != 0:
            with np.errstate(divide="ignore"):
                pw = np.where(w > 0, np.power(w.astype(complex), s), 0.0)
            out = out + c2 * pw * _hyp_series(c - a, c - b, 1 + s, w, policy)
    return out


def _hyp_degenerate_one(a, b, m: int, w, policy):
    """Connection formulas for c = a + b + m with integer m (logarithmic case)."""
    w = w.astype(complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        lw = np.log(w)
    if m < 0:
        k = -m
        c = a + b - k
        pre = _cgamma_coef([k, c], [a, b])
        fin = np.zeros_like(w)
        t = np.ones_like(w)
        for n in range(k):
            fin = fin + t
            if n < k - 1:
                t = t * (a - k + n) * (b - k + n) / ((n + 1) * (1 - k + n)) * w
        with np.errstate(divide="ignore", invalid="ignore"):
            first = pre * np.power(w, -k) * fin
        coef = (-1) ** k * _cgamma_coef([c], [a - k, b - k])
        tail = _log_tail(a, b, k, 0, w, lw, policy)
        return first - coef * tail
    c = a + b + m
    if m == 0:
        coef = _cgamma_coef([c], [a, b])
        total = np.zeros_like(w)
        term = np.ones_like(w)
        for n in range(policy.max_terms):
            bracket = 2 * sc.psi(n + 1) - sc.psi(a + n) - sc.psi(b + n) - lw
            inc = term * bracket
            total = total + inc
            term = term * (a + n) * (b + n) / ((n + 1) ** 2) * w
            if np.all(np.abs(inc) <= policy.rel_tol * np.abs(total) + policy.abs_tol) and n > 2:
                return coef * total
        raise ConvergenceError("degenerate 2F1 series did not converge")
    pre = _cgamma_coef([m, c], [a + m, b + m])
    fin = np.zeros_like(w)
    t = np.ones_like(w)
    for n in range(m):
        fin = fin + t
        if n < m - 1:
            t = t * (a + n) * (b + n) / ((n + 1) * (1 - m + n)) * w
    coef = _cgamma_coef([c], [a, b])
    tail = _log_tail(a, b, m, m, w, lw, policy)
    sign = (-1) ** m
    with np.errstate(invalid="ignore"):
        wm = np.power(w, m)
    second = np.where(w == 0, 0.0, sign * wm * tail)
    return pre * fin - coef * second


def _log_tail(a, b, m: int, shift: int, w, lw, policy):
    """sum_n (a+shift)_n (b+shift)_n / (n! (n+m)!) w^n [ln w - ψ(n+1) - ψ(n+m+1) + ψ(a+shift+n) + ψ(b+shift+n)]."""
    total = np.zeros_like(w)
    term = np.ones_like(w) / math.factorial(m)
    for n in range(policy.max_terms):
        bracket = lw - sc.psi(n + 1) - sc.psi(n + m + 1) + sc.psi(a + shift + n) + sc.psi(b + shift + n)
        with np.errstate(invalid="ignore"):
            inc = np.where(term == 0, 0.0, term * bracket)
        total = total + inc
        term = term * (a + shift + n) * (b + shift + n) / ((n + 1) * (n + m + 1)) * w
        if n > 2 and np.all(np.abs(inc) <= policy.rel_tol * np.abs(total) + policy.abs_tol):
            return total
    raise ConvergenceError("degenerate 2F1 series did not converge")


def hyp2f1_complex(a, b, c, z, one_minus_z=None, policy: SeriesEvalPolicy = DEFAULT_POLICY):
    """2F1(a, b; c; z) for real z in [-1, 1], complex parameters allowed.

    ``one_minus_z`` may carry an accurate value of ``1 - z`` when z is close
    to one (e.g. ``cos(x)**2`` for ``z = sin(x)**2``).
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    w = np.atleast_1d(np.asarray(1.0 - z if one_minus_z is None else one_minus_z, dtype=float))
    if np.any(z > 1) or np.any(z < -1):
        raise ValueError("2F1 is only evaluated for z in [-1, 1]")
    ma = nonpositive_int(complex(a))
    mb = nonpositive_int(complex(b))
    nc = nonpositive_int(complex(c))
    terminating = [-x for x in (ma, mb) if x is not None]
    if nc is not None and not (terminating and min(terminating) <= -nc):
        raise ParameterPoleError(f"2F1: c={c} is a non-positive integer")
    out = np.zeros(z.shape, dtype=complex)
    if terminating:
        # polynomial; the series terminates on its own
        out[:] = _hyp_series(a, b, c, z, policy)
        return out
    lo = z < -0.5
    if lo.any():
        zz = z[lo]
        out[lo] = np.power((1 - zz).astype(complex), -a) * _hyp_series(a, c - b, c, zz / (zz - 1), policy)
    mid = (z >= -0.5) & (z <= 0.5)
    if mid.any():
        out[mid] = _hyp_series(a, b, c, z[mid], policy)
    hi = z > 0.5
    if hi.any():
        ww = w[hi]
        s = complex(c - a - b)
        m = _near_int(s.real, DEGENERATE_TOL) if abs(s.imag) < DEGENERATE_TOL else None
        if np.any(ww == 0):
            if s.real <= 0:
                raise DivergenceError(f"2F1({a},{b};{c};1) diverges: c-a-b={s.real} <= 0")
        if m is not None:
            out[hi] = _hyp_degenerate_one(a, b, m, ww, policy)
        else:
            out[hi] = _hyp_generic_one(a, b, c, ww, policy)
    return out


def gauss_2f1(a, b, c, z, policy: SeriesEvalPolicy = DEFAULT_POLICY, one_minus_z=None):
    """Real-valued 2F1; complex ``a``, ``b`` are accepted when ``b == conj(a)``."""
    scalar = np.ndim(z) == 0
    v = hyp2f1_complex(a, b, c, z, one_minus_z, policy)
    if not _is_real(a, b, c):
        imag = np.abs(v.imag)
        if np.any(imag > 1e-10 * np.maximum(np.abs(v.real), 1e-300)):
            raise ValueError("2F1 with these complex parameters is not real")
    r = v.real
    return float(r[0]) if scalar else r


def hyp2f1_derivatives(a, b, c, z, order: int = 2, one_minus_z=None,
                       policy: SeriesEvalPolicy = DEFAULT_POLICY) -> list[np.ndarray]:
    """[F, dF/dz, d2F/dz2, ...] via d/dz 2F1 = (ab/c) 2F1(a+1, b+1; c+1)."""
    out = [gauss_2f1(a, b, c, np.atleast_1d(z), policy, one_minus_z)]
    coef = 1.0 + 0.0j
    for k in range(1, order + 1):
        coef *= (a + k - 1) * (b + k - 1) / (c + k - 1)
        if coef == 0:
            out.append(np.zeros_like(out[0]))
        else:
            f = hyp2f1_complex(a + k, b + k, c + k, np.atleast_1d(z), one_minus_z, policy)
            out.append((coef * f).real)
    return out


# ---------------------------------------------------------------------------
# Ferrers (on-the-cut) Legendre functions


class LegendreOrigin(NamedTuple):
    p0: float
    dp0: float
    q0: float
    dq0: float


def legendre_origin(degree: float, order: float) -> LegendreOrigin:
    """Values and slopes of Ferrers P^mu_nu and Q^mu_nu at x = 0.

    Normalization follows the usual on-the-cut convention (the one tabulated
    by Magnus-Oberhettinger-Soni and DLMF chapter 14).
    """
    nu, mu = float(degree), float(order)
    sq = math.sqrt(math.pi)

    def rg(x):
        return 0.0 if nonpositive_int(x) is not None else float(sc.rgamma(x))

    def g(x):
        if nonpositive_int(x) is not None:
            raise ParameterPoleError(f"Legendre Q: Gamma pole at {x}")
        return float(sc.gamma(x))

    p0 = 2.0**mu * sq * rg(nu / 2 - mu / 2 + 1) * rg(0.5 - nu / 2 - mu / 2)
    dp0 = -(2.0 ** (mu + 1)) * sq * rg(nu / 2 - mu / 2 + 0.5) * rg(-nu / 2 - mu / 2)
    half = 0.5 * (nu + mu)
    q0 = -(2.0 ** (mu - 1)) * sq * _sinpi(half) * g(half + 0.5) * rg(nu / 2 - mu / 2 + 1)
    dq0 = 2.0**mu * sq * _cospi(half) * g(half + 1) * rg(nu / 2 - mu / 2 + 0.5)
    return LegendreOrigin(p0, dp0, q0, dq0)


def _cospi(x: float) -> float:
    r = x - 2.0 * round(x / 2.0)
    return math.cos(math.pi * r)


def legendre_even_odd(degree: float, order: float):
    """Parameters (a, b, c) of the even and odd 2F1 factors in
    (1-x^2)^(-mu/2) [A F(a_e,b_e;1/2;x^2) + B x F(a_o,b_o;3/2;x^2)]."""
    nu, mu = float(degree), float(order)
    even = (-(nu + mu) / 2, (nu - mu + 1) / 2, 0.5)
    odd = ((1 - nu - mu) / 2, (nu - mu + 2) / 2, 1.5)
    return even, odd


def legendre_pq(degree: float, order: float, z, policy: SeriesEvalPolicy = DEFAULT_POLICY):
    """Ferrers functions (P^mu_nu(z), Q^mu_nu(z)) for |z| < 1."""
    scalar = np.ndim(z) == 0
    x = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(np.abs(x) >= 1):
        raise ValueError("Legendre functions are evaluated for |z| < 1")
    org = legendre_origin(degree, order)
    (ae, be, ce), (ao, bo, co) = legendre_even_odd(degree, order)
    t = x * x
    w = (1 - x) * (1 + x)
    fe = gauss_2f1(ae, be, ce, t, policy, one_minus_z=w)
    fo = x * gauss_2f1(ao, bo, co, t, policy, one_minus_z=w)
    pre = np.power(w, -0.5 * float(order))
    p = pre * (org.p0 * fe + org.dp0 * fo)
    q = pre * (org.q0 * fe + org.dq0 * fo)
    if scalar:
        return float(p[0]), float(q[0])
    return p, q


def ferrers_p_terminating(order: float, n: int, x, one_minus_x=None, one_plus_x=None):
    """P^(-order)_(order+n)(x) and its x-derivative.

    Uses P^(-mu)_(mu+n)(x) = (1-x^2)^(mu/2) 2^(-mu)/Γ(mu+1) 2F1(-n, 2mu+n+1; mu+1; (1-x)/2),
    a polynomial times a power, finite up to both endpoints.
    """
    mu = float(order)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    omx = 1 - x if one_minus_x is None else np.atleast_1d(one_minus_x)
    opx = 1 + x if one_plus_x is None else np.atleast_1d(one_plus_x)
    s = omx / 2
    f, df, _ = hyp2f1_derivatives(-n, 2 * mu + n + 1, mu + 1, s, order=2, one_minus_z=opx / 2)
    lg = log_gamma_sign(mu + 1)
    const = math.exp(-mu * math.log(2.0) - lg.log_abs)
    w = omx * opx
    pw = np.power(w, mu / 2)
    val = const * pw * f
    # d/dx [w^(mu/2)] = -mu x w^(mu/2 - 1); d/dx f(s) = -f'(s)/2
    with np.errstate(divide="ignore", invalid="ignore"):
        dpw = np.where(w > 0, -mu * x * np.power(w, mu / 2 - 1), 0.0)
    dval = const * (dpw * f - 0.5 * pw * df)
    return val, dval
