"""Scalar special functions built from their series or integral representations.

Every Gamma product is formed in log space. The integral-based functions
(``l_function``, ``kummer_u``, ``whittaker_w``, ``bessel_k``) share the
half-line rule from :mod:`artifact.quadrature`, with the integrand peak
located analytically so that batches of arguments can be integrated on a
common node set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .quadrature import DEFAULT_SPEC, QuadratureSpec, integrate_halfline_log, log_integrate_halfline

__all__ = [
    "LFunctionArgs",
    "WhittakerArgs",
    "log_gamma",
    "gamma_ratio",
    "log_gamma_ratio",
    "l_function",
    "log_l_function",
    "kummer_m",
    "kummer_u",
    "log_gamma_kummer_u",
    "whittaker_m",
    "whittaker_w",
    "log_whittaker_w",
    "whittaker_w_mcombination",
    "whittaker_ode_residual",
    "bessel_k",
    "log_bessel_k",
    "bessel_i",
    "laguerre",
    "laguerre_table",
    "zeta_fn",
    "hermite_poly",
    "hermite_table",
    "hermite_fn",
    "hermite_zero_squared",
    "heat_kernel_kts",
    "log_heat_kernel_kts",
    "heat_kernel_laplace",
    "heat_kernel_limit_integral",
    "whittaker_large_k_ratio",
]

KUMMER_M_MAX_TERMS = 10_000


class SeriesError(RuntimeError):
    """A series hit its term cap before meeting the tolerance."""


def log_gamma(x):
    """``ln Gamma(x)`` for ``x > 0``.

    Scalars use :func:`math.lgamma`; arrays use :func:`scipy.special.gammaln`.

    Examples
    --------
    >>> log_gamma(1.0)
    0.0
    """
    if np.ndim(x) == 0:
        x = float(x)
        if not x > 0:
            raise ValueError(f"log_gamma needs x > 0, got {x}")
        return math.lgamma(x)
    arr = np.asarray(x, dtype=float)
    if not np.all(arr > 0):
        raise ValueError("log_gamma needs x > 0")
    return gammaln(arr)


def log_gamma_ratio(a, b):
    """``ln(Gamma(a) / Gamma(b))``."""
    return log_gamma(a) - log_gamma(b)


def gamma_ratio(a, b):
    """``Gamma(a) / Gamma(b)`` without forming either Gamma value."""
    return np.exp(log_gamma_ratio(a, b))


# --------------------------------------------------------------------------
# L(lambda, a, b) = int_0^inf exp(-lambda (2x + 1)) x^(a-1) (1+x)^(-b) dx


@dataclass(frozen=True)
class LFunctionArgs:
    """Arguments of ``L(lam, a, b)``; ``lam > 0`` and ``a > 0``."""

    lam: float
    a: float
    b: float

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise ValueError("L-function needs lam > 0")
        if not self.a > 0:
            raise ValueError("L-function needs a > 0 (integrability at 0)")


def _l_peak(lam, a, b):
    # positive root of 2 lam t^2 - p t - a = 0, in the form free of cancellation
    p = a - 2.0 * lam - b
    q = np.sqrt(p * p + 8.0 * lam * a)
    t = np.where(p >= 0, (p + q) / (4.0 * lam), 2.0 * a / np.maximum(q - p, 1e-300))
    curv = 2.0 * lam * t + b * (t / (1.0 + t)) / (1.0 + t)
    return np.log(t), np.clip(1.0 / np.sqrt(np.maximum(curv, 1e-12)), 1e-8, 2.0)


def log_l_function(lam, a, b, spec: QuadratureSpec = DEFAULT_SPEC):
    """``ln L(lam, a, b)``, vectorized over broadcast arguments."""
    lam, a, b = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (lam, a, b)))
    shape = lam.shape
    lam, a, b = lam.ravel(), a.ravel(), b.ravel()
    if not (np.all(lam > 0) and np.all(a > 0)):
        raise ValueError("L-function needs lam > 0 and a > 0")
    center, scale = _l_peak(lam, a, b)

    # the constant -lam is kept outside so large lam does not swamp the variation
    def logg(u):
        return -2.0 * lam[:, None] * np.exp(u) + a[:, None] * u - b[:, None] * np.logaddexp(0.0, u)

    out, _ = log_integrate_halfline(logg, spec, center, scale)
    out = out - lam
    return out.reshape(shape) if shape else float(out[0])


def l_function(lam, a=None, b=None, spec: QuadratureSpec = DEFAULT_SPEC):
    """``L(lam, a, b) = int_0^inf e^{-lam(2x+1)} x^{a-1} (1+x)^{-b} dx``.

    Accepts either three numbers/arrays or a single :class:`LFunctionArgs`.

    Examples
    --------
    >>> round(float(l_function(0.5, 1.0, 0.0)), 10)
    0.6065306597
    """
    if isinstance(lam, LFunctionArgs):
        lam, a, b = lam.lam, lam.a, lam.b
    return np.exp(log_l_function(lam, a, b, spec))


# --------------------------------------------------------------------------
# confluent hypergeometric functions


def kummer_m(a: float, b: float, x: float, rel_tol: float = 1e-16) -> float:
    """Kummer's ``M(a, b, x) = sum (a)_m / ((b)_m m!) x^m``.

    Raises
    ------
    SeriesError
        If 10,000 terms do not reach ``rel_tol``.
    """
    if b <= 0 and float(b).is_integer():
        raise ValueError("b must not be a non-positive integer")
    term = 1.0
    total = 1.0
    for m in range(KUMMER_M_MAX_TERMS):
        term *= (a + m) / (b + m) * x / (m + 1)
        total += term
        if term == 0.0 or (abs(term) <= rel_tol * abs(total) and m > abs(x)):
            return total
    raise SeriesError(f"kummer_m({a}, {b}, {x}) did not converge in {KUMMER_M_MAX_TERMS} terms")


def log_gamma_kummer_u(a, b, x, spec: QuadratureSpec = DEFAULT_SPEC):
    """``ln(Gamma(a) U(a, b, x)) = ln int e^{-tx} t^{a-1} (1+t)^{b-a-1} dt``."""
    a, b, x = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (a, b, x)))
    shape = a.shape
    a, b, x = a.ravel(), b.ravel(), x.ravel()
    if not (np.all(a > 0) and np.all(x > 0)):
        raise ValueError("kummer_u needs a > 0 and x > 0")
    c = b - a - 1.0
    p = b - 1.0 - x
    t = (p + np.sqrt(p * p + 4.0 * x * a)) / (2.0 * x)
    curv = np.abs(x * t - c * (t / (1.0 + t)) / (1.0 + t))
    scale = np.clip(1.0 / np.sqrt(np.maximum(curv, 1e-12)), 1e-3, 2.0)

    def logg(u):
        return -x[:, None] * np.exp(u) + a[:, None] * u + c[:, None] * np.logaddexp(0.0, u)

    out, _ = log_integrate_halfline(logg, spec, np.log(t), scale)
    return out.reshape(shape) if shape else float(out[0])


def kummer_u(a, b, x, spec: QuadratureSpec = DEFAULT_SPEC):
    """Tricomi's ``U(a, b, x)`` from its Laplace-type integral, ``a, x > 0``.

    Examples
    --------
    >>> round(float(kummer_u(1.0, 2.0, 2.0)), 12)
    0.5
    """
    return np.exp(log_gamma_kummer_u(a, b, x, spec) - log_gamma(a))


# --------------------------------------------------------------------------
# Whittaker functions; kappa = -(k + n/2), mu = s/2 in the library's use


@dataclass(frozen=True)
class WhittakerArgs:
    kappa: float
    mu: float
    x: float

    def __post_init__(self) -> None:
        if not self.x > 0:
            raise ValueError("Whittaker functions need x > 0")
        if 2 * self.mu <= 0 and float(2 * self.mu).is_integer():
            raise ValueError("2 mu must not be a non-positive integer")


def whittaker_m(kappa, mu: float | None = None, x: float | None = None) -> float:
    """``M_{kappa,mu}(x) = e^{-x/2} x^{1/2+mu} M(1/2+mu-kappa, 1+2mu, x)``.

    Accepts ``(kappa, mu, x)`` or a single :class:`WhittakerArgs`.
    """
    if isinstance(kappa, WhittakerArgs):
        kappa, mu, x = kappa.kappa, kappa.mu, kappa.x
    WhittakerArgs(kappa, mu, x)
    return math.exp(-x / 2) * x ** (0.5 + mu) * kummer_m(0.5 + mu - kappa, 1 + 2 * mu, x)


def log_whittaker_w(kappa, mu, x, spec: QuadratureSpec = DEFAULT_SPEC):
    """``ln W_{kappa,mu}(x)`` via Kummer U; needs ``1/2 + mu - kappa > 0``."""
    kappa, mu, x = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (kappa, mu, x)))
    a = 0.5 + mu - kappa
    log_gu = log_gamma_kummer_u(a, 1.0 + 2.0 * mu, x, spec)
    return -x / 2 + (0.5 + mu) * np.log(x) + log_gu - log_gamma(a)


def whittaker_w(kappa, mu=None, x=None, spec: QuadratureSpec = DEFAULT_SPEC):
    """``W_{kappa,mu}(x) = e^{-x/2} x^{1/2+mu} U(1/2+mu-kappa, 1+2mu, x)``.

    Accepts ``(kappa, mu, x)`` or a single :class:`WhittakerArgs`.
    """
    if isinstance(kappa, WhittakerArgs):
        kappa, mu, x = kappa.kappa, kappa.mu, kappa.x
    out = np.exp(log_whittaker_w(kappa, mu, x, spec))
    return float(out) if np.ndim(out) == 0 else out


def whittaker_w_mcombination(kappa: float, mu: float, x: float) -> float:
    """``W_{kappa,mu}`` as the standard combination of ``M_{kappa,+-mu}``.

    Loses accuracy to cancellation once ``|kappa|`` is large; kept as an
    independent route for small ``|kappa|``.
    """
    if float(2 * mu).is_integer():
        raise ValueError("the M-combination needs 2 mu non-integer")
    c1 = math.gamma(-2 * mu) / math.gamma(0.5 - mu - kappa)
    c2 = math.gamma(2 * mu) / math.gamma(0.5 + mu - kappa)
    return c1 * whittaker_m(kappa, mu, x) + c2 * whittaker_m(kappa, -mu, x)


def whittaker_ode_residual(w, kappa: float, mu: float, x: float, h: float = 1e-3) -> float:
    """Residual of ``w'' + (-1/4 + kappa/x + (1/4 - mu^2)/x^2) w`` at ``x``.

    ``w`` is a callable of one variable; second derivative by the
    four-point-accurate central stencil.
    """
    vals = [w(x + j * h) for j in (-2, -1, 0, 1, 2)]
    d2 = (-vals[0] + 16 * vals[1] - 30 * vals[2] + 16 * vals[3] - vals[4]) / (12 * h * h)
    return d2 + (-0.25 + kappa / x + (0.25 - mu * mu) / (x * x)) * vals[2]


# --------------------------------------------------------------------------
# modified Bessel functions


def log_bessel_k(nu, z, spec: QuadratureSpec = DEFAULT_SPEC):
    """``ln K_nu(z)`` from ``K_nu(z) = 2^{-nu-1} z^nu int e^{-t-z^2/(4t)} t^{-nu-1} dt``."""
    nu, z = np.broadcast_arrays(np.asarray(nu, dtype=float), np.asarray(z, dtype=float))
    shape = z.shape
    nu, z = nu.ravel(), z.ravel()
    if not np.all(z > 0):
        raise ValueError("bessel_k needs z > 0")
    root = np.sqrt(nu * nu + z * z)
    # peak of the integrand; second form avoids cancellation for small z
    t = np.where(nu <= 0, 0.5 * (root - nu), z * z / (2.0 * (root + np.abs(nu)) + 1e-300))
    curv = t + z * z / (4.0 * t)
    scale = np.clip(1.0 / np.sqrt(curv), 1e-8, 2.0)
    q = z * z / 4.0

    def logg(u):
        return -np.exp(u) - q[:, None] * np.exp(-u) - nu[:, None] * u

    logint, _ = log_integrate_halfline(logg, spec, np.log(t), scale)
    out = -(nu + 1.0) * math.log(2.0) + nu * np.log(z) + logint
    return out.reshape(shape) if shape else float(out[0])


def bessel_k(nu, z, spec: QuadratureSpec = DEFAULT_SPEC):
    """Macdonald function ``K_nu(z)`` for ``z > 0``.

    Examples
    --------
    >>> round(float(bessel_k(0.5, 1.0)), 10)
    0.4610685044
    """
    return np.exp(log_bessel_k(nu, z, spec))


def bessel_i(nu: float, x: float, rel_tol: float = 1e-16) -> float:
    """Modified Bessel ``I_nu(x)``, ``nu >= 0``.

    Ascending series for ``x <= 30``; for larger ``x`` the Hankel
    asymptotic expansion ``e^x / sqrt(2 pi x) * sum (-1)^j a_j(nu) / x^j``
    truncated at its smallest term.
    """
    if nu < 0 or x <= 0:
        raise ValueError("bessel_i needs nu >= 0 and x > 0")
    if x <= 30.0:
        log_term = nu * math.log(x / 2) - math.lgamma(nu + 1)
        term = math.exp(log_term)
        total = term
        q = x * x / 4
        for m in range(1, 10_000):
            term *= q / (m * (m + nu))
            total += term
            if term <= rel_tol * total:
                return total
        raise SeriesError("bessel_i series did not converge")
    mu4 = 4 * nu * nu
    coef = 1.0
    total = 1.0
    prev = math.inf
    for j in range(1, 60):
        coef *= -(mu4 - (2 * j - 1) ** 2) / (j * 8 * x)
        if abs(coef) >= prev:
            break
        total += coef
        prev = abs(coef)
    return math.exp(x) / math.sqrt(2 * math.pi * x) * total


# --------------------------------------------------------------------------
# orthogonal polynomials


def laguerre(k: int, alpha: float, x):
    """Generalized Laguerre polynomial ``L_k^alpha(x)`` by three-term recurrence.

    Examples
    --------
    >>> laguerre(1, 0.5, 2.0)
    -0.5
    """
    if k < 0:
        raise ValueError("degree must be non-negative")
    x = np.asarray(x)
    p0 = np.ones_like(x, dtype=np.result_type(x, float))
    if k == 0:
        return p0 if p0.ndim else float(p0)
    p1 = 1.0 + alpha - x
    for m in range(1, k):
        p0, p1 = p1, ((2 * m + 1 + alpha - x) * p1 - (m + alpha) * p0) / (m + 1)
    return p1 if np.ndim(p1) else float(p1)


def laguerre_table(kmax: int, alpha: float, x) -> np.ndarray:
    """Array ``[L_0^alpha(x), ..., L_kmax^alpha(x)]`` (leading axis is degree)."""
    x = np.asarray(x, dtype=float)
    out = np.empty((kmax + 1,) + x.shape)
    out[0] = 1.0
    if kmax >= 1:
        out[1] = 1.0 + alpha - x
    for m in range(1, kmax):
        out[m + 1] = ((2 * m + 1 + alpha - x) * out[m] - (m + alpha) * out[m - 1]) / (m + 1)
    return out


def zeta_fn(x):
    """``zeta(x) = ((sqrt(x + x^2) + ln(sqrt(x) + sqrt(1 + x))) / 2)^2``."""
    x = np.asarray(x, dtype=float)
    r = np.sqrt(x)
    out = (0.5 * (np.sqrt(x + x * x) + np.arcsinh(r))) ** 2
    return float(out) if out.ndim == 0 else out


def hermite_table(mmax: int, x) -> np.ndarray:
    """Gaussian-normalized Hermite polynomials ``H_0..H_mmax`` at ``x``.

    ``H_m = (2^m m!)^{-1/2}`` times the physicists' polynomial, so that
    ``<H_m, H_m>_gamma = 1``. Complex ``x`` is accepted.
    """
    x = np.asarray(x)
    dtype = np.result_type(x, float)
    out = np.empty((mmax + 1,) + x.shape, dtype=dtype)
    out[0] = 1.0
    if mmax >= 1:
        out[1] = math.sqrt(2.0) * x
    for m in range(1, mmax):
        out[m + 1] = math.sqrt(2.0 / (m + 1)) * x * out[m] - math.sqrt(m / (m + 1)) * out[m - 1]
    return out


def hermite_poly(m: int, x):
    """Gaussian-normalized Hermite polynomial ``H_m(x)``."""
    out = hermite_table(m, x)[m]
    return out if np.ndim(out) else out.item()


def hermite_fn(m: int, x):
    """Lebesgue-normalized Hermite function ``pi^{-1/4} H_m(x) e^{-x^2/2}``."""
    x = np.asarray(x)
    out = math.pi ** -0.25 * hermite_table(m, x)[m] * np.exp(-(x * x) / 2)
    return out if np.ndim(out) else out.item()


def hermite_zero_squared(k: int) -> float:
    """``H_{2k}(0)^2 = Gamma(k + 1/2) / (sqrt(pi) Gamma(k + 1))``."""
    return math.exp(math.lgamma(k + 0.5) - math.lgamma(k + 1.0)) / math.sqrt(math.pi)


# --------------------------------------------------------------------------
# heat kernel of the extension problem


def log_heat_kernel_kts(t, s: float, rho):
    """``ln k_{t,s}(rho) = -(s+1) ln sinh t - coth(t) rho^2 / 4``."""
    t = np.asarray(t, dtype=float)
    with np.errstate(over="ignore"):
        log_sinh = t + np.log(-np.expm1(-2 * t)) - math.log(2.0)
    coth = 1.0 / np.tanh(t)
    return -(s + 1.0) * log_sinh - coth * np.asarray(rho, dtype=float) ** 2 / 4.0


def heat_kernel_kts(t, s: float, rho):
    """``k_{t,s}(rho) = (sinh t)^{-s-1} exp(-coth(t) rho^2 / 4)``."""
    if np.any(np.asarray(t) <= 0):
        raise ValueError("heat kernel needs t > 0")
    out = np.exp(log_heat_kernel_kts(t, s, rho))
    return float(out) if np.ndim(out) == 0 else out


def heat_kernel_laplace(lam: float, s: float, rho: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """``int_0^inf k_{t,s}(rho) e^{-t lam} dt`` by half-line quadrature in ``t``."""
    if rho <= 0:
        raise ValueError("the transform diverges at rho = 0")

    def logg(u):
        t = np.exp(u)
        return log_heat_kernel_kts(t, s, rho) - lam * t + u

    return integrate_halfline_log(logg, spec).value


def heat_kernel_limit_integral(s: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """``int_0^inf t^{-s-1} e^{-1/(4t)} dt`` (equals ``4^s Gamma(s)``)."""

    def logg(u):
        return -s * u - 0.25 * np.exp(-u)

    return integrate_halfline_log(logg, spec).value


def whittaker_large_k_ratio(n: int, s: float, rho: float, k, spec: QuadratureSpec = DEFAULT_SPEC):
    """Ratio of ``Gamma(a) W_{-(k+n/2),s/2}(rho^2/2)`` to its large-k envelope.

    The envelope is ``(2k+n)^{s/2-1/4} (rho^2/2)^{1/4}
    exp(-2 (2k+n) sqrt(zeta(rho^2 / (4(2k+n)))))`` with ``a = (2k+n+1+s)/2``.
    """
    k = np.asarray(k, dtype=float)
    x = rho * rho / 2.0
    a = (2 * k + n + 1 + s) / 2.0
    log_gw = -x / 2 + (0.5 + s / 2) * math.log(x) + log_gamma_kummer_u(a, 1.0 + s, x, spec)
    lam = 2 * k + n
    log_env = (s / 2 - 0.25) * np.log(lam) + 0.25 * math.log(x) - 2 * lam * np.sqrt(zeta_fn(rho * rho / (4 * lam)))
    return np.exp(log_gw - log_env)
