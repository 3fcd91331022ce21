"""Weighted strip integrals of holomorphically extended Hermite expansions (``n = 1``).

For ``F`` a finite combination of Hermite functions, extended to the strip
``|Im z| < t``, the integral of ``|F(x+iy)|^2`` against the strip weight
``w_t^delta`` is diagonal in the degree, with shell ``k`` weighted by
``k! Gamma(1+delta)/Gamma(k+1+delta) L_k^{delta}(-2t^2) t^2`` up to an overall
constant. The constant is calibrated on ``Phi_0``.

Also here: the sequence weight built from Whittaker and Laguerre factors and
the large-degree Laguerre asymptotic at negative argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from .quadrature import gauss_hermite
from .report import CheckReport, identity_report
from .specfun import hermite_table, laguerre, log_gamma_kummer_u
from .spectral import HermiteExpansion, shell_norms

__all__ = [
    "StripWeightArgs",
    "SequenceWeightArgs",
    "strip_weight",
    "hermite_function_complex",
    "strip_integral",
    "bergman_rhs_factor",
    "calibrate_constant",
    "bergman_identity_check",
    "bergman_family_check",
    "sequence_weight",
    "sequence_weight_envelope",
    "sequence_weight_bound_check",
    "laguerre_asymptotic",
    "laguerre_negative_asymptotic_check",
]

SEQUENCE_WEIGHT_MAX_K = 10_000
STRIP_ORDER = 48  # Gauss-Jacobi nodes per strip direction
GH_STRIP_ORDER = 160


@dataclass(frozen=True)
class StripWeightArgs:
    t: float
    delta: float

    def __post_init__(self) -> None:
        if not (self.t > 0 and self.delta > 0):
            raise ValueError("t and delta must be positive")


@dataclass(frozen=True)
class SequenceWeightArgs:
    n: int
    s: float
    rho: float

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be positive")
        if not self.s > 0:
            raise ValueError("s must be positive")
        if not 0 < self.rho <= 1:
            raise ValueError("rho must lie in (0, 1]")


@lru_cache(maxsize=32)
def _jacobi(order: int, a: float):
    v, w = roots_jacobi(order, a, a)
    return v, w


def strip_weight(args: StripWeightArgs, x, y: float, order: int | None = None):
    """``(1/Gamma(delta)) int e^{-2ux} (1 - (u^2+y^2)/t^2)_+^{delta-1} e^{-(u^2+y^2)} du``.

    With ``c = sqrt(t^2 - y^2)`` and ``u = c v`` the endpoint factor becomes
    ``(c/t)^{2 delta - 2} (1 - v^2)^{delta - 1}``, integrated exactly by
    Gauss-Jacobi nodes; the remaining factor is entire in ``v``.

    Parameters
    ----------
    args : StripWeightArgs
    x : float or ndarray
        Real part(s).
    y : float
        Imaginary part, ``|y| < t``.
    order : int, optional
        Gauss-Jacobi nodes; by default grows with ``c`` so the gaussian
        factor ``e^{-c^2 v^2}`` stays resolved.
    """
    t, delta = args.t, args.delta
    if not abs(y) < t:
        raise ValueError("|y| must be below t")
    c = math.sqrt(t * t - y * y)
    if order is None:
        order = STRIP_ORDER + 8 * int(math.ceil(c))
    v, w = _jacobi(order, delta - 1.0)
    x = np.asarray(x, dtype=float)
    expo = -2.0 * c * np.multiply.outer(x, v) - (c * v) ** 2
    integral = np.exp(expo) @ w
    pref = math.exp((2 * delta - 2) * math.log(c / t) + math.log(c) - y * y - math.lgamma(delta))
    out = pref * integral
    return float(out) if out.ndim == 0 else out


def hermite_function_complex(e: HermiteExpansion, z) -> np.ndarray:
    """Entire extension of ``sum c_k Phi_k`` at complex ``z`` (``n = 1``)."""
    if e.dim != 1 or e.basis != "lebesgue":
        raise ValueError("needs a one-dimensional lebesgue-basis expansion")
    z = np.asarray(z, dtype=complex)
    tab = hermite_table(e.cutoff, z)
    poly = sum(c * tab[a[0]] for a, c in e.coeffs.items())
    return math.pi**-0.25 * poly * np.exp(-z * z / 2)


def strip_integral(e: HermiteExpansion, args: StripWeightArgs, order: int = STRIP_ORDER, gh_order: int = GH_STRIP_ORDER):
    """``int_{|y|<t} int_R |F(x+iy)|^2 w_t^delta(x, y) dx dy`` by product quadrature.

    ``y``: Gauss-Jacobi with exponent ``delta - 1/2`` (the weight vanishes
    like ``(t^2-y^2)^{delta-1/2}`` at the strip edge). ``x``: Gauss-Hermite
    after factoring ``e^{-x^2}`` out of ``|F|^2``.
    """
    t, delta = args.t, args.delta
    yv, yw = _jacobi(order, delta - 0.5)
    xg, wg = gauss_hermite(gh_order)
    total = []
    for v, wy in zip(yv, yw):
        y = t * v
        F = hermite_function_complex(e, xg + 1j * y)
        inner = (np.abs(F) ** 2 * np.exp(xg * xg)) * strip_weight(args, xg, y)
        edge = (1 - v * v) ** (delta - 0.5)
        total.append(wy * float(inner @ wg) / edge)
    return t * math.fsum(total)


def bergman_rhs_factor(k, t: float, delta: float, n: int = 1):
    """``Gamma(k+1)Gamma(n+delta)/Gamma(k+n+delta) L_k^{n+delta-1}(-2t^2) t^{2n}``."""
    ks = np.atleast_1d(np.asarray(k, dtype=int))
    out = np.array([
        math.exp(math.lgamma(kk + 1) + math.lgamma(n + delta) - math.lgamma(kk + n + delta))
        * laguerre(int(kk), n + delta - 1, -2 * t * t) * t ** (2 * n)
        for kk in ks
    ])
    return float(out[0]) if np.ndim(k) == 0 else out


def _rhs_sum(e: HermiteExpansion, t: float, delta: float) -> float:
    norms = shell_norms(e)
    return math.fsum(norms * bergman_rhs_factor(np.arange(e.cutoff + 1), t, delta))


def calibrate_constant(t: float, delta: float) -> float:
    """Constant fitted on ``Phi_0``: strip integral over the shell sum."""
    args = StripWeightArgs(t, delta)
    e0 = HermiteExpansion.mode((0,), basis="lebesgue")
    return strip_integral(e0, args) / _rhs_sum(e0, t, delta)


def bergman_identity_check(
    e: HermiteExpansion, t: float, delta: float, constant: float | None = None, rel_tol: float = 1e-3
) -> CheckReport:
    """Strip integral of ``|F|^2`` against ``constant * sum_k ||P_k f||^2 (shell factor)``.

    ``constant`` defaults to the value calibrated on ``Phi_0`` at the same
    ``(t, delta)``.
    """
    args = StripWeightArgs(t, delta)
    c = calibrate_constant(t, delta) if constant is None else constant
    lhs = strip_integral(e, args)
    rhs = c * _rhs_sum(e, t, delta)
    return identity_report(
        "bergman.identity",
        {"t": t, "delta": delta, "modes": [list(a) for a in e.coeffs]},
        lhs,
        rhs,
        rel_tol,
        constant=c,
        reference_constant=math.pi / math.gamma(1 + delta),
    )


def bergman_family_check(t: float, delta: float, kmax: int = 4, rel_tol: float = 1e-3) -> CheckReport:
    """One constant calibrated on ``Phi_0`` must serve ``Phi_0 .. Phi_kmax``.

    The report's ``lhs`` is the per-mode constant that deviates most from the
    calibrated one.
    """
    args = StripWeightArgs(t, delta)
    consts = []
    for k in range(kmax + 1):
        e = HermiteExpansion.mode((k,), basis="lebesgue")
        consts.append(strip_integral(e, args) / _rhs_sum(e, t, delta))
    c0 = consts[0]
    worst = max(consts, key=lambda c: abs(c - c0))
    return identity_report(
        "bergman.family",
        {"t": t, "delta": delta, "kmax": kmax},
        worst,
        c0,
        rel_tol,
        per_mode_constants=consts,
        reference_constant=math.pi / math.gamma(1 + delta),
    )


# --------------------------------------------------------------------------
# sequence weight


def _log_laguerre_negative(k: int, alpha: float, r: float) -> float:
    val = laguerre(k, alpha, r)
    if not val > 0:
        raise ArithmeticError("Laguerre value at negative argument must be positive")
    return math.log(val)


def sequence_weight(args: SequenceWeightArgs, k, log: bool = False):
    """``(rho^2/2)^{s-1} (Gamma((2k+n+1+s)/2) W_{-(k+n/2),s/2}(rho^2/2))^2
    * k! Gamma(n+2s)/Gamma(k+n+2s) * L_k^{n+2s-1}(-rho^2/2)``.

    Composed in log space. ``Gamma(a) W`` equals
    ``e^{-x/2} x^{(1+s)/2} Gamma(a) U(a, 1+s, x)`` with ``x = rho^2/2``.

    Raises
    ------
    OverflowError
        For ``k`` above ``SEQUENCE_WEIGHT_MAX_K``.
    """
    n, s, rho = args.n, args.s, args.rho
    ks = np.atleast_1d(np.asarray(k, dtype=int))
    if np.any(ks < 0):
        raise ValueError("k must be non-negative")
    if np.any(ks > SEQUENCE_WEIGHT_MAX_K):
        raise OverflowError(f"sequence weight limited to k <= {SEQUENCE_WEIGHT_MAX_K}")
    x = rho * rho / 2
    a = (2 * ks + n + 1 + s) / 2
    log_gw = -x / 2 + (1 + s) / 2 * math.log(x) + np.atleast_1d(log_gamma_kummer_u(a, 1.0 + s, x))
    out = []
    for kk, lg in zip(ks, log_gw):
        kk = int(kk)
        val = (
            (s - 1) * math.log(x)
            + 2 * lg
            + math.lgamma(kk + 1) + math.lgamma(n + 2 * s) - math.lgamma(kk + n + 2 * s)
            + _log_laguerre_negative(kk, n + 2 * s - 1, -x)
        )
        out.append(val)
    out = np.array(out)
    if not log:
        out = np.exp(out)
    return float(out[0]) if np.ndim(k) == 0 else out


def sequence_weight_envelope(args: SequenceWeightArgs, k, log: bool = False):
    """``e^{rho^2/4} (rho^2 (2k+n))^{-(2n+1)/4}``."""
    n, rho = args.n, args.rho
    k = np.asarray(k, dtype=float)
    out = rho * rho / 4 - (2 * n + 1) / 4 * np.log(rho * rho * (2 * k + n))
    return out if log else np.exp(out)


def sequence_weight_bound_check(args: SequenceWeightArgs, k_grid=None, max_ratio: float = 10.0) -> CheckReport:
    """Spread of ``w(k) / envelope(k)`` over ``k_grid``: ``max/min <= max_ratio``."""
    if k_grid is None:
        k_grid = np.unique(np.geomspace(50, 2000, 40).astype(int))
    k_grid = np.asarray(k_grid, dtype=int)
    logr = sequence_weight(args, k_grid, log=True) - sequence_weight_envelope(args, k_grid, log=True)
    spread = float(np.exp(np.max(logr) - np.min(logr))) if np.ptp(logr) < 700 else math.inf
    passed = spread <= max_ratio
    return CheckReport(
        "bergman.sequence_weight_bound",
        {"n": args.n, "s": args.s, "rho": args.rho, "k_min": int(k_grid.min()), "k_max": int(k_grid.max())},
        spread,
        max_ratio,
        max(0.0, spread - max_ratio),
        max(0.0, spread - max_ratio) / max_ratio,
        passed,
        {
            "log_ratio_first": float(logr[0]),
            "log_ratio_last": float(logr[-1]),
            "log_spread": float(np.ptp(logr)),
            "decay_reference": -args.rho * math.sqrt(2 * float(k_grid[-1])) + args.rho * math.sqrt(2 * float(k_grid[0])),
        },
    )


# --------------------------------------------------------------------------
# Laguerre asymptotics at negative argument


def laguerre_asymptotic(k, alpha: float, r: float):
    """``(1/(2 sqrt(pi))) e^{r/2} (-r)^{-alpha/2-1/4} k^{alpha/2-1/4} e^{2 sqrt(-k r)}``."""
    if not r < 0:
        raise ValueError("r must be negative")
    k = np.asarray(k, dtype=float)
    log_v = (
        -math.log(2 * math.sqrt(math.pi)) + r / 2 - (alpha / 2 + 0.25) * math.log(-r)
        + (alpha / 2 - 0.25) * np.log(k) + 2 * np.sqrt(-k * r)
    )
    return np.exp(log_v)


def laguerre_negative_asymptotic_check(alpha: float, r: float, k_range=(200, 400), rel_tol: float = 0.05) -> CheckReport:
    """Ratio of ``L_k^alpha(r)`` to its large-``k`` form at the end of ``k_range``.

    Diagnostics carry the ratio at both ends and their drift.
    """
    k0, k1 = int(k_range[0]), int(k_range[-1])
    ratios = [laguerre(k, alpha, r) / float(laguerre_asymptotic(k, alpha, r)) for k in (k0, k1)]
    return identity_report(
        "bergman.laguerre_asymptotic",
        {"alpha": alpha, "r": r, "k_range": [k0, k1]},
        ratios[1],
        1.0,
        rel_tol,
        ratio_start=ratios[0],
        drift=abs(ratios[1] - ratios[0]) / abs(ratios[1]),
    )
