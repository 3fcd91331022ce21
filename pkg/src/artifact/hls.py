"""Negative powers of the Hermite operator: kernel envelope, norm bounds, weighted Hardy.

``H_{-s}`` acts on Hermite functions by ``2^{-s} Gamma((2k+n+1-s)/2) /
Gamma((2k+n+1+s)/2)``. The pointwise envelope ``G(r) = r^{-(n+2-2s)/2}
K_{(n+2-2s)/4}(r^2)`` behaves like ``r^{-(n+2-2s)}`` at the origin, which is
not locally integrable when ``s < 1``; the integrability and domination checks
report that honestly through cutoff refinement.

Quadrature-based checks are one-dimensional.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .quadrature import DEFAULT_SPEC, QuadratureSpec, integrate_interval
from .report import CheckReport, identity_report, inequality_report
from .specfun import log_bessel_k
from .spectral import DegreeMultiplier, HermiteExpansion, analyze, apply_multiplier, synthesize

__all__ = [
    "GKernelArgs",
    "g_kernel",
    "g_kernel_power_integral",
    "g_integrability_check",
    "h_minus_s",
    "convolve_abs_G",
    "domination_check",
    "lp_norm",
    "probe_family",
    "lp_lq_check",
    "hls_exponent",
    "hls_ratio",
    "holder_constant",
    "holder_check",
    "hardy_constant",
    "weighted_hardy_Hs_check",
    "weighted_hardy_Ls_check",
    "conjugation_check",
]

NORM_HALF_WIDTH = 20.0
PANELS = 400
PANEL_ORDER = 16


@dataclass(frozen=True)
class GKernelArgs:
    n: int
    s: float

    def __post_init__(self) -> None:
        if not 0 < self.s < 1:
            raise ValueError("s must lie in (0, 1)")
        if self.n < 1 or not self.n + 2 - 2 * self.s > 0:
            raise ValueError("need n >= 1 and n + 2 - 2s > 0")

    @property
    def order(self) -> float:
        return (self.n + 2 - 2 * self.s) / 4


def g_kernel(args: GKernelArgs, r, log: bool = False):
    """``G(r) = r^{-(n+2-2s)/2} K_{(n+2-2s)/4}(r^2)``.

    Examples
    --------
    >>> round(float(g_kernel(GKernelArgs(1, 0.5), 1.0)), 10)
    0.4610685044
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("r must be positive")
    out = -2 * args.order * np.log(r) + log_bessel_k(args.order, r * r)
    if not log:
        out = np.exp(out)
    return float(out) if np.ndim(out) == 0 else out


def g_kernel_power_integral(args: GKernelArgs, power: float, r_min: float, r_max: float = 8.0) -> float:
    """``omega_n int_{r_min}^{r_max} G(r)^power r^{n-1} dr`` on a log-spaced panel rule."""
    omega = 2 * math.pi ** (args.n / 2) / math.gamma(args.n / 2)
    u, w = _log_panels(r_min, r_max)
    r = np.exp(u)
    vals = np.exp(power * g_kernel(args, r, log=True) + args.n * u)
    return omega * float(vals @ w)


@lru_cache(maxsize=8)
def _gl(order: int):
    return np.polynomial.legendre.leggauss(order)


def _panel_rule(a: float, b: float, panels: int = PANELS, order: int = PANEL_ORDER):
    x0, w0 = _gl(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)[:, None]
    mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
    return (mid + half * x0).ravel(), (half * w0).ravel()


def _log_panels(r_min: float, r_max: float):
    return _panel_rule(math.log(r_min), math.log(r_max))


def g_integrability_check(
    args: GKernelArgs, power: float = 1.0, cutoffs=(1e-2, 1e-3, 1e-4, 1e-5), rel_tol: float = 0.01
) -> CheckReport:
    """Is ``int G^power`` finite? Refines the inner cutoff and demands stability.

    ``lhs`` is the integral at the smallest cutoff, ``rhs`` at the one before.
    The local exponent ``-(n+2-2s) power + n`` is reported; it must exceed
    ``-1`` for integrability at the origin.
    """
    vals = [g_kernel_power_integral(args, power, c) for c in cutoffs]
    exponent = -(args.n + 2 - 2 * args.s) * power + args.n - 1
    return identity_report(
        "hls.g_integrability",
        {"n": args.n, "s": args.s, "power": power, "cutoffs": list(cutoffs)},
        vals[-1],
        vals[-2],
        rel_tol,
        sequence=vals,
        radial_exponent_at_origin=exponent,
        locally_integrable=exponent > -1,
    )


# --------------------------------------------------------------------------
# operator and norms


def h_minus_s(f: HermiteExpansion, s: float) -> HermiteExpansion:
    """``H_{-s} f`` for a lebesgue-basis expansion."""
    if f.basis != "lebesgue":
        raise ValueError("H_{-s} acts on lebesgue-basis expansions")
    return apply_multiplier(f, DegreeMultiplier("H_minus_s", f.dim, s))


def _require_1d(f: HermiteExpansion) -> None:
    if f.dim != 1 or f.basis != "lebesgue":
        raise ValueError("quadrature checks need a one-dimensional lebesgue-basis expansion")


def lp_norm(f: HermiteExpansion, p: float, half_width: float = NORM_HALF_WIDTH) -> float:
    """``||f||_p`` on ``[-L, L]`` by composite Gauss-Legendre panels (``n = 1``)."""
    _require_1d(f)
    x, w = _panel_rule(-half_width, half_width)
    vals = np.abs(synthesize(f, x[:, None]))
    return float((vals**p) @ w) ** (1.0 / p)


def convolve_abs_G(f: HermiteExpansion, args: GKernelArgs, xi, r_min: float, r_max: float = 12.0) -> np.ndarray:
    """``int_{r_min < |xi - eta| < r_max} |f(eta)| G(xi - eta) d eta`` at each ``xi``."""
    _require_1d(f)
    u, w = _log_panels(r_min, r_max)
    r = np.exp(u)
    gw = np.exp(g_kernel(args, r, log=True) + u) * w
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    out = []
    for x in xi:
        left = np.abs(synthesize(f, (x - r)[:, None]))
        right = np.abs(synthesize(f, (x + r)[:, None]))
        out.append(float((left + right) @ gw))
    return np.array(out)


def domination_check(
    f: HermiteExpansion,
    s: float,
    xi_grid=None,
    cutoffs=(1e-2, 1e-3, 1e-4),
    rel_tol: float = 0.05,
) -> CheckReport:
    """``sup_xi |H_{-s} f(xi)| / (|f| * G)(xi)`` and its stability as the cutoff shrinks.

    The convolution excludes ``|xi - eta| < cutoff``; ``lhs``/``rhs`` are the
    sup ratios at the last two cutoffs.
    """
    _require_1d(f)
    if not f.coeffs:
        raise ValueError("ratio undefined for f = 0")
    if xi_grid is None:
        xi_grid = np.linspace(-3, 3, 25)
    args = GKernelArgs(1, s)
    lhs_vals = np.abs(synthesize(h_minus_s(f, s), np.asarray(xi_grid, dtype=float)[:, None]))
    sups = []
    for c in cutoffs:
        conv = convolve_abs_G(f, args, xi_grid, c)
        with np.errstate(divide="ignore"):
            sups.append(float(np.max(np.where(conv > 0, lhs_vals / conv, 0.0))))
    return identity_report(
        "hls.domination",
        {"s": s, "modes": [list(a) for a in f.coeffs], "cutoffs": list(cutoffs)},
        sups[-1],
        sups[-2],
        rel_tol,
        sup_ratios=sups,
    )


def probe_family(size: int = 10, cutoff: int = 8, seed: int = 0) -> list[HermiteExpansion]:
    """Dilated and shifted gaussians times low-degree polynomials, as expansions.

    Member ``i`` is ``(1 + c x) exp(-a (x - b)^2 / 2)`` with ``(a, b, c)``
    drawn from a seeded generator, expanded to degree ``cutoff``; the first
    member is ``Phi_0``.
    """
    rng = np.random.default_rng(seed)
    out = [HermiteExpansion.mode((0,), cutoff=cutoff, basis="lebesgue")]
    spec = QuadratureSpec(gh_order=max(96, cutoff + 1))
    while len(out) < size:
        a, b, c = rng.uniform(0.6, 1.6), rng.uniform(-0.7, 0.7), rng.uniform(-1, 1)
        e = analyze(
            lambda p, a=a, b=b, c=c: (1 + c * p[:, 0]) * np.exp(-a * (p[:, 0] - b) ** 2 / 2),
            1, cutoff, "lebesgue", spec,
        )
        out.append(e)
    return out


def lp_lq_check(family, s: float, p: float, q: float) -> CheckReport:
    """``||H_{-s} f||_q / ||f||_p`` over ``family``.

    For ``p = q = 2`` the ratios come from Parseval and must not exceed the
    degree-0 symbol, which ``Phi_0`` attains; the report compares the family
    maximum with that symbol (tolerance ``1e-12``). Otherwise quadrature norms
    are used and the check only asks for finite positive ratios.
    """
    if not (1 <= p <= q < math.inf and 1 / p - 1 / q <= 1):
        raise ValueError("need 1 <= p <= q < inf and 1/p - 1/q <= 1")
    m = DegreeMultiplier("H_minus_s", 1, s)
    ratios = []
    for f in family:
        g = h_minus_s(f, s)
        if p == 2 and q == 2:
            ratios.append(math.sqrt(g.norm_squared() / f.norm_squared()))
        else:
            ratios.append(lp_norm(g, q) / lp_norm(f, p))
    params = {"s": s, "p": p, "q": q, "family_size": len(family)}
    if p == 2 and q == 2:
        return identity_report("hls.lp_lq", params, max(ratios), m(0), 1e-12, ratios=ratios)
    finite = all(math.isfinite(r) and r > 0 for r in ratios)
    return CheckReport(
        "hls.lp_lq", params, max(ratios), min(ratios), 0.0, 0.0, finite,
        {"ratios": ratios, "spread": max(ratios) / min(ratios)},
    )


# --------------------------------------------------------------------------
# HLS and weighted Hardy


def hls_exponent(n: int, s: float) -> float:
    """``q = 2n/(n - s)``."""
    if not 0 < s < n:
        raise ValueError("need 0 < s < n")
    return 2 * n / (n - s)


def _hs_form(f: HermiteExpansion, s: float) -> float:
    m = DegreeMultiplier("Hs_conformal", f.dim, s)
    return math.fsum(m(sum(a)) * c * c for a, c in f.coeffs.items())


def hls_ratio(f: HermiteExpansion, n: int, s: float) -> float:
    """``<H_s f, f> / ||f||_q^2`` with ``q = 2n/(n-s)``."""
    if n != 1:
        raise ValueError("quadrature norms are implemented for n = 1")
    _require_1d(f)
    q = hls_exponent(n, s)
    return _hs_form(f, s) / lp_norm(f, q) ** 2


def holder_constant(n: int, s: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """``A(n,s) = (int (1+|x|^2)^{-s q'} dx)^{1/q'}`` with ``1/q' = s/n``; ``pi^s`` at ``n = 1``."""
    qp = n / s
    omega = 2 * math.pi ** (n / 2) / math.gamma(n / 2)
    # substitute r = tan(theta): (1+r^2)^{-n} r^{n-1} dr = cos^{n-1} sin^{n-1} ... d theta
    val = integrate_interval(
        lambda th: np.sin(th) ** (n - 1) * np.cos(th) ** (2 * s * qp - n - 1), 0.0, math.pi / 2, spec
    ).value
    return (omega * val) ** (1 / qp)


def _weighted_l2(f: HermiteExpansion, s: float, half_width: float = NORM_HALF_WIDTH) -> float:
    x, w = _panel_rule(-half_width, half_width)
    vals = synthesize(f, x[:, None])
    return float((vals * vals * (1 + x * x) ** (-s)) @ w)


def holder_check(f: HermiteExpansion, s: float) -> CheckReport:
    """``int f^2 (1+x^2)^{-s} dx <= A(1,s) ||f||_q^2`` (``n = 1``)."""
    _require_1d(f)
    lhs = holder_constant(1, s) * lp_norm(f, hls_exponent(1, s)) ** 2
    rhs = _weighted_l2(f, s)
    return inequality_report("hls.holder", {"s": s}, lhs, rhs, 1e-10, A=holder_constant(1, s))


def hardy_constant(s: float, family=None) -> float:
    """``min_family hls_ratio / A(1, s)``: the constant the corollary chain delivers."""
    family = probe_family(20, seed=1) if family is None else family
    return min(hls_ratio(f, 1, s) for f in family) / holder_constant(1, s)


def weighted_hardy_Hs_check(f: HermiteExpansion, n: int, s: float, c: float | None = None) -> CheckReport:
    """``<H_s f, f> >= c int f^2 (1+|x|^2)^{-s} dx``."""
    if n != 1:
        raise ValueError("implemented for n = 1")
    _require_1d(f)
    c = hardy_constant(s) if c is None else c
    lhs = _hs_form(f, s)
    rhs = c * _weighted_l2(f, s)
    return inequality_report("hls.weighted_hardy_Hs", {"n": n, "s": s}, lhs, rhs, 1e-10, constant=c)


def _m_gamma(f: HermiteExpansion, gh_order: int = 128) -> HermiteExpansion:
    """``M_gamma f = pi^{-n/4} e^{-|x|^2/2} f`` recomputed from point values."""
    spec = QuadratureSpec(gh_order=max(gh_order, f.cutoff + 2))
    return analyze(
        lambda p: math.pi ** (-f.dim / 4) * np.exp(-np.sum(p * p, axis=1) / 2) * synthesize(f, p),
        f.dim, f.cutoff, "lebesgue", spec,
    )


def weighted_hardy_Ls_check(f: HermiteExpansion, n: int, s: float, c: float | None = None) -> CheckReport:
    """``<L_s f, f>_gamma >= c int f^2 (1+|x|^2)^{-s} d gamma`` via ``g = M_gamma f``."""
    if f.basis != "gaussian" or n != 1 or f.dim != 1:
        raise ValueError("needs a one-dimensional gaussian-basis expansion")
    c = hardy_constant(s) if c is None else c
    g = _m_gamma(f)
    lhs = _hs_form(g, s)
    rhs = c * _weighted_l2(g, s)
    direct = math.fsum(DegreeMultiplier("Ls", 1, s)(sum(a)) * v * v for a, v in f.coeffs.items())
    return inequality_report(
        "hls.weighted_hardy_Ls", {"n": n, "s": s}, lhs, rhs, 1e-10, constant=c, ls_form_gaussian_side=direct
    )


def conjugation_check(f: HermiteExpansion, s: float, rel_tol: float = 1e-8) -> CheckReport:
    """``H_s (M_gamma f) = M_gamma (L_s f)`` coefficientwise.

    ``M_gamma`` is applied through point values and Gauss-Hermite analysis,
    so both sides are computed independently. ``lhs`` is the largest
    coefficient discrepancy, ``rhs`` the largest coefficient. The
    unnormalized pairing ``<H_s(e^{-|x|^2/2} f), e^{-|x|^2/2} f>`` equals
    ``pi^{n/2} <L_s f, f>_gamma``; that factor is reported.
    """
    if f.basis != "gaussian":
        raise ValueError("needs a gaussian-basis expansion")
    hs = DegreeMultiplier("Hs_conformal", f.dim, s)
    ls = DegreeMultiplier("Ls", f.dim, s)
    left = apply_multiplier(_m_gamma(f), hs)
    right = _m_gamma(apply_multiplier(f, ls))
    keys = set(left.coeffs) | set(right.coeffs)
    diff = max((abs(left[k] - right[k]) for k in keys), default=0.0)
    scale = max((abs(right[k]) for k in keys), default=0.0)
    ls_form = math.fsum(ls(sum(a)) * v * v for a, v in f.coeffs.items())
    hs_form_plain = math.pi ** (f.dim / 2) * _hs_form(_m_gamma(f), s)
    return CheckReport(
        "hls.conjugation",
        {"n": f.dim, "s": s},
        diff,
        scale,
        diff,
        diff / scale if scale else 0.0,
        diff <= rel_tol * scale,
        {
            "rel_tol": rel_tol,
            "ls_form_gamma": ls_form,
            "hs_form_unnormalized": hs_form_plain,
            "unnormalized_factor": hs_form_plain / ls_form if ls_form else math.nan,
        },
    )
