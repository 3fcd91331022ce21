"""Solutions of the extension problem and their Neumann boundary data.

For ``A`` in ``{L, U, H}`` with eigenvalue ``lam_k`` on the degree-``k``
shell (``2k+n`` for ``L`` and ``H``, ``k+n/2`` for ``U``), the solution of

    (-A + d^2/drho^2 + (1-2s)/rho d/drho - rho^2/4) u = 0,   u(., 0) = f

that decays as ``rho -> inf`` multiplies the shell-``k`` part of ``f`` by

    g_k(rho) = 2^{-s}/Gamma(s) rho^{2s} L(rho^2/4, (lam_k+1+s)/2, (lam_k+1-s)/2),

which is also ``x^{(s-1)/2} Gamma(a) W_{-lam_k/2, s/2}(x) / Gamma(s)`` with
``x = rho^2/2`` and ``a = (lam_k+1+s)/2``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .quadrature import DEFAULT_SPEC, QuadratureSpec
from .report import format_float
from .spectral import DegreeMultiplier, HermiteExpansion, shell_norms
from .specfun import kummer_m, log_gamma, log_gamma_kummer_u, log_l_function

__all__ = [
    "ExtensionParams",
    "SolutionProfile",
    "NeumannResult",
    "ExtrapolationError",
    "eigenvalues",
    "heat_rep_factor",
    "heat_rep_factor_derivative",
    "heat_rep_factor_second_derivative",
    "log_heat_rep_factor",
    "whittaker_s1_factor",
    "whittaker_s2_factor",
    "neumann_constant",
    "solve_heat_rep",
    "solve_whittaker_S1",
    "solve_whittaker_S2",
    "solve_profile",
    "neumann_trace",
    "pde_residual",
    "boundary_convergence",
]


class ExtrapolationError(RuntimeError):
    """Successive extrapolants of the Neumann limit disagree."""


@dataclass(frozen=True)
class ExtensionParams:
    """Operator variant, fractional order and dimension."""

    variant: str
    s: float
    n: int

    def __post_init__(self) -> None:
        if self.variant not in ("L", "U", "H"):
            raise ValueError("variant must be 'L', 'U' or 'H'")
        if not 0 < self.s < 1:
            raise ValueError("s must lie in (0, 1)")
        if not 1 <= self.n <= 3:
            raise ValueError("n must be 1, 2 or 3")

    @property
    def basis(self) -> str:
        return "lebesgue" if self.variant == "H" else "gaussian"

    def multiplier(self) -> DegreeMultiplier:
        """Spectral symbol of ``A_s``."""
        return DegreeMultiplier({"L": "Ls", "U": "Us", "H": "Hs_conformal"}[self.variant], self.n, self.s)


def eigenvalues(p: ExtensionParams, k) -> np.ndarray:
    """Eigenvalue of ``A`` on shell ``k``."""
    k = np.asarray(k, dtype=float)
    return k + p.n / 2 if p.variant == "U" else 2 * k + p.n


# --------------------------------------------------------------------------
# scale factors


def _log_heat_factor(lam, s, rho, spec):
    lam = np.asarray(lam, dtype=float)
    return (
        -s * math.log(2)
        - math.lgamma(s)
        + 2 * s * math.log(rho)
        + log_l_function(rho * rho / 4, (lam + 1 + s) / 2, (lam + 1 - s) / 2, spec)
    )


def heat_rep_factor(lam, s: float, rho: float, spec: QuadratureSpec = DEFAULT_SPEC):
    """``g(rho) = 2^{-s}/Gamma(s) rho^{2s} L(rho^2/4, (lam+1+s)/2, (lam+1-s)/2)``.

    Examples
    --------
    >>> round(float(heat_rep_factor(1.0, 0.5, 1e-8)), 6)
    1.0
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    return np.exp(_log_heat_factor(lam, s, rho, spec))


def heat_rep_factor_derivative(lam, s: float, rho: float, spec: QuadratureSpec = DEFAULT_SPEC):
    """``d g / d rho`` without cancellation near ``rho = 0``.

    With ``x = rho^2/2`` and ``b = (lam+1-s)/2`` the factor is
    ``g = e^{-x/2} Gamma(a) U(b, 1-s, x) / Gamma(s)``, and
    ``d/dx U(b, c, x) = -b U(b+1, c+1, x)`` gives the derivative as a sum of
    two terms of equal sign.
    """
    lam = np.asarray(lam, dtype=float)
    a, b = (lam + 1 + s) / 2, (lam + 1 - s) / 2
    x = rho * rho / 2
    g = heat_rep_factor(lam, s, rho, spec)
    log_tail = log_gamma(a) - log_gamma(b) - math.lgamma(s) - x / 2 + log_gamma_kummer_u(b + 1, 2 - s, x, spec)
    return -rho / 2 * g - rho * np.exp(log_tail)


def heat_rep_factor_second_derivative(lam, s: float, rho: float, spec: QuadratureSpec = DEFAULT_SPEC):
    """``g'' = (lam + rho^2/4) g - (1-2s)/rho g'`` from the radial ODE."""
    lam = np.asarray(lam, dtype=float)
    g = heat_rep_factor(lam, s, rho, spec)
    dg = heat_rep_factor_derivative(lam, s, rho, spec)
    return (lam + rho * rho / 4) * g - (1 - 2 * s) / rho * dg


def whittaker_s1_factor(lam, s: float, rho: float, spec: QuadratureSpec = DEFAULT_SPEC):
    """``x^{(s-1)/2} Gamma(a) W_{-lam/2, s/2}(x) / Gamma(s)`` with ``x = rho^2/2``."""
    lam = np.asarray(lam, dtype=float)
    x = rho * rho / 2
    a = (lam + 1 + s) / 2
    # Gamma(a) W = e^{-x/2} x^{(1+s)/2} Gamma(a) U(a, 1+s, x)
    log_gw = -x / 2 + (1 + s) / 2 * math.log(x) + log_gamma_kummer_u(a, 1 + s, x, spec)
    return np.exp((s - 1) / 2 * math.log(x) - math.lgamma(s) + log_gw)


def whittaker_s2_factor(lam, s: float, rho: float) -> np.ndarray:
    """``x^{(s-1)/2} M_{-lam/2, s/2}(x) = x^s e^{-x/2} M(a, 1+s, x)``, ``x = rho^2/2``.

    Raises
    ------
    OverflowError
        If the factor exceeds the double-precision range.
    """
    x = rho * rho / 2
    out = []
    for lk in np.atleast_1d(np.asarray(lam, dtype=float)):
        a = (lk + 1 + s) / 2
        val = x**s * math.exp(-x / 2) * kummer_m(a, 1 + s, x)
        if not math.isfinite(val):
            raise OverflowError(f"M-factor overflows at eigenvalue {lk}, rho={rho}")
        out.append(val)
    out = np.array(out)
    return out if np.ndim(lam) else float(out[0])


def neumann_constant(s: float) -> float:
    """``-2^{1-2s} Gamma(1-s) / Gamma(s)``."""
    return -(2.0 ** (1 - 2 * s)) * math.exp(math.lgamma(1 - s) - math.lgamma(s))


# --------------------------------------------------------------------------
# solvers


def _check_basis(f: HermiteExpansion, p: ExtensionParams) -> None:
    if f.basis != p.basis:
        raise ValueError(f"variant {p.variant} expects a {p.basis}-basis datum")
    if f.dim != p.n:
        raise ValueError("datum dimension does not match params.n")


def _scale(f: HermiteExpansion, table) -> HermiteExpansion:
    table = np.atleast_1d(table)
    return f.with_coeffs({a: v * table[sum(a)] for a, v in f.coeffs.items()})


def solve_heat_rep(f: HermiteExpansion, p: ExtensionParams, rho: float, spec: QuadratureSpec = DEFAULT_SPEC):
    """Extension of ``f`` at height ``rho`` through the heat-kernel representation."""
    _check_basis(f, p)
    lam = eigenvalues(p, np.arange(f.cutoff + 1))
    return _scale(f, heat_rep_factor(lam, p.s, rho, spec))


def solve_whittaker_S1(f: HermiteExpansion, p: ExtensionParams, rho: float, spec: QuadratureSpec = DEFAULT_SPEC):
    """Extension of ``f`` through the decaying Whittaker solution ``W``."""
    _check_basis(f, p)
    if rho <= 0:
        raise ValueError("rho must be positive")
    lam = eigenvalues(p, np.arange(f.cutoff + 1))
    return _scale(f, whittaker_s1_factor(lam, p.s, rho, spec))


def solve_whittaker_S2(g: HermiteExpansion, p: ExtensionParams, rho: float) -> HermiteExpansion:
    """Growing Whittaker solution ``M`` applied to ``g``; vanishes as ``rho -> 0``."""
    _check_basis(g, p)
    if rho <= 0:
        raise ValueError("rho must be positive")
    lam = eigenvalues(p, np.arange(g.cutoff + 1))
    return _scale(g, whittaker_s2_factor(lam, p.s, rho))


@dataclass(frozen=True)
class SolutionProfile:
    """Slices ``u(., rho_j)`` of a solution on an increasing ``rho`` grid."""

    params: ExtensionParams
    rho_grid: tuple[float, ...]
    slices: tuple[HermiteExpansion, ...]

    def __post_init__(self) -> None:
        rho = np.asarray(self.rho_grid, dtype=float)
        if rho.ndim != 1 or len(rho) != len(self.slices):
            raise ValueError("rho_grid and slices must have equal length")
        if np.any(rho <= 0) or np.any(np.diff(rho) <= 0):
            raise ValueError("rho_grid must be positive and increasing")
        if len({(e.dim, e.cutoff, e.basis) for e in self.slices}) > 1:
            raise ValueError("all slices must share dim, cutoff and basis")

    def rows(self):
        for rho, e in zip(self.rho_grid, self.slices):
            for a, v in e.coeffs.items():
                yield rho, ".".join(str(d) for d in a), v

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["rho", "alpha", "coefficient"])
        for rho, a, v in self.rows():
            w.writerow([format_float(rho), a, format_float(v)])
        return buf.getvalue()

    def to_json(self) -> str:
        first = self.slices[0] if self.slices else None
        payload = {
            "params": {"variant": self.params.variant, "s": self.params.s, "n": self.params.n},
            "dim": first.dim if first else self.params.n,
            "cutoff": first.cutoff if first else 0,
            "basis": first.basis if first else self.params.basis,
            "slices": [
                {"rho": float(r), "entries": [{"alpha": list(a), "value": v} for a, v in e.coeffs.items()]}
                for r, e in zip(self.rho_grid, self.slices)
            ],
        }
        return json.dumps(payload, separators=(",", ":"))


def solve_profile(
    f: HermiteExpansion,
    p: ExtensionParams,
    rho_grid,
    g: HermiteExpansion | None = None,
    method: str = "heat",
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> SolutionProfile:
    """``S^1 f + S^2 g`` (``g`` optional) on every point of ``rho_grid``."""
    solver = {"heat": solve_heat_rep, "whittaker": solve_whittaker_S1}[method]
    slices = []
    for rho in rho_grid:
        u = solver(f, p, float(rho), spec)
        if g is not None:
            v = solve_whittaker_S2(g, p, float(rho))
            keys = set(u.coeffs) | set(v.coeffs)
            u = u.with_coeffs({a: u[a] + v[a] for a in keys})
        slices.append(u)
    return SolutionProfile(p, tuple(float(r) for r in rho_grid), tuple(slices))


# --------------------------------------------------------------------------
# boundary behaviour


@dataclass(frozen=True)
class NeumannResult:
    """Extrapolated ``lim rho^{1-2s} du/drho`` against its predicted value."""

    limit: HermiteExpansion
    expected: HermiteExpansion
    constant: float
    shell_limits: np.ndarray
    shell_expected: np.ndarray
    max_rel_err: float
    diagnostics: dict = field(default_factory=dict)


def _flux_samples(lam, s, rho, spec, h):
    """``rho^{1-2s} dg/drho`` by a 5-point stencil in ``log rho``."""
    t = math.log(rho)
    vals = [heat_rep_factor(lam, s, math.exp(t + j * h), spec) for j in (-2, -1, 1, 2)]
    dlog = (vals[0] - 8 * vals[1] + 8 * vals[2] - vals[3]) / (12 * h)
    return rho ** (1 - 2 * s) * dlog / rho


def _fit_limit(rho, y, exponents):
    design = np.stack([rho**e for e in exponents], axis=-1)
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    return coef[0]


def neumann_trace(
    f: HermiteExpansion,
    p: ExtensionParams,
    rho_seq=None,
    spec: QuadratureSpec = DEFAULT_SPEC,
    h: float = 0.02,
    rel_tol: float = 1e-3,
) -> NeumannResult:
    """Extrapolate ``rho^{1-2s} d_rho u(., rho)`` to ``rho = 0`` mode by mode.

    Each shell's flux is sampled on ``rho_seq`` and fitted by least squares
    to ``c_0 + c_1 rho^{2-2s} + c_2 rho^2 + c_3 rho^{4-2s} + ...``, the
    form of its small-``rho`` expansion. ``c_0`` is the limit.

    Raises
    ------
    ExtrapolationError
        If dropping the highest term of the fit moves the limit by more than
        ``rel_tol`` relative.
    """
    _check_basis(f, p)
    s = p.s
    if rho_seq is None:
        rho_seq = np.geomspace(0.5, 0.02, 10)
    rho = np.sort(np.asarray(rho_seq, dtype=float))
    if len(rho) < 4 or rho[0] <= 0 or rho[-1] > 0.5:
        raise ValueError("rho_seq needs at least 4 points in (0, 0.5]")
    lam = eigenvalues(p, np.arange(f.cutoff + 1))
    flux = np.array([np.atleast_1d(_flux_samples(lam, s, r, spec, h)) for r in rho])  # (rho, k)
    exps = [0.0, 2 - 2 * s, 2.0, 4 - 2 * s, 4.0, 6 - 2 * s, 6.0]
    m = min(len(exps), len(rho) - 2)
    limits = np.array([_fit_limit(rho, flux[:, k], exps[:m]) for k in range(len(lam))])
    coarse = np.array([_fit_limit(rho, flux[:, k], exps[: m - 1]) for k in range(len(lam))])
    drift = float(np.max(np.abs(limits - coarse) / np.abs(limits)))
    if drift > rel_tol:
        raise ExtrapolationError(f"extrapolants disagree by {drift:.3e}")
    c = neumann_constant(s)
    expected = c * np.atleast_1d(p.multiplier()(np.arange(f.cutoff + 1)))
    rel = np.abs(limits - expected) / np.abs(expected)
    used = sorted({sum(a) for a in f.coeffs})
    return NeumannResult(
        limit=_scale(f, limits),
        expected=_scale(f, expected),
        constant=c,
        shell_limits=limits,
        shell_expected=expected,
        max_rel_err=float(rel[used].max()) if used else 0.0,
        diagnostics={"fit_terms": m, "extrapolation_drift": drift, "rho_min": float(rho[0])},
    )


def pde_residual(profile: SolutionProfile, x_grid, rho_index: int) -> float:
    """Max over ``x_grid`` of the extension-equation residual at ``rho_grid[rho_index]``.

    ``A`` acts spectrally; ``rho``-derivatives use the 5-point fourth-order
    central stencil, which requires a uniform grid around ``rho_index``.
    """
    from .spectral import synthesize

    i = rho_index
    if i < 2 or i + 2 >= len(profile.rho_grid):
        raise ValueError("rho_index must leave two grid points on each side")
    r = np.asarray(profile.rho_grid[i - 2 : i + 3])
    h = r[1] - r[0]
    if not np.allclose(np.diff(r), h, rtol=1e-9, atol=0):
        raise ValueError("the stencil around rho_index must be uniform")
    p = profile.params
    rho = r[2]
    sl = profile.slices[i - 2 : i + 3]
    keys = set().union(*(e.coeffs for e in sl))
    res = {}
    for a in keys:
        c = [e[a] for e in sl]
        d1 = (c[0] - 8 * c[1] + 8 * c[3] - c[4]) / (12 * h)
        d2 = (-c[0] + 16 * c[1] - 30 * c[2] + 16 * c[3] - c[4]) / (12 * h * h)
        lam = float(eigenvalues(p, sum(a)))
        res[a] = -lam * c[2] + d2 + (1 - 2 * p.s) / rho * d1 - rho * rho / 4 * c[2]
    if not res:
        return 0.0
    resid = sl[2].with_coeffs(res)
    pts = np.asarray(x_grid, dtype=float).reshape(-1, p.n)
    return float(np.max(np.abs(synthesize(resid, pts))))


def boundary_convergence(
    f: HermiteExpansion, p: ExtensionParams, rho_seq, spec: QuadratureSpec = DEFAULT_SPEC
) -> np.ndarray:
    """``||u(., rho) - f||`` in ``L^2(gamma)`` (or ``L^2(dx)`` for ``H``) for each ``rho``."""
    _check_basis(f, p)
    norms = shell_norms(f)
    lam = eigenvalues(p, np.arange(f.cutoff + 1))
    out = []
    for rho in rho_seq:
        g = np.atleast_1d(heat_rep_factor(lam, p.s, float(rho), spec))
        out.append(math.sqrt(math.fsum((g - 1) ** 2 * norms)))
    return np.array(out)


def log_heat_rep_factor(lam, s: float, rho: float, spec: QuadratureSpec = DEFAULT_SPEC):
    """Natural log of :func:`heat_rep_factor`."""
    return _log_heat_factor(lam, s, rho, spec)

