"""Functions ``u(x, rho)`` on ``R^n x (0, inf)`` with the derivatives the trace energy needs.

Every field evaluates on an ``(N, n)`` array of points ``x`` and an ``(M,)``
array of heights ``rho``; outputs have shape ``(M, N)`` (gradients
``(M, N, n)``). ``apply_U`` is ``U u = -Delta u / 2 + x . grad u + n u / 2``
acting in ``x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .extension import (
    ExtensionParams,
    eigenvalues,
    heat_rep_factor,
    heat_rep_factor_derivative,
    neumann_constant,
)
from .spectral import HermiteExpansion
from .specfun import hermite_table

__all__ = [
    "FieldValues",
    "HermitePart",
    "GaussianPart",
    "BumpPart",
    "GaussianRhoPart",
    "SeparableField",
    "ExtensionField",
    "shell_tables",
]

RHO_FLOOR = 1e-280


@dataclass
class FieldValues:
    value: np.ndarray
    grad: np.ndarray
    lap: np.ndarray
    d_rho: np.ndarray
    d_rho2: np.ndarray
    apply_U: np.ndarray


def shell_tables(e: HermiteExpansion, pts: np.ndarray):
    """Per-shell values, gradients and Laplacians of ``Q_k e`` at ``pts``.

    Returns arrays of shape ``(K+1, N)``, ``(K+1, N, n)`` and ``(K+1, N)``.
    """
    npts, n = pts.shape
    K = e.cutoff
    tab = [hermite_table(K, pts[:, j]) for j in range(n)]
    m = np.arange(K + 1)[:, None]
    dtab, d2tab = [], []
    for t in tab:
        d = np.zeros_like(t)
        d[1:] = np.sqrt(2.0 * m[1:]) * t[:-1]
        d2 = np.zeros_like(t)
        d2[2:] = 2.0 * np.sqrt(m[2:] * (m[2:] - 1.0)) * t[:-2]
        dtab.append(d)
        d2tab.append(d2)
    val = np.zeros((K + 1, npts))
    grad = np.zeros((K + 1, npts, n))
    lap = np.zeros((K + 1, npts))
    for alpha, c in e.coeffs.items():
        k = sum(alpha)
        factors = [tab[j][a] for j, a in enumerate(alpha)]
        val[k] += c * np.prod(factors, axis=0)
        for j, a in enumerate(alpha):
            others = np.prod([factors[i] for i in range(n) if i != j], axis=0) if n > 1 else 1.0
            grad[k, :, j] += c * dtab[j][a] * others
            lap[k] += c * d2tab[j][a] * others
    return val, grad, lap


# --------------------------------------------------------------------------
# factors in x


class HermitePart:
    """``X(x) = sum c_alpha H_alpha(x)`` from a gaussian-basis expansion."""

    def __init__(self, e: HermiteExpansion):
        if e.basis != "gaussian":
            raise ValueError("HermitePart needs a gaussian-basis expansion")
        self.e = e
        self.n = e.dim

    def __call__(self, pts):
        val, grad, lap = shell_tables(self.e, pts)
        k = np.arange(self.e.cutoff + 1)[:, None]
        uval = ((k + self.n / 2) * val).sum(0)
        return val.sum(0), grad.sum(0), lap.sum(0), uval


class GaussianPart:
    """``X(x) = exp(c |x|^2)``; in ``L^2(gamma)`` for ``c < 1/2``."""

    def __init__(self, n: int, c: float):
        if not c < 0.5:
            raise ValueError("c must be below 1/2")
        self.n, self.c = n, c

    def __call__(self, pts):
        r2 = np.sum(pts * pts, axis=1)
        val = np.exp(self.c * r2)
        grad = 2 * self.c * pts * val[:, None]
        lap = (2 * self.c * self.n + 4 * self.c**2 * r2) * val
        uval = -lap / 2 + np.sum(pts * grad, axis=1) + self.n / 2 * val
        return val, grad, lap, uval


# --------------------------------------------------------------------------
# factors in rho


class BumpPart:
    """Smooth even bump ``exp(1 - 1/(1 - (rho/R)^2))`` on ``[0, R)``, equal to 1 at 0."""

    def __init__(self, radius: float = 1.0):
        self.R = float(radius)
        self.support = self.R

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=float)
        q = (rho / self.R) ** 2
        inside = q < 1
        qi = np.where(inside, q, 0.0)
        one_m = 1 - qi
        val = np.where(inside, np.exp(1 - 1 / one_m), 0.0)
        dphi = -(2 * rho / self.R**2) / one_m**2
        d2phi = -(2 / self.R**2) / one_m**2 - (8 * rho**2 / self.R**4) / one_m**3
        d1 = np.where(inside, val * dphi, 0.0)
        d2 = np.where(inside, val * (dphi**2 + d2phi), 0.0)
        return val, d1, d2

    def flux_limit(self, s: float) -> float:
        return 0.0


class GaussianRhoPart:
    """``exp(-c rho^2)``; even, so its boundary flux vanishes for ``s < 1``."""

    def __init__(self, c: float = 0.5):
        if c <= 0:
            raise ValueError("c must be positive")
        self.c = c
        self.support = math.sqrt(750 / c)

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=float)
        val = np.exp(-self.c * rho**2)
        return val, -2 * self.c * rho * val, (4 * self.c**2 * rho**2 - 2 * self.c) * val

    def flux_limit(self, s: float) -> float:
        return 0.0


class SeparableField:
    """``u(x, rho) = X(x) R(rho)``."""

    def __init__(self, xpart, rpart):
        self.xpart, self.rpart = xpart, rpart
        self.n = xpart.n
        self.support = rpart.support

    def evaluate(self, pts, rho) -> FieldValues:
        xv, xg, xl, xu = self.xpart(pts)
        rv, r1, r2 = self.rpart(np.maximum(rho, RHO_FLOOR))
        outer = np.multiply.outer
        return FieldValues(
            value=outer(rv, xv),
            grad=rv[:, None, None] * xg[None],
            lap=outer(rv, xl),
            d_rho=outer(r1, xv),
            d_rho2=outer(r2, xv),
            apply_U=outer(rv, xu),
        )

    def trace(self, pts) -> np.ndarray:
        return self.xpart(pts)[0] * float(self.rpart(np.array([0.0]))[0][0])

    def neumann_flux(self, pts, s: float) -> np.ndarray:
        """``lim_{rho -> 0} rho^{1-2s} d_rho u``."""
        return self.xpart(pts)[0] * self.rpart.flux_limit(s)


class ExtensionField:
    """Decaying solution of the extension problem with datum ``f``.

    ``u(x, rho) = sum_k g_k(rho) Q_k f(x)`` with the heat-representation scale
    factors; ``g''`` is taken from the radial equation it satisfies.
    """

    #: heights beyond this contribute below double precision for every shell
    RHO_MAX = 40.0

    def __init__(self, f: HermiteExpansion, params: ExtensionParams):
        if params.variant == "H":
            raise ValueError("trace fields use the gaussian picture (variant L or U)")
        if f.basis != "gaussian" or f.dim != params.n:
            raise ValueError("datum must be a gaussian-basis expansion of matching dimension")
        self.f, self.p = f, params
        self.n = f.dim
        self.support = self.RHO_MAX
        self.lam = eigenvalues(params, np.arange(f.cutoff + 1))

    def _factors(self, rho):
        rho = np.maximum(np.atleast_1d(np.asarray(rho, dtype=float)), RHO_FLOOR)
        s = self.p.s
        g = np.array([np.atleast_1d(heat_rep_factor(self.lam, s, r)) for r in rho])
        d1 = np.array([np.atleast_1d(heat_rep_factor_derivative(self.lam, s, r)) for r in rho])
        # radial equation: g'' = (lam + rho^2/4) g - (1-2s)/rho g'
        d2 = (self.lam[None, :] + rho[:, None] ** 2 / 4) * g - (1 - 2 * s) / rho[:, None] * d1
        return g, d1, d2

    def evaluate(self, pts, rho) -> FieldValues:
        val, grad, lap = shell_tables(self.f, pts)
        g, d1, d2 = self._factors(rho)
        k = np.arange(self.f.cutoff + 1)
        uval = (k + self.n / 2)[:, None] * val
        return FieldValues(
            value=g @ val,
            grad=np.einsum("mk,knj->mnj", g, grad),
            lap=g @ lap,
            d_rho=d1 @ val,
            d_rho2=d2 @ val,
            apply_U=g @ uval,
        )

    def trace(self, pts) -> np.ndarray:
        return shell_tables(self.f, pts)[0].sum(0)

    def neumann_flux(self, pts, s: float | None = None) -> np.ndarray:
        """``-2^{1-2s} Gamma(1-s)/Gamma(s) A_s f`` evaluated at ``pts``."""
        val = shell_tables(self.f, pts)[0]
        sym = np.atleast_1d(self.p.multiplier()(np.arange(self.f.cutoff + 1)))
        return neumann_constant(self.p.s) * (sym[:, None] * val).sum(0)
