"""Hermite expansions, degree projections and degree-diagonal multipliers.

Coefficients live in one of two bases that correspond mode by mode:

* ``gaussian``: normalized Hermite polynomials ``H_alpha``, orthonormal in
  ``L^2(gamma)`` with ``gamma = pi^{-n/2} e^{-|x|^2}``;
* ``lebesgue``: Hermite functions ``Phi_alpha = pi^{-n/4} H_alpha e^{-|x|^2/2}``,
  orthonormal in ``L^2(dx)``.

Multi-indices are enumerated in graded lexicographic order: by total degree,
then by ascending tuple order inside a shell.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Iterable, Mapping

import numpy as np
from scipy.special import gammaln

from .quadrature import DEFAULT_SPEC, QuadratureSpec, gauss_hermite
from .specfun import hermite_table

__all__ = [
    "MAX_DIM",
    "MultiIndex",
    "HermiteExpansion",
    "DegreeMultiplier",
    "multi_indices",
    "analyze",
    "synthesize",
    "project_Qk",
    "shell_norms",
    "last_shell_fraction",
    "from_function_values",
    "multiplier_value",
    "apply_multiplier",
    "quadratic_form",
    "gaussify",
    "ungaussify",
    "rs_symbol",
    "frak_rs_symbol",
]

MAX_DIM = 3
BASES = ("gaussian", "lebesgue")


@dataclass(frozen=True, order=True)
class MultiIndex:
    """Multi-index ``alpha`` in ``N^n``; ``abs(alpha)`` is the total degree."""

    degrees: tuple[int, ...]

    def __post_init__(self) -> None:
        degrees = tuple(int(d) for d in self.degrees)
        if any(d < 0 for d in degrees):
            raise ValueError("multi-index entries must be non-negative")
        object.__setattr__(self, "degrees", degrees)

    def __abs__(self) -> int:
        return sum(self.degrees)

    def __len__(self) -> int:
        return len(self.degrees)

    def __iter__(self):
        return iter(self.degrees)


def multi_indices(dim: int, cutoff: int, shell: int | None = None) -> list[tuple[int, ...]]:
    """All ``alpha`` with ``|alpha| <= cutoff`` (or ``== shell``) in graded-lex order."""
    if not 1 <= dim <= MAX_DIM:
        raise ValueError(f"dimension must be in 1..{MAX_DIM}")
    degrees = range(cutoff + 1) if shell is None else [shell]
    out = []
    for d in degrees:
        out.extend(a for a in product(range(d + 1), repeat=dim) if sum(a) == d)
    return out


def _key(alpha) -> tuple[int, ...]:
    if isinstance(alpha, MultiIndex):
        return alpha.degrees
    if np.ndim(alpha) == 0:
        return (int(alpha),)
    return tuple(int(a) for a in alpha)


@dataclass(frozen=True)
class HermiteExpansion:
    """Truncated Hermite expansion ``sum_alpha c_alpha B_alpha``.

    Parameters
    ----------
    dim : int
        Ambient dimension ``n`` (at most 3).
    cutoff : int
        Largest total degree ``K`` retained.
    basis : {"gaussian", "lebesgue"}
    coeffs : mapping
        Multi-index tuple to coefficient. Missing modes are zero.
    """

    dim: int
    cutoff: int
    basis: str = "gaussian"
    coeffs: Mapping[tuple[int, ...], float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not 1 <= self.dim <= MAX_DIM:
            raise ValueError(f"dimension must be in 1..{MAX_DIM}")
        if self.cutoff < 0:
            raise ValueError("cutoff must be non-negative")
        if self.basis not in BASES:
            raise ValueError(f"basis must be one of {BASES}")
        clean = {}
        for alpha, value in self.coeffs.items():
            key = _key(alpha)
            if len(key) != self.dim or min(key) < 0 or sum(key) > self.cutoff:
                raise ValueError(f"multi-index {key} invalid for dim={self.dim}, cutoff={self.cutoff}")
            clean[key] = float(value)
        ordered = {a: clean[a] for a in sorted(clean, key=lambda a: (sum(a), a))}
        object.__setattr__(self, "coeffs", ordered)

    @classmethod
    def zero(cls, dim: int, cutoff: int, basis: str = "gaussian") -> "HermiteExpansion":
        return cls(dim, cutoff, basis, {})

    @classmethod
    def mode(cls, alpha, cutoff: int | None = None, basis: str = "gaussian", value: float = 1.0):
        """Single-mode expansion ``value * B_alpha``."""
        key = _key(alpha)
        return cls(len(key), sum(key) if cutoff is None else cutoff, basis, {key: value})

    def __getitem__(self, alpha) -> float:
        return self.coeffs.get(_key(alpha), 0.0)

    def norm_squared(self) -> float:
        """Parseval sum ``sum c_alpha^2``."""
        return math.fsum(v * v for v in self.coeffs.values())

    def with_coeffs(self, coeffs: Mapping, basis: str | None = None) -> "HermiteExpansion":
        return HermiteExpansion(self.dim, self.cutoff, basis or self.basis, coeffs)

    def to_json(self) -> str:
        """Deterministic JSON serialization (graded-lex order)."""
        entries = [{"alpha": list(a), "value": v} for a, v in self.coeffs.items()]
        payload = {"dim": self.dim, "cutoff": self.cutoff, "basis": self.basis, "entries": entries}
        return json.dumps(payload, indent=None, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "HermiteExpansion":
        data = json.loads(text)
        coeffs = {tuple(e["alpha"]): e["value"] for e in data["entries"]}
        return cls(data["dim"], data["cutoff"], data["basis"], coeffs)


# --------------------------------------------------------------------------
# analysis / synthesis


def _evaluate(f: Callable, points: np.ndarray) -> np.ndarray:
    """Evaluate ``f`` on an ``(N, n)`` point array.

    ``f`` is first called once on the whole array; if that does not return
    exactly ``N`` values it is called point by point with ``(n,)`` arrays.
    """
    npts = points.shape[0]
    try:
        vals = np.asarray(f(points), dtype=float)
        if vals.shape in ((npts,), (npts, 1)):
            return vals.reshape(npts)
    except Exception:  # noqa: BLE001 - fall back to pointwise evaluation
        pass
    return np.array([float(f(p)) for p in points])


def analyze(
    f: Callable,
    dim: int,
    cutoff: int,
    basis: str = "gaussian",
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> HermiteExpansion:
    """Hermite coefficients of ``f`` up to total degree ``cutoff``.

    Uses a tensor Gauss-Hermite rule of order ``spec.gh_order`` per axis.

    Parameters
    ----------
    f : callable
        Receives an ``(N, dim)`` array of points (or one ``(dim,)`` point at a
        time if the batched call fails) and returns real values.
    basis : {"gaussian", "lebesgue"}
        ``gaussian`` gives ``<f, H_alpha>_gamma``; ``lebesgue`` gives
        ``<f, Phi_alpha>`` in ``L^2(dx)``.
    """
    if basis not in BASES:
        raise ValueError(f"basis must be one of {BASES}")
    if not 1 <= dim <= MAX_DIM:
        raise ValueError(f"dimension must be in 1..{MAX_DIM}")
    order = spec.gh_order
    if order <= cutoff:
        raise ValueError("gh_order must exceed the cutoff for exact orthogonality")
    x, w = gauss_hermite(order)
    w = w / math.sqrt(math.pi)
    grids = np.meshgrid(*([x] * dim), indexing="ij")
    points = np.stack([g.ravel() for g in grids], axis=-1)
    vals = _evaluate(f, points).reshape((order,) * dim)
    if basis == "lebesgue":
        r2 = sum(g * g for g in grids)
        vals = vals * np.exp(r2 / 2) * math.pi ** (dim / 4)
    table = hermite_table(cutoff, x) * w  # (K+1, order)
    coef = vals
    for _ in range(dim):
        # contract the leading quadrature axis, append the degree axis last
        coef = np.tensordot(coef, table, axes=([0], [1]))
    coeffs = {a: coef[a] for a in multi_indices(dim, cutoff)}
    return HermiteExpansion(dim, cutoff, basis, coeffs)


def synthesize(e: HermiteExpansion, x) -> float | np.ndarray:
    """Evaluate ``sum c_alpha B_alpha`` at a point (or an ``(N, dim)`` array)."""
    pts = np.atleast_1d(np.asarray(x, dtype=float))
    single = pts.ndim == 1 and (e.dim > 1 or pts.size == 1)
    pts = pts.reshape(-1, e.dim)
    if not e.coeffs:
        return 0.0 if single else np.zeros(pts.shape[0])
    tables = [hermite_table(e.cutoff, pts[:, j]) for j in range(e.dim)]
    total = np.zeros(pts.shape[0])
    for alpha, c in e.coeffs.items():
        term = np.full(pts.shape[0], c)
        for j, a in enumerate(alpha):
            term = term * tables[j][a]
        total += term
    if e.basis == "lebesgue":
        total = total * math.pi ** (-e.dim / 4) * np.exp(-np.sum(pts * pts, axis=1) / 2)
    return float(total[0]) if single else total


# --------------------------------------------------------------------------
# projections


def project_Qk(e: HermiteExpansion, k: int) -> HermiteExpansion:
    """Degree-``k`` projection ``Q_k``: keep the modes with ``|alpha| = k``."""
    return e.with_coeffs({a: v for a, v in e.coeffs.items() if sum(a) == k})


def shell_norms(e: HermiteExpansion) -> np.ndarray:
    """``||Q_k f||^2`` for ``k = 0..cutoff``."""
    out = np.zeros(e.cutoff + 1)
    for a, v in e.coeffs.items():
        out[sum(a)] += v * v
    return out


def last_shell_fraction(e: HermiteExpansion) -> float:
    """Energy of the top shell relative to the total (a truncation diagnostic)."""
    norms = shell_norms(e)
    total = norms.sum()
    return float(norms[-1] / total) if total > 0 else 0.0


# --------------------------------------------------------------------------
# multipliers


VARIANTS = ("Ls", "Us", "Hs_conformal", "pure_power", "H_minus_s", "identity")


@dataclass(frozen=True)
class DegreeMultiplier:
    """Function of the total degree ``k`` that acts diagonally on shells.

    Parameters
    ----------
    variant : str
        ``Ls``, ``Us``, ``Hs_conformal``, ``pure_power``, ``H_minus_s`` or
        ``identity``.
    n : int
        Ambient dimension.
    s : float
        Fractional order; ``-1 < s < 1`` for the Gamma-ratio variants.
    sigma : float, optional
        Exponent of ``pure_power``.
    base : {"L", "U"}
        Operator whose eigenvalue is raised to ``sigma``: ``2k+n`` for ``L``,
        ``k+n/2`` for ``U``.
    """

    variant: str
    n: int
    s: float = 0.0
    sigma: float | None = None
    base: str = "L"

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.variant in ("Ls", "Us", "Hs_conformal", "H_minus_s") and not -1 < self.s < 1:
            raise ValueError("Gamma-ratio multipliers need -1 < s < 1")
        if self.variant == "pure_power":
            if self.sigma is None:
                raise ValueError("pure_power needs sigma")
            if self.base not in ("L", "U"):
                raise ValueError("base must be 'L' or 'U'")

    def log_value(self, k):
        k = np.asarray(k, dtype=float)
        n, s = self.n, self.s
        if self.variant in ("Ls", "Hs_conformal"):
            return s * math.log(2) + gammaln((2 * k + n + 1 + s) / 2) - gammaln((2 * k + n + 1 - s) / 2)
        if self.variant == "Us":
            return s * math.log(2) + gammaln((k + n / 2 + 1 + s) / 2) - gammaln((k + n / 2 + 1 - s) / 2)
        if self.variant == "H_minus_s":
            return -s * math.log(2) + gammaln((2 * k + n + 1 - s) / 2) - gammaln((2 * k + n + 1 + s) / 2)
        if self.variant == "pure_power":
            lam = 2 * k + n if self.base == "L" else k + n / 2
            return self.sigma * np.log(lam)
        return np.zeros_like(k)

    def __call__(self, k):
        out = np.exp(self.log_value(k))
        return float(out) if np.ndim(out) == 0 else out


def multiplier_value(m: DegreeMultiplier, k):
    """Value of the multiplier on shell ``k`` (vectorized over ``k``).

    Examples
    --------
    >>> multiplier_value(DegreeMultiplier("identity", 1), 7)
    1.0
    """
    if np.any(np.asarray(k) < 0):
        raise ValueError("k must be non-negative")
    return m(k)


def apply_multiplier(e: HermiteExpansion, m: DegreeMultiplier) -> HermiteExpansion:
    """Scale every coefficient by ``m(|alpha|)``."""
    if m.variant in ("Ls", "Us") or (m.variant == "pure_power" and m.base == "U"):
        if e.basis != "gaussian":
            raise ValueError(f"{m.variant} acts on gaussian-basis expansions")
    if m.n != e.dim:
        raise ValueError("multiplier dimension does not match the expansion")
    table = np.atleast_1d(m(np.arange(e.cutoff + 1)))
    return e.with_coeffs({a: v * table[sum(a)] for a, v in e.coeffs.items()})


def quadratic_form(e: HermiteExpansion, m: DegreeMultiplier) -> float:
    """``sum_k m(k) ||Q_k f||^2``."""
    if e.basis != "gaussian":
        raise ValueError("quadratic_form needs a gaussian-basis expansion")
    table = np.atleast_1d(m(np.arange(e.cutoff + 1)))
    return float(math.fsum(table * shell_norms(e)))


def gaussify(e: HermiteExpansion) -> HermiteExpansion:
    """Coefficients of ``M_gamma f = gamma^{1/2} f`` in the Hermite-function basis."""
    if e.basis != "gaussian":
        raise ValueError("gaussify expects a gaussian-basis expansion")
    return e.with_coeffs(e.coeffs, basis="lebesgue")


def ungaussify(e: HermiteExpansion) -> HermiteExpansion:
    """Inverse of :func:`gaussify`."""
    if e.basis != "lebesgue":
        raise ValueError("ungaussify expects a lebesgue-basis expansion")
    return e.with_coeffs(e.coeffs, basis="gaussian")


def rs_symbol(n: int, s: float, k):
    """Symbol of ``U_s U^{-s}``: ``Us(k) / (k + n/2)^s``."""
    m = DegreeMultiplier("Us", n, s)
    k = np.asarray(k, dtype=float)
    out = np.exp(m.log_value(k) - s * np.log(k + n / 2))
    return float(out) if out.ndim == 0 else out


def frak_rs_symbol(n: int, s: float, k):
    """Symbol of ``U_s L^{-s}``: ``Us(k) / (2k + n)^s``."""
    m = DegreeMultiplier("Us", n, s)
    k = np.asarray(k, dtype=float)
    out = np.exp(m.log_value(k) - s * np.log(2 * k + n))
    return float(out) if out.ndim == 0 else out


def from_function_values(values: Iterable[float], dim: int, cutoff: int, basis: str = "gaussian"):
    """Build an expansion from coefficients listed in graded-lex order."""
    idx = multi_indices(dim, cutoff)
    values = list(values)
    if len(values) != len(idx):
        raise ValueError(f"expected {len(idx)} coefficients, got {len(values)}")
    return HermiteExpansion(dim, cutoff, basis, dict(zip(idx, values)))
