"""Lift of Gaussian-space data to ``n + 2`` dimensions and its norm identity.

The solution ``u(x, rho)`` of the extension problem depends on ``rho^2`` only,
so ``v(x, y) = u(x, sqrt(2) |y|)`` with ``y`` in ``R^2`` is a function on
``R^{n+2}``. Its mixed coefficients ``<v^J, H_alpha>`` with
``v^J(x) = int v(x, y) H_J(y) e^{-|y|^2/2} dy`` are products of Gamma ratios,
and the weighted sum of their squares is a constant multiple of the
``L_s`` quadratic form of the datum.

Coefficients vanish unless both entries of ``J`` are even. The sum over ``J``
has a power-law tail (shell terms decay like ``m^{-1-s}`` with
``m = |J|/2``), so :func:`norm_1s` adds an extrapolated tail fitted to the
last computed shells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy.special import gammaln, zeta

from .report import CheckReport, identity_report
from .specfun import hermite_table, hermite_zero_squared, log_gamma
from .spectral import HermiteExpansion, multi_indices

__all__ = [
    "LiftedExpansion",
    "DivergenceError",
    "norm_s",
    "lift_Ps",
    "lift_coefficient",
    "norm_1s",
    "isometry_ratio",
    "jsum_check",
    "gauss_summation_check",
    "mehler_check",
    "mehler_closed_form",
    "hermite_zero_check",
]

#: the tail fit uses shells m >= TAIL_FIT_START * M and this many inverse powers
TAIL_FIT_START = 0.25
TAIL_FIT_TERMS = 6


class DivergenceError(ValueError):
    """Raised when a hypergeometric series at unit argument diverges."""


@dataclass(frozen=True)
class LiftedExpansion:
    """Coefficients ``<v^J, H_alpha>`` of a lifted function.

    Parameters
    ----------
    base : HermiteExpansion
        The datum ``f`` on ``R^n``.
    s : float
        Fractional order used by the lift.
    j_cutoff : int
        Largest total degree ``|J|`` retained.
    coeffs : mapping
        ``(alpha, J)`` to coefficient; only even ``J`` entries are stored.
    form : {"corrected", "printed"}
        Which coefficient formula produced ``coeffs``.
    """

    base: HermiteExpansion
    s: float
    j_cutoff: int
    coeffs: Mapping[tuple[tuple[int, ...], tuple[int, int]], float] = field(default_factory=dict)
    form: str = "corrected"

    def __getitem__(self, key) -> float:
        alpha, j = key
        return self.coeffs.get((tuple(alpha), tuple(j)), 0.0)

    def shell_sums(self) -> dict[tuple[int, ...], np.ndarray]:
        """Per ``alpha``: ``sum_{|J| = 2m} coeff^2`` for ``m = 0..j_cutoff//2``."""
        M = self.j_cutoff // 2
        out: dict[tuple[int, ...], np.ndarray] = {}
        for (alpha, j), c in self.coeffs.items():
            arr = out.setdefault(alpha, np.zeros(M + 1))
            arr[sum(j) // 2] += c * c
        return out


def _ab(k, n: int, s: float):
    return (2 * k + n + 1 + s) / 2, (2 * k + n + 1 - s) / 2


def norm_s(f: HermiteExpansion, s: float) -> float:
    """``sum_alpha 2^s Gamma((2|alpha|+n+1+s)/2) / Gamma((2|alpha|+n+1-s)/2) |f_alpha|^2``.

    Examples
    --------
    >>> round(norm_s(HermiteExpansion.mode((0,)), 0.5), 12) == round(2**0.5 * math.gamma(1.25) / math.gamma(0.75), 12)
    True
    """
    if f.basis != "gaussian":
        raise ValueError("norm_s needs a gaussian-basis expansion")
    terms = []
    for alpha, c in f.coeffs.items():
        a, b = _ab(sum(alpha), f.dim, s)
        terms.append(math.exp(s * math.log(2) + math.lgamma(a) - math.lgamma(b)) * c * c)
    return math.fsum(terms)


def _even_pairs(j_cutoff: int):
    """Pairs ``(2i, 2l)`` with ``2i + 2l <= j_cutoff``, ordered by total degree."""
    M = j_cutoff // 2
    for m in range(M + 1):
        for i in range(m + 1):
            yield (2 * i, 2 * (m - i))


def lift_coefficient(k: int, n: int, s: float, j, form: str = "corrected") -> float:
    """Coefficient of ``f_alpha`` in ``<v^J, H_alpha>`` for ``|alpha| = k``.

    ``corrected`` is ``(pi/Gamma(s)) H_J(0) Gamma(b+m) Gamma(1+s) / Gamma(a+m+1)
    * Gamma(a)/Gamma(b)`` with ``m = |J|/2``; it expands ``L(|y|^2/2, b, a)``,
    which is the function of ``y`` actually present in the lift.
    ``printed`` is ``4^s/Gamma(-s) H_J(0) Gamma(a+m) Gamma(b-a+1) / Gamma(b+m+1)
    * Gamma(a)/Gamma(b)``, kept for comparison.
    """
    j1, j2 = (int(v) for v in j)
    if j1 % 2 or j2 % 2:
        return 0.0
    a, b = _ab(k, n, s)
    m = (j1 + j2) / 2
    h0 = math.sqrt(hermite_zero_squared(j1 // 2) * hermite_zero_squared(j2 // 2))
    h0 *= (-1) ** ((j1 + j2) // 2)
    if form == "corrected":
        log_mag = (
            math.log(math.pi) - math.lgamma(s)
            + math.lgamma(b + m) + math.lgamma(1 + s) - math.lgamma(a + m + 1)
            + math.lgamma(a) - math.lgamma(b)
        )
        return h0 * math.exp(log_mag)
    if form == "printed":
        # 1/Gamma(-s) is negative on (0, 1)
        c_s = 4**s / math.gamma(-s)
        log_mag = math.lgamma(a + m) + math.lgamma(b - a + 1) - math.lgamma(b + m + 1) + math.lgamma(a) - math.lgamma(b)
        return c_s * h0 * math.exp(log_mag)
    raise ValueError("form must be 'corrected' or 'printed'")


def lift_Ps(f: HermiteExpansion, s: float, j_cutoff: int, form: str = "corrected") -> LiftedExpansion:
    """Mixed Hermite coefficients of the lifted extension solution.

    Parameters
    ----------
    f : HermiteExpansion
        Gaussian-basis datum.
    s : float
        Order in ``(0, 1)``.
    j_cutoff : int
        Largest ``|J|`` kept; odd-entry ``J`` are omitted since ``H_odd(0) = 0``.
    form : {"corrected", "printed"}
    """
    if f.basis != "gaussian":
        raise ValueError("lift_Ps needs a gaussian-basis expansion")
    if not 0 < s < 1:
        raise ValueError("s must lie in (0, 1)")
    if j_cutoff < 0:
        raise ValueError("j_cutoff must be non-negative")
    pairs = list(_even_pairs(j_cutoff))
    cache: dict[int, list[float]] = {}
    coeffs = {}
    for alpha, c in f.coeffs.items():
        k = sum(alpha)
        if k not in cache:
            cache[k] = [lift_coefficient(k, f.dim, s, j, form) for j in pairs]
        for j, lc in zip(pairs, cache[k]):
            coeffs[(alpha, j)] = lc * c
    return LiftedExpansion(f, s, j_cutoff, coeffs, form)


def _log_weight(k, m, n: int, s: float, literal: bool = False):
    """``log`` of the ``(1, s)`` weight on ``(|alpha| = k, |J| = 2m)``.

    The default evaluates the Gamma ratio at the half degree ``m``; ``literal``
    uses the full degree ``2m``.
    """
    d = 2 * m if literal else m
    return (s + 1) * math.log(2) + gammaln((2 * k + 2 * d + n + 3 + s) / 2) - gammaln((2 * k + 2 * d + n + 1 - s) / 2)


def _power_tail(terms: np.ndarray, p: float, c: float) -> tuple[float, float]:
    """Extrapolated ``sum_{m > M} t(m)`` for ``t(m) ~ sum_i c_i (m+c)^{-p-i}``.

    Fits the shells ``m >= M/4`` by least squares in ``u = (M+c)/(m+c)``; a
    wide window keeps the extrapolation to ``u < 1`` well conditioned. The
    model is summed with Hurwitz zeta values. Returns the tail and the change
    obtained by dropping the highest fitted power (an error indicator).
    """
    M = len(terms) - 1
    m0 = int(M * TAIL_FIT_START)
    if M - m0 + 1 < 2 * TAIL_FIT_TERMS or terms[-1] == 0:
        return 0.0, 0.0
    m = np.arange(m0, M + 1, dtype=float)
    X = M + c
    y = terms[m0:] * (m + c) ** p

    def tail(nt: int) -> float:
        A = (X / (m + c))[:, None] ** np.arange(nt)[None, :]
        coef, *_ = np.linalg.lstsq(A, y, rcond=None)
        return float(sum(ci * X**i * zeta(p + i, M + 1 + c) for i, ci in enumerate(coef)))

    t_full = tail(TAIL_FIT_TERMS)
    t_less = tail(TAIL_FIT_TERMS - 1)
    return t_full, abs(t_full - t_less)


def norm_1s(
    v: LiftedExpansion,
    s: float | None = None,
    tail: bool = True,
    literal: bool = False,
    return_diagnostics: bool = False,
):
    """``sum_{alpha, J} W(|alpha|, |J|) <v^J, H_alpha>^2`` with the ``(1, s)`` weight.

    Parameters
    ----------
    v : LiftedExpansion
    s : float, optional
        Defaults to the lift's own order.
    tail : bool
        Add the extrapolated contribution of shells beyond ``j_cutoff``.
    literal : bool
        Evaluate the weight at the full degree ``|J|`` instead of ``|J|/2``.
    return_diagnostics : bool
        Also return a dict with the raw sum, the tail, its error indicator and
        the tail share.
    """
    s = v.s if s is None else s
    n = v.base.dim
    raw_terms, tails, tail_errs = [], [], []
    for alpha, sums in v.shell_sums().items():
        k = sum(alpha)
        m = np.arange(len(sums), dtype=float)
        terms = np.exp(_log_weight(k, m, n, s, literal)) * sums
        raw_terms.append(math.fsum(terms))
        if tail and not literal:
            t, e = _power_tail(terms, 1 + s, (2 * k + n + 1) / 2)
            tails.append(t)
            tail_errs.append(e)
    raw = math.fsum(raw_terms)
    tail_sum = math.fsum(tails)
    total = raw + tail_sum
    if not return_diagnostics:
        return total
    diag = {
        "raw": raw,
        "tail": tail_sum,
        "tail_error": math.fsum(tail_errs),
        "tail_share": tail_sum / total if total else 0.0,
        "weight_index": "full" if literal else "half",
    }
    return total, diag


def isometry_ratio(f: HermiteExpansion, s: float, j_cutoff: int, tail: bool = True) -> float:
    """``norm_1s(lift_Ps(f)) / norm_s(f)``; constant in ``f`` when the lift is an isometry up to scale."""
    den = norm_s(f, s)
    if den == 0:
        raise ValueError("f must be nonzero")
    return norm_1s(lift_Ps(f, s, j_cutoff), s, tail=tail) / den


def jsum_check(n: int, s: float, k: int, j_cutoff: int = 200, rel_tol: float = 1e-8) -> CheckReport:
    """Per-degree ``J``-sum against ``(pi/s) Gamma(b)/Gamma(a)``.

    The left side is ``(pi/Gamma(1+s)^2) sum_J W'(k, |J|/2) (H_J(0) Gamma(b+m)
    Gamma(1+s)/Gamma(a+m+1))^2`` where ``W'`` is the ``(1, s)`` weight without
    its power of two; the sum runs over the actual pairs ``J`` and the
    truncation tail is extrapolated.
    """
    a, b = _ab(k, n, s)
    M = j_cutoff // 2
    h = np.array([hermite_zero_squared(i) for i in range(M + 1)])
    shell_h = np.convolve(h, h)[: M + 1]  # sum over J with |J| = 2m of H_J(0)^2
    m = np.arange(M + 1, dtype=float)
    log_b2 = 2 * (gammaln(b + m) + math.lgamma(1 + s) - gammaln(a + m + 1))
    log_w = gammaln((2 * k + 2 * m + n + 3 + s) / 2) - gammaln((2 * k + 2 * m + n + 1 - s) / 2)
    terms = np.exp(log_w + log_b2) * shell_h
    t, terr = _power_tail(terms, 1 + s, (2 * k + n + 1) / 2)
    scale = math.pi / math.gamma(1 + s) ** 2
    lhs = scale * (math.fsum(terms) + t)
    rhs = math.pi / s * math.exp(math.lgamma(b) - math.lgamma(a))
    return identity_report(
        "isometry.jsum",
        {"n": n, "s": s, "k": k, "j_cutoff": j_cutoff},
        lhs,
        rhs,
        rel_tol,
        tail=scale * t,
        tail_error=scale * terr,
        shell_sum_unity=float(np.max(np.abs(shell_h - 1))),
    )


def _gauss_terms(delta: float, beta: float, eta: float, start: int, stop: int) -> np.ndarray:
    k = np.arange(start, stop, dtype=float)
    return np.exp(gammaln(delta + k) + gammaln(beta + k) - gammaln(eta + k) - gammaln(k + 1))


def gauss_summation_check(
    delta: float, beta: float, eta: float, rel_tol: float = 1e-8, max_terms: int = 10_000_000
) -> CheckReport:
    """Partial sums of ``sum_k Gamma(delta+k)Gamma(beta+k)/(Gamma(eta+k) k!)`` against
    ``Gamma(beta)Gamma(eta-delta-beta)Gamma(delta)/(Gamma(eta-delta)Gamma(eta-beta))``.

    Terms decay like ``k^{-(1+eta-delta-beta)}``. When the partial sums do not
    reach ``rel_tol`` within ``max_terms`` the report fails and carries
    ``slow_convergence`` with an estimate of the terms that would be needed.

    Raises
    ------
    DivergenceError
        If ``eta - delta - beta <= 0``.
    """
    eps = eta - delta - beta
    if not eps > 0:
        raise DivergenceError("eta - delta - beta must be positive for convergence at z = 1")
    for v in (delta, beta, eta, eta - delta, eta - beta):
        if v <= 0:
            raise ValueError("Gamma arguments must be positive")
    closed = math.exp(
        log_gamma(beta) + log_gamma(eps) + log_gamma(delta) - log_gamma(eta - delta) - log_gamma(eta - beta)
    )
    params = {"delta": delta, "beta": beta, "eta": eta}
    partial = 0.0
    needed = None
    chunk = 4096
    start = 0
    while start < max_terms:
        stop = min(start + chunk, max_terms)
        terms = _gauss_terms(delta, beta, eta, start, stop)
        cums = partial + np.cumsum(terms)
        hit = np.nonzero(np.abs(cums - closed) <= rel_tol * closed)[0]
        if hit.size:
            needed = start + int(hit[0]) + 1
            partial = float(cums[hit[0]])
            break
        partial = math.fsum([partial, math.fsum(terms)])
        start = stop
        chunk = min(chunk * 2, 1 << 20)
    if needed is None:
        # leading tail ~ K^{-eps}/eps
        log_est = -math.log(eps * rel_tol * closed) / eps
        estimate = math.exp(log_est) if log_est < 700 else math.inf
        return identity_report(
            "isometry.gauss_summation", params, partial, closed, rel_tol,
            terms_used=max_terms, slow_convergence=True, estimated_terms=estimate,
        )
    return identity_report(
        "isometry.gauss_summation", params, partial, closed, rel_tol, terms_needed=needed, slow_convergence=False
    )


def mehler_closed_form(x, y, r: float, sign: str = "standard") -> float:
    """Closed Gaussian form of ``sum_J H_J(x) H_J(y) r^{|J|}`` in two dimensions.

    ``standard`` uses ``+2 r x.y`` in the exponent; ``printed`` uses ``-2 r x.y``.
    """
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    sgn = {"standard": 1.0, "printed": -1.0}[sign]
    q = 1 - r * r
    expo = (sgn * 2 * r * float(x @ y) - r * r * float(x @ x + y @ y)) / q
    return math.exp(expo) / q


def mehler_check(x, y, r: float, shells: int = 200, rel_tol: float = 1e-10, sign: str = "standard") -> CheckReport:
    """Truncated bilinear Hermite sum over ``|J| <= shells`` against :func:`mehler_closed_form`."""
    if not abs(r) < 1:
        raise ValueError("|r| must be below 1")
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if x.shape != (2,) or y.shape != (2,):
        raise ValueError("x and y must be 2-vectors")
    rp = r ** np.arange(shells + 1)
    per_coord = [hermite_table(shells, x[i]) * hermite_table(shells, y[i]) for i in range(2)]
    shell_sums = np.convolve(per_coord[0], per_coord[1])[: shells + 1] * rp
    lhs = math.fsum(shell_sums)
    rhs = mehler_closed_form(x, y, r, sign)
    return identity_report(
        "isometry.mehler",
        {"x": x.tolist(), "y": y.tolist(), "r": r, "shells": shells},
        lhs,
        rhs,
        rel_tol,
        convention=sign,
        last_shell=float(abs(shell_sums[-1])),
    )


def hermite_zero_check(kmax: int = 12, rel_tol: float = 1e-13) -> CheckReport:
    """``H_{2k}(0)^2`` from the recurrence against ``2^{-2k}(2k)!/(k!)^2`` for ``k <= kmax``."""
    tab = hermite_table(2 * kmax, 0.0)
    worst, lhs_w, rhs_w = 0.0, 1.0, 1.0
    for k in range(kmax + 1):
        lhs = float(tab[2 * k]) ** 2
        rhs = math.factorial(2 * k) / (4**k * math.factorial(k) ** 2)
        err = abs(lhs - rhs) / rhs
        if err >= worst:
            worst, lhs_w, rhs_w = err, lhs, rhs
    return identity_report(
        "isometry.hermite_zero", {"kmax": kmax}, lhs_w, rhs_w, rel_tol,
        odd_max=float(np.max(np.abs(tab[1::2]))),
    )
