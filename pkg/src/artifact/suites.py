"""Verification suites: named batches of checks assembled from a configuration.

Each suite is a list of ``(check_id, thunk)`` tasks. :func:`run_suite`
executes them in a bounded thread pool and returns the reports sorted by id,
so the worker count never changes the output.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import bergman, extension, hardy, hls, isometry, specfun
from .quadrature import DEFAULT_SPEC, QuadratureSpec
from .report import CheckReport, identity_report, inequality_report
from .spectral import HermiteExpansion, frak_rs_symbol, multi_indices, rs_symbol
from .tracefields import BumpPart, HermitePart, SeparableField

__all__ = [
    "SUITES",
    "ConfigError",
    "SuiteConfig",
    "random_expansion",
    "build_tasks",
    "run_suite",
    "worker_count",
]

SUITES = ("specfun", "extension", "hardy", "isometry", "bergman", "hls")
FORMATS = ("json", "csv")

Task = tuple[str, Callable[[], CheckReport]]


class ConfigError(ValueError):
    """Invalid suite configuration (maps to exit status 2)."""


@dataclass(frozen=True)
class SuiteConfig:
    """What to run and where to write it.

    ``n``, ``s`` and ``rho`` replace each suite's default grid when given.
    ``tol`` replaces the per-check tolerance of checks that take one.
    """

    suite: str = "all"
    n: tuple[int, ...] | None = None
    s: tuple[float, ...] | None = None
    rho: tuple[float, ...] | None = None
    cutoff: int = 60
    gh_order: int = DEFAULT_SPEC.gh_order
    tol: float | None = None
    format: str = "json"
    out: str | None = None
    neumann: bool = False
    extra: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.suite not in SUITES + ("all",):
            raise ConfigError(f"unknown suite {self.suite!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        for name in ("n", "s", "rho"):
            v = getattr(self, name)
            if v is not None and len(v) == 0:
                raise ConfigError(f"{name} list is empty")
        if self.n is not None and any(not 1 <= k <= 3 for k in self.n):
            raise ConfigError("n must be 1, 2 or 3")
        if self.s is not None and any(not 0 < v < 1 for v in self.s):
            raise ConfigError("s values must lie in (0, 1)")
        if self.rho is not None and any(not v > 0 for v in self.rho):
            raise ConfigError("rho values must be positive")
        if self.cutoff < 1:
            raise ConfigError("cutoff must be positive")
        if not 2 <= self.gh_order <= 256:
            raise ConfigError("gh_order must lie in 2..256")
        if self.tol is not None and not self.tol > 0:
            raise ConfigError("tolerance must be positive")

    @property
    def spec(self) -> QuadratureSpec:
        return replace(DEFAULT_SPEC, gh_order=self.gh_order)

    def grid(self, name: str, default):
        v = getattr(self, name)
        return tuple(default) if v is None else v

    def rel_tol(self, default: float) -> float:
        return default if self.tol is None else self.tol


def random_expansion(n: int, cutoff: int, rng: np.random.Generator, decay: float = 0.8) -> HermiteExpansion:
    """Gaussian-basis expansion with normal coefficients damped by ``decay^|alpha|``."""
    idx = multi_indices(n, cutoff)
    vals = rng.standard_normal(len(idx)) * decay ** np.array([sum(a) for a in idx], dtype=float)
    return HermiteExpansion(n, cutoff, "gaussian", dict(zip(idx, vals)))


def _label(*parts, **params) -> str:
    tail = "".join(f"/{k}={v:g}" if isinstance(v, float) else f"/{k}={v}" for k, v in params.items())
    return "/".join(parts) + tail


def _worst(pairs, rel_tol, check_id, params, **diag) -> CheckReport:
    """Identity report for the worst ``(lhs, rhs, where)`` triple in ``pairs``."""
    lhs, rhs, where = max(pairs, key=lambda p: abs(p[0] - p[1]) / abs(p[1]))
    return identity_report(check_id, params, lhs, rhs, rel_tol, worst_at=where, points=len(pairs), **diag)


# --------------------------------------------------------------------------
# specfun


def _transformation(lam, a, b, tol):
    la = math.log(2 * lam)
    lhs = math.exp(a * la - math.lgamma(a) + specfun.log_l_function(lam, a, b))
    rhs = math.exp(b * la - math.lgamma(b) + specfun.log_l_function(lam, b, a))
    return identity_report("", {"lam": lam, "a": a, "b": b}, lhs, rhs, tol)


def _heat_l(n, s, rho, tol, spec):
    pairs = []
    for k in range(21):
        lhs = specfun.heat_kernel_laplace(2 * k + n, s, rho, spec)
        a, b = (2 * k + n + 1 + s) / 2, (2 * k + n + 1 - s) / 2
        rhs = 2**s * specfun.l_function(rho * rho / 4, a, b, spec)
        pairs.append((lhs, rhs, k))
    return _worst(pairs, tol, "", {"n": n, "s": s, "rho": rho, "kmax": 20})


def _lv(n, s, rho, tol, spec):
    x = rho * rho / 2
    pairs = []
    for k in range(21):
        a, b = (2 * k + n + 1 + s) / 2, (2 * k + n + 1 - s) / 2
        log_lhs = (s - 1) / 2 * math.log(x) + math.lgamma(a) + specfun.log_whittaker_w(-(k + n / 2), s / 2, x, spec)
        log_rhs = -s * math.log(2) + 2 * s * math.log(rho) + specfun.log_l_function(rho * rho / 4, a, b, spec)
        pairs.append((math.exp(log_lhs) / math.gamma(s), math.exp(log_rhs) / math.gamma(s), k))
    return _worst(pairs, tol, "", {"n": n, "s": s, "rho": rho, "kmax": 20})


def _specfun_tasks(cfg: SuiteConfig) -> list[Task]:
    spec = cfg.spec
    grid = (0.6, 1.1, 2.4, 7.3)
    tasks: list[Task] = []
    for lam in (0.1, 0.5, 1.0, 2.0):
        for a in grid:
            for b in grid:
                tasks.append((_label("specfun", "transformation", lam=lam, a=a, b=b),
                              lambda lam=lam, a=a, b=b: _transformation(lam, a, b, cfg.rel_tol(1e-8))))
    for n in cfg.grid("n", (1, 2)):
        for s in cfg.grid("s", (0.25, 0.5, 0.75)):
            for rho in cfg.grid("rho", (0.5, 1.0, 2.0)):
                tasks.append((_label("specfun", "heat_kernel_l", n=n, s=s, rho=rho),
                              lambda n=n, s=s, rho=rho: _heat_l(n, s, rho, cfg.rel_tol(1e-8), spec)))
                tasks.append((_label("specfun", "whittaker_lv", n=n, s=s, rho=rho),
                              lambda n=n, s=s, rho=rho: _lv(n, s, rho, cfg.rel_tol(1e-8), spec)))
    for s in cfg.grid("s", (0.25, 0.5, 0.75)):
        tasks.append((_label("specfun", "limit_integral", s=s), lambda s=s: identity_report(
            "", {"s": s}, specfun.heat_kernel_limit_integral(s, spec), 4**s * math.gamma(s), cfg.rel_tol(1e-10))))

    def lemma32():
        r = specfun.whittaker_large_k_ratio(1, 0.5, 1.0, np.array([150.0, 300.0]), spec)
        return identity_report("", {"n": 1, "s": 0.5, "rho": 1.0, "k": [150, 300]}, r[1], r[0], 0.05)

    tasks.append(("specfun/whittaker_large_k", lemma32))

    def bessel_symmetry():
        pairs = [(specfun.bessel_k(-nu, z, spec), specfun.bessel_k(nu, z, spec), [nu, z])
                 for nu in (0.3, 0.8, 1.7, 3.2) for z in (0.1, 1.0, 2.0, 7.5)]
        return _worst(pairs, cfg.rel_tol(1e-10), "", {})

    tasks.append(("specfun/bessel_k_symmetry", bessel_symmetry))

    def ode(kind):
        worst, where = 0.0, None
        for kappa, mu, x in ((-0.5, 0.25, 1.0), (-1.5, 0.25, 0.5), (-2.5, 0.4, 2.0), (-1.0, 0.1, 3.0)):
            if kind == "m":
                w = lambda t, kappa=kappa, mu=mu: specfun.whittaker_m(kappa, mu, t)
            else:
                w = lambda t, kappa=kappa, mu=mu: specfun.whittaker_w(kappa, mu, t, spec)
            r = abs(specfun.whittaker_ode_residual(w, kappa, mu, x)) / abs(w(x))
            if r >= worst:
                worst, where = r, [kappa, mu, x]
        return CheckReport("", {"function": kind}, worst, 0.0, worst, worst, worst <= 1e-6,
                           {"worst_at": where, "abs_tol": 1e-6})

    tasks.append(("specfun/whittaker_ode/m", lambda: ode("m")))
    tasks.append(("specfun/whittaker_ode/w", lambda: ode("w")))

    def w_routes():
        pairs = [(specfun.whittaker_w(kappa, mu, x, spec), specfun.whittaker_w_mcombination(kappa, mu, x), [kappa, mu, x])
                 for kappa, mu, x in ((-0.5, 0.25, 1.0), (-1.5, 0.3, 0.7), (-2.5, 0.35, 2.0))]
        return _worst(pairs, cfg.rel_tol(1e-9), "", {})

    tasks.append(("specfun/whittaker_w_routes", w_routes))
    return tasks


# --------------------------------------------------------------------------
# extension


def _representation(variant, n, s, rho, tol, spec):
    p = extension.ExtensionParams(variant, s, n)
    lam = extension.eigenvalues(p, np.arange(31))
    g1 = np.atleast_1d(extension.heat_rep_factor(lam, s, rho, spec))
    g2 = np.atleast_1d(extension.whittaker_s1_factor(lam, s, rho, spec))
    return _worst([(float(a), float(b), k) for k, (a, b) in enumerate(zip(g2, g1))], tol, "",
                  {"variant": variant, "n": n, "s": s, "rho": rho, "kmax": 30})


def _neumann(variant, n, s, tol, spec):
    p = extension.ExtensionParams(variant, s, n)
    f = HermiteExpansion(n, 10, "gaussian", {a: 1.0 for a in multi_indices(n, 10)})
    res = extension.neumann_trace(f, p, spec=spec)
    rel = np.abs(res.shell_limits - res.shell_expected) / np.abs(res.shell_expected)
    k = int(np.argmax(rel))
    return identity_report("", {"variant": variant, "n": n, "s": s, "kmax": 10},
                           res.shell_limits[k], res.shell_expected[k], tol, worst_k=k, **res.diagnostics)


def _contraction(n, s, spec):
    p = extension.ExtensionParams("L", s, n)
    f = random_expansion(n, 12, np.random.default_rng(7))
    rho = (0.1, 0.25, 0.5, 1.0, 2.0)
    prof = extension.solve_profile(f, p, rho, spec=spec)
    norms = [math.sqrt(e.norm_squared()) for e in prof.slices]
    return inequality_report("", {"n": n, "s": s, "rho": list(rho)}, math.sqrt(f.norm_squared()), max(norms), 0.0,
                             slice_norms=norms)


def _pde_order(s, spec):
    """Residual of the 5-point stencil at two spacings; fourth order means ratio ~16."""
    p = extension.ExtensionParams("L", s, 1)
    f = random_expansion(1, 6, np.random.default_rng(11))
    x = np.linspace(-2, 2, 9)
    res = []
    for h in (0.04, 0.02):
        grid = 1.0 + h * np.arange(-2, 3)
        res.append(extension.pde_residual(extension.solve_profile(f, p, grid, spec=spec), x, 2))
    order = math.log2(res[0] / res[1]) if res[1] > 0 else math.inf
    return CheckReport("", {"s": s, "rho": 1.0, "h": [0.04, 0.02]}, order, 4.0, abs(order - 4), abs(order - 4) / 4,
                       order >= 3.5, {"residuals": res, "min_order": 3.5})


def _extension_tasks(cfg: SuiteConfig) -> list[Task]:
    spec = cfg.spec
    tasks: list[Task] = []
    for variant in ("L", "U"):
        for n in cfg.grid("n", (1, 2)):
            for s in cfg.grid("s", (0.25, 0.5, 0.75)):
                for rho in cfg.grid("rho", (0.25, 1.0, 2.0)):
                    tasks.append((_label("extension", "representation", variant=variant, n=n, s=s, rho=rho),
                                  lambda v=variant, n=n, s=s, rho=rho: _representation(v, n, s, rho, cfg.rel_tol(1e-8), spec)))
    for variant in ("L", "U"):
        for n in cfg.grid("n", (1, 2)):
            for s in cfg.grid("s", (0.3, 0.5, 0.7)):
                tasks.append((_label("extension", "neumann", variant=variant, n=n, s=s),
                              lambda v=variant, n=n, s=s: _neumann(v, n, s, cfg.rel_tol(1e-3), spec)))
    for n in cfg.grid("n", (1, 2)):
        for s in cfg.grid("s", (0.25, 0.5, 0.75)):
            tasks.append((_label("extension", "contraction", n=n, s=s), lambda n=n, s=s: _contraction(n, s, spec)))
    for s in cfg.grid("s", (0.25, 0.5, 0.75)):
        tasks.append((_label("extension", "pde_order", s=s), lambda s=s: _pde_order(s, spec)))
    return tasks


# --------------------------------------------------------------------------
# hardy


def _weight_floor(n, s):
    t = np.geomspace(1e-3, 50, 400)
    w = np.asarray(hardy.hardy_weight_value(hardy.HardyWeight(n, s), t))
    i = int(np.argmin(w))
    return inequality_report("", {"n": n, "s": s, "t_range": [1e-3, 50.0]}, float(w[i]), 1.0, 1e-12,
                             argmin_t=float(t[i]), monotone=bool(np.all(np.diff(w) >= -1e-15)))


def _hardy_random(n, s, rho, tol, spec, count=20):
    rng = np.random.default_rng(1000 * n + int(round(100 * s)) + int(round(1000 * rho)))
    reps = [hardy.hardy_check(random_expansion(n, 8, rng), n, s, rho, "derived", spec, tol) for _ in range(count)]
    worst = min(reps, key=lambda r: r.diagnostics["ratio"])
    return replace(worst, params=dict(worst.params, family=count, degree=8),
                   passed=all(r.passed for r in reps),
                   diagnostics=dict(worst.diagnostics, min_ratio=worst.diagnostics["ratio"],
                                    failures=sum(not r.passed for r in reps)))


def _extremizer(n, s, rho, cutoff, spec):
    cands = hardy.extremizer_candidates(n, s, rho, cutoff, spec)
    return identity_report("", {"n": n, "s": s, "rho": rho, "cutoff": cutoff},
                           cands["phi(-s,rho/2)|derived"], 1.0, 1e-3, candidates=cands)


def _symbol_bound(kind, n, s):
    k = np.arange(501)
    if kind == "rs":
        vals, bound = np.asarray(rs_symbol(n, s, k)), 1.0
    else:
        vals, bound = np.asarray(frak_rs_symbol(n, s, k)), 2.0**-s
    i = int(np.argmax(vals))
    # an exact inequality: no tolerance
    return inequality_report("", {"n": n, "s": s, "kmax": 500}, bound, float(vals[i]), 0.0,
                             argmax_k=i, violations=int(np.sum(vals > bound)))


def _ratio_chain(n, s):
    """``R_s(k) <= (2k+n+2(1-s))/(2k+n+2(1+s))`` over ``k <= 500``."""
    k = np.arange(501)
    vals = np.asarray(rs_symbol(n, s, k))
    chain = (2 * k + n + 2 * (1 - s)) / (2 * k + n + 2 * (1 + s))
    i = int(np.argmax(vals - chain))
    return inequality_report("", {"n": n, "s": s, "kmax": 500}, float(chain[i]), float(vals[i]), 0.0,
                             argmax_k=i, violations=int(np.sum(vals > chain)))


def _trace_hardy(n, s, rho, spec):
    f = random_expansion(n, 5, np.random.default_rng(21))
    return hardy.trace_hardy_check(hardy.extension_field(f, s), rho, n, s, spec)


def _lemma41(s, spec):
    f = random_expansion(1, 5, np.random.default_rng(31))
    u = SeparableField(HermitePart(f), BumpPart(1.0))
    v = hardy.extension_field(HermiteExpansion.mode((0,), cutoff=0), s)
    return hardy.lemma41_identity_check(u, v, 1, s, spec)


def _hardy_tasks(cfg: SuiteConfig) -> list[Task]:
    spec = cfg.spec
    ns, ss, rhos = cfg.grid("n", (1, 2)), cfg.grid("s", (0.25, 0.5, 0.75)), cfg.grid("rho", (0.5, 1.0, 2.0))
    tasks: list[Task] = []
    for n in ns:
        for s in ss:
            tasks.append((_label("hardy", "weight_floor", n=n, s=s), lambda n=n, s=s: _weight_floor(n, s)))
            for rho in rhos:
                tasks.append((_label("hardy", "inequality", n=n, s=s, rho=rho),
                              lambda n=n, s=s, rho=rho: _hardy_random(n, s, rho, cfg.rel_tol(1e-10), spec)))
                tasks.append((_label("hardy", "equality", n=n, s=s, rho=rho),
                              lambda n=n, s=s, rho=rho: _extremizer(n, s, rho, cfg.cutoff, spec)))
    for n in cfg.grid("n", (1, 2)):
        for s in cfg.grid("s", (0.3, 0.5)):
            for rho in cfg.grid("rho", (0.5, 1.0)):
                tasks.append((_label("hardy", "phichange", n=n, s=s, rho=rho), lambda n=n, s=s, rho=rho: hardy.verify_phichange(
                    hardy.PhiParams(n, s, rho), np.linspace(0, 3, 31), cfg.rel_tol(1e-5))))
    for n in cfg.grid("n", (1, 2, 3)):
        for s in cfg.grid("s", (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)):
            tasks.append((_label("hardy", "rs_symbol", n=n, s=s), lambda n=n, s=s: _symbol_bound("rs", n, s)))
            tasks.append((_label("hardy", "frak_rs_symbol", n=n, s=s), lambda n=n, s=s: _symbol_bound("frak", n, s)))
            tasks.append((_label("hardy", "rs_ratio_chain", n=n, s=s), lambda n=n, s=s: _ratio_chain(n, s)))
    tasks.append(("hardy/cosine_transform", lambda: hardy.cosine_transform_check(rel_tol=cfg.rel_tol(1e-8))))
    for s in cfg.grid("s", (0.25, 0.5, 0.75)):
        for rho in cfg.grid("rho", (0.5, 1.0)):
            tasks.append((_label("hardy", "trace", n=1, s=s, rho=rho), lambda s=s, rho=rho: _trace_hardy(1, s, rho, spec)))
        tasks.append((_label("hardy", "lemma41", n=1, s=s), lambda s=s: _lemma41(s, spec)))
    return tasks


# --------------------------------------------------------------------------
# isometry


def _ratio_constancy(s, tol, j_cutoff=120, size=10):
    rng = np.random.default_rng(int(round(1000 * s)))
    fam = [random_expansion(1, 6, rng) for _ in range(size)]
    ratios = [isometry.isometry_ratio(f, s, j_cutoff) for f in fam]
    hi, lo = max(ratios), min(ratios)
    return identity_report("", {"s": s, "family": size, "j_cutoff": j_cutoff}, hi, lo, tol,
                           ratios=ratios, two_pi2_s=2 * math.pi**2 * s)


def _jsum_all(n, s, tol):
    reps = [isometry.jsum_check(n, s, k, rel_tol=tol) for k in range(11)]
    worst = max(reps, key=lambda r: r.rel_err)
    return replace(worst, params=dict(worst.params, kmax=10), passed=all(r.passed for r in reps),
                   diagnostics=dict(worst.diagnostics, worst_k=worst.params["k"]))


def _isometry_tasks(cfg: SuiteConfig) -> list[Task]:
    tasks: list[Task] = []
    for s in cfg.grid("s", (0.3, 0.5, 0.7)):
        tasks.append((_label("isometry", "ratio_constancy", s=s), lambda s=s: _ratio_constancy(s, cfg.rel_tol(1e-6))))
        for n in cfg.grid("n", (1, 2)):
            tasks.append((_label("isometry", "jsum", n=n, s=s), lambda n=n, s=s: _jsum_all(n, s, cfg.rel_tol(1e-8))))
    tasks.append(("isometry/gauss_summation/delta=1/beta=0.5/eta=3",
                  lambda: isometry.gauss_summation_check(1.0, 0.5, 3.0, cfg.rel_tol(1e-8))))
    tasks.append(("isometry/gauss_summation/delta=0.5/beta=0.5/eta=4",
                  lambda: isometry.gauss_summation_check(0.5, 0.5, 4.0, cfg.rel_tol(1e-8))))
    tasks.append(("isometry/gauss_example", lambda: identity_report(
        "", {"delta": 1.0, "beta": 0.5, "eta": 3.0},
        isometry.gauss_summation_check(1.0, 0.5, 3.0, 1e-12).lhs, 2 / 3 * math.sqrt(math.pi), 1e-8)))
    tasks.append(("isometry/hermite_zero", lambda: isometry.hermite_zero_check(12)))
    tasks.append(("isometry/mehler", lambda: isometry.mehler_check([0.3, -0.4], [0.7, 0.2], 0.5)))
    return tasks


# --------------------------------------------------------------------------
# bergman


def _strip_finite(t, delta):
    e = HermiteExpansion(1, 4, "lebesgue", {(k,): 1.0 for k in range(5)})
    y = np.linspace(-t, t, 41)
    x = np.linspace(-6, 6, 41)
    z = (x[:, None] + 1j * y[None, :]).ravel()
    vals = bergman.hermite_function_complex(e, z)
    finite = bool(np.all(np.isfinite(vals)))
    peak = float(np.max(np.abs(vals)))
    return CheckReport("", {"t": t, "delta": delta}, peak, 0.0, 0.0, 0.0, finite, {"finite": finite})


def _bergman_tasks(cfg: SuiteConfig) -> list[Task]:
    tasks: list[Task] = []
    deltas = sorted({1.0} | {round(2 * s, 12) for s in cfg.grid("s", (0.3, 0.5, 0.7))})
    for t in (0.5, 0.8):
        for delta in deltas:
            tasks.append((_label("bergman", "identity", t=t, delta=delta),
                          lambda t=t, delta=delta: bergman.bergman_family_check(t, delta, 4, cfg.rel_tol(1e-3))))
            tasks.append((_label("bergman", "strip_finite", t=t, delta=delta), lambda t=t, delta=delta: _strip_finite(t, delta)))
    for rho in (0.25, 0.5, 1.0):
        tasks.append((_label("bergman", "sequence_weight", rho=rho),
                      lambda rho=rho: bergman.sequence_weight_bound_check(bergman.SequenceWeightArgs(1, 0.5, rho))))
    tasks.append(("bergman/laguerre_asymptotic/alpha=2/r=-1",
                  lambda: bergman.laguerre_negative_asymptotic_check(2.0, -1.0, (200, 400), cfg.rel_tol(0.05))))
    tasks.append(("bergman/laguerre_asymptotic/alpha=1/r=-0.5",
                  lambda: bergman.laguerre_negative_asymptotic_check(1.0, -0.5, (200, 400), cfg.rel_tol(0.05))))

    def drift():
        r = bergman.laguerre_negative_asymptotic_check(2.0, -1.0, (200, 400))
        d = r.diagnostics["drift"]
        return CheckReport("", {"alpha": 2.0, "r": -1.0, "k_range": [200, 400]}, d, 0.0, d, d, d <= 0.02,
                           {"abs_tol": 0.02})

    tasks.append(("bergman/laguerre_drift/alpha=2/r=-1", drift))
    return tasks


# --------------------------------------------------------------------------
# hls


def _hls_tasks(cfg: SuiteConfig) -> list[Task]:
    tasks: list[Task] = []
    fam = hls.probe_family(10)
    for s in cfg.grid("s", (0.5,)):
        args = hls.GKernelArgs(1, s)
        for power in (1.0, 1.5, 2.0):
            tasks.append((_label("hls", "g_integrability", s=s, power=power),
                          lambda args=args, power=power: hls.g_integrability_check(args, power)))
        tasks.append((_label("hls", "domination", s=s), lambda s=s: hls.domination_check(fam[1], s)))
        for p, q in ((2.0, 2.0), (2.0, 2 / (1 - s)), (1.0, 1.0)):
            tasks.append((_label("hls", "lp_lq", s=s, p=p, q=q), lambda s=s, p=p, q=q: hls.lp_lq_check(fam, s, p, q)))
        g = random_expansion(1, 8, np.random.default_rng(41))
        tasks.append((_label("hls", "conjugation", s=s), lambda s=s, g=g: hls.conjugation_check(g, s, cfg.rel_tol(1e-8))))
        tasks.append((_label("hls", "holder", s=s), lambda s=s: hls.holder_check(fam[2], s)))
        c = hls.hardy_constant(s)
        tasks.append((_label("hls", "weighted_hardy_Hs", s=s), lambda s=s, c=c: hls.weighted_hardy_Hs_check(fam[3], 1, s, c)))
        tasks.append((_label("hls", "weighted_hardy_Ls", s=s), lambda s=s, c=c, g=g: hls.weighted_hardy_Ls_check(g, 1, s, c)))
    return tasks


_BUILDERS = {
    "specfun": _specfun_tasks,
    "extension": _extension_tasks,
    "hardy": _hardy_tasks,
    "isometry": _isometry_tasks,
    "bergman": _bergman_tasks,
    "hls": _hls_tasks,
}


def build_tasks(cfg: SuiteConfig) -> list[Task]:
    names = SUITES if cfg.suite == "all" else (cfg.suite,)
    tasks = [t for name in names for t in _BUILDERS[name](cfg)]
    ids = [i for i, _ in tasks]
    if len(set(ids)) != len(ids):
        raise RuntimeError("duplicate check ids")
    return tasks


def worker_count() -> int:
    """Pool size from ``OUFRAC_THREADS`` (0 or unset means one per CPU)."""
    raw = os.environ.get("OUFRAC_THREADS", "0").strip() or "0"
    try:
        k = int(raw)
    except ValueError:
        raise ConfigError("OUFRAC_THREADS must be an integer") from None
    if k < 0:
        raise ConfigError("OUFRAC_THREADS must be non-negative")
    return k or (os.cpu_count() or 1)


def _execute(task: Task) -> CheckReport:
    check_id, thunk = task
    try:
        rep = thunk()
    except Exception as exc:  # a crashing check is a failed check, not a crashed run
        nan = math.nan
        return CheckReport(check_id, {}, nan, nan, nan, nan, False, {"error": f"{type(exc).__name__}: {exc}"})
    return replace(rep, id=check_id)


def run_suite(cfg: SuiteConfig, workers: int | None = None) -> list[CheckReport]:
    """Run every check selected by ``cfg``; reports sorted by id."""
    tasks = build_tasks(cfg)
    workers = worker_count() if workers is None else max(1, workers)
    if workers == 1:
        reports = [_execute(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_execute, tasks))
    return sorted(reports, key=lambda r: r.id)
