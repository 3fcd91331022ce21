import math

import numpy as np
import pytest

from artifact.hls import (
    GKernelArgs,
    conjugation_check,
    domination_check,
    g_integrability_check,
    g_kernel,
    g_kernel_power_integral,
    h_minus_s,
    hardy_constant,
    hls_exponent,
    hls_ratio,
    holder_check,
    holder_constant,
    lp_lq_check,
    lp_norm,
    probe_family,
    weighted_hardy_Hs_check,
    weighted_hardy_Ls_check,
)
from artifact.spectral import DegreeMultiplier, HermiteExpansion
from artifact.suites import random_expansion

# K_{1/2}(1) = sqrt(pi/2) e^{-1}
G_1_05_1 = 0.46106850444789455844


@pytest.fixture(scope="module")
def family():
    return probe_family(10)


def test_args_validation():
    with pytest.raises(ValueError):
        GKernelArgs(1, 1.0)
    with pytest.raises(ValueError):
        g_kernel(GKernelArgs(1, 0.5), 0.0)


def test_g_kernel_value_and_envelope():
    args = GKernelArgs(1, 0.5)
    assert g_kernel(args, 1.0) == pytest.approx(G_1_05_1, rel=1e-14)
    r = np.array([3.0, 5.0, 8.0, 12.0])
    env = np.exp(g_kernel(args, r, log=True) + ((1 + 2 - 1) / 2 + 1) * np.log(r) + r * r)
    assert np.all(env < 2) and np.ptp(env) < 0.1


def test_g_kernel_origin_exponent():
    # G(r) ~ c r^{-(n+2-2s)} at the origin: r^{-2} for (n, s) = (1, 0.5)
    args = GKernelArgs(1, 0.5)
    r = np.array([1e-4, 1e-5])
    logs = g_kernel(args, r, log=True)
    slope = (logs[1] - logs[0]) / math.log(r[1] / r[0])
    assert slope == pytest.approx(-2.0, abs=1e-6)


@pytest.mark.parametrize("power", [1.0, 1.5, 2.0])
def test_g_power_integral_diverges_at_rate_of_local_exponent(power):
    # int_c G^power ~ c^{-(2 power - 1)}: each decade of cutoff multiplies it by 10^{2 power - 1}
    rep = g_integrability_check(GKernelArgs(1, 0.5), power)
    seq = rep.diagnostics["sequence"]
    assert not rep.diagnostics["locally_integrable"]
    growth = seq[-1] / seq[-2]
    assert growth == pytest.approx(10 ** (2 * power - 1), rel=0.01)


def test_g_power_integral_converges_when_local_exponent_allows():
    # (n, s) = (3, 0.5): G^power r^{n-1} ~ r^{2 - 4 power}, integrable for power < 3/4
    args = GKernelArgs(3, 0.5)
    rep = g_integrability_check(args, 0.25)
    assert rep.diagnostics["locally_integrable"] and rep.passed
    assert g_kernel_power_integral(args, 0.25, 1e-5) == pytest.approx(g_kernel_power_integral(args, 0.25, 1e-7), rel=1e-9)


def test_h_minus_s_and_norms():
    f = HermiteExpansion.mode((2,), basis="lebesgue")
    g = h_minus_s(f, 0.5)
    assert g[(2,)] == pytest.approx(DegreeMultiplier("H_minus_s", 1, 0.5)(2), rel=1e-15)
    phi0 = HermiteExpansion.mode((0,), basis="lebesgue")
    assert lp_norm(phi0, 2) == pytest.approx(1.0, rel=1e-12)
    # ||Phi_0||_1 = pi^{-1/4} sqrt(2 pi)
    assert lp_norm(phi0, 1) == pytest.approx(math.pi**-0.25 * math.sqrt(2 * math.pi), rel=1e-12)
    with pytest.raises(ValueError):
        h_minus_s(HermiteExpansion.mode((0,)), 0.5)


def test_domination_ratio_shrinks_with_cutoff(family):
    # the convolution with |f| grows like 1/cutoff, so the sup ratio falls by 10 per decade
    rep = domination_check(family[1], 0.5)
    sups = rep.diagnostics["sup_ratios"]
    assert all(math.isfinite(v) and v > 0 for v in sups)
    assert sups[0] / sups[1] == pytest.approx(10, rel=0.2)
    with pytest.raises(ValueError):
        domination_check(HermiteExpansion.zero(1, 2, basis="lebesgue"), 0.5)


def test_lp_lq(family):
    s = 0.5
    rep = lp_lq_check(family, s, 2, 2)
    assert rep.passed and rep.lhs == pytest.approx(DegreeMultiplier("H_minus_s", 1, s)(0), rel=1e-12)
    for p, q in ((2, 2 / (1 - s)), (1, 1)):
        rep = lp_lq_check(family, s, p, q)
        assert rep.passed and rep.diagnostics["spread"] < 10
    with pytest.raises(ValueError):
        lp_lq_check(family, s, 2, 1)


def test_hls_ratio_ground_state():
    s = 0.5
    phi0 = HermiteExpansion.mode((0,), basis="lebesgue")
    symbol = 2**s * math.gamma(1 + s / 2) / math.gamma(1 - s / 2)
    l4_sq = math.sqrt(math.sqrt(math.pi / 2) / math.pi)
    assert hls_exponent(1, s) == 4.0
    assert hls_ratio(phi0, 1, s) == pytest.approx(symbol / l4_sq, rel=1e-10)


def test_hls_ratio_positive_over_random_family():
    rng = np.random.default_rng(0)
    fs = [HermiteExpansion(1, 6, "lebesgue", dict(random_expansion(1, 6, rng).coeffs)) for _ in range(20)]
    assert min(hls_ratio(f, 1, 0.5) for f in fs) > 0


def test_holder(family):
    assert holder_constant(1, 0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-12)
    assert holder_constant(1, 0.3) == pytest.approx(math.pi**0.3, rel=1e-12)
    for f in family[:4]:
        assert holder_check(f, 0.5).passed


def test_weighted_hardy(family):
    s = 0.5
    c = hardy_constant(s)
    assert c > 0
    assert weighted_hardy_Hs_check(family[0], 1, s, c).passed
    assert weighted_hardy_Ls_check(HermiteExpansion.mode((0,), cutoff=4), 1, s, c).passed


@pytest.mark.parametrize("s", [0.3, 0.5, 0.7])
def test_conjugation(s):
    f = random_expansion(1, 8, np.random.default_rng(3))
    rep = conjugation_check(f, s)
    assert rep.passed
    assert rep.diagnostics["unnormalized_factor"] == pytest.approx(math.sqrt(math.pi), rel=1e-8)
