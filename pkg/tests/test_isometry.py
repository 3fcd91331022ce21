import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.isometry import (
    DivergenceError,
    gauss_summation_check,
    hermite_zero_check,
    isometry_ratio,
    jsum_check,
    lift_coefficient,
    lift_Ps,
    mehler_check,
    mehler_closed_form,
    norm_1s,
    norm_s,
)
from artifact.spectral import HermiteExpansion
from artifact.suites import random_expansion

# int_{R^2} g(sqrt(2)|y|) H_J(y) e^{-|y|^2/2} dy by polar quadrature in mpmath, keyed by (k, n, s, J)
LIFT_ORACLE = {
    (0, 1, 0.4, (0, 0)): 1.0471975511965977798,
    (2, 1, 0.4, (2, 0)): -0.18512012242326533625,
    (1, 1, 0.6, (2, 2)): 0.13254812280519486891,
    (0, 1, 0.4, (4, 0)): 0.1311698689938270178,
}


def test_norm_s_values():
    h0 = HermiteExpansion.mode((0,))
    assert norm_s(h0, 0.5) == pytest.approx(2**0.5 * math.gamma(1.25) / math.gamma(0.75), rel=1e-14)
    assert norm_s(HermiteExpansion.zero(1, 3), 0.5) == 0.0
    both = HermiteExpansion(1, 3, "gaussian", {(0,): 1.0, (3,): 2.0})
    assert norm_s(both, 0.5) == pytest.approx(norm_s(h0, 0.5) + 4 * norm_s(HermiteExpansion.mode((3,)), 0.5), rel=1e-14)
    with pytest.raises(ValueError):
        norm_s(HermiteExpansion.mode((0,), basis="lebesgue"), 0.5)


@pytest.mark.parametrize("key", sorted(LIFT_ORACLE))
def test_lift_coefficient_against_quadrature(key):
    k, n, s, j = key
    assert lift_coefficient(k, n, s, j) == pytest.approx(LIFT_ORACLE[key], rel=1e-12)


def test_lift_odd_and_structure():
    assert lift_coefficient(0, 1, 0.5, (1, 2)) == 0.0
    v = lift_Ps(HermiteExpansion.mode((1,), cutoff=1), 0.5, 6)
    assert all(j[0] % 2 == 0 and j[1] % 2 == 0 for _, j in v.coeffs)
    assert v[((1,), (1, 0))] == 0.0
    with pytest.raises(ValueError):
        lift_Ps(HermiteExpansion.mode((0,)), 1.5, 6)


def test_printed_lift_differs():
    assert abs(lift_coefficient(0, 1, 0.4, (0, 0), form="printed") - LIFT_ORACLE[(0, 1, 0.4, (0, 0))]) > 1e-2


def test_norm_1s_zero_and_single_mode():
    assert norm_1s(lift_Ps(HermiteExpansion.zero(1, 2), 0.5, 20)) == 0.0
    v = lift_Ps(HermiteExpansion.mode((0,), cutoff=0), 0.5, 0)
    c = v[((0,), (0, 0))]
    weight = 2**1.5 * math.gamma((1 + 3 + 0.5) / 2) / math.gamma((1 + 1 - 0.5) / 2)
    assert norm_1s(v, tail=False) == pytest.approx(weight * c * c, rel=1e-13)


def test_tail_share_and_diagnostics():
    f = HermiteExpansion.mode((0,), cutoff=0)
    total, diag = norm_1s(lift_Ps(f, 0.5, 120), return_diagnostics=True)
    assert diag["tail_error"] <= 1e-8 * total
    assert 0 < diag["tail_share"] < 0.2


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("k", [0, 1, 2, 5, 10])
def test_jsum_closed_form(n, k):
    rep = jsum_check(n, 0.5, k)
    assert rep.rel_err <= 1e-8, rep.diagnostics


def test_isometry_ratio_constant():
    s = 0.5
    rng = np.random.default_rng(0)
    fs = [HermiteExpansion.mode((0,), cutoff=4), HermiteExpansion.mode((3,), cutoff=4)]
    fs += [random_expansion(1, 4, rng) for _ in range(4)]
    ratios = np.array([isometry_ratio(f, s, 120) for f in fs])
    assert np.ptp(ratios) / ratios.mean() <= 1e-6
    assert ratios.mean() == pytest.approx(2 * math.pi**2 * s, rel=1e-8)


def test_isometry_ratio_scale_invariant_and_nonzero():
    f = random_expansion(1, 4, np.random.default_rng(1))
    g = f.with_coeffs({a: 3.5 * v for a, v in f.coeffs.items()})
    assert isometry_ratio(g, 0.5, 60) == pytest.approx(isometry_ratio(f, 0.5, 60), rel=1e-12)
    with pytest.raises(ValueError):
        isometry_ratio(HermiteExpansion.zero(1, 2), 0.5, 60)


def test_gauss_summation_cases():
    rep = gauss_summation_check(1.0, 0.5, 3.0)
    assert rep.passed and rep.rhs == pytest.approx(2 / 3 * math.sqrt(math.pi), rel=1e-14)
    assert gauss_summation_check(0.5, 0.5, 4.0).passed


def test_gauss_summation_slow_and_divergent():
    rep = gauss_summation_check(1.0, 0.5, 1.501, max_terms=100_000)
    assert not rep.passed and rep.diagnostics["slow_convergence"]
    with pytest.raises(DivergenceError):
        gauss_summation_check(1.0, 0.5, 1.5)


@settings(max_examples=15, deadline=None)
@given(d=st.floats(0.2, 2.0), b=st.floats(0.2, 2.0), e=st.floats(1.0, 3.0))
def test_gauss_summation_symmetric(d, b, e):
    eta = d + b + e
    x = gauss_summation_check(d, b, eta, max_terms=10)
    y = gauss_summation_check(b, d, eta, max_terms=10)
    assert x.rhs == pytest.approx(y.rhs, rel=1e-12)


def test_mehler():
    rep = mehler_check((0.0, 0.0), (0.0, 0.0), 0.5)
    assert rep.passed and rep.rhs == pytest.approx(1 / (1 - 0.25), rel=1e-15)
    assert mehler_closed_form((0.7, -1.0), (0.2, 0.3), 1e-12) == pytest.approx(1.0, abs=1e-10)
    assert mehler_check((0.3, -0.1), (0.2, 0.4), 0.6).passed
    # the opposite exponent sign does not sum the series
    assert not mehler_check((0.3, -0.1), (0.2, 0.4), 0.6, sign="printed").passed
    with pytest.raises(ValueError):
        mehler_check((0.0, 0.0), (0.0, 0.0), 1.0)


def test_hermite_zero():
    rep = hermite_zero_check()
    assert rep.passed and rep.diagnostics["odd_max"] == 0.0
