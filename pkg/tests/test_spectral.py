import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.quadrature import QuadratureSpec, gaussian_inner_product
from artifact.spectral import (
    DegreeMultiplier,
    HermiteExpansion,
    analyze,
    apply_multiplier,
    frak_rs_symbol,
    gaussify,
    last_shell_fraction,
    multi_indices,
    multiplier_value,
    project_Qk,
    quadratic_form,
    rs_symbol,
    shell_norms,
    synthesize,
    ungaussify,
)
from artifact.specfun import hermite_poly
from artifact.suites import random_expansion

# <e^{-x^2}, H_{2m}>_gamma, mpmath at 30 digits
EXP_COEFFS = [0.7071067811865475244, -0.25, 0.10825317547305483085, -0.049410588440130927062]


def test_multi_index_order():
    assert multi_indices(2, 2) == [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]
    assert multi_indices(3, 1, shell=1) == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]


def test_expansion_validation():
    with pytest.raises(ValueError):
        HermiteExpansion(4, 2)
    with pytest.raises(ValueError):
        HermiteExpansion(1, 2, "gaussian", {(3,): 1.0})
    with pytest.raises(ValueError):
        HermiteExpansion(1, 2, "other")


def test_analyze_single_mode_and_constant():
    e = analyze(lambda p: hermite_poly(2, p[:, 0]), 1, 6)
    assert e[(2,)] == pytest.approx(1.0, abs=1e-13)
    assert max(abs(v) for a, v in e.coeffs.items() if a != (2,)) <= 1e-10
    one = analyze(lambda p: np.ones(p.shape[0]), 1, 4)
    assert one[(0,)] == pytest.approx(1.0, abs=1e-14)


def test_analyze_gaussian_against_closed_form():
    e = analyze(lambda p: np.exp(-p[:, 0] ** 2), 1, 6)
    for m, c in enumerate(EXP_COEFFS):
        assert e[(2 * m,)] == pytest.approx(c, abs=1e-13)
        assert abs(e[(2 * m + 1,)]) < 1e-14


def test_synthesize():
    e = HermiteExpansion.mode((3,))
    assert synthesize(e, 0.7) == pytest.approx(hermite_poly(3, 0.7), rel=1e-14)
    assert synthesize(HermiteExpansion.zero(1, 3), 0.7) == 0.0


def test_analyze_synthesize_round_trip():
    f = lambda x: x * x * np.exp(-x * x / 4)
    e = analyze(lambda p: f(p[:, 0]), 1, 40, spec=QuadratureSpec(gh_order=96))
    x = np.array([0.0, 1.0, 2.0])
    assert np.max(np.abs(synthesize(e, x[:, None]) - f(x))) < 1e-6


def test_project_and_parseval():
    e = HermiteExpansion.mode((2, 0))
    assert project_Qk(e, 2).coeffs == e.coeffs
    assert project_Qk(e, 3).coeffs == {}
    f = random_expansion(2, 10, np.random.default_rng(3))
    direct = gaussian_inner_product(lambda p: synthesize(f, p), lambda p: synthesize(f, p), 2, QuadratureSpec(gh_order=24))
    assert math.isclose(shell_norms(f).sum(), direct, rel_tol=1e-10)
    assert math.isclose(f.norm_squared(), direct, rel_tol=1e-10)
    assert 0 < last_shell_fraction(f) < 1


def test_multiplier_values():
    ls = DegreeMultiplier("Ls", 1, 0.5)
    assert multiplier_value(ls, 0) == pytest.approx(2**0.5 * math.gamma(1.25) / math.gamma(0.75), rel=1e-14)
    assert multiplier_value(DegreeMultiplier("identity", 2), 9) == 1.0
    prod = DegreeMultiplier("H_minus_s", 2, 0.3)(3) * DegreeMultiplier("Hs_conformal", 2, 0.3)(3)
    assert prod == pytest.approx(1.0, rel=1e-14)
    with pytest.raises(ValueError):
        multiplier_value(ls, -1)
    with pytest.raises(ValueError):
        DegreeMultiplier("pure_power", 1, 0.5)


@pytest.mark.parametrize("variant", ["Ls", "Us"])
@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("s", [0.1, 0.5, 0.9])
def test_multipliers_positive_increasing(variant, n, s):
    v = DegreeMultiplier(variant, n, s)(np.arange(301))
    assert np.all(v > 0) and np.all(np.diff(v) > 0)


def test_apply_and_quadratic_form():
    f = random_expansion(1, 6, np.random.default_rng(0))
    assert apply_multiplier(f, DegreeMultiplier("identity", 1)).coeffs == f.coeffs
    ls = DegreeMultiplier("Ls", 1, 0.4)
    assert quadratic_form(HermiteExpansion.mode((3,)), ls) == pytest.approx(ls(3), rel=1e-15)
    assert quadratic_form(HermiteExpansion.zero(1, 3), ls) == 0.0
    with pytest.raises(ValueError):
        apply_multiplier(HermiteExpansion.mode((1,), basis="lebesgue"), DegreeMultiplier("Us", 1, 0.4))


def test_ls_dominates_us_through_frak_symbol():
    # <L_s f, f> >= 2^s <U_s f, f> min_k Ls(k)/(2^s Us(k)) holds as an identity of diagonal forms
    f = random_expansion(2, 8, np.random.default_rng(5))
    ls, us = DegreeMultiplier("Ls", 2, 0.6), DegreeMultiplier("Us", 2, 0.6)
    k = np.arange(9)
    lower = np.min(ls(k) / us(k))
    assert quadratic_form(f, ls) >= lower * quadratic_form(f, us) * (1 - 1e-14)


def test_gaussify_round_trip_and_pointwise():
    f = random_expansion(1, 6, np.random.default_rng(1))
    g = gaussify(f)
    assert ungaussify(g).coeffs == f.coeffs
    assert g.norm_squared() == f.norm_squared()
    x = 0.3
    assert synthesize(g, x) == pytest.approx(math.pi**-0.25 * math.exp(-x * x / 2) * synthesize(f, x), rel=1e-13)


def test_conjugation_pointwise():
    # H_s(e^{-x^2/2} f) = e^{-x^2/2} L_s f, compared at sample points
    f = random_expansion(1, 6, np.random.default_rng(2))
    s = 0.35
    left = apply_multiplier(gaussify(f), DegreeMultiplier("Hs_conformal", 1, s))
    right = apply_multiplier(f, DegreeMultiplier("Ls", 1, s))
    x = np.linspace(-2, 2, 7)
    lhs = synthesize(left, x[:, None])
    rhs = math.pi**-0.25 * np.exp(-x * x / 2) * synthesize(right, x[:, None])
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-14)


def test_json_round_trip():
    f = random_expansion(2, 4, np.random.default_rng(4))
    assert HermiteExpansion.from_json(f.to_json()) == f


@settings(max_examples=20, deadline=None)
@given(s=st.floats(0.05, 0.95), n=st.integers(1, 3))
def test_symbols_tend_to_limits(s, n):
    # both symbols approach their large-k limits with O(1/k) error
    assert abs(rs_symbol(n, s, 10**6) - 1) < 1e-8
    assert abs(frak_rs_symbol(n, s, 10**6) - 2**-s) < 1e-6
