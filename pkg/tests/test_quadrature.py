import math

import numpy as np
import pytest

from artifact.quadrature import (
    QuadratureError,
    QuadratureSpec,
    gauss_hermite,
    gaussian_inner_product,
    integrate_halfline,
    integrate_interval,
)
from artifact.specfun import hermite_poly


@pytest.mark.parametrize(
    "f,a,b,exact",
    [
        (lambda x: np.ones_like(x), 0.0, 1.0, 1.0),
        (lambda x: x**-0.5, 0.0, 1.0, 2.0),
        (np.sin, 0.0, math.pi, 2.0),
    ],
)
def test_integrate_interval(f, a, b, exact):
    res = integrate_interval(f, a, b)
    assert abs(res.value - exact) < 1e-12
    assert res.error <= max(1e-300, 1e-13 * abs(res.value)) * 10


@pytest.mark.parametrize(
    "f,exact",
    [
        (lambda t: np.exp(-t), 1.0),
        (lambda t: t**-0.5 * np.exp(-t), math.sqrt(math.pi)),
        (lambda t: t**-1.5 * np.exp(-1 / (4 * t)), 2 * math.sqrt(math.pi)),
    ],
)
def test_integrate_halfline(f, exact):
    assert abs(integrate_halfline(f).value - exact) < 1e-12 * exact


def test_tolerance_not_met_raises_with_estimate():
    spec = QuadratureSpec(rel_tol=1e-15, max_levels=1)
    with pytest.raises(QuadratureError) as info:
        integrate_interval(lambda x: np.abs(np.sin(40 * x)) ** 0.3, 0.0, 3.0, spec)
    assert math.isfinite(info.value.estimate)


def test_gaussian_inner_products():
    h = lambda m: (lambda p: hermite_poly(m, p[:, 0]))
    assert gaussian_inner_product(h(2), h(2), 1) == pytest.approx(1.0, abs=1e-13)
    assert abs(gaussian_inner_product(h(1), h(3), 1)) < 1e-13
    one = lambda p: np.ones(p.shape[0])
    assert gaussian_inner_product(one, one, 2) == pytest.approx(1.0, abs=1e-13)


def test_gauss_hermite_exactness_and_doubling():
    # x^{2j} against e^{-x^2}: Gamma(j + 1/2)
    for order in (8, 16):
        x, w = gauss_hermite(order)
        for j in range(order):
            exact = math.gamma(j + 0.5)
            assert abs(np.sum(w * x ** (2 * j)) - exact) <= 1e-12 * exact
    f = lambda p: p[:, 0] ** 6 + 3 * p[:, 0] ** 2
    g = lambda p: np.ones(p.shape[0])
    a = gaussian_inner_product(f, g, 1, QuadratureSpec(gh_order=20))
    b = gaussian_inner_product(f, g, 1, QuadratureSpec(gh_order=40))
    assert abs(a - b) <= 1e-12 * abs(a)


def test_gauss_hermite_cache_and_cap():
    assert gauss_hermite(32)[0] is gauss_hermite(32)[0]
    with pytest.raises(ValueError):
        gauss_hermite(257)


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(rel_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureSpec(rule="simpson")
    with pytest.raises(ValueError):
        QuadratureSpec(max_levels=0)


def test_halving_tolerance_never_increases_error():
    exact = math.gamma(0.3)
    f = lambda t: t**-0.7 * np.exp(-t)
    errs = [abs(integrate_halfline(f, QuadratureSpec(rel_tol=tol)).value - exact) for tol in (1e-6, 5e-7, 2.5e-7)]
    assert errs[1] <= errs[0] + 1e-16 and errs[2] <= errs[1] + 1e-16


def test_bit_reproducible():
    f = lambda t: np.cos(t) * np.exp(-t * t)
    assert integrate_halfline(f).value == integrate_halfline(f).value
