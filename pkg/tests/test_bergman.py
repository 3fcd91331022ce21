import math

import numpy as np
import pytest

from artifact.bergman import (
    SequenceWeightArgs,
    StripWeightArgs,
    bergman_family_check,
    bergman_identity_check,
    calibrate_constant,
    hermite_function_complex,
    laguerre_asymptotic,
    laguerre_negative_asymptotic_check,
    sequence_weight,
    sequence_weight_bound_check,
    sequence_weight_envelope,
    strip_weight,
)
from artifact.spectral import HermiteExpansion
from artifact.specfun import hermite_fn

# mpmath at 30 digits: strip weight by direct quadrature, sequence weight via whitw and laguerre
STRIP_1_12_04_03 = 1.4062050581319073979
SEQ_1_05_1_10 = 0.0019615164253404806423


def test_args_validation():
    with pytest.raises(ValueError):
        StripWeightArgs(0.0, 1.0)
    with pytest.raises(ValueError):
        SequenceWeightArgs(1, 0.5, 1.5)


def test_strip_weight_value_and_positivity():
    args = StripWeightArgs(1.0, 1.2)
    assert strip_weight(args, 0.4, 0.3) == pytest.approx(STRIP_1_12_04_03, rel=1e-12)
    # a second node count gives the same value
    assert strip_weight(args, 0.4, 0.3, order=96) == pytest.approx(STRIP_1_12_04_03, rel=1e-12)
    vals = strip_weight(args, np.linspace(-4, 4, 17), 0.9)
    assert np.all(vals > 0)
    with pytest.raises(ValueError):
        strip_weight(args, 0.0, 1.0)


def test_strip_weight_wide_strip_limit():
    assert strip_weight(StripWeightArgs(40.0, 1.0), 0.0, 0.0) == pytest.approx(math.sqrt(math.pi), rel=1e-12)


def test_hermite_function_complex_real_axis_and_finite():
    e = HermiteExpansion.mode((3,), basis="lebesgue")
    x = np.array([-1.0, 0.2, 2.5])
    assert np.allclose(hermite_function_complex(e, x).real, hermite_fn(3, x), rtol=1e-13)
    z = np.linspace(-6, 6, 13)[:, None] + 1j * np.linspace(-0.8, 0.8, 5)[None, :]
    assert np.all(np.isfinite(hermite_function_complex(e, z)))
    with pytest.raises(ValueError):
        hermite_function_complex(HermiteExpansion.mode((0,)), 0.0)


@pytest.mark.parametrize("t,delta", [(0.5, 1.0), (0.8, 1.0), (0.8, 0.6)])
def test_calibrated_constant_closed_form(t, delta):
    assert calibrate_constant(t, delta) == pytest.approx(math.pi / math.gamma(1 + delta), rel=1e-12)


def test_identity_single_mode_and_cross_terms():
    assert bergman_identity_check(HermiteExpansion.mode((2,), basis="lebesgue"), 0.8, 1.0).passed
    mix = HermiteExpansion(1, 1, "lebesgue", {(0,): 1.0, (1,): 1.0})
    assert bergman_identity_check(mix, 0.8, 1.0).passed


@pytest.mark.parametrize("t", [0.5, 0.8])
@pytest.mark.parametrize("delta", [1.0, 0.6])
def test_family_constant(t, delta):
    rep = bergman_family_check(t, delta, 4)
    assert rep.passed, rep.diagnostics


def test_sequence_weight_value_and_positivity():
    args = SequenceWeightArgs(1, 0.5, 1.0)
    assert sequence_weight(args, 10) == pytest.approx(SEQ_1_05_1_10, rel=1e-12)
    assert np.all(sequence_weight(args, np.arange(0, 200, 7)) > 0)
    with pytest.raises(OverflowError):
        sequence_weight(args, 10_001)
    with pytest.raises(ValueError):
        sequence_weight(args, -1)


@pytest.mark.parametrize("rho", [0.25, 0.5, 1.0])
def test_sequence_weight_carries_extra_exponential_decay(rho):
    # w(k) / envelope(k) behaves like exp(-rho sqrt(2k+n)); with that factor
    # restored the ratio is bounded over k in [50, 2000]
    args = SequenceWeightArgs(1, 0.5, rho)
    k = np.unique(np.geomspace(50, 2000, 40).astype(int))
    logr = sequence_weight(args, k, log=True) - sequence_weight_envelope(args, k, log=True)
    corrected = logr + rho * np.sqrt(2 * k + 1)
    assert np.ptp(corrected) < math.log(2)
    rep = sequence_weight_bound_check(args)
    assert rep.lhs == pytest.approx(math.exp(np.ptp(logr)), rel=1e-9)


def test_laguerre_asymptotics():
    assert laguerre_negative_asymptotic_check(2.0, -1.0).passed
    rep = laguerre_negative_asymptotic_check(1.0, -0.5)
    assert rep.passed
    assert laguerre_negative_asymptotic_check(2.0, -1.0).diagnostics["drift"] <= 0.02
    with pytest.raises(ValueError):
        laguerre_asymptotic(10, 1.0, 0.5)
