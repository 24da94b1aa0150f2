import math
import numpy as np
import pytest
from scipy.special import gammaln

from pylaplace.asymptotic import (
    LogScaledValue,
    gauss_power_integral,
    laplace_estimate,
    log_factorial,
    log_gamma,
    stirling_table,
    theorem1_log_estimate,
)
from pylaplace.critical import CriticalPoint
from pylaplace.errors import NonPositiveArgument, UnrepresentableValue, ZeroAmplitude
from pylaplace.quadrature import adaptive_quad


@pytest.mark.parametrize("x", [0.125, 0.25, 0.5, 1.5, 2.5, 10.5, 33.3, 170.5, 1000.5, 1e6 + 0.5])
def test_log_gamma_against_scipy(x):
    assert log_gamma(x) == pytest.approx(gammaln(x), rel=1e-13, abs=1e-13)


def test_log_gamma_exact_on_integers():
    assert log_gamma(5) == math.log(24)
    assert log_gamma(1) == 0.0
    assert log_factorial(170) == math.log(math.factorial(170))
    assert log_factorial(1000) == pytest.approx(gammaln(1001), rel=1e-13)
    assert log_gamma(math.inf) == math.inf


@pytest.mark.parametrize("x", [0.0, -1.0, -0.5, math.nan])
def test_log_gamma_rejects_non_positive(x):
    with pytest.raises(NonPositiveArgument):
        log_gamma(x)


def test_gauss_power_integral():
    assert gauss_power_integral(1) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert gauss_power_integral(2) == pytest.approx(1.812804954111, rel=1e-11)
    with pytest.raises(ValueError):
        gauss_power_integral(0)


def test_log_scaled_arithmetic():
    minus_two = LogScaledValue.from_float(-2.0)
    assert minus_two.sign == -1
    assert minus_two.to_float() == pytest.approx(-2.0, rel=1e-15)
    assert (-minus_two).sign == 1

    zero = LogScaledValue.from_float(0.0)
    assert (zero.sign, zero.log_mag, zero.to_float()) == (0, -math.inf, 0.0)

    huge = LogScaledValue(1, 2000.0)
    assert (huge / huge.shifted(-1.0)).to_float() == pytest.approx(math.e, rel=1e-15)
    assert huge.ratio_to(huge) == 1.0
    assert (minus_two * huge).log_mag == pytest.approx(2000.0 + math.log(2.0), rel=1e-15)
    assert str(minus_two) == f"-exp({math.log(2.0):.17g})"
    with pytest.raises(UnrepresentableValue):
        huge.to_float()
    with pytest.raises(UnrepresentableValue):
        float(LogScaledValue(-1, -800.0))
    with pytest.raises(ZeroDivisionError):
        huge / zero
    with pytest.raises(ValueError):
        LogScaledValue(2, 0.0)
    with pytest.raises(ValueError):
        LogScaledValue.from_float(math.nan)


def test_stirling_estimate(stirling):
    cp = stirling.critical_point()
    estimate = laplace_estimate(stirling.phi, cp, 10)
    assert (estimate.n, estimate.m) == (10, 1)
    assert estimate.value.sign == 1
    assert estimate.value.log_mag == pytest.approx(-10.0 + 0.5 * math.log(2 * math.pi / 10))


def test_gaussian_estimate_is_exact(gaussian):
    cp = gaussian.critical_point()
    for n in (1, 7, 10**6):
        value = laplace_estimate("1", cp, n).value.to_float()
        assert value == pytest.approx(math.sqrt(math.pi / n), rel=1e-14)


def test_quartic_estimate():
    cp = CriticalPoint(0.0, 2, -24.0, 0.0)
    value = laplace_estimate("1", cp, 16).value.to_float()
    assert value == pytest.approx(1.812804954111 / 2.0, rel=1e-11)


def test_estimate_keeps_sign_and_scales_in_log_space():
    cp = CriticalPoint(1.0, 1, -1.0, -1.0)
    estimate = laplace_estimate("-3", cp, 10**6)
    assert estimate.value.sign == -1
    assert estimate.value.log_mag == pytest.approx(
        math.log(3.0) - 1e6 + 0.5 * math.log(2 * math.pi / 1e6), rel=1e-15
    )
    with pytest.raises(UnrepresentableValue):
        estimate.value.to_float()


def test_general_form_reduces_to_the_non_degenerate_one(wiggle):
    cp = wiggle.critical_point()
    phi0 = wiggle.phi.evaluate(cp.xi0)
    for n in (1, 50, 10**4):
        general = laplace_estimate(wiggle.phi, cp, n).value
        reference = theorem1_log_estimate(phi0, cp.h0, cp.d2m, n)
        assert general.log_mag == pytest.approx(reference.log_mag, rel=1e-13, abs=1e-13)


def test_estimate_errors():
    cp = CriticalPoint(1.0, 1, -1.0, -1.0)
    with pytest.raises(ZeroAmplitude):
        laplace_estimate("x-1", cp, 10)
    with pytest.raises(ValueError):
        laplace_estimate("1", cp, 0)
    with pytest.raises(ValueError):
        laplace_estimate("1/(x-1)", cp, 10)


def test_stirling_table():
    table = stirling_table([10, 100, 1000])
    assert list(table.columns) == [
        "n",
        "log_factorial",
        "stirling_ratio",
        "ratio_to_sqrt_2pi",
        "correction_1_12n",
    ]
    assert table["ratio_to_sqrt_2pi"][0] == pytest.approx(1.008365359132, rel=1e-11)
    assert table["ratio_to_sqrt_2pi"][1] == pytest.approx(1.000833677872, rel=1e-11)
    assert table["stirling_ratio"][0] == pytest.approx(
        1.008365359132 * math.sqrt(2 * math.pi), rel=1e-11
    )
    # the 1 + 1/(12 n) correction is accurate to O(1/n^2)
    gaps = (table["ratio_to_sqrt_2pi"] - table["correction_1_12n"]).abs()
    assert all(gap < 1.0 / n**2 for gap, n in zip(gaps, table["n"]))
    with pytest.raises(ValueError):
        stirling_table([])


def test_gauss_power_integral_against_quadrature():
    for m in (3, 4):
        expected = adaptive_quad(lambda z: np.exp(-(z ** (2 * m))), -math.inf, math.inf).value
        assert gauss_power_integral(m) == pytest.approx(expected, rel=1e-9)


def test_general_form_matches_the_closed_form_on_random_inputs():
    rng = np.random.default_rng(20240611)
    for _ in range(1000):
        phi0 = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.1, 10.0))
        d2 = float(-(10.0 ** rng.uniform(-3.0, 3.0)))
        h0 = float(rng.choice([0.0, rng.uniform(-5.0, 5.0)]))
        n = int(rng.integers(1, 10**6, endpoint=True))
        general = laplace_estimate(repr(phi0), CriticalPoint(0.0, 1, d2, h0), n).value
        reference = theorem1_log_estimate(phi0, h0, d2, n)
        assert general.sign == reference.sign
        assert general.log_mag == pytest.approx(reference.log_mag, rel=1e-12, abs=1e-12)


def test_prefactor_disagreement_is_an_error(monkeypatch):
    cp = CriticalPoint(0.0, 1, -2.0, 0.0)
    laplace_estimate("1", cp, 10)
    monkeypatch.setattr("pylaplace.asymptotic.log_gamma", lambda x: log_gamma(x) + 1e-9)
    with pytest.raises(RuntimeError):
        laplace_estimate("1", cp, 10)
    # degenerate maxima have no closed form to compare with
    laplace_estimate("1", CriticalPoint(0.0, 2, -24.0, 0.0), 10)


@pytest.mark.parametrize(
    "cp", [CriticalPoint(1.0, 1, -1.0, -1.0), CriticalPoint(0.0, 2, -24.0, 0.0)], ids=["m1", "m2"]
)
@pytest.mark.parametrize("k", [2, 10, 1000])
def test_estimate_scaling_in_n(cp, k):
    for n in (1, 37, 10**5):
        small = laplace_estimate("1", cp, n).value.log_mag
        large = laplace_estimate("1", cp, k * n).value.log_mag
        expected = (k - 1) * n * cp.h0 - math.log(k) / (2 * cp.m)
        assert large - small == pytest.approx(expected, rel=1e-12, abs=1e-11)
