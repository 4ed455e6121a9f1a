"""
特殊函数测试: 与 scipy.special 对照, 以及闭式特例
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import special

from services.errors import DomainError
from services.specfun import (
    log_gamma,
    log_normal_cdf,
    log_reg_upper_inc_gamma,
    normal_cdf,
    reg_lower_inc_gamma,
)


@pytest.mark.parametrize(
    "x, expected",
    [
        (1.0, 0.0),
        (0.5, 0.5 * math.log(math.pi)),
        (10.0, math.log(362880.0)),
    ],
)
def test_log_gamma_known_values(x, expected):
    assert log_gamma(x) == pytest.approx(expected, abs=1e-13)


def test_log_gamma_matches_scipy_over_range():
    x = np.logspace(-6, 6, 400)
    np.testing.assert_allclose(log_gamma(x), special.gammaln(x), rtol=1e-12, atol=1e-13)


def test_log_gamma_scalar_returns_float():
    assert isinstance(log_gamma(3.0), float)
    assert isinstance(log_gamma([3.0]), np.ndarray)


@pytest.mark.parametrize("x", [0.0, -1.0, math.inf, math.nan])
def test_log_gamma_rejects_bad_input(x):
    with pytest.raises(DomainError):
        log_gamma(x)


@pytest.mark.parametrize(
    "a, x, expected",
    [
        (1.0, 2.0, 1.0 - math.exp(-2.0)),
        (3.0, 2.0, 1.0 - math.exp(-2.0) * 5.0),
        (5.0, 0.0, 0.0),
    ],
)
def test_reg_lower_inc_gamma_examples(a, x, expected):
    assert reg_lower_inc_gamma(a, x) == pytest.approx(expected, abs=1e-12)


def test_reg_lower_inc_gamma_matches_scipy_grid():
    a = np.array([0.1, 0.25, 0.5, 1.0, 2.5, 10.0, 50.0, 200.0])[:, None]
    x = np.array([0.0, 1e-3, 0.01, 0.5, 1.0, 3.0, 10.0, 50.0, 100.0, 201.0, 300.0])[None, :]
    np.testing.assert_allclose(reg_lower_inc_gamma(a, x), special.gammainc(a, x), rtol=0, atol=1e-12)


def test_reg_lower_inc_gamma_erlang_closed_form():
    x = np.linspace(0.01, 100.0, 300)
    for a in range(1, 31):
        terms = np.zeros_like(x)
        log_term = -x.copy()
        for k in range(a):
            if k:
                log_term = log_term + np.log(x) - math.log(k)
            terms += np.exp(log_term)
        erlang = 1.0 - terms
        np.testing.assert_allclose(reg_lower_inc_gamma(float(a), x), erlang, rtol=0, atol=1e-11)


def test_reg_lower_inc_gamma_monotone_with_limits():
    x = np.linspace(0.0, 60.0, 500)
    values = reg_lower_inc_gamma(7.5, x)
    assert values[0] == 0.0
    assert np.all(np.diff(values) >= 0)
    assert reg_lower_inc_gamma(7.5, math.inf) == 1.0


@pytest.mark.parametrize("a, x", [(0.0, 1.0), (-1.0, 1.0), (1.0, -0.5), (math.nan, 1.0), (1.0, math.nan)])
def test_reg_lower_inc_gamma_domain(a, x):
    with pytest.raises(DomainError):
        reg_lower_inc_gamma(a, x)


def test_log_upper_gamma_deep_tail():
    # Q(1, x) = e^{-x}
    assert log_reg_upper_inc_gamma(1.0, 800.0) == pytest.approx(-800.0, rel=1e-13)
    a = np.array([0.5, 2.0, 20.0])
    x = np.array([3.0, 1.0, 25.0])
    np.testing.assert_allclose(log_reg_upper_inc_gamma(a, x), np.log(special.gammaincc(a, x)), rtol=1e-12)


def test_normal_cdf_examples():
    assert normal_cdf(0.0) == 0.5
    assert normal_cdf(1.959963984540054) == pytest.approx(0.975, abs=1e-14)


def test_normal_cdf_matches_scipy():
    z = np.linspace(-12.0, 12.0, 2001)
    np.testing.assert_allclose(normal_cdf(z), special.ndtr(z), rtol=0, atol=1e-14)


def test_normal_cdf_symmetry():
    z = np.linspace(-8.0, 8.0, 801)
    np.testing.assert_allclose(normal_cdf(z) + normal_cdf(-z), 1.0, rtol=0, atol=1e-14)


@pytest.mark.parametrize("z", [-40.0, -37.0, -300.0, -1e4])
def test_log_normal_cdf_deep_tail(z):
    value = log_normal_cdf(z)
    assert math.isfinite(value)
    assert value == pytest.approx(float(special.log_ndtr(z)), rel=1e-12)


def test_log_normal_cdf_at_minus_forty():
    assert log_normal_cdf(-40.0) == pytest.approx(-804.608, abs=1e-3)


def test_log_normal_cdf_consistent_with_cdf():
    z = np.linspace(-8.0, 8.0, 801)
    np.testing.assert_allclose(np.exp(log_normal_cdf(z)), normal_cdf(z), rtol=1e-10)


def test_normal_cdf_rejects_nan():
    with pytest.raises(DomainError):
        normal_cdf(math.nan)
    with pytest.raises(DomainError):
        log_normal_cdf([0.0, math.nan])
