"""
矩计算测试: 均值、精确方差级数、渐近方差与离散度判定
"""

from __future__ import annotations

import numpy as np
import pytest

from schemas.params import GammaRenewalParams, IGRenewalParams
from services.errors import DomainError, SeriesNonConvergenceError
from services.moments_service import (
    dispersion_verdict,
    erp_gamma_variance_asymptotic,
    erp_ig_variance_asymptotic,
    erp_mean,
    erp_variance_exact,
    table_moments,
)
from services.renewal_gamma_service import erp_gamma_pmf, erp_gamma_truncation_point
from services.renewal_ig_service import erp_ig_pmf, erp_ig_truncation_point


@pytest.mark.parametrize(
    "params, expected",
    [
        (GammaRenewalParams(alpha=2.0, beta=0.25), 8.0),
        (GammaRenewalParams(alpha=32.0, beta=4.0), 8.0),
        (IGRenewalParams(mu=0.5, lam=1.0), 2.0),
        (GammaRenewalParams(alpha=2.0, beta=0.5, t=3.0), 12.0),
    ],
)
def test_erp_mean(params, expected):
    assert erp_mean(params) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("alpha", [0.5, 3.0, 12.0])
def test_exact_variance_at_unit_shape_is_poisson(alpha):
    p = GammaRenewalParams(alpha=alpha, beta=1.0)
    assert erp_variance_exact(p) == pytest.approx(erp_mean(p), abs=1e-8)


def test_exact_variance_dispersion_figures():
    assert erp_variance_exact(GammaRenewalParams(alpha=2.0, beta=0.25)) > 8.0
    assert erp_variance_exact(GammaRenewalParams(alpha=32.0, beta=4.0)) < 8.0


@pytest.mark.parametrize(
    "params",
    [
        GammaRenewalParams(alpha=2.74, beta=1.15),
        GammaRenewalParams(alpha=2.0, beta=0.25),
        IGRenewalParams(mu=0.5, lam=1.0),
        IGRenewalParams(mu=0.25, lam=0.1),
    ],
)
def test_exact_variance_matches_pmf_table(params):
    if isinstance(params, GammaRenewalParams):
        table = erp_gamma_pmf(np.arange(erp_gamma_truncation_point(params) + 1), params)
    else:
        table = erp_ig_pmf(np.arange(erp_ig_truncation_point(params) + 1), params)
    _, variance = table_moments(table)
    assert erp_variance_exact(params) == pytest.approx(variance, abs=1e-6)


def test_exact_variance_reports_partial_sum():
    p = GammaRenewalParams(alpha=200.0, beta=2.0)
    with pytest.raises(SeriesNonConvergenceError) as info:
        erp_variance_exact(p, n_max=5)
    assert info.value.terms == 5
    assert info.value.partial_sum > 0


def test_exact_variance_rejects_empty_series():
    with pytest.raises(DomainError):
        erp_variance_exact(GammaRenewalParams(alpha=1.0, beta=1.0), n_max=0)


def test_gamma_asymptotic_cancels_at_unit_shape():
    p = GammaRenewalParams(alpha=7.3, beta=1.0)
    assert erp_gamma_variance_asymptotic(p) == pytest.approx(7.3, abs=1e-14)


@pytest.mark.parametrize("alpha, beta, tolerance", [(200.0, 2.0, 0.02), (32.0, 4.0, 0.05), (100.0, 0.5, 0.02)])
def test_gamma_asymptotic_close_to_exact(alpha, beta, tolerance):
    p = GammaRenewalParams(alpha=alpha, beta=beta)
    assert abs(erp_gamma_variance_asymptotic(p) - erp_variance_exact(p)) < tolerance


@pytest.mark.parametrize("mu, lam", [(0.02, 0.05), (0.01, 0.02), (0.02, 0.01)])
def test_ig_asymptotic_close_to_exact(mu, lam):
    p = IGRenewalParams(mu=mu, lam=lam)
    assert p.t / p.mu >= 50
    assert abs(erp_ig_variance_asymptotic(p) - erp_variance_exact(p)) < 0.02


def test_ig_asymptotic_correction_negative_when_shape_equals_mean():
    p = IGRenewalParams(mu=1.0, lam=1.0, t=10.0)
    assert erp_ig_variance_asymptotic(p) == pytest.approx(10.0 + 1.0 / 6.0 - 0.5)
    assert erp_ig_variance_asymptotic(p) < p.t / p.lam


def test_table_moments():
    mean, variance = table_moments(np.array([0.25, 0.5, 0.25]))
    assert mean == pytest.approx(1.0)
    assert variance == pytest.approx(0.5)


@pytest.mark.parametrize(
    "mean, variance, verdict",
    [(8.0, 9.0, "over"), (8.0, 7.0, "under"), (3.0, 3.0, "equi"), (3.0, 3.0 + 1e-12, "equi")],
)
def test_dispersion_verdict(mean, variance, verdict):
    assert dispersion_verdict(mean, variance) == verdict
