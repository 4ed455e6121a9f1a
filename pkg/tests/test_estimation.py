"""
估计测试: 似然、数据整理、协方差、嵌套关系、参数恢复与边际效应
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from schemas.fit import FitOptions
from schemas.model import Family, ModelSpec, RegressionDesign
from schemas.params import GammaRenewalParams
from services.dataset_service import load_dataset
from services.errors import DataError, DomainError
from services.estimation_service import (
    covariance,
    fit,
    log_likelihood,
    marginal_effects,
    mean_link,
    numerical_hessian,
    poisson_seed,
    prepare_design,
)
from services.family_registry import FamilyRegistry
from services.renewal_gamma_service import erp_gamma_count_survival, erp_gamma_pmf
from services.sampling_service import RngStream
from tests.helpers import FERTILITY_COVARIATES, simulate_design

ERP_GAMMA = ModelSpec(family=Family.ERP_GAMMA)
ERP_GAMMA_X = ModelSpec(family=Family.ERP_GAMMA, covariates=True)
POISSON = ModelSpec(family=Family.POISSON)
POISSON_X = ModelSpec(family=Family.POISSON, covariates=True)
RP_GAMMA = ModelSpec(family=Family.RP_GAMMA)


def _within(result, name: str, truth: float, k: float = 4.0) -> bool:
    se = result.natural_se(name)
    assert se is not None and se > 0
    return abs(result.natural_value(name) - truth) <= k * se


# 似然
def test_single_zero_count_likelihood():
    p = GammaRenewalParams(alpha=2.74, beta=1.15)
    theta = [math.log(2.74), math.log(1.15)]
    value = log_likelihood(ERP_GAMMA, theta, RegressionDesign(counts=[0]))
    assert value == pytest.approx(math.log(erp_gamma_pmf(0, p)), rel=1e-12)


def test_censored_row_contributes_count_survival():
    p = GammaRenewalParams(alpha=2.74, beta=1.15)
    theta = [math.log(2.74), math.log(1.15)]
    data = RegressionDesign(counts=[5, 1], censor_at=[3, None])
    expected = math.log(erp_gamma_count_survival(3, p)) + math.log(erp_gamma_pmf(1, p))
    assert log_likelihood(ERP_GAMMA, theta, data) == pytest.approx(expected, rel=1e-12)


def test_likelihood_rejects_wrong_parameter_length():
    with pytest.raises(DomainError):
        log_likelihood(ERP_GAMMA, [0.0], RegressionDesign(counts=[1]))


def test_likelihood_is_minus_infinity_for_invalid_parameters():
    assert log_likelihood(ERP_GAMMA, [900.0, 0.0], RegressionDesign(counts=[1])) == -math.inf


def test_prepare_design_groups_rows_without_covariates():
    prepared = prepare_design(RegressionDesign(counts=[2, 0, 1, 2, 1, 2]), use_covariates=False)
    np.testing.assert_array_equal(prepared.counts, [0, 1, 2])
    np.testing.assert_array_equal(prepared.weights, [1.0, 2.0, 3.0])
    assert prepared.n_observations == 6


def test_prepare_design_merges_censored_rows_by_threshold():
    data = RegressionDesign(counts=[4, 7, 1], censor_at=[3, 3, None])
    prepared = prepare_design(data, use_covariates=False)
    censored = prepared.censor > 0
    assert int(censored.sum()) == 1
    assert prepared.weights[censored][0] == 2.0


def test_prepare_design_needs_covariates_for_regression():
    with pytest.raises(DataError):
        prepare_design(RegressionDesign(counts=[1, 2]), use_covariates=True)


def test_poisson_seed():
    intercept, coefficients, dispersion = poisson_seed(
        prepare_design(RegressionDesign(counts=[1, 2, 3]), use_covariates=False)
    )
    assert intercept == pytest.approx(math.log(2.0), abs=1e-5)
    assert coefficients.size == 0
    assert dispersion == pytest.approx(0.5, abs=1e-4)


def test_mean_link():
    theta = [math.log(2.0), math.log(1.5), 0.4]
    rates = mean_link(theta, [[0.0], [1.0]], ERP_GAMMA_X)
    np.testing.assert_allclose(rates["alpha"], [3.0, 3.0 * math.exp(0.4)], rtol=1e-14)
    np.testing.assert_allclose(rates["beta"], [1.5, 1.5], rtol=1e-14)
    without = mean_link([math.log(2.0), math.log(1.5)], [[5.0], [-5.0]], ERP_GAMMA)
    np.testing.assert_allclose(without["alpha"], [2.0, 2.0], rtol=1e-14)
    with pytest.raises(DomainError):
        mean_link(theta, [[math.nan]], ERP_GAMMA_X)


# 协方差
def test_hessian_and_covariance_of_quadratic():
    a = np.array([[4.0, 1.0, 0.0], [1.0, 3.0, 0.5], [0.0, 0.5, 2.0]])

    def loglik(theta):
        return -0.5 * float(theta @ a @ theta)

    np.testing.assert_allclose(numerical_hessian(loglik, np.zeros(3)), -a, atol=1e-6)
    estimate = covariance(loglik, np.zeros(3))
    assert estimate.available and not estimate.pseudo_inverse
    np.testing.assert_allclose(estimate.matrix, np.linalg.inv(a), atol=1e-6)


def test_singular_information_uses_pseudo_inverse():
    estimate = covariance(lambda theta: -0.5 * float(theta[0] ** 2), np.zeros(2))
    assert estimate.pseudo_inverse
    np.testing.assert_allclose(estimate.matrix, [[1.0, 0.0], [0.0, 0.0]], atol=1e-6)


def test_covariance_unavailable():
    assert not covariance(lambda theta: -math.inf, np.zeros(2)).available
    assert not covariance(lambda theta: 0.5 * float(theta @ theta), np.zeros(2)).available


# 嵌套
def test_erp_gamma_nests_poisson():
    data = simulate_design(POISSON, {"alpha": 2.38}, 100_000, seed=31)
    poisson = fit(POISSON, data)
    erp = fit(ERP_GAMMA, data, FitOptions(start=[poisson.theta[0], 0.0]))
    assert erp.converged
    # β = 1 处两者只差求值舍入
    assert erp.minus_loglik <= poisson.minus_loglik + 1e-3
    assert _within(erp, "beta", 1.0)
    assert poisson.natural_value("alpha") == pytest.approx(float(np.mean(data.counts)), rel=1e-5)


def test_hurdle_nests_rp_gamma():
    data = simulate_design(
        ModelSpec(family=Family.RP_GAMMA_HURDLE, hurdle_m=3),
        {"alpha": 2.38, "beta": 0.87, "delta": 0.66},
        3000,
        seed=32,
    )
    rp = fit(RP_GAMMA, data)
    hurdle_spec = ModelSpec(family=Family.RP_GAMMA_HURDLE, hurdle_m=3)
    hurdle = fit(hurdle_spec, data, FitOptions(start=rp.theta + [rp.theta[1]]))
    assert hurdle.minus_loglik <= rp.minus_loglik + 1e-6


def test_mixture_nests_erp_gamma():
    data = simulate_design(ERP_GAMMA, {"alpha": 2.74, "beta": 1.15}, 2000, seed=33)
    erp = fit(ERP_GAMMA, data)
    log_alpha, log_beta = erp.theta
    mixture = fit(
        ModelSpec(family=Family.ERP_GAMMA_BETA_MIXTURE),
        data,
        FitOptions(start=[log_alpha, log_beta, log_beta, 0.0]),
    )
    assert mixture.minus_loglik <= erp.minus_loglik + 1e-6


# 参数恢复
def test_erp_gamma_recovers_parameters():
    data = simulate_design(ERP_GAMMA, {"alpha": 2.74, "beta": 1.15}, 5000, seed=41)
    result = fit(ERP_GAMMA, data)
    assert result.converged
    assert _within(result, "alpha", 2.74)
    assert _within(result, "beta", 1.15)
    assert result.mean_estimate == pytest.approx(result.natural_value("alpha") / result.natural_value("beta"))
    assert result.n_observations == 5000


def test_standard_errors_shrink_with_sample_size():
    small = fit(ERP_GAMMA, simulate_design(ERP_GAMMA, {"alpha": 2.74, "beta": 1.15}, 2000, seed=42))
    large = fit(ERP_GAMMA, simulate_design(ERP_GAMMA, {"alpha": 2.74, "beta": 1.15}, 8000, seed=43))
    for name in ("alpha", "beta"):
        ratio = small.natural_se(name) / large.natural_se(name)
        assert 1.7 <= ratio <= 2.3


def test_covariates_recover_coefficients():
    values = {"eta0": 2.0, "beta": 1.15}
    data = simulate_design(ERP_GAMMA_X, values, 4000, seed=44, coefficients=[0.3, -0.2])
    result = fit(ERP_GAMMA_X, data)
    assert result.converged
    assert _within(result, "eta0", 2.0)
    assert _within(result, "beta", 1.15)
    assert _within(result, "coef[x1]", 0.3)
    assert _within(result, "coef[x2]", -0.2)
    assert result.natural_value("alpha") == pytest.approx(
        result.natural_value("beta") * result.natural_value("eta0")
    )


def test_affine_covariate_shift_leaves_fit_unchanged():
    data = simulate_design(ERP_GAMMA_X, {"eta0": 2.0, "beta": 1.15}, 2000, seed=45, coefficients=[0.3])
    base = fit(ERP_GAMMA_X, data)
    c, d = 2.5, -1.0
    shifted = RegressionDesign(
        counts=data.counts,
        covariates=[[c * row[0] + d] for row in data.covariates],
    )
    log_eta0, log_beta, b = base.theta
    moved = fit(ERP_GAMMA_X, shifted, FitOptions(start=[log_eta0 - b * d / c, log_beta, b / c]))
    assert moved.minus_loglik == pytest.approx(base.minus_loglik, abs=1e-5)
    assert moved.natural_value("coef[x1]") == pytest.approx(b / c, rel=1e-3)
    assert moved.natural_value("beta") == pytest.approx(base.natural_value("beta"), rel=1e-3)


def test_fit_reports_non_convergence():
    data = simulate_design(ERP_GAMMA, {"alpha": 2.74, "beta": 1.15}, 500, seed=46)
    result = fit(ERP_GAMMA, data, FitOptions(max_iter=1))
    assert not result.converged


def test_fit_rejects_bad_start_length():
    data = RegressionDesign(counts=[1, 2, 3])
    with pytest.raises(DomainError):
        fit(ERP_GAMMA, data, FitOptions(start=[0.0]))


def test_fit_without_covariance():
    data = simulate_design(ERP_GAMMA, {"alpha": 2.74, "beta": 1.15}, 500, seed=47)
    result = fit(ERP_GAMMA, data, FitOptions(compute_covariance=False))
    assert result.covariance is None
    assert all(item.se is None for item in result.natural)


# 边际效应
def test_marginal_effects_for_log_linear_mean():
    data = simulate_design(ERP_GAMMA_X, {"eta0": 2.0, "beta": 1.15}, 2000, seed=51, coefficients=[0.3, -0.2])
    result = fit(ERP_GAMMA_X, data)
    effects = result.marginal_effects
    assert effects is not None and effects.covariance_available
    x = np.asarray(data.covariates).mean(axis=0)
    np.testing.assert_allclose(effects.at, x, rtol=1e-12)
    for item in effects.effects:
        assert item.effect == pytest.approx(item.coefficient * effects.mean_at, rel=1e-12)
        assert item.se is not None and item.se > 0

    zeroed = result.model_copy(update={"theta": result.theta[:2] + [0.0, 0.0]})
    flat = marginal_effects(zeroed, x=[1.0, -1.0])
    assert all(item.effect == 0.0 for item in flat.effects)
    assert flat.mean_at == pytest.approx(result.natural_value("eta0"), rel=1e-12)


def test_marginal_effect_sign_for_renewal_mean():
    spec = ModelSpec(family=Family.RP_GAMMA, covariates=True)
    data = simulate_design(spec, {"alpha": 2.38, "beta": 0.87}, 1500, seed=52, coefficients=[0.25])
    result = fit(spec, data)
    (item,) = result.marginal_effects.effects
    assert item.coefficient > 0
    assert item.effect > 0


def test_marginal_effects_need_covariates():
    result = fit(POISSON, RegressionDesign(counts=[0, 1, 1, 2, 3]))
    with pytest.raises(DomainError):
        marginal_effects(result)


# 慢速: 覆盖率、bootstrap、数据集
COVERAGE_CASES = [
    (POISSON, {"alpha": 2.38}),
    (ERP_GAMMA, {"alpha": 2.74, "beta": 1.15}),
    (RP_GAMMA, {"alpha": 2.86, "beta": 1.16}),
    (
        ModelSpec(family=Family.ERP_GAMMA_ALPHA_MIXTURE),
        {"alpha1": 1.0, "alpha2": 6.0, "beta": 1.5, "w": 0.6},
    ),
    (
        ModelSpec(family=Family.ERP_GAMMA_BETA_MIXTURE),
        {"alpha": 4.0, "beta1": 2.0, "beta2": 0.5, "w": 0.7},
    ),
    (
        ModelSpec(family=Family.RP_GAMMA_HURDLE, hurdle_m=3),
        {"alpha": 2.38, "beta": 0.87, "delta": 0.66},
    ),
    (ModelSpec(family=Family.RP_IG), {"mu": 0.5, "lambda": 1.0}),
    (ModelSpec(family=Family.ERP_IG), {"mu": 0.5, "lambda": 1.0}),
]


@pytest.mark.slow
@pytest.mark.parametrize("spec, values", COVERAGE_CASES)
def test_interval_coverage(spec, values):
    # 20 组 n=5000 的模拟数据, 每个参数的 95% Wald 区间至少覆盖真值 16 次
    covered = dict.fromkeys(values, 0)
    for replicate in range(20):
        data = simulate_design(spec, values, 5000, seed=1000 + replicate)
        result = fit(spec, data, FitOptions(seed=replicate))
        for name, truth in values.items():
            se = result.natural_se(name)
            if se is not None and abs(result.natural_value(name) - truth) <= 1.96 * se:
                covered[name] += 1
    assert all(count >= 16 for count in covered.values()), covered


@pytest.mark.slow
def test_marginal_effect_standard_errors_match_parametric_bootstrap():
    data = simulate_design(ERP_GAMMA_X, {"eta0": 2.0, "beta": 1.15}, 2000, seed=61, coefficients=[0.3, -0.2])
    result = fit(ERP_GAMMA_X, data)
    effects = marginal_effects(result)
    family = FamilyRegistry.create(ERP_GAMMA_X, 2)
    matrix = data.covariate_matrix()
    fitted_rates = family.rates(result.theta, matrix)
    rng = RngStream(62)

    replicates = []
    for _ in range(200):
        counts = family.sample(fitted_rates, rng, matrix.shape[0])
        replicate = fit(
            ERP_GAMMA_X,
            RegressionDesign(counts=[int(c) for c in counts], covariates=data.covariates),
            FitOptions(start=result.theta, compute_covariance=False),
        )
        replicates.append([item.effect for item in marginal_effects(replicate).effects])

    spread = np.std(np.asarray(replicates), axis=0, ddof=1)
    for item, expected in zip(effects.effects, spread):
        assert item.se == pytest.approx(float(expected), rel=0.2)
    # 点估计: 系数乘以拟合均值
    for item in effects.effects:
        assert item.effect == pytest.approx(item.coefficient * effects.mean_at, rel=1e-12)


@pytest.mark.slow
def test_fertility_dataset(fertility_csv):
    data, _ = load_dataset(fertility_csv, "children", FERTILITY_COVARIATES)
    assert data.n_observations == 1243
    poisson = fit(POISSON_X, data)
    erp = fit(ERP_GAMMA_X, data, FitOptions(start=[poisson.theta[0], 0.0] + poisson.theta[1:]))
    assert erp.converged
    assert erp.minus_loglik <= poisson.minus_loglik + 1e-4
    assert _within(erp, "beta", 1.15)
    assert _within(erp, "eta0", 2.0)
    for name, truth in zip(FERTILITY_COVARIATES, [0.2, 0.55, -0.25, 0.15]):
        assert _within(erp, f"coef[{name}]", truth)
