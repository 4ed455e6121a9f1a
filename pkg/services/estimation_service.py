"""
描述: 最大似然估计服务
主要功能:
    - 含右删失的对数似然与协变量连接
    - 单纯形 + 拟牛顿的两段式优化, 混合分布族多起点
    - 数值 Hessian 协方差、自然尺度标准误
    - 边际效应及其 delta 方法标准误
依赖: numpy, scipy.optimize, services.family_registry
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import optimize

from config.settings import get_settings
from schemas.fit import FitOptions, FitResult, MarginalEffect, MarginalEffects, ParameterEstimate
from schemas.model import ModelSpec, RegressionDesign
from services.errors import DataError, DomainError, NumericalFailureError
from services.family_registry import BaseFamily, FamilyRegistry, Rates, coefficient_name
from services.sampling_service import RngStream

import services.families  # noqa: F401  注册全部分布族

logger = logging.getLogger(__name__)

INVALID_PENALTY = 1e10
MEAN_SLOPE_STEP = 1e-4
ETA_CLIP = 700.0


# ============================================
# region data preparation
# ============================================
@dataclass(frozen=True)
class PreparedData:
    """
    似然计算用数据; 无协变量时相同 (计数, 删失) 行合并并加权
    """

    counts: NDArray[np.int64]
    censor: NDArray[np.int64]
    weights: NDArray[np.float64]
    covariates: NDArray[np.float64] | None
    n_observations: int


@dataclass
class LikelihoodTrace:
    floor_hits: int = 0


@dataclass
class CovarianceEstimate:
    """
    协方差估计: matrix 为 None 表示不可用
    """

    matrix: NDArray[np.float64] | None
    pseudo_inverse: bool = False

    @property
    def available(self) -> bool:
        return self.matrix is not None


@dataclass
class _Outcome:
    x: NDArray[np.float64]
    fun: float
    converged: bool
    iterations: int
    message: str = ""


def prepare_design(data: RegressionDesign, use_covariates: bool) -> PreparedData:
    """
    整理回归数据

    参数:
        data: 回归数据
        use_covariates: 是否使用协变量
    返回:
        PreparedData
    """

    counts = data.count_array()
    censor = data.censor_array()
    covariates = data.covariate_matrix() if use_covariates else None
    if use_covariates and covariates is None:
        raise DataError("the covariate model needs at least one covariate column")
    if covariates is not None:
        return PreparedData(counts, censor, np.ones(counts.size), covariates, counts.size)

    # 删失行只保留阈值
    keys = np.stack([np.where(censor > 0, 0, counts), censor], axis=1)
    unique, multiplicity = np.unique(keys, axis=0, return_counts=True)
    return PreparedData(
        unique[:, 0].astype(np.int64),
        unique[:, 1].astype(np.int64),
        multiplicity.astype(float),
        None,
        counts.size,
    )
# endregion
# ============================================


# ============================================
# region log_likelihood
# ============================================
def _subset(rates: Rates, mask: NDArray[np.bool_]) -> Rates:
    return {key: value if np.size(value) == 1 else value[mask] for key, value in rates.items()}


def family_log_likelihood(
    family: BaseFamily,
    theta: NDArray[np.float64],
    prepared: PreparedData,
    trace: LikelihoodTrace | None = None,
) -> float:
    """
    Σ w_i log P(y_i), 删失行贡献 log Prob(N >= M_i); 参数无效时返回 -inf
    """

    floor = get_settings().numerics.loglik_floor
    try:
        with np.errstate(over="ignore", under="ignore", divide="ignore", invalid="ignore"):
            rates = family.rates(theta, prepared.covariates)
            censored = prepared.censor > 0
            values = np.empty(prepared.counts.size)
            if (~censored).any():
                values[~censored] = family.pmf(prepared.counts[~censored], _subset(rates, ~censored))
            if censored.any():
                values[censored] = family.survival(prepared.censor[censored], _subset(rates, censored))
    except (DomainError, NumericalFailureError, FloatingPointError, OverflowError):
        return -math.inf

    if not np.all(np.isfinite(values)):
        return -math.inf
    low = values < floor
    if low.any():
        hits = int(np.sum(prepared.weights[low]))
        logger.debug("%s: %s probabilities floored at %s", family.name.value, hits, floor)
        if trace is not None:
            trace.floor_hits = hits
        values = np.maximum(values, floor)
    return float(np.sum(prepared.weights * np.log(values)))


def log_likelihood(spec: ModelSpec, theta: ArrayLike, data: RegressionDesign) -> float:
    """
    模型对数似然

    参数:
        spec: 模型设定
        theta: 变换尺度参数 (基础参数 + 回归系数)
        data: 回归数据
    返回:
        对数似然, 参数无效时为 -inf
    """

    family = FamilyRegistry.create(spec, data.n_covariates)
    theta = np.asarray(theta, dtype=float)
    family.split(theta)
    return family_log_likelihood(family, theta, prepare_design(data, spec.covariates))


def mean_link(theta: ArrayLike, x: ArrayLike, spec: ModelSpec) -> Rates:
    """
    逐观测自然参数

    参数:
        theta: 变换尺度参数
        x: 协变量行 (或矩阵)
        spec: 模型设定
    返回:
        参数名 -> 数组
    """

    covariates = np.atleast_2d(np.asarray(x, dtype=float))
    if not np.all(np.isfinite(covariates)):
        raise DomainError("covariates must be finite")
    n_covariates = covariates.shape[1] if spec.covariates else 0
    family = FamilyRegistry.create(spec, n_covariates)
    rates = family.rates(theta, covariates if n_covariates else None)
    rows = covariates.shape[0]
    return {key: np.broadcast_to(value, (rows,)).copy() for key, value in rates.items()}
# endregion
# ============================================


# ============================================
# region poisson seed
# ============================================
def poisson_seed(prepared: PreparedData) -> tuple[float, NDArray[np.float64], float]:
    """
    对数线性泊松回归, 给出截距、系数初值与 Pearson 离散比

    参数:
        prepared: 整理后的数据
    返回:
        (截距, 系数, 离散比)
    """

    y = np.maximum(prepared.counts, prepared.censor).astype(float)
    weights = prepared.weights
    n_rows = y.size
    design = np.ones((n_rows, 1))
    if prepared.covariates is not None:
        design = np.column_stack([design, prepared.covariates])

    def objective(beta: NDArray[np.float64]) -> tuple[float, NDArray[np.float64]]:
        eta = np.clip(design @ beta, -ETA_CLIP, ETA_CLIP)
        mu = np.exp(eta)
        value = float(np.sum(weights * (mu - y * eta)))
        return value, design.T @ (weights * (mu - y))

    mean = max(float(np.sum(weights * y) / np.sum(weights)), 1e-3)
    start = np.zeros(design.shape[1])
    start[0] = math.log(mean)
    result = optimize.minimize(objective, start, jac=True, method="BFGS")
    beta = result.x
    mu = np.exp(np.clip(design @ beta, -ETA_CLIP, ETA_CLIP))
    dof = max(float(np.sum(weights)) - design.shape[1], 1.0)
    dispersion = float(np.sum(weights * (y - mu) ** 2 / mu) / dof)
    return float(beta[0]), beta[1:], max(dispersion, 1e-6)
# endregion
# ============================================


# ============================================
# region optimizer
# ============================================
def _objective(family: BaseFamily, prepared: PreparedData) -> Callable[[NDArray[np.float64]], float]:
    def evaluate(theta: NDArray[np.float64]) -> float:
        value = family_log_likelihood(family, theta, prepared)
        return -value if math.isfinite(value) else INVALID_PENALTY

    return evaluate


def _optimize(
    objective: Callable[[NDArray[np.float64]], float], start: NDArray[np.float64], max_iter: int
) -> _Outcome:
    """
    Nelder-Mead 后接 BFGS 精修, 精修只在下降时采纳
    """

    optimizer = get_settings().optimizer
    simplex = optimize.minimize(
        objective,
        start,
        method="Nelder-Mead",
        options={
            "xatol": optimizer.xatol,
            "fatol": optimizer.fatol,
            "maxiter": max_iter,
            "maxfev": 2 * max_iter,
            "adaptive": True,
        },
    )
    x, fun = np.asarray(simplex.x, dtype=float), float(simplex.fun)
    polish = optimize.minimize(objective, x, method="BFGS", options={"maxiter": max_iter})
    if math.isfinite(polish.fun) and polish.fun < fun:
        x, fun = np.asarray(polish.x, dtype=float), float(polish.fun)
    # BFGS 在最优点附近常因精度损失提前结束
    precision_stop = polish.status == 2 and float(np.max(np.abs(polish.jac))) < 1e-2
    converged = bool(simplex.success or polish.success or precision_stop)
    return _Outcome(
        x=x,
        fun=fun,
        converged=converged,
        iterations=int(simplex.nit) + int(polish.nit),
        message=str(simplex.message),
    )
# endregion
# ============================================


# ============================================
# region covariance
# ============================================
def _steps(theta: NDArray[np.float64]) -> NDArray[np.float64]:
    optimizer = get_settings().optimizer
    return np.maximum(optimizer.hessian_min_step, optimizer.hessian_rel_step * np.abs(theta))


def numerical_hessian(
    func: Callable[[NDArray[np.float64]], float], theta: ArrayLike
) -> NDArray[np.float64]:
    """
    中心差分 Hessian, 第 i 维步长 max(1e-5, 1e-5·|θ_i|)

    参数:
        func: 标量函数
        theta: 求值点
    返回:
        对称矩阵
    """

    theta = np.asarray(theta, dtype=float)
    size = theta.size
    steps = _steps(theta)
    centre = func(theta)
    hessian = np.zeros((size, size))
    for i in range(size):
        ei = np.zeros(size)
        ei[i] = steps[i]
        hessian[i, i] = (func(theta + ei) - 2.0 * centre + func(theta - ei)) / steps[i] ** 2
        for j in range(i + 1, size):
            ej = np.zeros(size)
            ej[j] = steps[j]
            value = (
                func(theta + ei + ej)
                - func(theta + ei - ej)
                - func(theta - ei + ej)
                + func(theta - ei - ej)
            ) / (4.0 * steps[i] * steps[j])
            hessian[i, j] = hessian[j, i] = value
    return hessian


def numerical_jacobian(
    func: Callable[[NDArray[np.float64]], ArrayLike], theta: ArrayLike
) -> NDArray[np.float64]:
    """
    向量函数的中心差分 Jacobian
    """

    theta = np.asarray(theta, dtype=float)
    steps = _steps(theta)
    width = np.asarray(func(theta), dtype=float).size
    jacobian = np.zeros((width, theta.size))
    for i in range(theta.size):
        shift = np.zeros(theta.size)
        shift[i] = steps[i]
        upper = np.asarray(func(theta + shift), dtype=float)
        lower = np.asarray(func(theta - shift), dtype=float)
        jacobian[:, i] = (upper - lower) / (2.0 * steps[i])
    return jacobian


def covariance(
    loglik: Callable[[NDArray[np.float64]], float], theta: ArrayLike
) -> CovarianceEstimate:
    """
    负 Hessian 的逆; 不可逆时退回正半定伪逆并标记

    参数:
        loglik: 对数似然函数 (变换尺度)
        theta: 最优点
    返回:
        CovarianceEstimate
    """

    hessian = numerical_hessian(loglik, theta)
    if not np.all(np.isfinite(hessian)):
        logger.warning("Hessian is not finite; covariance unavailable")
        return CovarianceEstimate(None)

    information = -0.5 * (hessian + hessian.T)
    try:
        np.linalg.cholesky(information)
        matrix = np.linalg.inv(information)
        return CovarianceEstimate(0.5 * (matrix + matrix.T))
    except np.linalg.LinAlgError:
        pass

    values, vectors = np.linalg.eigh(information)
    top = float(np.max(np.abs(values))) if values.size else 0.0
    keep = values > top * 1e-12
    if not keep.any():
        logger.warning("information matrix has no positive direction; covariance unavailable")
        return CovarianceEstimate(None)
    logger.warning("information matrix is not positive definite; using pseudo-inverse")
    inverse = np.where(keep, 1.0 / np.where(keep, values, 1.0), 0.0)
    matrix = (vectors * inverse) @ vectors.T
    return CovarianceEstimate(0.5 * (matrix + matrix.T), pseudo_inverse=True)


def _standard_errors(matrix: NDArray[np.float64] | None, size: int) -> list[float | None]:
    if matrix is None:
        return [None] * size
    return [float(math.sqrt(max(v, 0.0))) for v in np.diag(matrix)]
# endregion
# ============================================


# ============================================
# region marginal effects
# ============================================
def _family_for(result: FitResult) -> BaseFamily:
    spec = ModelSpec(
        family=result.family,
        t=result.t,
        hurdle_m=result.hurdle_m,
        covariates=bool(result.covariate_names),
    )
    return FamilyRegistry.create(spec, len(result.covariate_names))


def _mean_and_slope(family: BaseFamily, base: NDArray[np.float64], eta: float) -> tuple[float, float]:
    """
    E(N | η) 与 dE/dη; 对数线性均值时两者相等
    """

    mean = float(np.ravel(family.mean(family.link(base, np.array([eta]))))[0])
    if family.log_linear_mean:
        return mean, mean
    upper = float(np.ravel(family.mean(family.link(base, np.array([eta + MEAN_SLOPE_STEP]))))[0])
    lower = float(np.ravel(family.mean(family.link(base, np.array([eta - MEAN_SLOPE_STEP]))))[0])
    return mean, (upper - lower) / (2.0 * MEAN_SLOPE_STEP)


def marginal_effects(result: FitResult, x: ArrayLike | None = None) -> MarginalEffects:
    """
    边际效应 ∂E(N|x)/∂x_j = 𝛃_j dE/dη (对数线性均值时为 𝛃_j E(N|x))

    参数:
        result: 含协变量的拟合结果
        x: 协变量取值, 默认样本均值
    返回:
        MarginalEffects
    """

    if not result.covariate_names:
        raise DomainError("marginal effects need a fit with covariates")
    family = _family_for(result)
    point = np.asarray(result.covariate_means if x is None else x, dtype=float)
    if point.shape != (len(result.covariate_names),) or not np.all(np.isfinite(point)):
        raise DomainError("x must be a finite row with one value per covariate")
    theta = np.asarray(result.theta, dtype=float)

    def effects(th: NDArray[np.float64]) -> NDArray[np.float64]:
        base, coefficients = family.split(th)
        _, slope = _mean_and_slope(family, base, float(coefficients @ point))
        return coefficients * slope

    base, coefficients = family.split(theta)
    mean_at, _ = _mean_and_slope(family, base, float(coefficients @ point))
    values = effects(theta)

    ses: list[float | None] = [None] * values.size
    if result.covariance is not None:
        jacobian = numerical_jacobian(effects, theta)
        ses = _standard_errors(jacobian @ np.asarray(result.covariance) @ jacobian.T, values.size)

    items = [
        MarginalEffect(
            name=coefficient_name(name),
            coefficient=float(coef),
            effect=float(effect),
            se=se,
        )
        for name, coef, effect, se in zip(result.covariate_names, coefficients, values, ses)
    ]
    return MarginalEffects(
        at=[float(v) for v in point],
        mean_at=mean_at,
        effects=items,
        covariance_available=result.covariance is not None,
    )
# endregion
# ============================================


# ============================================
# region fit
# ============================================
def fit(spec: ModelSpec, data: RegressionDesign, options: FitOptions | None = None) -> FitResult:
    """
    最大似然拟合

    参数:
        spec: 模型设定
        data: 回归数据
        options: 拟合选项
    返回:
        FitResult (未收敛时 converged = False, 返回最优点)
    """

    options = options or FitOptions()
    settings = get_settings()
    family = FamilyRegistry.create(spec, data.n_covariates)
    prepared = prepare_design(data, spec.covariates)
    covariate_names = data.covariate_names if spec.covariates else []
    names = family.parameter_names(covariate_names)
    max_iter = options.max_iter or settings.optimizer.max_iter

    intercept, seed_coefficients, dispersion = poisson_seed(prepared)
    rng = RngStream(settings.service.default_seed if options.seed is None else options.seed)
    if options.start is not None:
        start = np.asarray(options.start, dtype=float)
        family.split(start)
        starts = [start]
    else:
        starts = family.start_points(
            math.exp(intercept), dispersion, seed_coefficients, rng, options.n_starts
        )

    objective = _objective(family, prepared)
    best: _Outcome | None = None
    iterations = 0
    for index, start in enumerate(starts, start=1):
        outcome = _optimize(objective, start, max_iter)
        iterations += outcome.iterations
        logger.info(
            "%s start %s/%s: -loglik=%.6f converged=%s",
            family.name.value,
            index,
            len(starts),
            outcome.fun,
            outcome.converged,
        )
        if best is None or outcome.fun < best.fun:
            best = outcome

    assert best is not None
    if best.fun >= INVALID_PENALTY:
        raise NumericalFailureError("no start point gave a finite likelihood")
    if not best.converged:
        logger.warning("%s fit did not converge: %s", family.name.value, best.message)

    # 混合分布族在求导前固定分量标签 (w >= 0.5)
    theta = family.canonical_theta(best.x)
    trace = LikelihoodTrace()
    minus_loglik = -family_log_likelihood(family, theta, prepared, trace)

    estimate = CovarianceEstimate(None)
    if options.compute_covariance:
        estimate = covariance(lambda th: family_log_likelihood(family, th, prepared), theta)

    jacobian = numerical_jacobian(family.natural, theta)
    natural_cov = None if estimate.matrix is None else jacobian @ estimate.matrix @ jacobian.T
    natural_values = family.natural(theta)
    reported = family.reported_names(covariate_names)

    rates = family.rates(theta, prepared.covariates)
    fitted = np.broadcast_to(family.mean(rates), prepared.weights.shape)
    mean_estimate = float(np.sum(prepared.weights * fitted) / np.sum(prepared.weights))
    covariate_means = (
        [] if prepared.covariates is None else [float(v) for v in prepared.covariates.mean(axis=0)]
    )

    result = FitResult(
        family=spec.family,
        t=spec.t,
        hurdle_m=spec.hurdle_m,
        covariate_names=list(covariate_names),
        covariate_means=covariate_means,
        parameter_names=names,
        theta=[float(v) for v in theta],
        transformed=[
            ParameterEstimate(name=name, estimate=float(value), se=se)
            for name, value, se in zip(names, theta, _standard_errors(estimate.matrix, theta.size))
        ],
        natural=[
            ParameterEstimate(name=name, estimate=value, se=se)
            for name, value, se in zip(
                reported, natural_values, _standard_errors(natural_cov, len(natural_values))
            )
        ],
        minus_loglik=float(minus_loglik),
        covariance=None if estimate.matrix is None else estimate.matrix.tolist(),
        covariance_pseudo_inverse=estimate.pseudo_inverse,
        converged=best.converged,
        iterations=iterations,
        n_starts=len(starts),
        n_observations=prepared.n_observations,
        mean_estimate=mean_estimate,
        loglik_floor_hits=trace.floor_hits,
        message=best.message,
    )
    if covariate_names:
        result = result.model_copy(update={"marginal_effects": marginal_effects(result)})
    logger.info("%s fit finished: -loglik=%.6f", family.name.value, result.minus_loglik)
    return result
# endregion
# ============================================
