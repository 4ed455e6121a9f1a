"""
描述: 估计相关 Schema
主要功能:
    - 拟合选项
    - 参数估计、边际效应与拟合结果
依赖: pydantic
"""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field

from schemas.model import Family


class FitOptions(BaseModel):
    """
    拟合选项, 未给出的项使用 OptimizerSettings
    """

    seed: int | None = Field(None, ge=0, lt=2**64, description="扰动初值的随机种子")
    max_iter: int | None = Field(None, ge=1, description="单次优化的最大迭代数")
    n_starts: int | None = Field(None, ge=1, description="混合分布族的起点个数")
    start: list[float] | None = Field(None, description="指定初值 (变换尺度)")
    compute_covariance: bool = Field(True, description="是否计算协方差")

    model_config = ConfigDict(extra="forbid")


class ParameterEstimate(BaseModel):
    """
    单个参数估计
    """

    name: str
    estimate: float
    se: float | None = None

    model_config = ConfigDict(extra="forbid")


class MarginalEffect(BaseModel):
    """
    ∂E(N|x)/∂x_j 及其 delta 方法标准误
    """

    name: str
    coefficient: float
    effect: float
    se: float | None = None

    model_config = ConfigDict(extra="forbid")


class MarginalEffects(BaseModel):
    """
    某一协变量取值处的全部边际效应
    """

    at: list[float]
    mean_at: float
    effects: list[MarginalEffect]
    covariance_available: bool

    model_config = ConfigDict(extra="forbid")


class FitResult(BaseModel):
    """
    拟合结果

    theta 与 covariance 位于变换尺度 (对数、logit), natural 为自然尺度。
    """

    family: Family
    t: float
    hurdle_m: int | None = None
    covariate_names: list[str] = Field(default_factory=list)
    covariate_means: list[float] = Field(default_factory=list)
    parameter_names: list[str]
    theta: list[float]
    transformed: list[ParameterEstimate]
    natural: list[ParameterEstimate]
    minus_loglik: float
    covariance: list[list[float]] | None = None
    covariance_pseudo_inverse: bool = False
    converged: bool
    iterations: int
    n_starts: int
    n_observations: int
    mean_estimate: float
    loglik_floor_hits: int = 0
    marginal_effects: MarginalEffects | None = None
    message: str = ""

    model_config = ConfigDict(extra="forbid")

    def natural_value(self, name: str) -> float:
        for item in self.natural:
            if item.name == name:
                return item.estimate
        raise KeyError(name)

    def natural_se(self, name: str) -> float | None:
        for item in self.natural:
            if item.name == name:
                return item.se
        raise KeyError(name)
