"""
描述: 更新过程参数 Schema
主要功能:
    - 伽马 / 逆高斯间隔时间参数
    - 跨栏 (hurdle) 与两分量混合设定
依赖: pydantic
"""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field, model_validator


class GammaRenewalParams(BaseModel):
    """
    伽马间隔时间: 速率 alpha, 形状 beta, 观测时长 t
    """

    alpha: float = Field(..., gt=0, description="速率 (每单位时间)")
    beta: float = Field(..., gt=0, description="形状 (无量纲)")
    t: float = Field(1.0, gt=0, description="观测时长")

    model_config = ConfigDict(extra="forbid", frozen=True, allow_inf_nan=False)

    @property
    def mean_interarrival(self) -> float:
        return self.beta / self.alpha


class IGRenewalParams(BaseModel):
    """
    逆高斯间隔时间: 均值 mu, 形状 lambda, 观测时长 t
    """

    mu: float = Field(..., gt=0, description="间隔时间均值")
    lam: float = Field(..., gt=0, alias="lambda", description="逆高斯形状")
    t: float = Field(1.0, gt=0, description="观测时长")

    model_config = ConfigDict(
        extra="forbid", frozen=True, allow_inf_nan=False, populate_by_name=True
    )

    @property
    def mean_interarrival(self) -> float:
        return self.mu


class HurdleSpec(BaseModel):
    """
    第 m 个间隔时间的形状改为 beta + delta
    """

    m: int = Field(..., ge=1, description="被修改的间隔时间序号")
    delta: float = Field(..., description="形状偏移, 需满足 delta > -beta")

    model_config = ConfigDict(extra="forbid", frozen=True, allow_inf_nan=False)


class GammaMixtureSpec(BaseModel):
    """
    两个 ERP-γ 分量的混合, 权重 w 属于第一个分量
    """

    component1: GammaRenewalParams
    component2: GammaRenewalParams
    w: float = Field(..., ge=0, le=1, description="第一分量权重, 端点即退化为单一分量")

    model_config = ConfigDict(extra="forbid", frozen=True, allow_inf_nan=False)

    @model_validator(mode="after")
    def _shared_exposure(self) -> "GammaMixtureSpec":
        if self.component1.t != self.component2.t:
            raise ValueError("mixture components must share the same exposure t")
        return self
