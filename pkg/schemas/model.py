"""
描述: 模型与回归设计 Schema
主要功能:
    - 分布族枚举与模型设定
    - 计数、协变量与右删失阈值
依赖: pydantic, numpy
"""

from __future__ import annotations

import math
from enum import Enum

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator


class Interarrival(str, Enum):
    """
    间隔时间分布
    """

    GAMMA = "gamma"
    IG = "ig"


class Family(str, Enum):
    """
    计数分布族
    """

    POISSON = "poisson"
    RP_GAMMA = "rp-gamma"
    ERP_GAMMA = "erp-gamma"
    ERP_GAMMA_BETA_MIXTURE = "erp-gamma-beta-mixture"
    ERP_GAMMA_ALPHA_MIXTURE = "erp-gamma-alpha-mixture"
    RP_GAMMA_HURDLE = "rp-gamma-hurdle"
    RP_IG = "rp-ig"
    ERP_IG = "erp-ig"


class ModelSpec(BaseModel):
    """
    模型设定
    """

    family: Family
    t: float = Field(1.0, gt=0, description="观测时长")
    hurdle_m: int | None = Field(None, ge=1, description="跨栏位置 m")
    covariates: bool = Field(False, description="是否对均值做协变量回归")

    model_config = ConfigDict(extra="forbid", frozen=True, allow_inf_nan=False)

    @model_validator(mode="after")
    def _hurdle_position(self) -> "ModelSpec":
        if self.family == Family.RP_GAMMA_HURDLE and self.hurdle_m is None:
            raise ValueError("rp-gamma-hurdle requires hurdle_m")
        if self.family != Family.RP_GAMMA_HURDLE and self.hurdle_m is not None:
            raise ValueError("hurdle_m only applies to rp-gamma-hurdle")
        return self


class RegressionDesign(BaseModel):
    """
    回归数据: 计数、协变量矩阵与可选的删失阈值

    censor_at[i] = M 表示第 i 条观测只知道 "计数 >= M"。
    """

    counts: list[int]
    covariates: list[list[float]] | None = None
    covariate_names: list[str] = Field(default_factory=list)
    censor_at: list[int | None] | None = None

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def _consistent(self) -> "RegressionDesign":
        if not self.counts:
            raise ValueError("design has no observations")
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be non-negative")
        n_obs = len(self.counts)
        if self.covariates is not None:
            if len(self.covariates) != n_obs:
                raise ValueError("covariate rows do not match counts")
            widths = {len(row) for row in self.covariates}
            if len(widths) > 1:
                raise ValueError("covariate matrix is not rectangular")
            width = widths.pop() if widths else 0
            if any(not math.isfinite(v) for row in self.covariates for v in row):
                raise ValueError("covariates must be finite")
            if self.covariate_names and len(self.covariate_names) != width:
                raise ValueError("covariate_names do not match covariate columns")
            if not self.covariate_names:
                self.covariate_names = [f"x{j + 1}" for j in range(width)]
        elif self.covariate_names:
            raise ValueError("covariate_names given without covariates")
        if self.censor_at is not None:
            if len(self.censor_at) != n_obs:
                raise ValueError("censor_at does not match counts")
            if any(m is not None and m < 1 for m in self.censor_at):
                raise ValueError("censored rows must carry a threshold M >= 1")
        return self

    @property
    def n_observations(self) -> int:
        return len(self.counts)

    @property
    def n_covariates(self) -> int:
        return len(self.covariate_names)

    def count_array(self) -> NDArray[np.int64]:
        return np.asarray(self.counts, dtype=np.int64)

    def covariate_matrix(self) -> NDArray[np.float64] | None:
        if self.covariates is None or not self.covariate_names:
            return None
        return np.asarray(self.covariates, dtype=float)

    def censor_array(self) -> NDArray[np.int64]:
        """
        删失阈值数组, 0 表示未删失
        """
        if self.censor_at is None:
            return np.zeros(len(self.counts), dtype=np.int64)
        return np.asarray([m or 0 for m in self.censor_at], dtype=np.int64)
