"""
描述: 输出报告 Schema
主要功能:
    - 概率表、矩摘要、模拟摘要
    - 统一的报告文档 (命令、版本、种子与载荷)
依赖: pydantic
"""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field

from schemas.fit import FitResult
from schemas.model import Family


class PmfRow(BaseModel):
    """
    n, Prob(N = n), Prob(N <= n), Prob(N >= n)
    """

    n: int
    pmf: float
    cdf: float
    survival: float

    model_config = ConfigDict(extra="forbid")


class PmfTable(BaseModel):
    family: Family
    parameters: dict[str, float]
    t: float
    n_max: int
    rows: list[PmfRow]
    total: float = Field(..., description="Σ pmf")
    mean: float
    variance: float

    model_config = ConfigDict(extra="forbid")


class MomentsSummary(BaseModel):
    family: Family
    parameters: dict[str, float]
    t: float
    mean: float
    variance: float
    variance_source: str = Field(..., description="series 或 pmf-table")
    variance_asymptotic: float | None = None
    dispersion: str

    model_config = ConfigDict(extra="forbid")


class Standardization(BaseModel):
    """
    协变量标准化: x' = (x - mean) / scale
    """

    columns: list[str]
    means: list[float]
    scales: list[float]

    model_config = ConfigDict(extra="forbid")


class SimulationSummary(BaseModel):
    family: Family
    parameters: dict[str, float]
    coefficients: list[float] = Field(default_factory=list)
    t: float
    n: int
    empirical_mean: float
    empirical_variance: float
    output: str | None = None

    model_config = ConfigDict(extra="forbid")


class FitReport(BaseModel):
    data: str
    response: str
    standardization: Standardization | None = None
    result: FitResult

    model_config = ConfigDict(extra="forbid")


class ReportDocument(BaseModel):
    """
    单次运行输出的结构化文档
    """

    command: str
    version: str
    seed: int | None = None
    payload: PmfTable | MomentsSummary | SimulationSummary | FitReport

    model_config = ConfigDict(extra="forbid")
