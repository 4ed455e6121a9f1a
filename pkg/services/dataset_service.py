"""
描述: 数据集读写
主要功能:
    - 读取带表头的分隔文本, 校验响应列、协变量列与删失标记
    - 可选的协变量标准化
    - 写出模拟数据集
依赖: pandas, numpy
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import TextIO

import numpy as np
import pandas as pd
from numpy.typing import NDArray

from schemas.model import RegressionDesign
from schemas.report import Standardization
from services.errors import DataError

logger = logging.getLogger(__name__)


# ============================================
# region read
# ============================================
def _read_frame(path: str | Path, delimiter: str) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path, sep=delimiter, encoding="utf-8", skipinitialspace=True)
    except FileNotFoundError as exc:
        raise DataError(f"dataset not found: {path}") from exc
    except pd.errors.EmptyDataError as exc:
        raise DataError(f"dataset is empty: {path}") from exc
    except (pd.errors.ParserError, UnicodeDecodeError) as exc:
        raise DataError(f"dataset is not valid delimited text: {exc}") from exc
    frame.columns = [str(column).strip() for column in frame.columns]
    if frame.empty:
        raise DataError("dataset has a header but no rows")
    return frame


def _numeric_column(frame: pd.DataFrame, column: str) -> NDArray[np.float64]:
    values = pd.to_numeric(frame[column], errors="coerce").to_numpy(dtype=float)
    bad = np.nonzero(~np.isfinite(values))[0]
    if bad.size:
        raise DataError(f"column {column!r} has missing or non-numeric values (row {int(bad[0]) + 2})")
    return values


def _count_column(frame: pd.DataFrame, column: str) -> NDArray[np.int64]:
    values = _numeric_column(frame, column)
    if np.any(values < 0):
        raise DataError(f"response {column!r} has negative counts")
    if np.any(values != np.round(values)):
        raise DataError(f"response {column!r} has non-integer counts")
    return values.astype(np.int64)


def _censor_thresholds(
    frame: pd.DataFrame,
    counts: NDArray[np.int64],
    censor_column: str | None,
    censor_at: int | None,
) -> list[int | None] | None:
    if censor_column is None and censor_at is None:
        return None
    if censor_at is None:
        raise DataError("--censor-column needs --censor-at M")
    if censor_at < 1:
        raise DataError("censor threshold M must be >= 1")

    if censor_column is None:
        flags = counts >= censor_at
    else:
        if censor_column not in frame.columns:
            raise DataError(f"unknown censor column: {censor_column!r}")
        raw = _numeric_column(frame, censor_column)
        if not np.all(np.isin(raw, (0.0, 1.0))):
            raise DataError(f"censor column {censor_column!r} must hold 0/1 flags")
        flags = raw == 1.0
        short = np.nonzero(flags & (counts < censor_at))[0]
        if short.size:
            row = int(short[0])
            raise DataError(
                f"row {row + 2} is flagged censored but its count {int(counts[row])} "
                f"is below the censor threshold {censor_at}"
            )
    logger.info("%s rows right-censored at %s", int(flags.sum()), censor_at)
    return [censor_at if flag else None for flag in flags]


def load_dataset(
    path: str | Path,
    response: str,
    covariates: list[str] | None = None,
    censor_column: str | None = None,
    censor_at: int | None = None,
    delimiter: str = ",",
    standardize: bool = False,
) -> tuple[RegressionDesign, Standardization | None]:
    """
    读取数据集

    参数:
        path: 文件路径
        response: 响应列 (非负整数计数)
        covariates: 协变量列, None 表示不使用
        censor_column: 0/1 删失标记列
        censor_at: 删失阈值 M; 单独给出时 计数 >= M 的行视为删失
        delimiter: 分隔符
        standardize: 是否标准化协变量
    返回:
        (回归数据, 标准化信息)
    """

    frame = _read_frame(path, delimiter)
    if response not in frame.columns:
        raise DataError(f"unknown response column: {response!r}")
    covariates = list(covariates or [])
    unknown = [column for column in covariates if column not in frame.columns]
    if unknown:
        raise DataError(f"unknown covariate columns: {', '.join(unknown)}")
    if response in covariates:
        raise DataError("the response cannot also be a covariate")

    counts = _count_column(frame, response)
    matrix = None
    standardization = None
    if covariates:
        matrix = np.column_stack([_numeric_column(frame, column) for column in covariates])
        if standardize:
            means = matrix.mean(axis=0)
            scales = matrix.std(axis=0)
            constant = [column for column, scale in zip(covariates, scales) if scale == 0]
            if constant:
                raise DataError(f"cannot standardize constant columns: {', '.join(constant)}")
            matrix = (matrix - means) / scales
            standardization = Standardization(
                columns=covariates,
                means=[float(v) for v in means],
                scales=[float(v) for v in scales],
            )

    design = RegressionDesign(
        counts=[int(v) for v in counts],
        covariates=None if matrix is None else matrix.tolist(),
        covariate_names=covariates,
        censor_at=_censor_thresholds(frame, counts, censor_column, censor_at),
    )
    logger.info("loaded %s rows, %s covariates from %s", design.n_observations, len(covariates), path)
    return design, standardization
# endregion
# ============================================


# ============================================
# region write
# ============================================
def write_dataset(
    target: str | Path | TextIO,
    counts: NDArray[np.int64],
    covariates: NDArray[np.float64] | None = None,
    names: list[str] | None = None,
) -> None:
    """
    写出数据集, 列为 count 与协变量

    参数:
        target: 路径或文本流
        counts: 计数
        covariates: 协变量矩阵
        names: 协变量列名, 默认 x1..xk
    返回:
        None
    """

    columns: dict[str, NDArray] = {"count": np.asarray(counts, dtype=np.int64)}
    if covariates is not None and covariates.size:
        names = names or [f"x{j + 1}" for j in range(covariates.shape[1])]
        for j, name in enumerate(names):
            columns[name] = covariates[:, j]
    pd.DataFrame(columns).to_csv(target, index=False, float_format="%.12g", lineterminator="\n")
# endregion
# ============================================
