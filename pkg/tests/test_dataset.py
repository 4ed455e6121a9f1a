"""
数据集读写测试
"""

from __future__ import annotations

import io

import numpy as np
import pytest

from services.dataset_service import load_dataset, write_dataset
from services.errors import DataError
from tests.helpers import FERTILITY_COVARIATES


def _write(tmp_path, text: str, name: str = "data.csv"):
    path = tmp_path / name
    path.write_bytes(text.encode("utf-8"))
    return path


def test_load_fertility_dataset(fertility_csv):
    data, standardization = load_dataset(fertility_csv, "children", FERTILITY_COVARIATES)
    assert standardization is None
    assert data.n_observations == 1243
    assert data.covariate_names == FERTILITY_COVARIATES
    counts = data.count_array()
    assert counts.max() == 10
    assert int(np.sum(counts == 0)) == 144
    assert int(np.sum(np.asarray(data.covariates)[:, 1])) == 147


def test_load_without_covariates(tmp_path):
    path = _write(tmp_path, "y,x\n0,1.5\n3,2.5\n1,0.5\n")
    data, _ = load_dataset(path, "y")
    assert data.counts == [0, 3, 1]
    assert data.covariates is None
    assert data.covariate_matrix() is None


def test_standardize(tmp_path):
    path = _write(tmp_path, "y,x\n0,1.0\n3,2.0\n1,3.0\n")
    data, standardization = load_dataset(path, "y", ["x"], standardize=True)
    matrix = data.covariate_matrix()
    assert matrix.mean() == pytest.approx(0.0, abs=1e-15)
    assert matrix.std() == pytest.approx(1.0)
    assert standardization.means == [2.0]
    assert standardization.scales[0] == pytest.approx(np.std([1.0, 2.0, 3.0]))


def test_standardize_rejects_constant_column(tmp_path):
    path = _write(tmp_path, "y,x\n0,1.0\n3,1.0\n")
    with pytest.raises(DataError):
        load_dataset(path, "y", ["x"], standardize=True)


@pytest.mark.parametrize(
    "text, response, covariates",
    [
        ("y,x\n1,2\n", "z", None),
        ("y,x\n1,2\n", "y", ["w"]),
        ("y,x\n1,2\n", "y", ["y"]),
        ("y,x\n1,\n2,3\n", "y", ["x"]),
        ("y,x\n1,abc\n", "y", ["x"]),
        ("y\n-1\n2\n", "y", None),
        ("y\n1.5\n2\n", "y", None),
        ("y\n", "y", None),
    ],
)
def test_bad_content(tmp_path, text, response, covariates):
    with pytest.raises(DataError):
        load_dataset(_write(tmp_path, text), response, covariates)


def test_empty_and_missing_files(tmp_path):
    with pytest.raises(DataError):
        load_dataset(_write(tmp_path, ""), "y")
    with pytest.raises(DataError):
        load_dataset(tmp_path / "nowhere.csv", "y")


def test_crlf_and_whitespace(tmp_path):
    path = _write(tmp_path, "y , x\r\n2, 0.5\r\n4, 1.5\r\n")
    data, _ = load_dataset(path, "y", ["x"])
    assert data.counts == [2, 4]
    np.testing.assert_allclose(data.covariate_matrix()[:, 0], [0.5, 1.5])


def test_other_delimiter(tmp_path):
    path = _write(tmp_path, "y;x\n2;0.5\n4;1.5\n")
    data, _ = load_dataset(path, "y", ["x"], delimiter=";")
    assert data.counts == [2, 4]


def test_censor_column(tmp_path):
    path = _write(tmp_path, "y,c\n1,0\n5,1\n7,1\n")
    data, _ = load_dataset(path, "y", censor_column="c", censor_at=5)
    assert data.censor_at == [None, 5, 5]
    np.testing.assert_array_equal(data.censor_array(), [0, 5, 5])


def test_censor_threshold_alone(tmp_path):
    path = _write(tmp_path, "y\n1\n5\n7\n4\n")
    data, _ = load_dataset(path, "y", censor_at=5)
    assert data.censor_at == [None, 5, 5, None]


@pytest.mark.parametrize(
    "text, column, threshold",
    [
        ("y,c\n1,0\n5,1\n", "c", None),
        ("y,c\n1,0\n5,2\n", "c", 5),
        ("y,c\n1,0\n5,1\n", "d", 5),
        ("y,c\n1,0\n5,1\n", "c", 0),
    ],
)
def test_bad_censoring(tmp_path, text, column, threshold):
    with pytest.raises(DataError):
        load_dataset(_write(tmp_path, text), "y", censor_column=column, censor_at=threshold)


def test_censor_flag_needs_count_at_threshold(tmp_path):
    path = _write(tmp_path, "y,c\n1,0\n6,1\n3,1\n")
    with pytest.raises(DataError, match="row 4"):
        load_dataset(path, "y", censor_column="c", censor_at=5)


def test_write_then_load(tmp_path):
    counts = np.array([0, 2, 5])
    covariates = np.array([[0.25, -1.0], [1.0 / 3.0, 2.0], [0.0, 1e-7]])
    path = tmp_path / "out.csv"
    write_dataset(path, counts, covariates, ["a", "b"])
    data, _ = load_dataset(path, "count", ["a", "b"])
    assert data.counts == [0, 2, 5]
    np.testing.assert_allclose(data.covariate_matrix(), covariates, rtol=1e-11)


def test_write_to_stream_uses_default_names():
    buffer = io.StringIO()
    write_dataset(buffer, np.array([1, 2]), np.array([[0.5], [1.5]]))
    assert buffer.getvalue() == "count,x1\n1,0.5\n2,1.5\n"
