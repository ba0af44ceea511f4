"""
Tests for JSON documents and CSV writers.
"""
import csv
import json

import numpy as np
import pytest

from src.models.exceptions import SchemaError
from src.models.schemas import ComplexMatrix, Convention, RealizationDocument
from src.models.sweep import TrialRecord
from src.services.serialization import (
    c_sequence_payload,
    format_float,
    load_document,
    load_realization,
    potential_header,
    quadruple_from_document,
    quadruple_to_document,
    realization_to_document,
    write_json,
    write_potential_csv,
    write_sequence_csv,
    write_sweep_csv,
)


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.reader(handle))


def test_corpus_realization_loads(corpus_dir):
    r = load_realization(str(corpus_dir / "realizations" / "sech_continuous.json"))
    assert r.convention == Convention.CONTINUOUS
    assert r.C[0, 0] == 1j


def test_missing_file_and_bad_json(tmp_path):
    with pytest.raises(SchemaError):
        load_document(str(tmp_path / "absent.json"), RealizationDocument)
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    with pytest.raises(SchemaError):
        load_document(str(broken), RealizationDocument)


def test_wrong_block_shape(tmp_path, sech_realization):
    doc = realization_to_document(sech_realization).model_dump(mode="json")
    doc["B"] = {"rows": 1, "cols": 2, "data": [[1.0, 0.0]]}
    path = tmp_path / "shape.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    with pytest.raises(SchemaError):
        load_realization(str(path))


def test_bare_real_entries():
    M = ComplexMatrix(rows=1, cols=2, data=[[1.5, [0.0, 2.0]]])
    np.testing.assert_array_equal(M.to_array(), [[1.5, 2j]])


def test_realization_document_roundtrip(tmp_path, two_by_two_discrete):
    path = write_json(tmp_path / "r.json", realization_to_document(two_by_two_discrete))
    r = load_realization(str(path))
    np.testing.assert_array_equal(r.A, two_by_two_discrete.A)
    assert r.convention == Convention.DISCRETE


def test_quadruple_document(two_by_two_quadruple):
    doc = quadruple_to_document(two_by_two_quadruple, Convention.CONTINUOUS)
    assert (doc.n, doc.m1, doc.m2) == (2, 1, 1)
    q = quadruple_from_document(doc)
    np.testing.assert_array_equal(q.theta2, two_by_two_quadruple.theta2)


def test_potential_csv(tmp_path):
    xs = np.array([0.0, 0.5])
    values = np.array([[[1 + 2j, 0.0]], [[0.0, -1j]]])
    rows = read_csv(write_potential_csv(tmp_path / "v.csv", xs, values))
    assert rows[0] == potential_header(1, 2)
    assert rows[0] == ["x", "v11_re", "v11_im", "v12_re", "v12_im", "norm"]
    assert float(rows[1][2]) == 2.0
    assert float(rows[2][-1]) == pytest.approx(1.0)


def test_sequence_csv(tmp_path):
    rows = read_csv(write_sequence_csv(tmp_path / "s.csv", [0.5, 0.25], [1.0, float("nan")]))
    assert rows[0] == ["k", "dist_to_j", "lambda_min_R"]
    assert rows[2] == ["1", "0.25", "nan"]


def test_sweep_csv(tmp_path):
    records = [
        TrialRecord(delta=1e-3, trial=0, quad_distance=2e-4, potential_dev=3e-4),
        TrialRecord(delta=1e-3, trial=1, skipped=True, reason="perturbation lost minimality"),
    ]
    rows = read_csv(write_sweep_csv(tmp_path / "w.csv", records))
    assert rows[0] == ["delta", "trial", "quad_distance", "potential_dev", "skipped"]
    assert rows[2] == ["0.001", "1", "", "", "1"]


def test_float_format_round_trips():
    value = 0.1 + 0.2
    assert float(format_float(value)) == value


def test_c_sequence_payload():
    C = np.array([np.diag([1.0, -1.0])] * 3)
    payload = c_sequence_payload(C)
    assert payload["K"] == 3
    assert payload["C"][0]["data"][1][1] == [-1.0, 0.0]
