"""
Conversion between JSON documents and numerical containers, plus CSV/JSON writers.
"""
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Type, TypeVar
import csv
import json

import numpy as np
import structlog
from pydantic import BaseModel, ValidationError

from src.models.exceptions import DimensionError, SchemaError
from src.models.schemas import ComplexMatrix, Convention, QuadrupleDocument, RealizationDocument
from src.models.sweep import TrialRecord
from src.services.quadruple import AdmissibleQuadruple
from src.services.realization import Realization

logger = structlog.get_logger()

ModelT = TypeVar("ModelT", bound=BaseModel)


def load_document(path: str, model: Type[ModelT]) -> ModelT:
    """
    Read and validate a JSON document.

    Raises:
        SchemaError: missing file, malformed JSON or schema violation
    """
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise SchemaError(f"cannot read {path}: {e}") from e
    try:
        return model.model_validate_json(raw)
    except ValidationError as e:
        logger.error("document_invalid", path=path, model=model.__name__, errors=e.error_count())
        raise SchemaError(f"{path} is not a valid {model.__name__}: {e}") from e


def realization_from_document(doc: RealizationDocument) -> Realization:
    try:
        return Realization(doc.A.to_array(), doc.B.to_array(), doc.C.to_array(), doc.convention)
    except DimensionError as e:
        raise SchemaError(str(e)) from e


def realization_to_document(r: Realization) -> RealizationDocument:
    return RealizationDocument(
        convention=r.convention,
        n=r.n,
        m1=r.m1,
        m2=r.m2,
        A=ComplexMatrix.from_array(r.A),
        B=ComplexMatrix.from_array(r.B),
        C=ComplexMatrix.from_array(r.C),
    )


def load_realization(path: str) -> Realization:
    return realization_from_document(load_document(path, RealizationDocument))


def quadruple_from_document(doc: QuadrupleDocument) -> AdmissibleQuadruple:
    try:
        return AdmissibleQuadruple.create(
            doc.alpha.to_array(), doc.S0.to_array(), doc.theta1.to_array(), doc.theta2.to_array()
        )
    except DimensionError as e:
        raise SchemaError(str(e)) from e


def quadruple_to_document(q: AdmissibleQuadruple, convention: Optional[Convention] = None) -> QuadrupleDocument:
    return QuadrupleDocument(
        convention=convention,
        n=q.n,
        m1=q.m1,
        m2=q.m2,
        alpha=ComplexMatrix.from_array(q.alpha),
        S0=ComplexMatrix.from_array(q.S0),
        theta1=ComplexMatrix.from_array(q.theta1),
        theta2=ComplexMatrix.from_array(q.theta2),
    )


def write_json(path: Path, payload) -> Path:
    """Write a pydantic model (or plain data) as indented JSON."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(payload, BaseModel):
        text = payload.model_dump_json(indent=2)
    else:
        text = json.dumps(payload, indent=2)
    path.write_text(text + "\n", encoding="utf-8")
    return path


def format_float(value: float) -> str:
    """Shortest repr that round-trips (at most 17 significant digits)."""
    return repr(float(value))


def _write_rows(path: Path, header: Sequence[str], rows: Iterable[Sequence[str]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def potential_header(m1: int, m2: int) -> List[str]:
    header = ["x"]
    for r in range(m1):
        for c in range(m2):
            header += [f"v{r + 1}{c + 1}_re", f"v{r + 1}{c + 1}_im"]
    return header + ["norm"]


def write_potential_csv(path: Path, xs: np.ndarray, values: np.ndarray) -> Path:
    """Columns: x, Re/Im of every entry of v(x) (row-major), operator norm."""
    count, m1, m2 = values.shape
    rows = []
    for x, v in zip(xs, values):
        row = [format_float(x)]
        for entry in v.reshape(-1):
            row += [format_float(entry.real), format_float(entry.imag)]
        row.append(format_float(np.linalg.norm(v, 2) if v.size else 0.0))
        rows.append(row)
    return _write_rows(path, potential_header(m1, m2), rows)


def write_sequence_csv(path: Path, distances: Sequence[float], r_lambda_min: Sequence[float]) -> Path:
    """Columns: k, ||C_k - j||, lambda_min(R_k)."""
    rows = [
        [str(k), format_float(d), format_float(lm)]
        for k, (d, lm) in enumerate(zip(distances, r_lambda_min))
    ]
    return _write_rows(path, ["k", "dist_to_j", "lambda_min_R"], rows)


def write_sweep_csv(path: Path, records: Sequence[TrialRecord]) -> Path:
    """Columns: delta, trial, quad_distance, potential_dev, skipped."""
    def cell(value: Optional[float]) -> str:
        return "" if value is None else format_float(value)

    rows = [
        [format_float(r.delta), str(r.trial), cell(r.quad_distance), cell(r.potential_dev), str(int(r.skipped))]
        for r in records
    ]
    return _write_rows(path, ["delta", "trial", "quad_distance", "potential_dev", "skipped"], rows)


def c_sequence_payload(C: np.ndarray) -> dict:
    """JSON payload of the C_k matrices."""
    return {
        "K": int(C.shape[0]),
        "C": [ComplexMatrix.from_array(Ck).model_dump() for Ck in C],
    }
