"""Expert-labeled feature table: loading, normalization, encoding, similarity.

The expert track turns a hand-labeled per-case feature table into a dense
matrix (numeric columns min-max scaled to [0,1], booleans as 0/1,
categoricals one-hot) and takes pairwise cosine over the rows. The default
34-feature schema for maintenance lawsuits ships in ``data/feature_schema.json``
and can be replaced by any schema file of the same shape.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import (
    BadValue,
    ConstantColumnWarning,
    DuplicateCaseId,
    HeaderMismatch,
    IoError,
)
from .sim import SimilarityMatrix, similarity_matrix

KINDS = ("boolean", "numeric", "categorical")

MISSING = None


@dataclass(frozen=True)
class FeatureSchema:
    """Ordered feature names with their kinds."""

    features: tuple[tuple[str, str], ...]  # (name, kind)

    def __post_init__(self):
        names = [n for n, _ in self.features]
        if not names:
            raise ValueError("schema needs at least one feature")
        if len(set(names)) != len(names):
            raise ValueError("feature names must be unique")
        for name, kind in self.features:
            if kind not in KINDS:
                raise ValueError(f"feature {name!r} has unknown kind {kind!r}")

    @property
    def names(self) -> list[str]:
        return [n for n, _ in self.features]


def load_schema(path: str) -> FeatureSchema:
    """Read a schema file: JSON array of {name, kind} objects."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read schema file {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise IoError(f"schema file {path!r} is not valid JSON: {exc}") from exc
    return FeatureSchema(features=tuple((e["name"], e["kind"]) for e in raw))


def default_schema() -> FeatureSchema:
    """The bundled maintenance-lawsuit schema (34 features)."""
    text = resources.files("jurisim").joinpath("data/feature_schema.json").read_text("utf-8")
    raw = json.loads(text)
    return FeatureSchema(features=tuple((e["name"], e["kind"]) for e in raw))


@dataclass
class ExpertFeatureTable:
    """Raw per-case values; each cell is bool, float, str, or None for missing."""

    schema: FeatureSchema
    case_ids: tuple[str, ...]
    values: list[list[object]]  # rows aligned to case_ids, columns to schema


@dataclass
class FeatureMatrix:
    """Encoded dense matrix; all entries in [0, 1]."""

    case_ids: tuple[str, ...]
    columns: tuple[str, ...]
    values: np.ndarray  # (D, F) float64


def _parse_cell(raw: str, kind: str, row: int, column: str):
    raw = raw.strip()
    if raw == "":
        return MISSING
    if kind == "boolean":
        if raw == "1":
            return True
        if raw == "0":
            return False
        raise BadValue(row, column, raw)
    if kind == "numeric":
        try:
            return float(raw)
        except ValueError:
            raise BadValue(row, column, raw) from None
    return raw  # categorical: any non-empty string


def load_features(path: str, schema: FeatureSchema) -> ExpertFeatureTable:
    """Read the features CSV; header must be case_id plus the schema names in order."""
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            rows = list(reader)
    except OSError as exc:
        raise IoError(f"cannot read features file {path!r}: {exc}") from exc
    if not rows:
        raise HeaderMismatch("features file is empty")
    header = rows[0]
    expected = ["case_id"] + schema.names
    if header != expected:
        raise HeaderMismatch(
            f"header does not match schema: expected {expected[:4]}..., got {header[:4]}..."
        )
    case_ids: list[str] = []
    values: list[list[object]] = []
    seen: set[str] = set()
    for i, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(expected):
            raise BadValue(i, "<row>", f"expected {len(expected)} cells, got {len(row)}")
        cid = row[0]
        if cid in seen:
            raise DuplicateCaseId(cid)
        seen.add(cid)
        case_ids.append(cid)
        values.append(
            [
                _parse_cell(cell, kind, i, name)
                for cell, (name, kind) in zip(row[1:], schema.features)
            ]
        )
    return ExpertFeatureTable(schema=schema, case_ids=tuple(case_ids), values=values)


def minmax_normalize(column: list[float | None]) -> list[float]:
    """Scale to [0, 1] by (y - min) / (max - min).

    Missing entries become the median of the scaled non-missing values. A
    constant column maps to all 0.5 with a ConstantColumnWarning rather than
    failing, since real labeled tables do contain constant features.
    """
    present = [v for v in column if v is not None]
    if not present:
        raise ValueError("column has no non-missing values")
    lo, hi = min(present), max(present)
    if hi == lo:
        warnings.warn("constant column mapped to 0.5", ConstantColumnWarning, stacklevel=2)
        return [0.5] * len(column)
    scaled = [(v - lo) / (hi - lo) if v is not None else None for v in column]
    fill = float(np.median([v for v in scaled if v is not None]))
    return [v if v is not None else fill for v in scaled]


def encode(table: ExpertFeatureTable, schema: FeatureSchema | None = None) -> FeatureMatrix:
    """Encode the raw table into a dense [0,1] matrix.

    numeric -> min-max scaled; boolean -> 0/1 with missing as 0.5;
    categorical -> one-hot over the observed categories sorted
    lexicographically, with missing as an all-zero group.
    """
    schema = schema or table.schema
    n = len(table.case_ids)
    columns: list[str] = []
    blocks: list[np.ndarray] = []
    for f_idx, (name, kind) in enumerate(schema.features):
        col = [row[f_idx] for row in table.values]
        if kind == "numeric":
            columns.append(name)
            blocks.append(np.array(minmax_normalize(col), dtype=np.float64).reshape(n, 1))
        elif kind == "boolean":
            columns.append(name)
            vals = [0.5 if v is None else (1.0 if v else 0.0) for v in col]
            blocks.append(np.array(vals, dtype=np.float64).reshape(n, 1))
        else:
            cats = sorted({v for v in col if v is not None})
            block = np.zeros((n, len(cats)), dtype=np.float64)
            for c_idx, cat in enumerate(cats):
                columns.append(f"{name}={cat}")
                for r, v in enumerate(col):
                    if v == cat:
                        block[r, c_idx] = 1.0
            blocks.append(block)
    values = np.hstack(blocks) if blocks else np.zeros((n, 0))
    return FeatureMatrix(case_ids=table.case_ids, columns=tuple(columns), values=values)


def expert_similarity(matrix: FeatureMatrix) -> SimilarityMatrix:
    """Pairwise cosine over encoded feature rows, labels sorted lexicographically."""
    if len(matrix.case_ids) < 2:
        raise ValueError("need at least 2 cases for a similarity matrix")
    vectors = {cid: matrix.values[i] for i, cid in enumerate(matrix.case_ids)}
    return similarity_matrix(vectors)


def write_feature_matrix(matrix: FeatureMatrix, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["case_id"] + list(matrix.columns))
        for i, cid in enumerate(matrix.case_ids):
            writer.writerow([cid] + [f"{v:.12g}" for v in matrix.values[i]])


def read_feature_matrix(path: str) -> FeatureMatrix:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:1] != ["case_id"]:
        raise IoError(f"{path!r} is not a feature matrix file")
    columns = tuple(rows[0][1:])
    case_ids = tuple(r[0] for r in rows[1:] if r)
    values = np.array([[float(x) for x in r[1:]] for r in rows[1:] if r], dtype=np.float64)
    return FeatureMatrix(case_ids=case_ids, columns=columns, values=values)
