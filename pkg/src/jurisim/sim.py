"""Cosine similarity matrices and top-k similar-case retrieval."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import DimMismatch, IoError, KTooLarge, UnknownCase, ZeroVector


@dataclass
class SimilarityMatrix:
    """Symmetric matrix of pairwise cosines with case-id labels."""

    labels: tuple[str, ...]
    values: np.ndarray  # (N, N) float64

    def __post_init__(self):
        self._index = {lab: i for i, lab in enumerate(self.labels)}

    def get(self, a: str, b: str) -> float:
        return float(self.values[self._index[a], self._index[b]])


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """dot(u, v) / (|u| |v|), in [-1, 1]."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DimMismatch(f"dimensions differ: {u.shape} vs {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ZeroVector()
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


def similarity_matrix(vectors: Mapping[str, np.ndarray]) -> SimilarityMatrix:
    """Full pairwise cosine over labeled vectors, labels sorted lexicographically.

    A zero vector is an upstream bug, not a 0-similar case, so it raises
    ZeroVector naming the offending label.
    """
    if len(vectors) < 2:
        raise ValueError("need at least 2 vectors")
    labels = tuple(sorted(vectors))
    mat = np.array([np.asarray(vectors[lab], dtype=np.float64) for lab in labels])
    if mat.ndim != 2:
        raise DimMismatch("vectors do not share a common dimension")
    norms = np.linalg.norm(mat, axis=1)
    for lab, n in zip(labels, norms):
        if n == 0.0:
            raise ZeroVector(lab)
    unit = mat / norms[:, None]
    values = np.clip(unit @ unit.T, -1.0, 1.0)
    return SimilarityMatrix(labels=labels, values=values)


def top_k(matrix: SimilarityMatrix, case_id: str, k: int) -> list[tuple[str, float]]:
    """k most similar other cases, descending score, ties lexicographic by id."""
    if case_id not in matrix._index:
        raise UnknownCase(case_id)
    n = len(matrix.labels)
    if k > n - 1:
        raise KTooLarge(f"k={k} exceeds {n - 1} other cases")
    if k < 0:
        raise ValueError("k must be >= 0")
    i = matrix._index[case_id]
    others = [(lab, float(matrix.values[i, j])) for j, lab in enumerate(matrix.labels) if j != i]
    others.sort(key=lambda t: (-t[1], t[0]))
    return others[:k]


def write_matrix(matrix: SimilarityMatrix, path: str) -> None:
    """CSV with a leading header row/column of case ids, 6-decimal values."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["case_id"] + list(matrix.labels))
        for i, lab in enumerate(matrix.labels):
            writer.writerow([lab] + [f"{v:.6f}" for v in matrix.values[i]])


def read_matrix(path: str) -> SimilarityMatrix:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = [r for r in csv.reader(fh) if r]
    except OSError as exc:
        raise IoError(f"cannot read matrix file {path!r}: {exc}") from exc
    if not rows or rows[0][:1] != ["case_id"]:
        raise IoError(f"{path!r} is not a similarity matrix file")
    labels = tuple(rows[0][1:])
    body = rows[1:]
    if len(body) != len(labels) or any(r[0] != lab for r, lab in zip(body, labels)):
        raise IoError(f"{path!r} has inconsistent row/column labels")
    values = np.array([[float(x) for x in r[1:]] for r in body], dtype=np.float64)
    return SimilarityMatrix(labels=labels, values=values)
