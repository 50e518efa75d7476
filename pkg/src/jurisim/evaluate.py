"""Comparison of the expert and embedding similarity matrices.

Shared cases are aligned into unordered pairs; the per-pair absolute
difference of the two similarity scores is the evaluation quantity, with
describe-statistics and a below-threshold retrieval report over it.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConstantInput,
    DroppedLabelWarning,
    EmptyInput,
    InsufficientOverlap,
    LengthMismatch,
)
from .sim import SimilarityMatrix


@dataclass(frozen=True)
class PairwiseComparison:
    case_a: str  # lexicographically smaller id
    case_b: str
    sim_expert: float
    sim_embed: float

    @property
    def abs_diff(self) -> float:
        return abs(self.sim_expert - self.sim_embed)


@dataclass(frozen=True)
class DescribeStats:
    count: int
    mean: float
    std: float
    min: float
    q25: float
    median: float
    q75: float
    max: float

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "mean": self.mean,
            "std": self.std,
            "min": self.min,
            "q25": self.q25,
            "median": self.median,
            "q75": self.q75,
            "max": self.max,
        }


def align_pairs(expert: SimilarityMatrix, embed: SimilarityMatrix) -> list[PairwiseComparison]:
    """All C(n,2) unordered pairs over the shared case ids.

    Ids present in only one matrix are dropped with a warning; fewer than
    two shared ids is an error.
    """
    shared = sorted(set(expert.labels) & set(embed.labels))
    dropped = (set(expert.labels) | set(embed.labels)) - set(shared)
    if dropped:
        warnings.warn(
            f"{len(dropped)} case id(s) present in only one matrix dropped: {sorted(dropped)[:5]}",
            DroppedLabelWarning,
            stacklevel=2,
        )
    if len(shared) < 2:
        raise InsufficientOverlap(f"only {len(shared)} shared case id(s)")
    out: list[PairwiseComparison] = []
    for i, a in enumerate(shared):
        for b in shared[i + 1:]:
            out.append(
                PairwiseComparison(
                    case_a=a,
                    case_b=b,
                    sim_expert=expert.get(a, b),
                    sim_embed=embed.get(a, b),
                )
            )
    return out


def describe(values: list[float] | np.ndarray) -> DescribeStats:
    """count/mean/std/min/quartiles/max; sample std, linear-interpolated quartiles."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise EmptyInput("describe of empty list")
    std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    q25, med, q75 = (float(q) for q in np.quantile(arr, [0.25, 0.5, 0.75]))
    return DescribeStats(
        count=int(arr.size),
        mean=float(arr.mean()),
        std=std,
        min=float(arr.min()),
        q25=q25,
        median=med,
        q75=q75,
        max=float(arr.max()),
    )


def _rank_with_ties(values: np.ndarray) -> np.ndarray:
    """1-based ranks, ties averaged."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        for t in range(i, j + 1):
            ranks[order[t]] = avg
        i = j + 1
    return ranks


def correlation(values_a, values_b) -> dict[str, float]:
    """Pearson and Spearman (tie-averaged ranks) correlations."""
    a = np.asarray(values_a, dtype=np.float64)
    b = np.asarray(values_b, dtype=np.float64)
    if a.shape != b.shape:
        raise LengthMismatch(f"lengths differ: {a.size} vs {b.size}")
    if a.size < 3:
        raise LengthMismatch("need at least 3 value pairs")
    if np.all(a == a[0]) or np.all(b == b[0]):
        raise ConstantInput("correlation of a constant input is undefined")

    def pearson(x, y):
        xd = x - x.mean()
        yd = y - y.mean()
        return float((xd * yd).sum() / np.sqrt((xd ** 2).sum() * (yd ** 2).sum()))

    return {
        "pearson": pearson(a, b),
        "spearman": pearson(_rank_with_ties(a), _rank_with_ties(b)),
    }


def threshold_report(comparisons: list[PairwiseComparison], tau: float = 0.1) -> dict:
    """Pairs whose score difference falls below tau, sorted by difference."""
    if tau <= 0:
        raise ValueError("tau must be > 0")
    below = sorted(
        (c for c in comparisons if c.abs_diff < tau),
        key=lambda c: (c.abs_diff, c.case_a, c.case_b),
    )
    return {
        "tau": tau,
        "pairs_below": below,
        "fraction": len(below) / len(comparisons) if comparisons else 0.0,
    }


def write_comparisons(comparisons: list[PairwiseComparison], path: str) -> None:
    """CSV report: case_a, case_b, sim_expert, sim_embed, abs_diff."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["case_a", "case_b", "sim_expert", "sim_embed", "abs_diff"])
        for c in comparisons:
            writer.writerow(
                [c.case_a, c.case_b, f"{c.sim_expert:.6f}", f"{c.sim_embed:.6f}", f"{c.abs_diff:.6f}"]
            )


def read_comparisons(path: str) -> list[PairwiseComparison]:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    out = []
    for row in rows[1:]:
        if row:
            out.append(
                PairwiseComparison(
                    case_a=row[0], case_b=row[1],
                    sim_expert=float(row[2]), sim_embed=float(row[3]),
                )
            )
    return out


def stats_payload(comparisons: list[PairwiseComparison], tau: float = 0.1) -> dict:
    """The stats.json structure: describe for both tracks and the difference."""
    expert_vals = [c.sim_expert for c in comparisons]
    embed_vals = [c.sim_embed for c in comparisons]
    diffs = [c.abs_diff for c in comparisons]
    report = threshold_report(comparisons, tau)
    payload = {
        "pairs": len(comparisons),
        "embed_similarity": describe(embed_vals).to_dict(),
        "expert_similarity": describe(expert_vals).to_dict(),
        "abs_diff": describe(diffs).to_dict(),
        "threshold": {
            "tau": tau,
            "count_below": len(report["pairs_below"]),
            "fraction_below": report["fraction"],
        },
    }
    try:
        payload["correlation"] = correlation(expert_vals, embed_vals)
    except (ConstantInput, LengthMismatch):
        payload["correlation"] = None
    return payload
