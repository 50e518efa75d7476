"""Synthetic clustered corpora for end-to-end testing.

The real labeled maintenance-lawsuit data is not redistributable, so tests
run against generated corpora with planted cluster structure: cases in the
same cluster share an article pool, a token vocabulary, and correlated
feature distributions (cluster-specific Bernoulli/Gaussian parameters), so
both similarity tracks should agree that same-cluster pairs are closer.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .corpus import Judgment, save_corpus
from .errors import InvalidConfig
from .expert import FeatureSchema, default_schema


@dataclass(frozen=True)
class SynthConfig:
    n_cases: int = 30
    n_articles: int = 12
    n_clusters: int = 3
    seed: int = 0
    n_courts: int = 3
    min_articles_per_case: int = 2
    max_articles_per_case: int = 4
    min_tokens_per_case: int = 60
    max_tokens_per_case: int = 120
    missing_rate: float = 0.02

    def __post_init__(self):
        if self.n_cases < 2:
            raise InvalidConfig("n_cases must be >= 2")
        if self.n_clusters < 1 or self.n_clusters > self.n_cases:
            raise InvalidConfig("need 1 <= n_clusters <= n_cases")
        if self.n_articles < self.n_clusters:
            raise InvalidConfig("need at least one article per cluster")
        if self.n_courts < 1:
            raise InvalidConfig("n_courts must be >= 1")
        if not 1 <= self.min_articles_per_case <= self.max_articles_per_case:
            raise InvalidConfig("bad articles_per_case range")
        if not 1 <= self.min_tokens_per_case <= self.max_tokens_per_case:
            raise InvalidConfig("bad tokens_per_case range")
        if not 0 <= self.missing_rate < 1:
            raise InvalidConfig("missing_rate must be in [0, 1)")


def synth_corpus(
    config: SynthConfig,
    corpus_path: str,
    features_path: str,
    schema: FeatureSchema | None = None,
) -> dict[str, int]:
    """Write a corpus file and a matching features file; return case -> cluster.

    Case ids carry their cluster index (c<cluster>_<seq>) purely for test
    readability; nothing downstream interprets the id.
    """
    schema = schema or default_schema()
    rng = np.random.default_rng(config.seed)

    clusters = [i % config.n_clusters for i in range(config.n_cases)]
    case_ids = [f"c{clusters[i]}_{i:03d}" for i in range(config.n_cases)]

    # articles partitioned into per-cluster pools, statute-style labels
    article_labels = [f"{1101 + j}" for j in range(config.n_articles)]
    pools: list[list[str]] = [[] for _ in range(config.n_clusters)]
    for j, label in enumerate(article_labels):
        pools[j % config.n_clusters].append(label)

    # per-cluster token vocabulary plus a shared common pool
    cluster_vocab = [[f"w{c}_{i}" for i in range(25)] for c in range(config.n_clusters)]
    common_vocab = [f"common_{i}" for i in range(10)]
    courts = [f"court_{i}" for i in range(config.n_courts)]

    judgments: list[Judgment] = []
    for i, case_id in enumerate(case_ids):
        c = clusters[i]
        pool = pools[c]
        n_art = int(rng.integers(config.min_articles_per_case, config.max_articles_per_case + 1))
        n_art = min(n_art, len(pool))
        articles = sorted(rng.choice(pool, size=n_art, replace=False).tolist())
        n_tok = int(rng.integers(config.min_tokens_per_case, config.max_tokens_per_case + 1))
        own = rng.choice(cluster_vocab[c], size=n_tok, replace=True).tolist()
        # ~15% of tokens come from the shared pool so clusters are not disjoint
        for t in range(n_tok):
            if rng.random() < 0.15:
                own[t] = common_vocab[int(rng.integers(len(common_vocab)))]
        judgments.append(
            Judgment(
                id=case_id,
                year=int(rng.integers(2013, 2019)),
                court=courts[int(rng.integers(config.n_courts))],
                tokens=tuple(own),
                articles=tuple(articles),
            )
        )
    save_corpus(judgments, corpus_path)

    _write_features(config, schema, case_ids, clusters, features_path, rng)
    return dict(zip(case_ids, clusters))


def _write_features(
    config: SynthConfig,
    schema: FeatureSchema,
    case_ids: list[str],
    clusters: list[int],
    path: str,
    rng: np.random.Generator,
) -> None:
    """Cluster-parameterized feature table matching the schema kinds.

    Numerics: case value = cluster center + Gaussian noise. Booleans:
    Bernoulli with cluster-specific p near 0 or 1. Categoricals: a
    cluster-preferred category drawn with probability 0.7.
    """
    n_clusters = config.n_clusters
    centers: dict[str, np.ndarray] = {}
    bool_p: dict[str, np.ndarray] = {}
    cat_pref: dict[str, np.ndarray] = {}
    cat_values: dict[str, list[str]] = {}
    for name, kind in schema.features:
        if kind == "numeric":
            centers[name] = rng.random(n_clusters)
        elif kind == "boolean":
            bool_p[name] = np.where(rng.random(n_clusters) < 0.5, 0.15, 0.85)
        else:
            cat_values[name] = [f"v{j}" for j in range(3)]
            cat_pref[name] = rng.integers(0, 3, size=n_clusters)

    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["case_id"] + schema.names)
        for i, case_id in enumerate(case_ids):
            c = clusters[i]
            row: list[str] = [case_id]
            for name, kind in schema.features:
                if rng.random() < config.missing_rate:
                    row.append("")
                    continue
                if kind == "numeric":
                    value = centers[name][c] + rng.normal(0.0, 0.12)
                    row.append(f"{value:.6f}")
                elif kind == "boolean":
                    row.append("1" if rng.random() < bool_p[name][c] else "0")
                else:
                    if rng.random() < 0.7:
                        row.append(cat_values[name][cat_pref[name][c]])
                    else:
                        row.append(cat_values[name][int(rng.integers(3))])
            writer.writerow(row)
