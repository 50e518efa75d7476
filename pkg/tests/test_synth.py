import warnings

import numpy as np
import pytest

from jurisim.corpus import load_corpus
from jurisim.errors import InvalidConfig
from jurisim.expert import default_schema, encode, expert_similarity, load_features
from jurisim.synth import SynthConfig, synth_corpus


def generate(tmp_path, tag="", **kwargs):
    corpus_path = tmp_path / f"corpus{tag}.jsonl"
    features_path = tmp_path / f"features{tag}.csv"
    clusters = synth_corpus(SynthConfig(**kwargs), str(corpus_path), str(features_path))
    return corpus_path, features_path, clusters


def test_single_cluster_uses_one_article_pool(tmp_path):
    corpus_path, _, _ = generate(tmp_path, n_cases=10, n_articles=5, n_clusters=1, seed=0)
    judgments = load_corpus(str(corpus_path))
    seen = {a for j in judgments for a in j.articles}
    assert seen <= {f"{1101 + j}" for j in range(5)}


def test_same_seed_gives_identical_files(tmp_path):
    p1, f1, _ = generate(tmp_path, tag="_a", n_cases=12, n_articles=6, n_clusters=2, seed=7)
    p2, f2, _ = generate(tmp_path, tag="_b", n_cases=12, n_articles=6, n_clusters=2, seed=7)
    assert p1.read_bytes() == p2.read_bytes()
    assert f1.read_bytes() == f2.read_bytes()


def test_different_seeds_differ(tmp_path):
    p1, _, _ = generate(tmp_path, tag="_a", n_cases=12, n_articles=6, n_clusters=2, seed=1)
    p2, _, _ = generate(tmp_path, tag="_b", n_cases=12, n_articles=6, n_clusters=2, seed=2)
    assert p1.read_bytes() != p2.read_bytes()


def test_corpus_is_loadable_and_clustered(tmp_path):
    corpus_path, features_path, clusters = generate(
        tmp_path, n_cases=20, n_articles=8, n_clusters=4, seed=3
    )
    judgments = load_corpus(str(corpus_path))
    assert len(judgments) == 20
    assert set(clusters.values()) == {0, 1, 2, 3}
    # article pools are disjoint across clusters
    pools: dict[int, set] = {}
    for j in judgments:
        pools.setdefault(clusters[j.id], set()).update(j.articles)
    for a in range(4):
        for b in range(a + 1, 4):
            assert pools[a].isdisjoint(pools[b])


def test_expert_similarity_separates_clusters(tmp_path):
    _, features_path, clusters = generate(
        tmp_path, n_cases=24, n_articles=9, n_clusters=2, seed=11
    )
    table = load_features(str(features_path), default_schema())
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sm = expert_similarity(encode(table))
    within, between = [], []
    ids = list(sm.labels)
    for i, a in enumerate(ids):
        for b in ids[i + 1:]:
            (within if clusters[a] == clusters[b] else between).append(sm.get(a, b))
    assert np.mean(within) > np.mean(between)


def test_within_cluster_enrichment_across_seeds(tmp_path):
    """Small-difference pairs should concentrate within clusters."""
    from jurisim.evaluate import align_pairs, threshold_report
    from jurisim.graph import build_graph
    from jurisim.embed import Node2vecConfig, judgment2vec
    from jurisim.sim import similarity_matrix

    pooled_below_within = pooled_below = pooled_all_within = pooled_all = 0
    for seed in range(5):
        corpus_path, features_path, clusters = generate(
            tmp_path, tag=f"_{seed}", n_cases=18, n_articles=9, n_clusters=3, seed=seed
        )
        judgments = load_corpus(str(corpus_path))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            g = build_graph(judgments, include_topics=False, include_courts=True)
            table = load_features(str(features_path), default_schema())
            sm_expert = expert_similarity(encode(table))
        vectors = judgment2vec(
            g, Node2vecConfig(walk_length=20, walks_per_node=10, window=5,
                              dim=32, epochs=3, seed=seed)
        )
        sm_embed = similarity_matrix(vectors.as_mapping())
        comparisons = align_pairs(sm_expert, sm_embed)
        below = threshold_report(comparisons, tau=0.15)["pairs_below"]
        pooled_below_within += sum(
            1 for c in below if clusters[c.case_a] == clusters[c.case_b]
        )
        pooled_below += len(below)
        pooled_all_within += sum(
            1 for c in comparisons if clusters[c.case_a] == clusters[c.case_b]
        )
        pooled_all += len(comparisons)
    assert pooled_below > 0
    ratio = (pooled_below_within / pooled_below) / (pooled_all_within / pooled_all)
    assert ratio > 1.0, f"within-cluster enrichment ratio {ratio:.2f}"


def test_invalid_configs():
    with pytest.raises(InvalidConfig):
        SynthConfig(n_cases=1)
    with pytest.raises(InvalidConfig):
        SynthConfig(n_cases=10, n_clusters=11)
    with pytest.raises(InvalidConfig):
        SynthConfig(n_articles=2, n_clusters=3)


def test_features_file_matches_schema_header(tmp_path):
    _, features_path, _ = generate(tmp_path, n_cases=6, n_articles=4, n_clusters=2, seed=5)
    header = features_path.read_text(encoding="utf-8").splitlines()[0]
    assert header.split(",") == ["case_id"] + default_schema().names
