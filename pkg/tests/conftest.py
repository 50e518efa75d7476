import numpy as np
import pytest

from jurisim.corpus import Judgment
from jurisim.graph import EdgeKind, KnowledgeGraph, NodeKind


def make_judgment(jid, articles=(), tokens=("t",), text=None, year=2015, court="court_a"):
    return Judgment(
        id=jid, year=year, court=court, text=text,
        tokens=tuple(tokens) if tokens is not None else None,
        articles=tuple(articles),
    )


def make_graph(case_edges):
    """Graph from {case_id: [article_id, ...]}; unit CITES weights."""
    g = KnowledgeGraph()
    for case in case_edges:
        g.add_node(case, NodeKind.CASE)
    for case, articles in case_edges.items():
        for art in articles:
            if art not in g.nodes:
                g.add_node(art, NodeKind.ARTICLE)
            g.add_edge(case, art, EdgeKind.CITES, 1.0)
    return g


@pytest.fixture
def triangle_graph():
    """Three mutually connected unit-weight nodes.

    A triangle cannot satisfy the multipartite schema, so the structure is
    assembled directly; the walk layer only reads adjacency.
    """
    g = KnowledgeGraph()
    g.nodes = {"a": NodeKind.CASE, "b": NodeKind.ARTICLE, "c": NodeKind.TOPIC}
    g.edges = {
        ("a", "b", EdgeKind.CITES): 1.0,
        ("b", "c", EdgeKind.CITES): 1.0,
        ("a", "c", EdgeKind.CITES): 1.0,
    }
    return g


@pytest.fixture
def two_clique_graph():
    """Two 6-cliques joined by a single bridge edge, for embedding-quality tests.

    Cliques require same-kind edges, so the graph bypasses schema validation;
    the embedding layer only reads the adjacency structure.
    """
    g = KnowledgeGraph()
    left = [f"L{i}" for i in range(6)]
    right = [f"R{i}" for i in range(6)]
    for n in left + right:
        g.nodes[n] = NodeKind.CASE
    def connect(nodes):
        for i, u in enumerate(nodes):
            for v in nodes[i + 1:]:
                g.edges[(min(u, v), max(u, v), EdgeKind.CITES)] = 1.0
    connect(left)
    connect(right)
    g.edges[("L0", "R0", EdgeKind.CITES)] = 1.0
    return g, left, right


def brute_force_cosine_matrix(labels, vectors):
    """Independent double-loop cosine oracle (no shared code with the library)."""
    import math

    n = len(labels)
    out = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            dot = sum(x * y for x, y in zip(vectors[i], vectors[j]))
            ni = math.sqrt(sum(x * x for x in vectors[i]))
            nj = math.sqrt(sum(y * y for y in vectors[j]))
            out[i][j] = dot / (ni * nj)
    return np.array(out)
