"""The heterogeneous knowledge graph: Case, Article, Topic, and Court nodes.

Cases never connect to each other directly; similarity travels through the
shared article, topic, and court nodes the walks traverse. The graph is
strictly multipartite and that constraint is validated on every build and
every load, not assumed.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from .corpus import Judgment
from .errors import IoError, IsolatedCaseWarning, SchemaViolation, UnknownCaseId, UnknownNode
from .topics import TopicAssignment


class NodeKind(str, Enum):
    CASE = "Case"
    ARTICLE = "Article"
    TOPIC = "Topic"
    COURT = "Court"


class EdgeKind(str, Enum):
    CITES = "CITES"
    HAS_TOPIC = "HAS_TOPIC"
    HEARD_IN = "HEARD_IN"


# every edge kind joins a Case to exactly one other node kind
_EDGE_PARTNER = {
    EdgeKind.CITES: NodeKind.ARTICLE,
    EdgeKind.HAS_TOPIC: NodeKind.TOPIC,
    EdgeKind.HEARD_IN: NodeKind.COURT,
}


def topic_node_id(topic_index: int) -> str:
    return f"topic:{topic_index}"


def court_node_id(court_label: str) -> str:
    return f"court:{court_label}"


@dataclass
class KnowledgeGraph:
    """Undirected typed graph with positive edge weights."""

    nodes: dict[str, NodeKind] = field(default_factory=dict)
    edges: dict[tuple[str, str, EdgeKind], float] = field(default_factory=dict)
    _adjacency: dict[str, list[tuple[str, float]]] | None = None

    def add_node(self, node_id: str, kind: NodeKind) -> None:
        existing = self.nodes.get(node_id)
        if existing is not None and existing is not kind:
            raise SchemaViolation(f"node {node_id!r} declared as both {existing.value} and {kind.value}")
        self.nodes[node_id] = kind
        self._adjacency = None

    def add_edge(self, u: str, v: str, kind: EdgeKind, weight: float) -> None:
        if u == v:
            raise SchemaViolation(f"self-loop on {u!r}")
        if weight <= 0:
            raise SchemaViolation(f"edge ({u!r}, {v!r}) has non-positive weight {weight}")
        for n in (u, v):
            if n not in self.nodes:
                raise UnknownNode(n)
        ku, kv = self.nodes[u], self.nodes[v]
        if {ku, kv} != {NodeKind.CASE, _EDGE_PARTNER[kind]}:
            raise SchemaViolation(
                f"{kind.value} edge must join Case and {_EDGE_PARTNER[kind].value}, "
                f"got {ku.value}-{kv.value}"
            )
        key = (u, v, kind) if u < v else (v, u, kind)
        if key in self.edges:
            raise SchemaViolation(f"duplicate edge {key}")
        self.edges[key] = float(weight)
        self._adjacency = None

    @property
    def adjacency(self) -> dict[str, list[tuple[str, float]]]:
        """node id -> [(neighbor id, weight)], neighbors sorted lexicographically."""
        if self._adjacency is None:
            adj: dict[str, list[tuple[str, float]]] = {n: [] for n in self.nodes}
            for (u, v, _), w in self.edges.items():
                adj[u].append((v, w))
                adj[v].append((u, w))
            for lst in adj.values():
                lst.sort(key=lambda t: t[0])
            self._adjacency = adj
        return self._adjacency

    def validate(self) -> None:
        """Re-check the multipartite contract on the stored structure."""
        for (u, v, kind), w in self.edges.items():
            if u == v:
                raise SchemaViolation(f"self-loop on {u!r}")
            if w <= 0:
                raise SchemaViolation(f"edge ({u!r}, {v!r}) has non-positive weight {w}")
            ku, kv = self.nodes.get(u), self.nodes.get(v)
            if ku is None:
                raise UnknownNode(u)
            if kv is None:
                raise UnknownNode(v)
            if ku is kv:
                raise SchemaViolation(f"{ku.value}-{kv.value} edge ({u!r}, {v!r}) is not allowed")
            if {ku, kv} != {NodeKind.CASE, _EDGE_PARTNER[kind]}:
                raise SchemaViolation(
                    f"{kind.value} edge ({u!r}, {v!r}) joins {ku.value}-{kv.value}"
                )


def build_graph(
    corpus: Sequence[Judgment],
    assignment: TopicAssignment | None = None,
    include_topics: bool = True,
    include_courts: bool = False,
    topic_edge_weight: str = "theta",
) -> KnowledgeGraph:
    """Assemble the case-article(-topic)(-court) graph from a corpus.

    CITES and HEARD_IN edges have unit weight; HAS_TOPIC carries the theta
    weight by default ("unit" keeps it at 1 for ablation). Isolated case
    nodes are permitted but flagged with IsolatedCaseWarning.
    """
    if topic_edge_weight not in ("theta", "unit"):
        raise ValueError(f"unknown topic_edge_weight: {topic_edge_weight!r}")
    g = KnowledgeGraph()
    case_ids = {j.id for j in corpus}
    for j in corpus:
        g.add_node(j.id, NodeKind.CASE)
    for j in corpus:
        for article in sorted(j.articles):
            if article in case_ids:
                raise SchemaViolation(
                    f"article label {article!r} collides with a case id; "
                    "disambiguate the corpus file"
                )
            g.add_node(article, NodeKind.ARTICLE)
            g.add_edge(j.id, article, EdgeKind.CITES, 1.0)
    if include_topics and assignment is not None:
        for case_id, topic, theta in assignment.edges:
            if case_id not in case_ids:
                raise UnknownCaseId(case_id)
            tid = topic_node_id(topic)
            g.add_node(tid, NodeKind.TOPIC)
            w = theta if topic_edge_weight == "theta" else 1.0
            g.add_edge(case_id, tid, EdgeKind.HAS_TOPIC, w)
    if include_courts:
        for j in corpus:
            cid = court_node_id(j.court)
            g.add_node(cid, NodeKind.COURT)
            g.add_edge(j.id, cid, EdgeKind.HEARD_IN, 1.0)
    isolated = [j.id for j in corpus if not g.adjacency[j.id]]
    if isolated:
        warnings.warn(
            f"{len(isolated)} isolated case node(s): {isolated[:5]}",
            IsolatedCaseWarning,
            stacklevel=2,
        )
    g.validate()
    return g


def neighbors(graph: KnowledgeGraph, node_id: str) -> list[tuple[str, float]]:
    """Neighbors of a node with edge weights, in lexicographic id order."""
    if node_id not in graph.nodes:
        raise UnknownNode(node_id)
    return list(graph.adjacency[node_id])


def save_graph(graph: KnowledgeGraph, path: str) -> None:
    """Edge-list TSV: a '# nodes' section then a '# edges' section.

    Weights are written with repr, which round-trips float64 exactly and
    always carries at least 6 significant digits.
    """
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("# nodes\n")
            for node_id in sorted(graph.nodes):
                fh.write(f"{node_id}\t{graph.nodes[node_id].value}\n")
            fh.write("# edges\n")
            for u, v, kind in sorted(graph.edges):
                fh.write(f"{u}\t{v}\t{kind.value}\t{graph.edges[(u, v, kind)]!r}\n")
    except OSError as exc:
        raise IoError(f"cannot write graph file {path!r}: {exc}") from exc


def load_graph(path: str) -> KnowledgeGraph:
    """Read the TSV written by save_graph, re-validating the schema."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IoError(f"cannot read graph file {path!r}: {exc}") from exc
    g = KnowledgeGraph()
    section = None
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        if line.startswith("#"):
            tag = line.lstrip("#").strip()
            if tag not in ("nodes", "edges"):
                raise SchemaViolation(f"unknown section {tag!r} at line {lineno}")
            section = tag
            continue
        parts = line.split("\t")
        if section == "nodes":
            if len(parts) != 2:
                raise SchemaViolation(f"bad node line {lineno}: {line!r}")
            node_id, kind = parts
            try:
                g.add_node(node_id, NodeKind(kind))
            except ValueError:
                raise SchemaViolation(f"unknown node kind {kind!r} at line {lineno}") from None
        elif section == "edges":
            if len(parts) != 4:
                raise SchemaViolation(f"bad edge line {lineno}: {line!r}")
            u, v, kind, weight = parts
            try:
                g.add_edge(u, v, EdgeKind(kind), float(weight))
            except ValueError:
                raise SchemaViolation(f"bad edge kind/weight at line {lineno}") from None
            except UnknownNode as exc:
                raise SchemaViolation(f"edge references undeclared node at line {lineno}: {exc}") from None
        else:
            raise SchemaViolation(f"content before any section header at line {lineno}")
    g.validate()
    return g


def graph_stats(graph: KnowledgeGraph) -> dict:
    """Node/edge counts by kind, connected components, isolated cases."""
    node_counts = {kind.value: 0 for kind in NodeKind}
    for kind in graph.nodes.values():
        node_counts[kind.value] += 1
    edge_counts = {kind.value: 0 for kind in EdgeKind}
    for (_, _, kind) in graph.edges:
        edge_counts[kind.value] += 1
    seen: set[str] = set()
    components = 0
    for start in graph.nodes:
        if start in seen:
            continue
        components += 1
        stack = [start]
        seen.add(start)
        while stack:
            cur = stack.pop()
            for nb, _ in graph.adjacency[cur]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
    isolated = sorted(
        n for n, kind in graph.nodes.items() if kind is NodeKind.CASE and not graph.adjacency[n]
    )
    return {
        "nodes": node_counts,
        "edges": edge_counts,
        "components": components,
        "isolated_cases": isolated,
    }


def structurally_equal(a: KnowledgeGraph, b: KnowledgeGraph) -> bool:
    return a.nodes == b.nodes and a.edges == b.edges
