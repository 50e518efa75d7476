"""Node embeddings: biased second-order walks plus skip-gram training.

The walk bias follows the canonical two-parameter scheme: stepping from cur
after arriving from prev, a neighbor x gets unnormalized weight w/p when
x == prev, w when x also neighbors prev, and w/q otherwise. Walks feed a
from-scratch skip-gram-with-negative-sampling trainer; the per-case slice of
the resulting vectors is the judgment embedding the similarity track uses.

Training is single-threaded and sequential, so a (graph, config) pair always
reproduces the same vectors bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import EmptyWalks, InvalidConfig, IoError, NoCaseNodes, UnknownNode
from .graph import KnowledgeGraph, NodeKind


@dataclass(frozen=True)
class Node2vecConfig:
    p: float = 1.0
    q: float = 1.0
    walk_length: int = 80
    walks_per_node: int = 10
    window: int = 10
    dim: int = 128
    negatives: int = 5
    epochs: int = 5
    learning_rate: float = 0.025
    seed: int = 0

    def __post_init__(self):
        if self.p <= 0 or self.q <= 0:
            raise InvalidConfig("p and q must be > 0")
        if self.walk_length < 1:
            raise InvalidConfig("walk_length must be >= 1")
        if self.walks_per_node < 1:
            raise InvalidConfig("walks_per_node must be >= 1")
        if self.window < 1:
            raise InvalidConfig("window must be >= 1")
        if self.dim < 2:
            raise InvalidConfig("dim must be >= 2")
        if self.negatives < 1:
            raise InvalidConfig("negatives must be >= 1")
        if self.epochs < 1:
            raise InvalidConfig("epochs must be >= 1")
        if self.learning_rate <= 0:
            raise InvalidConfig("learning_rate must be > 0")

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "walk_length": self.walk_length,
            "walks_per_node": self.walks_per_node,
            "window": self.window,
            "dim": self.dim,
            "negatives": self.negatives,
            "epochs": self.epochs,
            "learning_rate": self.learning_rate,
            "seed": self.seed,
        }


@dataclass
class TransitionTables:
    """CSR adjacency with alias tables for first- and second-order steps.

    Node index i corresponds to node_ids[i]; node ids are sorted, so the
    numeric neighbor order inside each CSR block matches the lexicographic
    neighbor order of the graph.
    """

    node_ids: tuple[str, ...]
    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray
    first_probs: np.ndarray
    first_accept: np.ndarray
    first_alias: np.ndarray
    sec_offsets: np.ndarray
    sec_probs: np.ndarray
    sec_accept: np.ndarray
    sec_alias: np.ndarray

    def node_index(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.node_ids)}

    def edge_position(self, u: int, v: int) -> int:
        """CSR position of directed edge (u -> v)."""
        lo, hi = self.indptr[u], self.indptr[u + 1]
        pos = lo + np.searchsorted(self.indices[lo:hi], v)
        if pos >= hi or self.indices[pos] != v:
            raise UnknownNode(f"no edge between node #{u} and node #{v}")
        return int(pos)

    def second_order_distribution(self, prev: str, cur: str) -> dict[str, float]:
        """Normalized next-step distribution after moving prev -> cur."""
        idx = self.node_index()
        e = self.edge_position(idx[prev], idx[cur])
        ci = idx[cur]
        lo, hi = self.indptr[ci], self.indptr[ci + 1]
        block = self.sec_probs[self.sec_offsets[e]: self.sec_offsets[e] + (hi - lo)]
        return {self.node_ids[self.indices[lo + j]]: float(block[j]) for j in range(hi - lo)}

    def first_order_distribution(self, node: str) -> dict[str, float]:
        idx = self.node_index()
        ni = idx[node]
        lo, hi = self.indptr[ni], self.indptr[ni + 1]
        return {self.node_ids[self.indices[lo + j]]: float(self.first_probs[lo + j]) for j in range(hi - lo)}


@dataclass
class WalkCorpus:
    """Walks as node-index rows over a fixed node-id table."""

    node_ids: tuple[str, ...]
    walks: np.ndarray  # (n_walks, walk_length) int64, -1 padded
    lengths: np.ndarray  # (n_walks,) int64

    def __len__(self) -> int:
        return self.walks.shape[0]

    def __iter__(self):
        for row, n in zip(self.walks, self.lengths):
            yield [self.node_ids[i] for i in row[:n]]


@dataclass
class EmbeddingMatrix:
    """One vector per node id; ids sorted lexicographically."""

    node_ids: tuple[str, ...]
    vectors: np.ndarray  # (N, dim) float64
    epoch_losses: np.ndarray | None = None  # mean SGNS loss per training epoch

    def __post_init__(self):
        self._index = {n: i for i, n in enumerate(self.node_ids)}

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def vector(self, node_id: str) -> np.ndarray:
        if node_id not in self._index:
            raise UnknownNode(node_id)
        return self.vectors[self._index[node_id]]

    def as_mapping(self) -> dict[str, np.ndarray]:
        return {n: self.vectors[i] for i, n in enumerate(self.node_ids)}


def _csr_from_graph(graph: KnowledgeGraph) -> tuple[tuple[str, ...], np.ndarray, np.ndarray, np.ndarray]:
    node_ids = tuple(sorted(graph.nodes))
    index = {n: i for i, n in enumerate(node_ids)}
    adj = graph.adjacency
    indptr = np.zeros(len(node_ids) + 1, dtype=np.int64)
    for i, n in enumerate(node_ids):
        indptr[i + 1] = indptr[i] + len(adj[n])
    indices = np.zeros(indptr[-1], dtype=np.int64)
    weights = np.zeros(indptr[-1], dtype=np.float64)
    for i, n in enumerate(node_ids):
        # adjacency is sorted by id, and id order equals index order
        for j, (nb, w) in enumerate(adj[n]):
            indices[indptr[i] + j] = index[nb]
            weights[indptr[i] + j] = w
    return node_ids, indptr, indices, weights


def precompute_transitions(graph: KnowledgeGraph, p: float, q: float) -> TransitionTables:
    """Materialize first- and second-order step distributions with alias tables.

    Second-order tables exist per directed edge; total size is
    sum(deg(v)^2) over nodes, which stays small for the multipartite
    case-article graphs this pipeline builds.
    """
    if p <= 0 or q <= 0:
        raise InvalidConfig("p and q must be > 0")
    node_ids, indptr, indices, weights = _csr_from_graph(graph)

    first_probs = weights.copy()
    for i in range(len(node_ids)):
        lo, hi = indptr[i], indptr[i + 1]
        if hi > lo:
            first_probs[lo:hi] /= first_probs[lo:hi].sum()
    first_accept = np.zeros_like(first_probs)
    first_alias = np.zeros(len(first_probs), dtype=np.int64)
    _kernels.run_kernel(_kernels.build_alias_blocks, first_probs, indptr, first_accept, first_alias)

    degrees = np.diff(indptr)
    sec_sizes = degrees[indices]  # block per directed edge e: deg(head(e))
    sec_offsets = np.zeros(len(indices) + 1, dtype=np.int64)
    np.cumsum(sec_sizes, out=sec_offsets[1:])
    sec_probs = np.zeros(int(sec_offsets[-1]), dtype=np.float64)
    _kernels.run_kernel(
        _kernels.second_order_probs, indptr, indices, weights, float(p), float(q),
        sec_offsets, sec_probs,
    )
    sec_accept = np.zeros_like(sec_probs)
    sec_alias = np.zeros(len(sec_probs), dtype=np.int64)
    _kernels.run_kernel(_kernels.build_alias_blocks, sec_probs, sec_offsets, sec_accept, sec_alias)

    return TransitionTables(
        node_ids=node_ids,
        indptr=indptr,
        indices=indices,
        weights=weights,
        first_probs=first_probs,
        first_accept=first_accept,
        first_alias=first_alias,
        sec_offsets=sec_offsets,
        sec_probs=sec_probs,
        sec_accept=sec_accept,
        sec_alias=sec_alias,
    )


def generate_walks(
    graph: KnowledgeGraph,
    config: Node2vecConfig,
    tables: TransitionTables | None = None,
) -> WalkCorpus:
    """walks_per_node walks from every node, in sorted node order.

    The first step is first-order (edge-weight proportional); later steps
    use the second-order bias. Each walk draws from its own RNG stream
    keyed by (seed, node index, walk index), so the corpus is independent
    of generation order. Isolated start nodes give length-1 walks.
    """
    if tables is None:
        tables = precompute_transitions(graph, config.p, config.q)
    n_nodes = len(tables.node_ids)
    n_walks = n_nodes * config.walks_per_node
    walks = np.full((n_walks, config.walk_length), -1, dtype=np.int64)
    lengths = np.zeros(n_walks, dtype=np.int64)
    _kernels.run_kernel(
        _kernels.walk_all,
        tables.indptr, tables.indices,
        tables.first_accept, tables.first_alias,
        tables.sec_offsets, tables.sec_accept, tables.sec_alias,
        config.walks_per_node, config.walk_length, _kernels.seed_to_u64(config.seed),
        walks, lengths,
    )
    return WalkCorpus(node_ids=tables.node_ids, walks=walks, lengths=lengths)


def negative_distribution(walks: WalkCorpus) -> np.ndarray:
    """Unigram^(3/4) distribution over node indices, from walk occurrences."""
    counts = np.zeros(len(walks.node_ids), dtype=np.float64)
    for row, n in zip(walks.walks, walks.lengths):
        np.add.at(counts, row[:n], 1.0)
    powered = counts ** 0.75
    return powered / powered.sum()


def train_skipgram(walks: WalkCorpus, config: Node2vecConfig) -> EmbeddingMatrix:
    """Sequential SGNS over the walk corpus; returns the input vectors.

    Context vectors exist only during training. Input vectors start uniform
    in [-0.5/dim, 0.5/dim] from the config seed; context vectors start at
    zero, as is standard.
    """
    if len(walks) == 0:
        raise EmptyWalks("walk corpus is empty")
    n_nodes = len(walks.node_ids)
    rng = np.random.default_rng(config.seed)
    in_vecs = (rng.random((n_nodes, config.dim)) - 0.5) / config.dim
    out_vecs = np.zeros((n_nodes, config.dim), dtype=np.float64)

    neg_probs = negative_distribution(walks)
    neg_accept = np.zeros(n_nodes, dtype=np.float64)
    neg_alias = np.zeros(n_nodes, dtype=np.int64)
    block = np.array([0, n_nodes], dtype=np.int64)
    _kernels.run_kernel(_kernels.build_alias_blocks, neg_probs, block, neg_accept, neg_alias)

    losses = np.zeros(config.epochs, dtype=np.float64)
    _kernels.run_kernel(
        _kernels.sgns_train,
        walks.walks, walks.lengths, in_vecs, out_vecs,
        config.window, config.negatives, neg_accept, neg_alias,
        config.epochs, config.learning_rate, _kernels.seed_to_u64(config.seed),
        losses,
    )
    return EmbeddingMatrix(node_ids=walks.node_ids, vectors=in_vecs, epoch_losses=losses)


def sgns_loss(center: np.ndarray, context: np.ndarray, negatives: np.ndarray) -> float:
    """SGNS loss for one positive pair and its negative samples.

    -log sigmoid(u.v) - sum_n log sigmoid(-u.n); stable via softplus.
    """
    def softplus(x):
        return np.where(x > 0, x + np.log1p(np.exp(-np.abs(x))), np.log1p(np.exp(x)))

    pos = float(softplus(-np.dot(center, context)))
    neg = float(sum(softplus(np.dot(center, nv)) for nv in negatives))
    return pos + neg


def sgns_gradients(
    center: np.ndarray, context: np.ndarray, negatives: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Analytic gradients of sgns_loss w.r.t. center, context, and negatives."""
    def sigmoid(x):
        return 1.0 / (1.0 + np.exp(-x))

    s = sigmoid(np.dot(center, context))
    g_center = (s - 1.0) * context
    g_context = (s - 1.0) * center
    g_negs = np.zeros_like(negatives)
    for i, nv in enumerate(negatives):
        sn = sigmoid(np.dot(center, nv))
        g_center = g_center + sn * nv
        g_negs[i] = sn * center
    return g_center, g_context, g_negs


def judgment2vec(graph: KnowledgeGraph, config: Node2vecConfig) -> EmbeddingMatrix:
    """Full pipeline: transitions -> walks -> training -> Case-node slice."""
    case_nodes = sorted(n for n, kind in graph.nodes.items() if kind is NodeKind.CASE)
    if not case_nodes:
        raise NoCaseNodes("graph has no Case nodes")
    tables = precompute_transitions(graph, config.p, config.q)
    walks = generate_walks(graph, config, tables)
    full = train_skipgram(walks, config)
    rows = np.array([full.vector(n) for n in case_nodes])
    return EmbeddingMatrix(
        node_ids=tuple(case_nodes), vectors=rows, epoch_losses=full.epoch_losses
    )


def write_embeddings(matrix: EmbeddingMatrix, path: str) -> None:
    """Text format: '<count> <dim>' then one 'id v1 .. vd' line per node.

    Values use 6-decimal fixed notation, node order lexicographic.
    """
    order = sorted(matrix.node_ids)
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"{len(order)} {matrix.dim}\n")
            for node_id in order:
                vec = matrix.vector(node_id)
                fh.write(node_id + " " + " ".join(f"{v:.6f}" for v in vec) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write embeddings file {path!r}: {exc}") from exc


def read_embeddings(path: str) -> EmbeddingMatrix:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IoError(f"cannot read embeddings file {path!r}: {exc}") from exc
    if not lines:
        raise IoError(f"embeddings file {path!r} is empty")
    try:
        count, dim = (int(x) for x in lines[0].split())
    except ValueError:
        raise IoError(f"bad embeddings header: {lines[0]!r}") from None
    ids: list[str] = []
    rows: list[list[float]] = []
    for line in lines[1:]:
        if not line.strip():
            continue
        parts = line.split(" ")
        if len(parts) != dim + 1:
            raise IoError(f"bad embeddings line: {line[:50]!r}")
        ids.append(parts[0])
        rows.append([float(x) for x in parts[1:]])
    if len(ids) != count:
        raise IoError(f"embeddings header claims {count} nodes, found {len(ids)}")
    return EmbeddingMatrix(node_ids=tuple(ids), vectors=np.array(rows, dtype=np.float64))
