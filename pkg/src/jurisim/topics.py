"""Topic modeling by collapsed Gibbs sampling, top words, and case-topic edges.

The sampler integrates out the topic-word and document-topic distributions
and resamples one token-topic label at a time; phi and theta are posterior
means over the post-burn-in sweeps. Runs are bit-reproducible for a fixed
(matrix, config) pair.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .corpus import DocTermMatrix
from .errors import EmptyMatrix, InvalidConfig, InvalidN, KTooLarge, VocabMismatch


@dataclass(frozen=True)
class LdaConfig:
    k: int = 8
    alpha: float | None = None  # defaults to 50 / k
    beta: float = 0.01
    iterations: int = 500
    burn_in: int = 250
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise InvalidConfig("k must be >= 1")
        if self.alpha is not None and self.alpha <= 0:
            raise InvalidConfig("alpha must be > 0")
        if self.beta <= 0:
            raise InvalidConfig("beta must be > 0")
        if self.iterations < 1:
            raise InvalidConfig("iterations must be >= 1")
        if not 0 <= self.burn_in < self.iterations:
            raise InvalidConfig("burn_in must satisfy 0 <= burn_in < iterations")

    @property
    def effective_alpha(self) -> float:
        return self.alpha if self.alpha is not None else 50.0 / self.k

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "alpha": self.effective_alpha,
            "beta": self.beta,
            "iterations": self.iterations,
            "burn_in": self.burn_in,
            "seed": self.seed,
        }


@dataclass
class TopicModel:
    """Fitted model: phi (K x V), theta (D x K), final assignments, vocab."""

    config: LdaConfig
    doc_ids: tuple[str, ...]
    terms: tuple[str, ...]
    phi: np.ndarray
    theta: np.ndarray
    assignments: np.ndarray  # final token-topic labels, aligned to token_docs/token_words
    token_docs: np.ndarray
    token_words: np.ndarray

    @property
    def n_topics(self) -> int:
        return self.phi.shape[0]


@dataclass
class TopicAssignment:
    """Case -> topic edges: (case_id, topic index, theta weight)."""

    edges: list[tuple[str, int, float]] = field(default_factory=list)


def fit_lda(dtm: DocTermMatrix, config: LdaConfig) -> TopicModel:
    """Run collapsed Gibbs sampling on the count matrix.

    phi/theta are averaged over every post-burn-in sweep, which gives
    stabler top-word lists than a single final sample. All entries end up
    strictly positive thanks to the alpha/beta smoothing.
    """
    if dtm.counts.sum() == 0:
        raise EmptyMatrix("document-term matrix has no nonzero entries")
    n_docs, n_terms = dtm.shape
    if config.k > n_terms:
        raise KTooLarge(f"k={config.k} exceeds vocabulary size {n_terms}")
    alpha = config.effective_alpha
    beta = config.beta
    k = config.k

    docs, words = dtm.token_streams()
    z = np.zeros(docs.shape[0], dtype=np.int64)
    n_dk = np.zeros((n_docs, k), dtype=np.int64)
    n_kw = np.zeros((k, n_terms), dtype=np.int64)
    n_k = np.zeros(k, dtype=np.int64)

    state = _kernels.new_state(config.seed)
    _kernels.run_kernel(_kernels.gibbs_init, docs, words, z, n_dk, n_kw, n_k, k, state)

    doc_totals = dtm.counts.sum(axis=1).astype(np.float64)
    phi_acc = np.zeros((k, n_terms))
    theta_acc = np.zeros((n_docs, k))
    kept = 0
    for sweep in range(config.iterations):
        _kernels.run_kernel(
            _kernels.gibbs_sweep, docs, words, z, n_dk, n_kw, n_k, alpha, beta, state
        )
        if sweep >= config.burn_in:
            phi_acc += (n_kw + beta) / (n_k[:, None] + n_terms * beta)
            theta_acc += (n_dk + alpha) / (doc_totals[:, None] + k * alpha)
            kept += 1
    return TopicModel(
        config=config,
        doc_ids=dtm.doc_ids,
        terms=dtm.vocab.terms,
        phi=phi_acc / kept,
        theta=theta_acc / kept,
        assignments=z,
        token_docs=docs,
        token_words=words,
    )


def top_words(model: TopicModel, n: int) -> list[list[str]]:
    """The n highest-probability terms per topic; phi ties break lexicographically."""
    n_terms = len(model.terms)
    if not 1 <= n <= n_terms:
        raise InvalidN(f"n must be in [1, {n_terms}], got {n}")
    out = []
    for k in range(model.n_topics):
        ranked = sorted(range(n_terms), key=lambda i: (-model.phi[k, i], model.terms[i]))
        out.append([model.terms[i] for i in ranked[:n]])
    return out


def assign_topics(model: TopicModel, threshold: float = 0.2) -> TopicAssignment:
    """Edges for every theta weight >= threshold.

    A document where nothing passes gets its argmax topic, so every case
    keeps at least one topic edge (ties go to the lower topic index).
    """
    if not 0 < threshold < 1:
        raise InvalidConfig("threshold must be in (0, 1)")
    edges: list[tuple[str, int, float]] = []
    for d, case_id in enumerate(model.doc_ids):
        row = model.theta[d]
        passing = [k for k in range(model.n_topics) if row[k] >= threshold]
        if not passing:
            passing = [int(np.argmax(row))]
        for k in passing:
            edges.append((case_id, k, float(row[k])))
    return TopicAssignment(edges=edges)


def perplexity(model: TopicModel, dtm: DocTermMatrix) -> float:
    """exp(-sum count * ln(theta @ phi) / total tokens) on the model's own docs."""
    if dtm.vocab.terms != model.terms:
        raise VocabMismatch("matrix vocabulary differs from model vocabulary")
    if dtm.doc_ids != model.doc_ids:
        raise VocabMismatch("matrix documents differ from model documents")
    probs = model.theta @ model.phi  # (D, V)
    total = dtm.counts.sum()
    if total == 0:
        raise EmptyMatrix("document-term matrix has no nonzero entries")
    mask = dtm.counts > 0
    ll = float((dtm.counts[mask] * np.log(probs[mask])).sum())
    return float(np.exp(-ll / total))


def save_model(model: TopicModel, path: str) -> None:
    """JSON dump: phi/theta as nested arrays plus the config echo."""
    payload = {
        "config": model.config.to_dict(),
        "doc_ids": list(model.doc_ids),
        "terms": list(model.terms),
        "phi": model.phi.tolist(),
        "theta": model.theta.tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)


def load_model(path: str) -> TopicModel:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    cfg = payload["config"]
    config = LdaConfig(
        k=cfg["k"],
        alpha=cfg["alpha"],
        beta=cfg["beta"],
        iterations=cfg["iterations"],
        burn_in=cfg["burn_in"],
        seed=cfg["seed"],
    )
    return TopicModel(
        config=config,
        doc_ids=tuple(payload["doc_ids"]),
        terms=tuple(payload["terms"]),
        phi=np.asarray(payload["phi"], dtype=np.float64),
        theta=np.asarray(payload["theta"], dtype=np.float64),
        assignments=np.zeros(0, dtype=np.int64),
        token_docs=np.zeros(0, dtype=np.int64),
        token_words=np.zeros(0, dtype=np.int64),
    )


def write_top_words(model: TopicModel, n: int, path: str) -> None:
    """Plain-text report, one topic per block."""
    lists = top_words(model, n)
    with open(path, "w", encoding="utf-8") as fh:
        for k, terms in enumerate(lists):
            fh.write(f"topic {k}\n")
            for t in terms:
                fh.write(f"  {t}\n")
            fh.write("\n")
