"""Corpus loading, tokenization, and document-term matrix construction.

A corpus is a list of :class:`Judgment` records read from a JSON-lines file.
Two matrix variants feed the topic model: raw term counts, and counts
restricted to the vocabulary ranked highest by total TF-IDF weight.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DuplicateId,
    EmptyVocabulary,
    InvalidTopM,
    IoError,
    MalformedRecord,
    MissingField,
    NoTokens,
)

TOKENIZER_MODES = ("pretokenized", "char_bigram")


@dataclass(frozen=True)
class Judgment:
    """One court decision: identity, metadata, content, cited article labels."""

    id: str
    year: int
    court: str
    text: str | None = None
    tokens: tuple[str, ...] | None = None
    articles: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.id:
            raise ValueError("judgment id must be non-empty")
        if self.text is None and self.tokens is None:
            raise ValueError(f"judgment {self.id!r} needs text or tokens")
        if len(set(self.articles)) != len(self.articles):
            raise ValueError(f"judgment {self.id!r} has duplicate article labels")


@dataclass(frozen=True)
class Vocabulary:
    """Ordered unique terms with per-term document frequencies."""

    terms: tuple[str, ...]
    doc_freq: np.ndarray  # int64, aligned to terms

    def __len__(self) -> int:
        return len(self.terms)

    def index(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.terms)}


@dataclass
class DocTermMatrix:
    """Per-document term counts; rows follow corpus order, columns follow vocab order."""

    doc_ids: tuple[str, ...]
    vocab: Vocabulary
    counts: np.ndarray  # (D, V) int64

    @property
    def shape(self) -> tuple[int, int]:
        return self.counts.shape

    def token_streams(self) -> tuple[np.ndarray, np.ndarray]:
        """Flatten counts back into parallel (doc, word) token index arrays."""
        d_idx, w_idx = np.nonzero(self.counts)
        reps = self.counts[d_idx, w_idx]
        return np.repeat(d_idx, reps).astype(np.int64), np.repeat(w_idx, reps).astype(np.int64)


@dataclass
class WeightedMatrix:
    """TF-IDF weights with the same shape and ordering as the source counts."""

    doc_ids: tuple[str, ...]
    vocab: Vocabulary
    weights: np.ndarray  # (D, V) float64

    @property
    def shape(self) -> tuple[int, int]:
        return self.weights.shape


_REQUIRED_KEYS = ("id", "year", "court", "articles")


def load_corpus(path: str, fmt: str = "jsonl") -> list[Judgment]:
    """Read a JSON-lines corpus file, validating the record contract.

    Each line is one object with keys id, year, court, articles, and at
    least one of text / tokens. Order is preserved; ids must be unique.
    """
    if fmt != "jsonl":
        raise IoError(f"unsupported corpus format: {fmt!r}")
    judgments: list[Judgment] = []
    seen: set[str] = set()
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise IoError(f"cannot read corpus file {path!r}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedRecord(lineno, f"invalid JSON ({exc.msg})") from exc
        if not isinstance(rec, dict):
            raise MalformedRecord(lineno, "record is not an object")
        for key in _REQUIRED_KEYS:
            if key not in rec:
                raise MissingField(key, lineno)
        if rec.get("text") is None and rec.get("tokens") is None:
            raise MissingField("text|tokens", lineno)
        jid = rec["id"]
        if not isinstance(jid, str) or not jid:
            raise MalformedRecord(lineno, "id must be a non-empty string")
        if jid in seen:
            raise DuplicateId(jid)
        seen.add(jid)
        tokens = rec.get("tokens")
        if tokens is not None and (
            not isinstance(tokens, list) or any(not isinstance(t, str) for t in tokens)
        ):
            raise MalformedRecord(lineno, "tokens must be an array of strings")
        articles = rec.get("articles")
        if not isinstance(articles, list) or any(not isinstance(a, str) for a in articles):
            raise MalformedRecord(lineno, "articles must be an array of strings")
        if len(set(articles)) != len(articles):
            raise MalformedRecord(lineno, "duplicate article labels")
        try:
            judgment = Judgment(
                id=jid,
                year=int(rec["year"]),
                court=str(rec["court"]),
                text=rec.get("text"),
                tokens=tuple(tokens) if tokens is not None else None,
                articles=tuple(articles),
            )
        except (TypeError, ValueError) as exc:
            raise MalformedRecord(lineno, str(exc)) from exc
        judgments.append(judgment)
    return judgments


def save_corpus(judgments: Iterable[Judgment], path: str) -> None:
    """Write judgments back to the JSON-lines format accepted by load_corpus."""
    with open(path, "w", encoding="utf-8") as fh:
        for j in judgments:
            rec = {"id": j.id, "year": j.year, "court": j.court, "articles": list(j.articles)}
            if j.text is not None:
                rec["text"] = j.text
            if j.tokens is not None:
                rec["tokens"] = list(j.tokens)
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def _strippable(ch: str) -> bool:
    return ch.isspace() or unicodedata.category(ch).startswith("P")


def tokenize(judgment: Judgment, mode: str) -> list[str]:
    """Produce the token list for one judgment.

    pretokenized passes the stored token list through unchanged; char_bigram
    emits overlapping character 2-grams of the text with whitespace and
    punctuation stripped (a single surviving character passes through).
    """
    if mode == "pretokenized":
        if judgment.tokens is None:
            raise NoTokens(judgment.id)
        return list(judgment.tokens)
    if mode == "char_bigram":
        text = judgment.text if judgment.text is not None else "".join(judgment.tokens or ())
        chars = [c for c in text if not _strippable(c)]
        if len(chars) <= 1:
            return chars
        return [chars[i] + chars[i + 1] for i in range(len(chars) - 1)]
    raise ValueError(f"unknown tokenizer mode: {mode!r}")


def build_dtm(
    corpus: Sequence[Judgment], mode: str = "pretokenized", min_df: int = 1
) -> tuple[Vocabulary, DocTermMatrix]:
    """Tokenize the corpus and count terms with document frequency >= min_df.

    Vocabulary is sorted lexicographically so every downstream artifact is
    byte-reproducible. Documents whose tokens all fall below min_df keep an
    all-zero row.
    """
    if not corpus:
        raise ValueError("corpus is empty")
    if min_df < 1:
        raise ValueError("min_df must be >= 1")
    token_lists = [tokenize(j, mode) for j in corpus]
    df: dict[str, int] = {}
    for toks in token_lists:
        for term in set(toks):
            df[term] = df.get(term, 0) + 1
    terms = tuple(sorted(t for t, n in df.items() if n >= min_df))
    if not terms:
        raise EmptyVocabulary(f"no term has document frequency >= {min_df}")
    vocab = Vocabulary(terms=terms, doc_freq=np.array([df[t] for t in terms], dtype=np.int64))
    col = vocab.index()
    counts = np.zeros((len(corpus), len(terms)), dtype=np.int64)
    for d, toks in enumerate(token_lists):
        for tok in toks:
            c = col.get(tok)
            if c is not None:
                counts[d, c] += 1
    doc_ids = tuple(j.id for j in corpus)
    return vocab, DocTermMatrix(doc_ids=doc_ids, vocab=vocab, counts=counts)


def tfidf_transform(dtm: DocTermMatrix) -> WeightedMatrix:
    """weight(d, t) = count(d, t) * ln(D / doc_freq(t)).

    A term present in every document gets weight zero everywhere; zero
    counts stay zero.
    """
    n_docs = dtm.counts.shape[0]
    idf = np.log(n_docs / dtm.vocab.doc_freq.astype(np.float64))
    return WeightedMatrix(
        doc_ids=dtm.doc_ids, vocab=dtm.vocab, weights=dtm.counts.astype(np.float64) * idf
    )


def filter_vocabulary(dtm: DocTermMatrix, weighted: WeightedMatrix, top_m: int) -> DocTermMatrix:
    """Keep the top_m terms by total TF-IDF weight; return counts for them.

    Ties break lexicographically. Retained columns keep their original
    (lexicographic) order, so top_m == V reproduces the input matrix. The
    output is integer counts: the downstream topic model consumes counts,
    the weights only drive the selection.
    """
    n_terms = len(dtm.vocab)
    if not 1 <= top_m <= n_terms:
        raise InvalidTopM(f"top_m must be in [1, {n_terms}], got {top_m}")
    totals = weighted.weights.sum(axis=0)
    ranked = sorted(range(n_terms), key=lambda i: (-totals[i], dtm.vocab.terms[i]))
    keep = np.array(sorted(ranked[:top_m]), dtype=np.int64)
    terms = tuple(dtm.vocab.terms[i] for i in keep)
    vocab = Vocabulary(terms=terms, doc_freq=dtm.vocab.doc_freq[keep].copy())
    return DocTermMatrix(doc_ids=dtm.doc_ids, vocab=vocab, counts=dtm.counts[:, keep].copy())


def dtm_to_json(dtm: DocTermMatrix) -> dict:
    """Sparse JSON form: cells are (doc index, term index, count) triples."""
    d_idx, w_idx = np.nonzero(dtm.counts)
    cells = [[int(d), int(w), int(dtm.counts[d, w])] for d, w in zip(d_idx, w_idx)]
    return {
        "doc_ids": list(dtm.doc_ids),
        "terms": list(dtm.vocab.terms),
        "doc_freq": dtm.vocab.doc_freq.tolist(),
        "cells": cells,
    }


def dtm_from_json(obj: dict) -> DocTermMatrix:
    doc_ids = tuple(obj["doc_ids"])
    terms = tuple(obj["terms"])
    vocab = Vocabulary(terms=terms, doc_freq=np.asarray(obj["doc_freq"], dtype=np.int64))
    counts = np.zeros((len(doc_ids), len(terms)), dtype=np.int64)
    for d, w, c in obj["cells"]:
        counts[d, w] = c
    return DocTermMatrix(doc_ids=doc_ids, vocab=vocab, counts=counts)
