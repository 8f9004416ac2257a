"""Okapi BM25 over small corpora of API docs or demonstration goals."""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import ApiFunction, DemonstrationExample

DEFAULT_K1 = 1.2
DEFAULT_B = 0.75

_SPLIT = re.compile(r"[^0-9a-z]+")


class DuplicateDocId(ValueError):
    pass


def tokenize(text: str) -> list[str]:
    # underscores split too: set_min_price -> set, min, price
    return [t for t in _SPLIT.split(text.lower()) if t]


@dataclass(frozen=True)
class Index:
    doc_ids: tuple[str, ...]
    term_freqs: tuple[Counter, ...]
    doc_lengths: tuple[int, ...]
    avg_length: float
    doc_freqs: dict[str, int]
    k1: float = DEFAULT_K1
    b: float = DEFAULT_B

    def __len__(self) -> int:
        return len(self.doc_ids)

    def idf(self, term: str) -> float:
        df = self.doc_freqs.get(term, 0)
        n = len(self.doc_ids)
        return max(0.0, math.log((n - df + 0.5) / (df + 0.5)))

    def score(self, position: int, terms: Sequence[str]) -> float:
        tf = self.term_freqs[position]
        norm = self.k1 * (1 - self.b + self.b * self.doc_lengths[position] / self.avg_length)
        total = 0.0
        for term in terms:
            f = tf.get(term, 0)
            if f:
                total += self.idf(term) * f * (self.k1 + 1) / (f + norm)
        return total


def build_index(
    corpus: Iterable[tuple[str, str]], k1: float = DEFAULT_K1, b: float = DEFAULT_B
) -> Index:
    doc_ids: list[str] = []
    tfs: list[Counter] = []
    seen: set[str] = set()
    for doc_id, text in corpus:
        if doc_id in seen:
            raise DuplicateDocId(doc_id)
        seen.add(doc_id)
        doc_ids.append(doc_id)
        tfs.append(Counter(tokenize(text)))
    lengths = tuple(sum(tf.values()) for tf in tfs)
    df: Counter = Counter()
    for tf in tfs:
        df.update(tf.keys())
    total = sum(lengths)
    # a corpus of empty documents still needs a positive normaliser
    avg = total / len(lengths) if total else 1.0
    return Index(tuple(doc_ids), tuple(tfs), lengths, avg, dict(df), k1, b)


def retrieve(index: Index, query: str, k: int) -> list[tuple[str, float]]:
    """Top-``k`` documents sharing at least one query term, best first.

    Ties keep insertion order.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if k == 0 or not len(index):
        return []
    terms = tokenize(query)
    qset = set(terms)
    scored = [
        (index.doc_ids[i], index.score(i, terms), i)
        for i in range(len(index))
        if qset & index.term_freqs[i].keys()
    ]
    scored.sort(key=lambda row: (-row[1], row[2]))
    return [(doc_id, score) for doc_id, score, _ in scored[:k]]


def rank_all(index: Index, query: str) -> list[str]:
    """Every doc id: matches by score, then non-matching docs in insertion order."""
    hits = [doc_id for doc_id, _ in retrieve(index, query, len(index))]
    hit_set = set(hits)
    return hits + [d for d in index.doc_ids if d not in hit_set]


def doc_index(functions: Sequence[ApiFunction], **params) -> Index:
    return build_index(((f.name, f"{f.name} {f.doc_text}") for f in functions), **params)


def demo_index(demos: Sequence[DemonstrationExample], **params) -> Index:
    return build_index(((str(i), d.goal_text) for i, d in enumerate(demos)), **params)
