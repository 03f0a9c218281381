"""TF-IDF over a corpus of SQL texts, used as the native semantic embedding.

Tokenization: lowercase, split on any character outside [a-z0-9_], drop pure
integer tokens.  idf(t) = ln((1 + N) / (1 + df(t))) + 1.  Transformed vectors
are L2-normalized (the all-zero vector stays all-zero).
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

_SPLIT = re.compile(r"[^a-z0-9_]+")
_INTEGER = re.compile(r"^[0-9]+$")

FORMAT = "planlearn-tfidf"
VERSION = 1


class TfidfError(Exception):
    pass


def tokenize(text: str) -> list[str]:
    return [t for t in _SPLIT.split(text.lower()) if t and not _INTEGER.match(t)]


@dataclass
class TfidfModel:
    vocabulary: list[str]            # sorted lexicographically
    document_frequency: list[int]    # aligned with vocabulary
    corpus_size: int

    def __post_init__(self):
        self._index = {term: i for i, term in enumerate(self.vocabulary)}
        self.idf = np.array(
            [
                math.log((1 + self.corpus_size) / (1 + df)) + 1.0
                for df in self.document_frequency
            ]
        )

    @property
    def width(self) -> int:
        return len(self.vocabulary)

    def transform(self, text: str) -> np.ndarray:
        """Dense tf·idf vector over the vocabulary, L2-normalized."""
        vec = np.zeros(self.width)
        for token in tokenize(text):
            i = self._index.get(token)
            if i is not None:
                vec[i] += 1.0
        vec *= self.idf
        norm = math.sqrt(float(vec @ vec))
        if norm > 0:
            vec /= norm
        return vec

    def to_json(self) -> str:
        return json.dumps(
            {
                "format": FORMAT,
                "version": VERSION,
                "corpus_size": self.corpus_size,
                "vocabulary": self.vocabulary,
                "document_frequency": self.document_frequency,
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "TfidfModel":
        doc = json.loads(text)
        if doc.get("format") != FORMAT:
            raise TfidfError(f"not a tf-idf model document: {doc.get('format')!r}")
        if doc.get("version") != VERSION:
            raise TfidfError(f"unsupported tf-idf model version {doc.get('version')!r}")
        return cls(doc["vocabulary"], doc["document_frequency"], doc["corpus_size"])

    def save(self, path: str | Path):
        Path(path).write_text(self.to_json() + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "TfidfModel":
        return cls.from_json(Path(path).read_text())


def fit(corpus: list[str], max_vocab: int | None = None) -> TfidfModel:
    """Fit document frequencies on a corpus and keep the top-df terms.

    Vocabulary selection ranks by document frequency with lexicographic
    tie-breaking; the kept terms are then ordered lexicographically so the
    column order is deterministic.
    """
    if not corpus:
        raise TfidfError("tf-idf corpus is empty")
    df: dict[str, int] = {}
    for text in corpus:
        for term in set(tokenize(text)):
            df[term] = df.get(term, 0) + 1
    ranked = sorted(df, key=lambda t: (-df[t], t))
    if max_vocab is not None:
        ranked = ranked[:max_vocab]
    vocabulary = sorted(ranked)
    return TfidfModel(vocabulary, [df[t] for t in vocabulary], len(corpus))
