"""Tokenization and vocabulary statistics shared by the text featurizers."""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    """Lowercase, split on non-alphanumeric runs, drop tokens shorter than
    two characters and purely numeric tokens."""
    return [t for t in _TOKEN_RE.findall(text.lower()) if len(t) >= 2 and not t.isdigit()]


@dataclass
class VocabularyIndex:
    """Sorted token list with document frequencies over the corpus it was
    built from.  ``token_to_id`` is the exact inverse of ``tokens``."""

    tokens: list[str]
    token_to_id: dict[str, int]
    document_frequency: list[int]
    n_documents: int

    @classmethod
    def from_documents(cls, documents: Iterable[list[str]]) -> "VocabularyIndex":
        df: Counter[str] = Counter()
        n_documents = 0
        for doc in documents:
            n_documents += 1
            df.update(set(doc))
        tokens = sorted(df)
        return cls(
            tokens=tokens,
            token_to_id={t: i for i, t in enumerate(tokens)},
            document_frequency=[df[t] for t in tokens],
            n_documents=n_documents,
        )

    def __len__(self) -> int:
        return len(self.tokens)

    def idf(self, token_id: int) -> float:
        # Smoothed inverse document frequency: monotone in df, never negative.
        return math.log((self.n_documents + 1) / (self.document_frequency[token_id] + 1)) + 1.0

    def to_dict(self) -> dict:
        return {
            "tokens": self.tokens,
            "document_frequency": self.document_frequency,
            "n_documents": self.n_documents,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VocabularyIndex":
        tokens = list(d["tokens"])
        return cls(
            tokens=tokens,
            token_to_id={t: i for i, t in enumerate(tokens)},
            document_frequency=list(d["document_frequency"]),
            n_documents=int(d["n_documents"]),
        )
