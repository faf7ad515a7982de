"""Type-vector builders: one matrix row per type in the training vocabulary.

Four ways to produce the rows:
  * question_tfidf      - TF-IDF over one pseudo-document per type, built by
                          concatenating all training questions labeled with it;
  * jaccard             - pairwise entity-set overlap against every other
                          training type;
  * loaded_embedding    - externally trained vectors read from an embedding
                          file (e.g. graph embeddings);
  * description_embedding - encoder output for assembled description
                          documents, also read from an embedding file.

All builders emit rows in sorted type-id order, so results are independent
of input ordering.
"""

from __future__ import annotations

import logging
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .dataset import CoarseCategory, QuestionDataset
from .errors import DataError
from .kg_store import EntityTypeIndex, TypeSystem
from .text import VocabularyIndex, tokenize

log = logging.getLogger(__name__)

KIND_QUESTION_TFIDF = "question_tfidf"
KIND_JACCARD = "jaccard"
KIND_LOADED = "loaded_embedding"
KIND_DESCRIPTION = "description_embedding"
MATRIX_KINDS = (KIND_QUESTION_TFIDF, KIND_JACCARD, KIND_LOADED, KIND_DESCRIPTION)
EMBEDDING_FILE_KINDS = (KIND_LOADED, KIND_DESCRIPTION)

SEPARATOR = "[SEP]"

_HEADER_RE = re.compile(r"^#dims (\d+) kind (\w+)$")


@dataclass
class TypeMatrix:
    """Row-per-type real matrix; ``type_ids`` fixes the row order."""

    type_ids: tuple[str, ...]
    vectors: np.ndarray
    kind: str

    def __post_init__(self) -> None:
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        if self.kind not in MATRIX_KINDS:
            raise ValueError(f"unknown type-matrix kind: {self.kind!r}")
        if self.vectors.ndim != 2 or self.vectors.shape[0] != len(self.type_ids):
            raise ValueError("vectors must be a |types| x d matrix")
        if not np.all(np.isfinite(self.vectors)):
            raise ValueError("type matrix contains non-finite values")

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    def row_of(self, type_id: str) -> np.ndarray:
        return self.vectors[self.type_ids.index(type_id)]


@dataclass(frozen=True)
class DescriptionDocument:
    """Type description followed by selected entity descriptions, joined
    with the separator token."""

    type_id: str
    text: str
    entity_count: int


def _ordered_vocab(train_vocab: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(set(train_vocab)))


def build_type_documents(train: QuestionDataset) -> dict[str, list[str]]:
    """Token bag per type: all training questions carrying the type,
    concatenated.  Question order cannot matter because only counts are kept."""
    documents: dict[str, list[str]] = {t: [] for t in train.type_vocabulary}
    for question in train.questions:
        if question.category is not CoarseCategory.RESOURCE or not question.gold_types:
            continue
        tokens = tokenize(question.text)
        for type_id in question.gold_types:
            documents[type_id].extend(tokens)
    return documents


def build_question_tfidf_repr(train: QuestionDataset) -> tuple[TypeMatrix, VocabularyIndex]:
    """TF-IDF rows over the per-type pseudo-documents, L2-normalized."""
    if not any(q.category is CoarseCategory.RESOURCE for q in train.questions):
        raise ValueError("question TF-IDF representation needs at least one resource question")
    type_ids = _ordered_vocab(train.type_vocabulary)
    documents = build_type_documents(train)
    vocab = VocabularyIndex.from_documents(documents[t] for t in type_ids)
    matrix = np.zeros((len(type_ids), len(vocab)), dtype=np.float64)
    for row, type_id in enumerate(type_ids):
        counts = Counter(documents[type_id])
        for token, count in counts.items():
            col = vocab.token_to_id.get(token)
            if col is not None:
                matrix[row, col] = count * vocab.idf(col)
    return normalize_repr(TypeMatrix(type_ids, matrix, KIND_QUESTION_TFIDF)), vocab


def jaccard_similarity(a: frozenset[str], b: frozenset[str]) -> float:
    union = len(a | b)
    if union == 0:
        return 0.0
    return len(a & b) / union


def build_jaccard_repr(train_vocab: Iterable[str], index: EntityTypeIndex) -> TypeMatrix:
    """Row for each type: entity-overlap similarity against every training
    type, with self-similarity pinned to 1 even for entity-less types."""
    type_ids = _ordered_vocab(train_vocab)
    entity_sets = [index.entities_of(t) for t in type_ids]
    n = len(type_ids)
    matrix = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        matrix[i, i] = 1.0
        for j in range(i + 1, n):
            value = jaccard_similarity(entity_sets[i], entity_sets[j])
            matrix[i, j] = value
            matrix[j, i] = value
    return TypeMatrix(type_ids, matrix, KIND_JACCARD)


def normalize_repr(matrix: TypeMatrix) -> TypeMatrix:
    """Scale every nonzero row to unit L2 norm; zero rows stay zero."""
    vectors = matrix.vectors.copy()
    norms = np.linalg.norm(vectors, axis=1)
    nonzero = norms > 0
    vectors[nonzero] /= norms[nonzero, None]
    return TypeMatrix(matrix.type_ids, vectors, matrix.kind)


def read_embedding_file(path: str | Path) -> tuple[str, list[str], np.ndarray]:
    """Parse an embedding file: header line ``#dims <d> kind <kind>``, then
    one ``id<TAB>floats...`` row per vector.  Comment lines are skipped."""
    file_path = Path(path)
    try:
        lines = file_path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise DataError(f"cannot read embedding file {file_path}: {exc}") from exc
    header = None
    for line in lines:
        if line.strip():
            header = line.strip()
            break
    if header is None:
        raise DataError(f"{file_path.name}: empty embedding file")
    match = _HEADER_RE.match(header)
    if match is None or match.group(2) not in MATRIX_KINDS:
        raise DataError(f"{file_path.name}: missing or malformed '#dims <d> kind <kind>' header")
    dims = int(match.group(1))
    kind = match.group(2)

    ids: list[str] = []
    rows: list[np.ndarray] = []
    seen_header = False
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if not seen_header and stripped == header:
            seen_header = True
            continue
        if stripped.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != dims + 1:
            raise DataError(
                f"{file_path.name}:{lineno}: expected id plus {dims} values, got {len(fields) - 1}"
            )
        try:
            vector = np.array([float(v) for v in fields[1:]], dtype=np.float64)
        except ValueError as exc:
            raise DataError(f"{file_path.name}:{lineno}: bad float value ({exc})") from None
        if not np.all(np.isfinite(vector)):
            raise DataError(f"{file_path.name}:{lineno}: non-finite embedding value")
        ids.append(fields[0])
        rows.append(vector)
    if not rows:
        raise DataError(f"{file_path.name}: embedding file has no vector rows")
    return kind, ids, np.vstack(rows)


def load_embedding_repr(path: str | Path, train_vocab: Iterable[str]) -> TypeMatrix:
    """Align an embedding file to the training vocabulary.  Types missing
    from the file get the mean vector of the present ones (reported)."""
    kind, ids, matrix = read_embedding_file(path)
    if kind not in EMBEDDING_FILE_KINDS:
        raise DataError(f"embedding file kind must be one of {EMBEDDING_FILE_KINDS}, got {kind!r}")
    type_ids = _ordered_vocab(train_vocab)
    by_id = {i: row for i, row in zip(ids, matrix)}
    present = [t for t in type_ids if t in by_id]
    if not present:
        raise DataError("embedding file shares no ids with the training vocabulary")
    missing = [t for t in type_ids if t not in by_id]
    mean = np.mean([by_id[t] for t in present], axis=0)
    if missing:
        log.warning(
            "%d type(s) missing from embedding file; imputed with the mean vector (e.g. %s)",
            len(missing),
            missing[0],
        )
    rows = np.vstack([by_id.get(t, mean) for t in type_ids])
    return TypeMatrix(type_ids, rows, kind)


def write_type_matrix(matrix: TypeMatrix, path: str | Path) -> None:
    lines = [f"#dims {matrix.dim} kind {matrix.kind}"]
    lines.extend(f"#vocab-order {t}" for t in matrix.type_ids)
    for type_id, row in zip(matrix.type_ids, matrix.vectors):
        lines.append(type_id + "\t" + "\t".join(repr(float(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_type_matrix(path: str | Path) -> TypeMatrix:
    kind, ids, matrix = read_embedding_file(path)
    return TypeMatrix(tuple(ids), matrix, kind)


def _local_name_words(type_id: str) -> str:
    local = re.split(r"[:/#]", type_id)[-1] or type_id
    words = re.findall(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z]+|[A-Z]+|\d+", local)
    return " ".join(w.lower() for w in words) or local.lower()


def assemble_type_descriptions(
    type_system: TypeSystem,
    index: EntityTypeIndex,
    train_vocab: Iterable[str],
    max_entities: int = 10,
    max_chars: int = 4000,
) -> list[DescriptionDocument]:
    """One document per type: its description (label as fallback, tokenized
    local name as last resort) plus up to ``max_entities`` entity
    descriptions, longest first, truncated at a token boundary."""
    if max_entities < 0:
        raise ValueError("max_entities must be >= 0")
    if max_chars <= 0:
        raise ValueError("max_chars must be positive")
    documents: list[DescriptionDocument] = []
    for type_id in _ordered_vocab(train_vocab):
        known = type_id in type_system
        base = ""
        if known:
            base = type_system.description_of(type_id).strip() or type_system.label_of(type_id).strip()
        if not base:
            base = _local_name_words(type_id)
        candidates = []
        for entity in index.entities_of(type_id):
            description = index.description_of(entity).strip()
            if description:
                candidates.append((entity, description))
        candidates.sort(key=lambda pair: (-len(pair[1]), pair[0]))
        chosen = [d for _, d in candidates[:max_entities]]
        text = base
        for description in chosen:
            text += f" {SEPARATOR} {description}"
        if len(text) > max_chars:
            cut = text[:max_chars]
            boundary = cut.rfind(" ")
            if boundary > 0:
                cut = cut[:boundary]
            text = cut.rstrip()
            while text.endswith(SEPARATOR):
                text = text[: -len(SEPARATOR)].rstrip()
        documents.append(
            DescriptionDocument(type_id=type_id, text=text, entity_count=text.count(SEPARATOR))
        )
    return documents


def write_description_documents(
    documents: Sequence[DescriptionDocument], path: str | Path
) -> None:
    """Export documents as ``type_id<TAB>text`` lines for external encoders."""
    with Path(path).open("w", encoding="utf-8") as handle:
        for doc in documents:
            text = re.sub(r"[\t\r\n]+", " ", doc.text)
            handle.write(f"{doc.type_id}\t{text}\n")
