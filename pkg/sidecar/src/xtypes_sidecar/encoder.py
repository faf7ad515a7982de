"""Encode type description documents with a pre-trained transformer.

Reads description exports (``type_id<TAB>text`` lines), runs them through
a transformer encoder, and writes an embedding file the answer-type
pipeline loads directly.  Optionally fine-tunes the encoder first as a
question-to-cluster classifier so the description vectors reflect the
cluster-matching objective; the classifier head is discarded and only
the encoder body is used for embedding.

All communication with the pipeline is through files; this package has
no runtime dependency on it.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
from transformers import AutoModel, AutoModelForSequenceClassification, AutoTokenizer

log = logging.getLogger(__name__)

POOLING_MODES = ("cls", "mean")
OUTPUT_KIND = "description_embedding"

# Inference batch width; invisible in the output because pooling masks
# padding and padded positions contribute exact zeros.
ENCODE_BATCH_SIZE = 32


class SidecarError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(SidecarError):
    """Invalid job parameters or flag combinations."""


class DataError(SidecarError):
    """Malformed or inconsistent input files."""


class ModelError(SidecarError):
    """Encoder loading or inference failure."""


@dataclass(frozen=True)
class EncodeJob:
    """One batch encoding request.

    ``questions_path`` and ``labels_path`` are required exactly when
    ``finetune`` is set; the labels file pairs question ids with the
    cluster ids produced by the pipeline's cluster stage.
    """

    input_path: str
    output_path: str
    model_name: str
    max_length: int = 512
    pooling: str = "mean"
    finetune: bool = False
    questions_path: str | None = None
    labels_path: str | None = None
    epochs: int = 1
    learning_rate: float = 3e-5
    batch_size: int = 8
    seed: int = 0

    def validate(self) -> None:
        if self.pooling not in POOLING_MODES:
            raise ConfigError(f"pooling must be one of {POOLING_MODES}, got {self.pooling!r}")
        if self.max_length < 2:
            raise ConfigError("max length must be at least 2 (special tokens alone need that)")
        if self.epochs < 1:
            raise ConfigError("epochs must be positive")
        if self.learning_rate <= 0:
            raise ConfigError("learning rate must be positive")
        if self.batch_size < 1:
            raise ConfigError("batch size must be positive")
        has_training_files = self.questions_path is not None and self.labels_path is not None
        if self.finetune and not has_training_files:
            raise ConfigError("fine-tuning needs both a questions file and a cluster-label file")
        if not self.finetune and (self.questions_path or self.labels_path):
            raise ConfigError("questions and label files are only used with fine-tuning")


def read_description_documents(path: str | Path) -> list[tuple[str, str]]:
    """Parse ``type_id<TAB>text`` lines, preserving file order."""
    file_path = Path(path)
    try:
        text = file_path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read documents file {file_path}: {exc}") from exc
    documents: list[tuple[str, str]] = []
    seen: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if "\t" not in line:
            raise DataError(f"{file_path.name}:{lineno}: expected <type_id><TAB><text>")
        type_id, doc_text = line.split("\t", 1)
        if not type_id:
            raise DataError(f"{file_path.name}:{lineno}: empty type id")
        if type_id in seen:
            raise DataError(f"{file_path.name}:{lineno}: duplicate type id {type_id!r}")
        seen.add(type_id)
        documents.append((type_id, doc_text))
    if not documents:
        raise DataError(f"{file_path.name}: no documents")
    return documents


def read_question_texts(path: str | Path) -> dict[str, str]:
    """Parse a question dataset JSON array into an id-to-text mapping."""
    file_path = Path(path)
    try:
        records = json.loads(file_path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise DataError(f"cannot read questions file {file_path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{file_path.name}: invalid JSON ({exc})") from exc
    if not isinstance(records, list):
        raise DataError(f"{file_path.name}: expected a JSON array of question records")
    questions: dict[str, str] = {}
    for position, record in enumerate(records):
        if not isinstance(record, dict):
            raise DataError(f"{file_path.name}: record {position} is not an object")
        qid = record.get("id")
        text = record.get("question")
        if not isinstance(qid, str) or not qid:
            raise DataError(f"{file_path.name}: record {position} has no string 'id'")
        if not isinstance(text, str):
            raise DataError(f"{file_path.name}: record {qid!r} has no string 'question'")
        if qid in questions:
            raise DataError(f"{file_path.name}: duplicate question id {qid!r}")
        questions[qid] = text
    if not questions:
        raise DataError(f"{file_path.name}: no question records")
    return questions


def read_cluster_labels(path: str | Path) -> list[tuple[str, int]]:
    """Parse ``question_id<TAB>cluster`` lines with non-negative clusters."""
    file_path = Path(path)
    try:
        text = file_path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read label file {file_path}: {exc}") from exc
    labels: list[tuple[str, int]] = []
    seen: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 2 or not fields[0]:
            raise DataError(f"{file_path.name}:{lineno}: expected <question_id><TAB><cluster>")
        qid, raw = fields
        try:
            cluster = int(raw)
        except ValueError:
            raise DataError(f"{file_path.name}:{lineno}: cluster {raw!r} is not an integer") from None
        if cluster < 0:
            raise DataError(f"{file_path.name}:{lineno}: cluster must be non-negative")
        if qid in seen:
            raise DataError(f"{file_path.name}:{lineno}: duplicate question id {qid!r}")
        seen.add(qid)
        labels.append((qid, cluster))
    if not labels:
        raise DataError(f"{file_path.name}: no labels")
    return labels


def write_embedding_file(
    path: str | Path,
    type_ids: list[str],
    vectors: np.ndarray,
    comments: tuple[str, ...] = (),
) -> None:
    """Write the embedding file format: a ``#dims <d> kind <kind>`` header,
    optional comment lines, then one tab-separated row per input id."""
    if vectors.ndim != 2 or len(type_ids) != vectors.shape[0]:
        raise ValueError("need one vector row per type id")
    file_path = Path(path)
    lines = [f"#dims {vectors.shape[1]} kind {OUTPUT_KIND}"]
    lines.extend(f"#{comment}" for comment in comments)
    for type_id, row in zip(type_ids, vectors):
        lines.append(type_id + "\t" + "\t".join(repr(float(v)) for v in row))
    tmp_path = file_path.with_name(file_path.name + ".tmp")
    tmp_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    os.replace(tmp_path, file_path)


def _load_tokenizer_and(model_name: str, loader, **kwargs):
    try:
        tokenizer = AutoTokenizer.from_pretrained(model_name)
        model = loader.from_pretrained(model_name, **kwargs)
    except SidecarError:
        raise
    except Exception as exc:  # transformers raises a zoo of types here
        raise ModelError(f"cannot load encoder {model_name!r}: {exc}") from exc
    return tokenizer, model


def _pool_hidden(hidden: torch.Tensor, mask: torch.Tensor, pooling: str) -> torch.Tensor:
    if pooling == "cls":
        return hidden[:, 0, :]
    weights = mask.unsqueeze(-1).to(hidden.dtype)
    totals = (hidden * weights).sum(dim=1)
    counts = weights.sum(dim=1).clamp(min=1.0)
    return totals / counts


def _encode_documents(
    tokenizer, model, documents: list[tuple[str, str]], pooling: str, max_length: int
) -> np.ndarray:
    texts = [text for _, text in documents]
    empty = [type_id for type_id, text in documents if not text.strip()]
    if empty:
        log.warning(
            "%d empty document(s) encoded from padding-only input (e.g. %s)",
            len(empty),
            empty[0],
        )
    lengths = tokenizer(texts, truncation=False, padding=False)["input_ids"]
    over = [documents[i][0] for i, ids in enumerate(lengths) if len(ids) > max_length]
    if over:
        log.warning(
            "%d document(s) longer than %d tokens were truncated (e.g. %s)",
            len(over),
            max_length,
            over[0],
        )
    model.eval()
    chunks: list[np.ndarray] = []
    with torch.no_grad():
        for start in range(0, len(texts), ENCODE_BATCH_SIZE):
            batch = texts[start : start + ENCODE_BATCH_SIZE]
            encoded = tokenizer(
                batch,
                truncation=True,
                max_length=max_length,
                padding=True,
                return_tensors="pt",
            )
            hidden = model(**encoded).last_hidden_state
            pooled = _pool_hidden(hidden, encoded["attention_mask"], pooling)
            chunks.append(pooled.to(torch.float64).cpu().numpy())
    matrix = np.vstack(chunks)
    if not np.all(np.isfinite(matrix)):
        raise ModelError("encoder produced non-finite embedding values")
    return matrix


def encode_descriptions(job: EncodeJob) -> Path:
    """Encode every document and write the embedding file; row order
    follows the input file.  Inference is deterministic: fixed seed,
    eval mode, no dropout."""
    job.validate()
    if job.finetune:
        return finetune_then_encode(job)
    documents = read_description_documents(job.input_path)
    tokenizer, model = _load_tokenizer_and(job.model_name, AutoModel)
    torch.manual_seed(job.seed)
    matrix = _encode_documents(tokenizer, model, documents, job.pooling, job.max_length)
    write_embedding_file(job.output_path, [t for t, _ in documents], matrix)
    log.info("encoded %d document(s), dim %d", matrix.shape[0], matrix.shape[1])
    return Path(job.output_path)


def finetune_then_encode(job: EncodeJob) -> Path:
    """Train a question-to-cluster classifier on top of the encoder,
    then embed the documents with the tuned encoder body.  The training
    configuration is echoed into the output header as comments."""
    job.validate()
    if not job.finetune:
        raise ConfigError("job does not request fine-tuning")
    documents = read_description_documents(job.input_path)
    questions = read_question_texts(job.questions_path)
    labels = read_cluster_labels(job.labels_path)
    unknown = [qid for qid, _ in labels if qid not in questions]
    if unknown:
        raise DataError(
            f"label file references {len(unknown)} unknown question id(s) (e.g. {unknown[0]!r})"
        )
    pairs = [(questions[qid], cluster) for qid, cluster in labels]
    num_labels = max(cluster for _, cluster in pairs) + 1

    torch.manual_seed(job.seed)
    tokenizer, classifier = _load_tokenizer_and(
        job.model_name, AutoModelForSequenceClassification, num_labels=num_labels
    )
    optimizer = torch.optim.AdamW(classifier.parameters(), lr=job.learning_rate)
    shuffle = torch.Generator().manual_seed(job.seed)
    classifier.train()
    for epoch in range(job.epochs):
        order = torch.randperm(len(pairs), generator=shuffle).tolist()
        epoch_loss = 0.0
        for start in range(0, len(order), job.batch_size):
            chunk = [pairs[i] for i in order[start : start + job.batch_size]]
            encoded = tokenizer(
                [text for text, _ in chunk],
                truncation=True,
                max_length=job.max_length,
                padding=True,
                return_tensors="pt",
            )
            targets = torch.tensor([cluster for _, cluster in chunk])
            loss = classifier(**encoded, labels=targets).loss
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            epoch_loss += float(loss.detach())
        log.info("fine-tune epoch %d/%d, summed loss %.4f", epoch + 1, job.epochs, epoch_loss)

    matrix = _encode_documents(
        tokenizer, classifier.base_model, documents, job.pooling, job.max_length
    )
    comments = (
        f"finetune epochs={job.epochs} lr={job.learning_rate} seed={job.seed}",
    )
    write_embedding_file(job.output_path, [t for t, _ in documents], matrix, comments)
    log.info(
        "fine-tuned on %d labeled question(s) over %d cluster(s), encoded %d document(s)",
        len(pairs),
        num_labels,
        matrix.shape[0],
    )
    return Path(job.output_path)
