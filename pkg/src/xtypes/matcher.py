"""Cluster-matching stage: per-cluster confidence that a question's answer
types live in that cluster.

The built-in matcher is one-vs-rest logistic regression over TF-IDF
question features.  Scores from an external model (e.g. a fine-tuned
transformer) can be imported from a score file and used in place of the
built-in scores for the questions they cover.
"""

from __future__ import annotations

import logging
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .clustering import ClusterModel
from .dataset import CoarseCategory, Question, QuestionDataset
from .errors import DataError
from .linear import LinearModel, TrainConfig, fit_binary_logistic
from .text import VocabularyIndex, tokenize

log = logging.getLogger(__name__)

_SCORE_HEADER_RE = re.compile(r"^#k (\d+)$")


@dataclass
class QuestionFeaturizer:
    """TF-IDF featurizer over training question texts.  Document frequency
    counts each question once per token; unseen tokens are dropped."""

    vocabulary: VocabularyIndex

    @classmethod
    def fit(cls, train: QuestionDataset) -> "QuestionFeaturizer":
        documents = (tokenize(q.text) for q in train.questions)
        return cls(vocabulary=VocabularyIndex.from_documents(documents))

    @property
    def dim(self) -> int:
        return len(self.vocabulary)

    def featurize(self, text: str) -> np.ndarray:
        # Raw tf * idf, deliberately not length-normalized: rare decisive
        # tokens keep their large idf scale, which the fixed-epoch gradient
        # descent training needs to build confident margins.
        vector = np.zeros(self.dim, dtype=np.float64)
        counts = Counter(tokenize(text))
        for token, count in counts.items():
            col = self.vocabulary.token_to_id.get(token)
            if col is not None:
                vector[col] = count * self.vocabulary.idf(col)
        return vector

    def featurize_batch(self, questions: list[Question]) -> np.ndarray:
        if not questions:
            return np.zeros((0, self.dim), dtype=np.float64)
        return np.vstack([self.featurize(q.text) for q in questions])

    def to_dict(self) -> dict:
        return self.vocabulary.to_dict()

    @classmethod
    def from_dict(cls, payload: dict) -> "QuestionFeaturizer":
        return cls(vocabulary=VocabularyIndex.from_dict(payload))


@dataclass
class MatcherModel:
    """One binary logistic model per cluster, all over the same features."""

    k: int
    models: list[LinearModel]
    config: TrainConfig

    def __post_init__(self) -> None:
        if len(self.models) != self.k:
            raise ValueError("matcher must hold exactly k per-cluster models")
        for model in self.models:
            if not np.all(np.isfinite(model.weights)) or not np.isfinite(model.bias):
                raise ValueError("matcher weights must be finite")

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "models": [m.to_dict() for m in self.models],
            "config": {
                "epochs": self.config.epochs,
                "learning_rate": self.config.learning_rate,
                "l2": self.config.l2,
                "batch_size": self.config.batch_size,
                "seed": self.config.seed,
            },
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "MatcherModel":
        return cls(
            k=int(payload["k"]),
            models=[LinearModel.from_dict(m) for m in payload["models"]],
            config=TrainConfig(**payload["config"]),
        )


def cluster_positives(question: Question, cm: ClusterModel) -> frozenset[int]:
    """Clusters a question is a positive example for: those holding at
    least one of its gold types."""
    return frozenset(cm.assignment[t] for t in question.gold_types if t in cm.assignment)


def train_matcher(
    train: QuestionDataset,
    cm: ClusterModel,
    featurizer: QuestionFeaturizer,
    config: TrainConfig = TrainConfig(),
) -> MatcherModel:
    """One-vs-rest training: a question is a positive for every cluster
    containing one of its gold types.  Training covers all questions in the
    dataset so negatives include non-resource questions."""
    covered = set(cm.assignment)
    for question in train.questions:
        missing = [t for t in question.gold_types if t not in covered]
        if missing:
            raise DataError(
                f"question {question.id}: gold type {missing[0]} is not in the cluster model"
            )
    questions = list(train.questions)
    features = featurizer.featurize_batch(questions)
    positive_sets = [cluster_positives(q, cm) for q in questions]
    models = []
    for cluster in range(cm.k):
        labels = np.array([1.0 if cluster in s else 0.0 for s in positive_sets])
        if not labels.any():
            log.warning("cluster %d has no positive training questions", cluster)
        seeded = TrainConfig(
            epochs=config.epochs,
            learning_rate=config.learning_rate,
            l2=config.l2,
            batch_size=config.batch_size,
            seed=config.seed + cluster,
        )
        models.append(fit_binary_logistic(features, labels, seeded))
    return MatcherModel(k=cm.k, models=models, config=config)


def score_clusters(
    mm: MatcherModel, featurizer: QuestionFeaturizer, question: Question
) -> np.ndarray:
    """Per-cluster sigmoid scores in (0,1).  Clusters are scored
    independently, not softmax-normalized, because one question can belong
    to several."""
    features = featurizer.featurize(question.text)
    return np.array([m.predict_proba(features) for m in mm.models], dtype=np.float64)


def import_external_scores(path: str | Path, k: int) -> dict[str, np.ndarray]:
    """Read a score file: ``#k <k>`` header then one
    ``question_id<TAB>s1..sk`` row per question.  Every score must be a
    finite float in [0,1]; duplicate ids are fatal."""
    file_path = Path(path)
    try:
        lines = file_path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise DataError(f"cannot read score file {file_path}: {exc}") from exc
    scores: dict[str, np.ndarray] = {}
    header_k = None
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if header_k is None:
            match = _SCORE_HEADER_RE.match(stripped)
            if match is None:
                raise DataError(f"{file_path.name}:{lineno}: expected '#k <k>' header first")
            header_k = int(match.group(1))
            if header_k != k:
                raise DataError(
                    f"{file_path.name}: header k={header_k} does not match cluster count {k}"
                )
            continue
        if stripped.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != k + 1:
            raise DataError(
                f"{file_path.name}:{lineno}: expected {k} scores, got {len(fields) - 1}"
            )
        question_id = fields[0]
        if question_id in scores:
            raise DataError(f"{file_path.name}:{lineno}: duplicate question id {question_id}")
        try:
            row = np.array([float(v) for v in fields[1:]], dtype=np.float64)
        except ValueError as exc:
            raise DataError(f"{file_path.name}:{lineno}: bad score value ({exc})") from None
        if not np.all(np.isfinite(row)):
            raise DataError(f"{file_path.name}:{lineno}: non-finite score")
        if np.any(row < 0.0) or np.any(row > 1.0):
            raise DataError(f"{file_path.name}:{lineno}: scores must lie in [0, 1]")
        scores[question_id] = row
    if header_k is None:
        raise DataError(f"{file_path.name}: empty score file")
    return scores


class ClusterScorer:
    """Serves m(q, c) vectors, preferring imported external scores and
    falling back to the built-in matcher for uncovered questions."""

    def __init__(
        self,
        mm: MatcherModel | None,
        featurizer: QuestionFeaturizer | None,
        external: dict[str, np.ndarray] | None = None,
    ) -> None:
        if mm is None and external is None:
            raise ValueError("need a trained matcher, external scores, or both")
        self.mm = mm
        self.featurizer = featurizer
        self.external = external or {}

    def score(self, question: Question) -> np.ndarray:
        found = self.external.get(question.id)
        if found is not None:
            return found
        if self.mm is None or self.featurizer is None:
            raise DataError(
                f"question {question.id} missing from external scores and no built-in matcher loaded"
            )
        return score_clusters(self.mm, self.featurizer, question)


def matcher_training_accuracy(
    mm: MatcherModel, featurizer: QuestionFeaturizer, train: QuestionDataset, cm: ClusterModel
) -> float:
    """Fraction of resource questions whose highest-scoring cluster holds a
    gold type.  Diagnostic only."""
    hits = 0
    total = 0
    for question in train.questions:
        if question.category is not CoarseCategory.RESOURCE or not question.gold_types:
            continue
        total += 1
        best = int(np.argmax(score_clusters(mm, featurizer, question)))
        if best in cluster_positives(question, cm):
            hits += 1
    return hits / total if total else 0.0
