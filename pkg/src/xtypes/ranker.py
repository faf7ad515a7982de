"""Label-ranking stage and score fusion.

For every type, a one-vs-all logistic ranker is trained inside its
cluster: the training pool is restricted to resource questions that have
at least one gold type in that cluster, so each ranker only has to
separate its type from the cluster's other types.  The per-type score
h(q, t) is fused with the cluster score m(q, c) by a two-feature logistic
model fitted on held-out validation data, and the fused score orders the
final top-k list.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .category_clf import CategoryModel, predict_category
from .clustering import ClusterModel
from .dataset import CoarseCategory, Question, QuestionDataset
from .errors import DataError
from .linear import LinearModel, TrainConfig, fit_binary_logistic, sigmoid
from .matcher import ClusterScorer, QuestionFeaturizer

log = logging.getLogger(__name__)

DEFAULT_CLUSTERS_OPENED = 3
DEFAULT_TOP_K = 10
FUSION_NEGATIVES_PER_POSITIVE = 10


def _constant_model(n_positive: int, pool_size: int, dim: int) -> LinearModel:
    """Ranker for a degenerate pool: zero weights, bias at the smoothed
    positive rate.  An all-positive pool lands above 0.5, an all-negative
    pool below."""
    rate = (n_positive + 0.5) / (pool_size + 1.0)
    return LinearModel(weights=np.zeros(dim), bias=math.log(rate / (1.0 - rate)))


@dataclass
class RankerModel:
    """One binary model per type, tagged with the cluster it was trained in."""

    type_clusters: dict[str, int]
    models: dict[str, LinearModel]
    config: TrainConfig

    def __post_init__(self) -> None:
        if set(self.type_clusters) != set(self.models):
            raise ValueError("ranker models must cover exactly the clustered types")

    def score_type(self, type_id: str, features: np.ndarray) -> float:
        return float(sigmoid(self.models[type_id].decision(features)))

    def to_dict(self) -> dict:
        return {
            "config": {
                "epochs": self.config.epochs,
                "learning_rate": self.config.learning_rate,
                "l2": self.config.l2,
                "batch_size": self.config.batch_size,
                "seed": self.config.seed,
            },
            "types": {
                t: {"cluster": self.type_clusters[t], "model": self.models[t].to_dict()}
                for t in sorted(self.models)
            },
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "RankerModel":
        type_clusters = {}
        models = {}
        for type_id, entry in payload["types"].items():
            type_clusters[type_id] = int(entry["cluster"])
            models[type_id] = LinearModel.from_dict(entry["model"])
        return cls(
            type_clusters=type_clusters,
            models=models,
            config=TrainConfig(**payload["config"]),
        )


def train_ranker(
    train: QuestionDataset,
    cm: ClusterModel,
    featurizer: QuestionFeaturizer,
    config: TrainConfig = TrainConfig(),
) -> RankerModel:
    covered = set(cm.assignment)
    uncovered = sorted(train.type_vocabulary - covered)
    if uncovered:
        raise DataError(f"gold type {uncovered[0]} is not in the cluster model")

    resource = [
        q
        for q in train.questions
        if q.category is CoarseCategory.RESOURCE and q.gold_types
    ]
    features = featurizer.featurize_batch(resource)
    question_clusters = [
        frozenset(cm.assignment[t] for t in q.gold_types) for q in resource
    ]

    type_clusters: dict[str, int] = {}
    models: dict[str, LinearModel] = {}
    for offset, type_id in enumerate(sorted(cm.assignment)):
        cluster = cm.assignment[type_id]
        type_clusters[type_id] = cluster
        pool = [i for i, clusters in enumerate(question_clusters) if cluster in clusters]
        labels = np.array(
            [1.0 if type_id in resource[i].gold_types else 0.0 for i in pool]
        )
        n_positive = int(labels.sum())
        if not pool or n_positive == 0 or n_positive == len(pool):
            log.warning(
                "type %s: degenerate pool (%d positives of %d); using constant ranker",
                type_id,
                n_positive,
                len(pool),
            )
            models[type_id] = _constant_model(n_positive, len(pool), featurizer.dim)
            continue
        seeded = TrainConfig(
            epochs=config.epochs,
            learning_rate=config.learning_rate,
            l2=config.l2,
            batch_size=config.batch_size,
            seed=config.seed + offset,
        )
        models[type_id] = fit_binary_logistic(features[pool], labels, seeded)
    return RankerModel(type_clusters=type_clusters, models=models, config=config)


@dataclass
class FusionModel:
    """Logistic combiner sigmoid(w0 + w1*m + w2*h).  Kept monotone in both
    inputs: a fit that lands on a negative slope is redone with the slopes
    projected to be non-negative."""

    w0: float
    w1: float
    w2: float
    fitted_on_validation: bool = True
    degenerate: bool = False

    def fuse(self, m: float, h: float) -> float:
        return float(sigmoid(self.w0 + self.w1 * m + self.w2 * h))

    def to_dict(self) -> dict:
        return {
            "w0": self.w0,
            "w1": self.w1,
            "w2": self.w2,
            "fitted_on_validation": self.fitted_on_validation,
            "degenerate": self.degenerate,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "FusionModel":
        return cls(
            w0=float(payload["w0"]),
            w1=float(payload["w1"]),
            w2=float(payload["w2"]),
            fitted_on_validation=bool(payload["fitted_on_validation"]),
            degenerate=bool(payload["degenerate"]),
        )


def _top_clusters(m_scores: np.ndarray, b: int) -> list[int]:
    b = max(1, min(b, m_scores.shape[0]))
    # Stable sort so equal scores open the lower-numbered cluster first.
    order = np.argsort(-m_scores, kind="stable")
    return [int(c) for c in order[:b]]


def fit_fusion(
    validation: QuestionDataset,
    scorer: ClusterScorer,
    rm: RankerModel,
    cm: ClusterModel,
    featurizer: QuestionFeaturizer,
    b: int = DEFAULT_CLUSTERS_OPENED,
    config: TrainConfig = TrainConfig(),
) -> FusionModel:
    """Fit the combiner on (m, h) pairs harvested from the top-b clusters of
    each validation question.  Negatives are capped per question by seeded
    subsampling to keep the pair set balanced."""
    resource = [
        q
        for q in validation.questions
        if q.category is CoarseCategory.RESOURCE and q.gold_types
    ]
    if not resource:
        raise DataError("fusion fitting needs at least one resource question with gold types")

    rng = np.random.default_rng(config.seed)
    rows: list[tuple[float, float]] = []
    labels: list[float] = []
    for question in resource:
        m_scores = scorer.score(question)
        features = featurizer.featurize(question.text)
        gold = set(question.gold_types)
        positives: list[tuple[float, float]] = []
        negatives: list[tuple[float, float]] = []
        for cluster in _top_clusters(m_scores, b):
            m_value = float(m_scores[cluster])
            for type_id in cm.members_of(cluster):
                pair = (m_value, rm.score_type(type_id, features))
                if type_id in gold:
                    positives.append(pair)
                else:
                    negatives.append(pair)
        cap = max(FUSION_NEGATIVES_PER_POSITIVE, FUSION_NEGATIVES_PER_POSITIVE * len(positives))
        if len(negatives) > cap:
            chosen = rng.choice(len(negatives), size=cap, replace=False)
            negatives = [negatives[i] for i in sorted(chosen)]
        for pair in positives:
            rows.append(pair)
            labels.append(1.0)
        for pair in negatives:
            rows.append(pair)
            labels.append(0.0)

    if not rows or all(v == 0.0 for v in labels) or all(v == 1.0 for v in labels):
        log.warning("fusion pair set is degenerate; falling back to equal-weight combiner")
        return FusionModel(w0=-1.0, w1=1.0, w2=1.0, fitted_on_validation=False)

    features = np.array(rows, dtype=np.float64)
    target = np.array(labels, dtype=np.float64)
    fitted = fit_binary_logistic(features, target, config)
    if fitted.weights[0] < 0.0 or fitted.weights[1] < 0.0:
        log.warning("fusion slopes came out negative; refitting with non-negative projection")
        fitted = fit_binary_logistic(
            features, target, config, nonnegative=np.array([True, True])
        )
    w1 = float(fitted.weights[0])
    w2 = float(fitted.weights[1])
    degenerate = w1 == 0.0 and w2 == 0.0
    if degenerate:
        log.warning("fusion fit is constant (both slopes zero); flagged as degenerate")
    return FusionModel(
        w0=float(fitted.bias), w1=w1, w2=w2, fitted_on_validation=True, degenerate=degenerate
    )


@dataclass
class RankedPrediction:
    question_id: str
    category: CoarseCategory
    ranked_types: list[tuple[str, float]] = field(default_factory=list)

    def __post_init__(self) -> None:
        scores = [s for _, s in self.ranked_types]
        if any(b > a for a, b in zip(scores, scores[1:])):
            raise ValueError("ranked scores must be non-increasing")
        type_ids = [t for t, _ in self.ranked_types]
        if len(set(type_ids)) != len(type_ids):
            raise ValueError("ranked types must be unique")
        if self.category is not CoarseCategory.RESOURCE and self.ranked_types:
            raise ValueError("only resource predictions carry ranked types")


def predict_topk(
    question: Question,
    category_model: CategoryModel,
    featurizer: QuestionFeaturizer,
    scorer: ClusterScorer,
    rm: RankerModel,
    cm: ClusterModel,
    fusion: FusionModel,
    b: int = DEFAULT_CLUSTERS_OPENED,
    k_out: int = DEFAULT_TOP_K,
) -> RankedPrediction:
    """Gate on the coarse category, open the b best-matching clusters, fuse
    scores for every type inside them, and keep the top k_out."""
    for handle, name in (
        (category_model, "category model"),
        (rm, "ranker model"),
        (cm, "cluster model"),
        (fusion, "fusion model"),
    ):
        if handle is None:
            raise ValueError(f"predict_topk called without a trained {name}")
    if k_out < 1:
        raise ValueError("k_out must be >= 1")
    category = predict_category(category_model, featurizer, question)
    if category is not CoarseCategory.RESOURCE:
        return RankedPrediction(question_id=question.id, category=category)

    m_scores = scorer.score(question)
    if m_scores.shape[0] != cm.k:
        raise DataError(
            f"cluster score vector has length {m_scores.shape[0]}, cluster model has k={cm.k}"
        )
    features = featurizer.featurize(question.text)
    candidates: list[tuple[float, float, str]] = []
    for cluster in _top_clusters(m_scores, b):
        m_value = float(m_scores[cluster])
        for type_id in cm.members_of(cluster):
            fused = fusion.fuse(m_value, rm.score_type(type_id, features))
            candidates.append((fused, m_value, type_id))
    candidates.sort(key=lambda c: (-c[0], -c[1], c[2]))
    ranked = [(type_id, fused) for fused, _, type_id in candidates[:k_out]]
    return RankedPrediction(question_id=question.id, category=category, ranked_types=ranked)
