"""Coarse answer-category classifier: boolean, number, string, date, or
resource.  Five one-vs-rest logistic models over TF-IDF question features;
argmax wins, ties fall back to resource (the dominant class)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import CATEGORY_ORDER, CoarseCategory, Question, QuestionDataset
from .errors import DataError
from .linear import LinearModel, TrainConfig, fit_binary_logistic
from .matcher import QuestionFeaturizer

_RESOURCE_INDEX = CATEGORY_ORDER.index(CoarseCategory.RESOURCE)


@dataclass
class CategoryModel:
    """One binary model per coarse category, in CATEGORY_ORDER."""

    models: list[LinearModel]
    config: TrainConfig

    def __post_init__(self) -> None:
        if len(self.models) != len(CATEGORY_ORDER):
            raise ValueError(f"expected {len(CATEGORY_ORDER)} per-category models")

    def to_dict(self) -> dict:
        return {
            "categories": [str(c) for c in CATEGORY_ORDER],
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
    def from_dict(cls, payload: dict) -> "CategoryModel":
        stored = [str(c) for c in payload["categories"]]
        if stored != [str(c) for c in CATEGORY_ORDER]:
            raise DataError("category model was saved with a different category order")
        return cls(
            models=[LinearModel.from_dict(m) for m in payload["models"]],
            config=TrainConfig(**payload["config"]),
        )


def train_category(
    train: QuestionDataset,
    featurizer: QuestionFeaturizer,
    config: TrainConfig = TrainConfig(),
) -> CategoryModel:
    labeled = train.labeled_questions()
    if not labeled:
        raise DataError("no category-labeled questions to train on")
    present = {q.category for q in labeled}
    if len(present) < 2:
        raise DataError(
            f"training data has a single category ({next(iter(present))}); need at least two"
        )
    features = featurizer.featurize_batch(labeled)
    models = []
    for offset, category in enumerate(CATEGORY_ORDER):
        labels = np.array([1.0 if q.category is category else 0.0 for q in labeled])
        seeded = TrainConfig(
            epochs=config.epochs,
            learning_rate=config.learning_rate,
            l2=config.l2,
            batch_size=config.batch_size,
            seed=config.seed + offset,
        )
        models.append(fit_binary_logistic(features, labels, seeded))
    return CategoryModel(models=models, config=config)


def category_scores(
    model: CategoryModel, featurizer: QuestionFeaturizer, question: Question
) -> np.ndarray:
    features = featurizer.featurize(question.text)
    return np.array([m.predict_proba(features) for m in model.models], dtype=np.float64)


def predict_category(
    model: CategoryModel, featurizer: QuestionFeaturizer, question: Question
) -> CoarseCategory:
    scores = category_scores(model, featurizer, question)
    best = float(np.max(scores))
    # Exact score ties resolve to resource when it participates in the tie.
    if scores[_RESOURCE_INDEX] == best:
        return CoarseCategory.RESOURCE
    return CATEGORY_ORDER[int(np.argmax(scores))]


def category_accuracy(
    model: CategoryModel, featurizer: QuestionFeaturizer, dataset: QuestionDataset
) -> float:
    labeled = dataset.labeled_questions()
    if not labeled:
        return 0.0
    hits = sum(
        1 for q in labeled if predict_category(model, featurizer, q) is q.category
    )
    return hits / len(labeled)
