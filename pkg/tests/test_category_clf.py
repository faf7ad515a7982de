import numpy as np
import pytest

from xtypes.category_clf import (
    CATEGORY_ORDER,
    CategoryModel,
    category_accuracy,
    category_scores,
    predict_category,
    train_category,
)
from xtypes.dataset import CoarseCategory, Question, QuestionDataset
from xtypes.errors import DataError
from xtypes.linear import LinearModel, TrainConfig
from xtypes.matcher import QuestionFeaturizer


def category_dataset():
    rows = [
        (CoarseCategory.RESOURCE, "which city lies variant{}"),
        (CoarseCategory.BOOLEAN, "is the lake really there variant{}"),
        (CoarseCategory.NUMBER, "how many bridges cross variant{}"),
        (CoarseCategory.STRING, "what do people call variant{}"),
        (CoarseCategory.DATE, "when did the town reach variant{}"),
    ]
    questions = []
    for i in range(15):
        for j, (cat, template) in enumerate(rows):
            types = ("City",) if cat is CoarseCategory.RESOURCE else ()
            questions.append(Question(f"q{i}_{j}", template.format(i), cat, types))
    return QuestionDataset(questions=questions)


def test_category_order_is_stable():
    assert [c.value for c in CATEGORY_ORDER] == [
        "boolean",
        "number",
        "string",
        "date",
        "resource",
    ]


def test_trained_model_separates_keyword_categories():
    data = category_dataset()
    featurizer = QuestionFeaturizer.fit(data)
    model = train_category(data, featurizer)
    assert category_accuracy(model, featurizer, data) >= 0.99


def test_predict_returns_category_enum():
    data = category_dataset()
    featurizer = QuestionFeaturizer.fit(data)
    model = train_category(data, featurizer)
    got = predict_category(model, featurizer, Question("x", "how many rivers", None, ()))
    assert got is CoarseCategory.NUMBER


def test_resource_wins_exact_ties():
    # All scores equal: resource takes the tie even though it sorts last.
    featurizer = QuestionFeaturizer.fit(category_dataset())
    models = [LinearModel(np.zeros(featurizer.dim), 0.0) for _ in CATEGORY_ORDER]
    model = CategoryModel(models=models, config=TrainConfig())
    scores = category_scores(model, featurizer, Question("x", "anything", None, ()))
    assert np.all(scores == scores[0])
    got = predict_category(model, featurizer, Question("x", "anything", None, ()))
    assert got is CoarseCategory.RESOURCE


def test_non_resource_tie_breaks_by_order():
    featurizer = QuestionFeaturizer.fit(category_dataset())
    dim = featurizer.dim
    # Boolean and number tied on top; resource well below them.
    biases = {
        CoarseCategory.BOOLEAN: 2.0,
        CoarseCategory.NUMBER: 2.0,
        CoarseCategory.STRING: -5.0,
        CoarseCategory.DATE: -5.0,
        CoarseCategory.RESOURCE: -5.0,
    }
    models = [LinearModel(np.zeros(dim), biases[c]) for c in CATEGORY_ORDER]
    model = CategoryModel(models=models, config=TrainConfig())
    got = predict_category(model, featurizer, Question("x", "anything", None, ()))
    assert got is CoarseCategory.BOOLEAN


def test_single_category_training_fatal():
    questions = [
        Question(f"q{i}", f"is it real variant{i}", CoarseCategory.BOOLEAN, ())
        for i in range(10)
    ]
    data = QuestionDataset(questions=questions)
    featurizer = QuestionFeaturizer.fit(data)
    with pytest.raises(DataError, match="categor"):
        train_category(data, featurizer)


def test_unlabeled_questions_ignored_in_training():
    labeled = category_dataset()
    with_unlabeled = QuestionDataset(
        questions=list(labeled.questions)
        + [Question("u1", "mystery text here", None, ())]
    )
    featurizer = QuestionFeaturizer.fit(labeled)
    a = train_category(labeled, featurizer)
    b = train_category(with_unlabeled, featurizer)
    for ma, mb in zip(a.models, b.models):
        assert np.array_equal(ma.weights, mb.weights)


def test_model_roundtrip():
    data = category_dataset()
    featurizer = QuestionFeaturizer.fit(data)
    model = train_category(data, featurizer)
    again = CategoryModel.from_dict(model.to_dict())
    q = Question("x", "when did it happen", None, ())
    assert np.array_equal(
        category_scores(model, featurizer, q), category_scores(again, featurizer, q)
    )


def test_accuracy_counts_only_labeled():
    data = category_dataset()
    featurizer = QuestionFeaturizer.fit(data)
    model = train_category(data, featurizer)
    padded = QuestionDataset(
        questions=list(data.questions) + [Question("u", "no label", None, ())]
    )
    assert category_accuracy(model, featurizer, padded) == category_accuracy(
        model, featurizer, data
    )
