import numpy as np
import pytest

from xtypes.category_clf import train_category
from xtypes.clustering import fit_kmeans
from xtypes.dataset import CoarseCategory, Question, QuestionDataset
from xtypes.errors import DataError
from xtypes.linear import TrainConfig
from xtypes.matcher import ClusterScorer, QuestionFeaturizer, train_matcher
from xtypes.ranker import (
    FusionModel,
    RankedPrediction,
    RankerModel,
    fit_fusion,
    predict_topk,
    train_ranker,
)
from xtypes.type_repr import KIND_LOADED, TypeMatrix

TYPE_WORDS = {
    "River": "river",
    "Lake": "lake",
    "Writer": "writer",
    "Painter": "painter",
}


def four_type_clusters():
    """Two tight pairs: {River, Lake} and {Writer, Painter}."""
    matrix = TypeMatrix(
        ("Lake", "Painter", "River", "Writer"),
        np.array([[0.0, 0.1], [1.0, 0.1], [0.0, 0.0], [1.0, 0.0]]),
        KIND_LOADED,
    )
    return fit_kmeans(matrix, k=2, seed=0)


def ranked_dataset(per_type=12):
    questions = []
    for i in range(per_type):
        for j, (type_id, word) in enumerate(sorted(TYPE_WORDS.items())):
            questions.append(
                Question(
                    f"q{i}_{j}",
                    f"which {word} has the feature variant{i}",
                    CoarseCategory.RESOURCE,
                    (type_id,),
                )
            )
    for i in range(per_type):
        questions.append(
            Question(f"b{i}", f"is the {('river' if i % 2 else 'lake')} deep variant{i}",
                     CoarseCategory.BOOLEAN, ())
        )
    return QuestionDataset(questions=questions)


def trained_stack():
    train = ranked_dataset()
    cm = four_type_clusters()
    featurizer = QuestionFeaturizer.fit(train)
    mm = train_matcher(train, cm, featurizer)
    rm = train_ranker(train, cm, featurizer)
    return train, cm, featurizer, mm, rm


def test_ranker_separates_types_within_cluster():
    train, cm, featurizer, _, rm = trained_stack()
    for type_id, word in TYPE_WORDS.items():
        features = featurizer.featurize(f"which {word} has the feature")
        own = rm.score_type(type_id, features)
        for other in cm.members_of(cm.assignment[type_id]):
            if other != type_id:
                assert own > rm.score_type(other, features)


def test_ranker_rejects_uncovered_gold_type():
    cm = four_type_clusters()
    data = QuestionDataset(
        questions=[Question("q", "which thing", CoarseCategory.RESOURCE, ("Ghost",))]
    )
    featurizer = QuestionFeaturizer.fit(data)
    with pytest.raises(DataError, match="Ghost"):
        train_ranker(data, cm, featurizer)


def test_degenerate_pools_get_constant_rankers():
    # Only River questions exist, so inside River's cluster the pool is
    # all-positive for River and all-negative for Lake.
    cm = four_type_clusters()
    data = QuestionDataset(
        questions=[
            Question(f"q{i}", f"which river variant{i}", CoarseCategory.RESOURCE, ("River",))
            for i in range(6)
        ]
    )
    featurizer = QuestionFeaturizer.fit(data)
    rm = train_ranker(data, cm, featurizer)
    features = featurizer.featurize("which river")
    assert rm.score_type("River", features) > 0.5
    assert rm.score_type("Lake", features) < 0.5
    assert np.all(rm.models["River"].weights == 0.0)


def test_cluster_pools_are_isolated():
    # Questions whose gold lies wholly in the other cluster must not move
    # a type's ranker.
    cm = four_type_clusters()
    base_questions = [
        Question(f"r{i}", f"which river flows variant{i}", CoarseCategory.RESOURCE, ("River",))
        for i in range(6)
    ] + [
        Question(f"l{i}", f"which lake sits variant{i}", CoarseCategory.RESOURCE, ("Lake",))
        for i in range(6)
    ]
    extra = [
        Question(f"w{i}", f"which writer wrote variant{i}", CoarseCategory.RESOURCE, ("Writer",))
        for i in range(6)
    ]
    base = QuestionDataset(questions=base_questions)
    padded = QuestionDataset(questions=base_questions + extra)
    featurizer = QuestionFeaturizer.fit(padded)
    a = train_ranker(base, cm, featurizer)
    b = train_ranker(padded, cm, featurizer)
    for type_id in ("River", "Lake"):
        assert np.array_equal(a.models[type_id].weights, b.models[type_id].weights)
        assert a.models[type_id].bias == b.models[type_id].bias


def test_ranker_roundtrip():
    _, _, featurizer, _, rm = trained_stack()
    again = RankerModel.from_dict(rm.to_dict())
    features = featurizer.featurize("which painter painted")
    for type_id in TYPE_WORDS:
        assert again.score_type(type_id, features) == rm.score_type(type_id, features)
    assert again.type_clusters == rm.type_clusters


def test_ranker_model_coverage_check():
    with pytest.raises(ValueError, match="cover"):
        RankerModel(type_clusters={"A": 0}, models={}, config=TrainConfig())


def test_fusion_is_monotone_in_both_inputs():
    fusion = FusionModel(w0=-1.0, w1=2.0, w2=3.0)
    assert fusion.fuse(0.9, 0.5) > fusion.fuse(0.1, 0.5)
    assert fusion.fuse(0.5, 0.9) > fusion.fuse(0.5, 0.1)
    assert 0.0 < fusion.fuse(0.0, 0.0) < 1.0


def test_fit_fusion_on_clean_validation():
    train, cm, featurizer, mm, rm = trained_stack()
    scorer = ClusterScorer(mm, featurizer)
    fusion = fit_fusion(train, scorer, rm, cm, featurizer, b=2)
    assert fusion.fitted_on_validation
    assert not fusion.degenerate
    assert fusion.w1 >= 0.0 and fusion.w2 >= 0.0
    # Gold pairs should fuse above a clearly wrong pair.
    features = featurizer.featurize("which river has the feature")
    m_scores = scorer.score(train.by_id("q0_2"))
    gold_cluster = cm.assignment["River"]
    other_cluster = cm.assignment["Writer"]
    good = fusion.fuse(float(m_scores[gold_cluster]), rm.score_type("River", features))
    bad = fusion.fuse(float(m_scores[other_cluster]), rm.score_type("Writer", features))
    assert good > bad


def test_fit_fusion_requires_resource_questions():
    _, cm, featurizer, mm, rm = trained_stack()
    empty = QuestionDataset(
        questions=[Question("b", "is it", CoarseCategory.BOOLEAN, ())]
    )
    scorer = ClusterScorer(mm, featurizer)
    with pytest.raises(DataError, match="resource"):
        fit_fusion(empty, scorer, rm, cm, featurizer)


def test_fit_fusion_all_positive_pairs_falls_back():
    # Single-member clusters opened one at a time with perfect external
    # scores leave no negatives, so the fit cannot run.
    matrix = TypeMatrix(("A", "B"), np.array([[0.0, 0.0], [1.0, 1.0]]), KIND_LOADED)
    cm = fit_kmeans(matrix, k=2, seed=0)
    data = QuestionDataset(
        questions=[Question("q1", "which alpha", CoarseCategory.RESOURCE, ("A",))]
    )
    featurizer = QuestionFeaturizer.fit(data)
    rm = train_ranker(data, cm, featurizer)
    perfect = np.zeros(2)
    perfect[cm.assignment["A"]] = 1.0
    scorer = ClusterScorer(None, None, {"q1": perfect})
    fusion = fit_fusion(data, scorer, rm, cm, featurizer, b=1)
    assert not fusion.fitted_on_validation
    assert fusion.w1 == 1.0 and fusion.w2 == 1.0


def test_ranked_prediction_invariants():
    RankedPrediction("q", CoarseCategory.RESOURCE, [("A", 0.9), ("B", 0.9), ("C", 0.1)])
    with pytest.raises(ValueError, match="non-increasing"):
        RankedPrediction("q", CoarseCategory.RESOURCE, [("A", 0.1), ("B", 0.9)])
    with pytest.raises(ValueError, match="unique"):
        RankedPrediction("q", CoarseCategory.RESOURCE, [("A", 0.9), ("A", 0.8)])
    with pytest.raises(ValueError, match="resource"):
        RankedPrediction("q", CoarseCategory.BOOLEAN, [("A", 0.9)])


def full_prediction_stack():
    train, cm, featurizer, mm, rm = trained_stack()
    category_model = train_category(train, featurizer)
    scorer = ClusterScorer(mm, featurizer)
    fusion = fit_fusion(train, scorer, rm, cm, featurizer, b=2)
    return train, cm, featurizer, category_model, scorer, rm, fusion


def test_predict_topk_ranks_gold_first():
    train, cm, featurizer, category_model, scorer, rm, fusion = full_prediction_stack()
    for q in train.questions:
        if q.category is not CoarseCategory.RESOURCE:
            continue
        pred = predict_topk(q, category_model, featurizer, scorer, rm, cm, fusion, b=2)
        assert pred.category is CoarseCategory.RESOURCE
        assert pred.ranked_types[0][0] == q.gold_types[0]


def test_predict_topk_gates_non_resource():
    train, cm, featurizer, category_model, scorer, rm, fusion = full_prediction_stack()
    pred = predict_topk(
        train.by_id("b0"), category_model, featurizer, scorer, rm, cm, fusion, b=2
    )
    assert pred.category is CoarseCategory.BOOLEAN
    assert pred.ranked_types == []


def test_predict_topk_truncates_to_k_out():
    train, cm, featurizer, category_model, scorer, rm, fusion = full_prediction_stack()
    q = train.by_id("q0_2")
    pred = predict_topk(q, category_model, featurizer, scorer, rm, cm, fusion, b=2, k_out=2)
    assert len(pred.ranked_types) == 2


def test_predict_topk_b_opens_at_most_all_clusters():
    train, cm, featurizer, category_model, scorer, rm, fusion = full_prediction_stack()
    q = train.by_id("q0_2")
    wide = predict_topk(q, category_model, featurizer, scorer, rm, cm, fusion, b=99)
    assert {t for t, _ in wide.ranked_types} == set(TYPE_WORDS)


def test_predict_topk_tie_break_order():
    train, cm, featurizer, category_model, _, rm, _ = full_prediction_stack()
    # Constant fusion makes every fused score equal, so order falls back to
    # cluster score and then to the type id.
    flat_fusion = FusionModel(w0=0.0, w1=0.0, w2=0.0, degenerate=True)
    m = np.zeros(cm.k)
    hi = cm.assignment["River"]
    lo = cm.assignment["Writer"]
    m[hi] = 0.9
    m[lo] = 0.1
    scorer = ClusterScorer(None, None, {"q0_2": m})
    pred = predict_topk(
        train.by_id("q0_2"), category_model, featurizer, scorer, rm, cm, flat_fusion, b=2
    )
    got = [t for t, _ in pred.ranked_types]
    assert got == sorted(cm.members_of(hi)) + sorted(cm.members_of(lo))


def test_predict_topk_rejects_missing_models_and_bad_k_out():
    train, cm, featurizer, category_model, scorer, rm, fusion = full_prediction_stack()
    q = train.by_id("q0_2")
    with pytest.raises(ValueError, match="fusion"):
        predict_topk(q, category_model, featurizer, scorer, rm, cm, None)
    with pytest.raises(ValueError, match="k_out"):
        predict_topk(q, category_model, featurizer, scorer, rm, cm, fusion, k_out=0)


def test_predict_topk_rejects_wrong_score_width():
    train, cm, featurizer, category_model, _, rm, fusion = full_prediction_stack()
    scorer = ClusterScorer(None, None, {"q0_2": np.array([0.5, 0.5, 0.5])})
    with pytest.raises(DataError, match="k="):
        predict_topk(
            train.by_id("q0_2"), category_model, featurizer, scorer, rm, cm, fusion
        )
