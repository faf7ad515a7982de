import numpy as np
import pytest

from xtypes.clustering import fit_kmeans
from xtypes.dataset import CoarseCategory, Question, QuestionDataset
from xtypes.errors import DataError
from xtypes.linear import TrainConfig
from xtypes.matcher import (
    ClusterScorer,
    MatcherModel,
    QuestionFeaturizer,
    cluster_positives,
    import_external_scores,
    score_clusters,
    train_matcher,
)
from xtypes.type_repr import KIND_LOADED, TypeMatrix


def keyword_dataset():
    """Two keyword families, one per cluster: 'river' types vs 'person' types."""
    questions = []
    for i in range(20):
        questions.append(
            Question(f"r{i}", f"which river flows variant{i}", CoarseCategory.RESOURCE, ("River",))
        )
        questions.append(
            Question(f"p{i}", f"which person wrote variant{i}", CoarseCategory.RESOURCE, ("Writer",))
        )
    return QuestionDataset(questions=questions)


def two_cluster_model():
    matrix = TypeMatrix(
        ("River", "Writer"), np.array([[0.0, 1.0], [1.0, 0.0]]), KIND_LOADED
    )
    return fit_kmeans(matrix, k=2, seed=0)


def test_featurizer_deterministic_and_ignores_unseen():
    train = keyword_dataset()
    featurizer = QuestionFeaturizer.fit(train)
    a = featurizer.featurize("which river flows somewhere")
    b = featurizer.featurize("which river flows somewhere")
    assert np.array_equal(a, b)
    with_unseen = featurizer.featurize("which river flows zzznovel")
    assert np.array_equal(a, with_unseen)


def test_featurizer_roundtrip():
    featurizer = QuestionFeaturizer.fit(keyword_dataset())
    again = QuestionFeaturizer.from_dict(featurizer.to_dict())
    text = "which person wrote things"
    assert np.array_equal(featurizer.featurize(text), again.featurize(text))


def test_cluster_positives_multi_label():
    cm = two_cluster_model()
    q = Question("q", "both", CoarseCategory.RESOURCE, ("River", "Writer"))
    assert cluster_positives(q, cm) == frozenset({cm.assignment["River"], cm.assignment["Writer"]})


def test_train_matcher_separable_accuracy():
    train = keyword_dataset()
    cm = two_cluster_model()
    featurizer = QuestionFeaturizer.fit(train)
    mm = train_matcher(train, cm, featurizer)
    hits = 0
    for q in train.questions:
        scores = score_clusters(mm, featurizer, q)
        if int(np.argmax(scores)) in cluster_positives(q, cm):
            hits += 1
    assert hits / len(train.questions) >= 0.99


def test_scores_in_open_unit_interval():
    train = keyword_dataset()
    cm = two_cluster_model()
    featurizer = QuestionFeaturizer.fit(train)
    mm = train_matcher(train, cm, featurizer)
    scores = score_clusters(mm, featurizer, Question("x", "which river", None, ()))
    assert np.all(scores > 0.0) and np.all(scores < 1.0)


def test_zero_weights_give_half_scores():
    featurizer = QuestionFeaturizer.fit(keyword_dataset())
    from xtypes.linear import LinearModel

    mm = MatcherModel(
        k=2,
        models=[LinearModel(np.zeros(featurizer.dim), 0.0) for _ in range(2)],
        config=TrainConfig(),
    )
    scores = score_clusters(mm, featurizer, Question("x", "anything here", None, ()))
    assert np.all(scores == 0.5)


def test_gold_type_outside_cluster_model_fatal():
    train = QuestionDataset(
        questions=[Question("q", "which thing", CoarseCategory.RESOURCE, ("Unknown",))]
    )
    cm = two_cluster_model()
    featurizer = QuestionFeaturizer.fit(train)
    with pytest.raises(DataError, match="Unknown"):
        train_matcher(train, cm, featurizer)


def test_unseen_tokens_do_not_change_scores():
    train = keyword_dataset()
    cm = two_cluster_model()
    featurizer = QuestionFeaturizer.fit(train)
    mm = train_matcher(train, cm, featurizer)
    base = score_clusters(mm, featurizer, Question("x", "which river flows", None, ()))
    noisy = score_clusters(mm, featurizer, Question("x", "which river flows qqqq zzzz", None, ()))
    assert np.array_equal(base, noisy)


def test_retraining_bit_reproducible():
    train = keyword_dataset()
    cm = two_cluster_model()
    featurizer = QuestionFeaturizer.fit(train)
    a = train_matcher(train, cm, featurizer)
    b = train_matcher(train, cm, featurizer)
    for ma, mb in zip(a.models, b.models):
        assert np.array_equal(ma.weights, mb.weights)
        assert ma.bias == mb.bias


def test_matcher_roundtrip():
    train = keyword_dataset()
    cm = two_cluster_model()
    featurizer = QuestionFeaturizer.fit(train)
    mm = train_matcher(train, cm, featurizer)
    again = MatcherModel.from_dict(mm.to_dict())
    q = Question("x", "which person wrote", None, ())
    assert np.array_equal(
        score_clusters(mm, featurizer, q), score_clusters(again, featurizer, q)
    )


def score_file(tmp_path, text):
    path = tmp_path / "scores.tsv"
    path.write_text(text)
    return path


def test_import_external_scores(tmp_path):
    path = score_file(tmp_path, "#k 2\nq1\t0.9\t0.1\nq2\t0.2\t0.8\n")
    scores = import_external_scores(path, 2)
    assert np.array_equal(scores["q1"], np.array([0.9, 0.1]))
    assert set(scores) == {"q1", "q2"}


def test_import_rejects_wrong_length(tmp_path):
    path = score_file(tmp_path, "#k 2\nq1\t0.9\n")
    with pytest.raises(DataError, match="scores.tsv:2"):
        import_external_scores(path, 2)


def test_import_rejects_wrong_k(tmp_path):
    path = score_file(tmp_path, "#k 3\nq1\t0.1\t0.2\t0.3\n")
    with pytest.raises(DataError, match="does not match"):
        import_external_scores(path, 2)


def test_import_rejects_nan_and_range(tmp_path):
    with pytest.raises(DataError, match="non-finite"):
        import_external_scores(score_file(tmp_path, "#k 1\nq1\tnan\n"), 1)
    with pytest.raises(DataError, match=r"\[0, 1\]"):
        import_external_scores(score_file(tmp_path, "#k 1\nq1\t1.5\n"), 1)


def test_import_rejects_duplicates(tmp_path):
    path = score_file(tmp_path, "#k 1\nq1\t0.5\nq1\t0.6\n")
    with pytest.raises(DataError, match="duplicate"):
        import_external_scores(path, 1)


def test_scorer_prefers_external_and_falls_back():
    train = keyword_dataset()
    cm = two_cluster_model()
    featurizer = QuestionFeaturizer.fit(train)
    mm = train_matcher(train, cm, featurizer)
    external = {"r0": np.array([0.123, 0.456])}
    scorer = ClusterScorer(mm, featurizer, external)
    assert np.array_equal(scorer.score(train.by_id("r0")), external["r0"])
    fallback = scorer.score(train.by_id("p0"))
    assert np.array_equal(fallback, score_clusters(mm, featurizer, train.by_id("p0")))


def test_scorer_without_matcher_requires_coverage():
    scorer = ClusterScorer(None, None, {"q1": np.array([1.0])})
    with pytest.raises(DataError, match="q2"):
        scorer.score(Question("q2", "text", None, ()))


def test_external_scores_equal_builtin_give_same_downstream():
    train = keyword_dataset()
    cm = two_cluster_model()
    featurizer = QuestionFeaturizer.fit(train)
    mm = train_matcher(train, cm, featurizer)
    external = {
        q.id: score_clusters(mm, featurizer, q) for q in train.questions
    }
    with_external = ClusterScorer(mm, featurizer, external)
    builtin = ClusterScorer(mm, featurizer)
    for q in train.questions:
        assert np.array_equal(with_external.score(q), builtin.score(q))
