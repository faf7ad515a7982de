"""Hierarchy-aware ranking metrics and run-level evaluation.

A predicted type earns gain 1/(1+d), where d is the undirected hierarchy
distance to the nearest gold type: exact hits score 1, a direct
parent/child 0.5, unreachable or unknown types 0.  NDCG@k discounts by
log2(rank+1) and normalizes by an ideal list of exact matches; MRR uses
binary relevance.  Two run modes: type_only scores the ranked types of
gold-resource questions; end_to_end also scores the coarse category of
boolean/literal questions and zeroes resource questions whose predicted
category is wrong.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

from .dataset import CoarseCategory, QuestionDataset, parse_category
from .errors import DataError
from .kg_store import TypeSystem
from .ranker import RankedPrediction

log = logging.getLogger(__name__)

MODE_TYPE_ONLY = "type_only"
MODE_END_TO_END = "end_to_end"
MODES = (MODE_TYPE_ONLY, MODE_END_TO_END)

METRIC_KEYS = ("ndcg@3", "ndcg@5", "ndcg@10", "mrr")
GAIN_FUNCTION_ID = "reciprocal_1plus_distance"

UNKNOWN_ID_THRESHOLD = 0.05


def gain(ts: TypeSystem, predicted: str, gold: set[str] | frozenset[str]) -> float:
    """Best closeness of the predicted type to any gold type."""
    if not gold or predicted not in ts:
        return 0.0
    best = 0.0
    for gold_type in gold:
        if gold_type not in ts:
            continue
        if gold_type == predicted:
            return 1.0
        d = ts.distance(predicted, gold_type)
        if d is not None:
            best = max(best, 1.0 / (1.0 + d))
    return best


def ndcg_at_k(
    ts: TypeSystem, ranked_types: list[str], gold: set[str] | frozenset[str], k: int
) -> float:
    """DCG over the first k predictions divided by the DCG of an ideal list
    of exact matches, clamped to 1 because partial-credit gains on deep
    rankings can overshoot the exact-match ideal."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not gold:
        raise ValueError("ndcg needs a non-empty gold set")
    dcg = 0.0
    for i, type_id in enumerate(ranked_types[:k], start=1):
        dcg += gain(ts, type_id, gold) / math.log2(i + 1)
    idcg = sum(1.0 / math.log2(i + 1) for i in range(1, min(k, len(gold)) + 1))
    return min(1.0, dcg / idcg)


def mrr(ranked_types: list[str], gold: set[str] | frozenset[str]) -> float:
    """Reciprocal rank of the first exact gold hit; 0 when there is none."""
    for i, type_id in enumerate(ranked_types, start=1):
        if type_id in gold:
            return 1.0 / i
    return 0.0


@dataclass
class EvalReport:
    mode: str
    metric_means: dict[str, float]
    per_question: dict[str, dict[str, float]]
    category_counts: dict[str, int]
    counts: dict[str, int]
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "metric_means": self.metric_means,
            "per_question": self.per_question,
            "category_counts": self.category_counts,
            "counts": self.counts,
            "config": self.config,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "EvalReport":
        return cls(
            mode=str(payload["mode"]),
            metric_means={k: float(v) for k, v in payload["metric_means"].items()},
            per_question={
                q: {k: float(v) for k, v in scores.items()}
                for q, scores in payload["per_question"].items()
            },
            category_counts={k: int(v) for k, v in payload["category_counts"].items()},
            counts={k: int(v) for k, v in payload["counts"].items()},
            config=dict(payload.get("config", {})),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )


def save_predictions(predictions: list[RankedPrediction], path: str | Path) -> None:
    """Write the submission-format JSON array.  Non-resource predictions
    echo their category in the type list."""
    records = []
    for prediction in predictions:
        if prediction.category is CoarseCategory.RESOURCE:
            type_list = [t for t, _ in prediction.ranked_types]
        else:
            type_list = [prediction.category.value]
        records.append(
            {
                "id": prediction.question_id,
                "category": prediction.category.value,
                "type": type_list,
            }
        )
    Path(path).write_text(json.dumps(records, indent=2) + "\n", encoding="utf-8")


def load_predictions(path: str | Path) -> dict[str, tuple[CoarseCategory, list[str]]]:
    """Read a predictions file into an id -> (category, ranked types) map."""
    file_path = Path(path)
    try:
        payload = json.loads(file_path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read predictions file {file_path}: {exc}") from exc
    if not isinstance(payload, list):
        raise DataError(f"{file_path.name}: predictions file must be a JSON array")
    predictions: dict[str, tuple[CoarseCategory, list[str]]] = {}
    for position, record in enumerate(payload):
        if not isinstance(record, dict) or "id" not in record or "category" not in record:
            raise DataError(f"{file_path.name}: record {position} needs 'id' and 'category'")
        qid = str(record["id"])
        if qid in predictions:
            raise DataError(f"{file_path.name}: duplicate prediction id {qid!r}")
        category = parse_category(str(record["category"]))
        raw_types = record.get("type") or []
        if not isinstance(raw_types, list):
            raise DataError(f"{file_path.name}: record {qid!r} 'type' must be a list")
        types = [str(t) for t in raw_types]
        if category is not CoarseCategory.RESOURCE:
            types = []
        else:
            deduped: list[str] = []
            seen = set()
            for t in types:
                if t not in seen:
                    seen.add(t)
                    deduped.append(t)
            types = deduped
        predictions[qid] = (category, types)
    return predictions


def evaluate_run(
    ts: TypeSystem,
    predictions: dict[str, tuple[CoarseCategory, list[str]]],
    gold: QuestionDataset,
    mode: str = MODE_TYPE_ONLY,
    primary_metric: str = "ndcg@10",
) -> EvalReport:
    """Score a prediction map against gold annotations.

    Questions without a prediction score 0 (counted).  Prediction ids
    absent from the gold set are tolerated up to 5% of the file, past
    which the pairing is assumed wrong and the run aborts.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if primary_metric not in METRIC_KEYS:
        raise ValueError(f"primary_metric must be one of {METRIC_KEYS}")

    gold_ids = {q.id for q in gold.questions}
    unknown = [qid for qid in predictions if qid not in gold_ids]
    if predictions and len(unknown) / len(predictions) > UNKNOWN_ID_THRESHOLD:
        raise DataError(
            f"{len(unknown)} of {len(predictions)} prediction ids are not in the gold set "
            f"(first: {unknown[0]!r}); check the file pairing"
        )
    if unknown:
        log.warning("%d prediction id(s) not in the gold set; ignored", len(unknown))

    per_question: dict[str, dict[str, float]] = {}
    category_counts: dict[str, int] = {}
    skipped_empty_gold = 0
    skipped_unlabeled = 0
    missing_prediction = 0

    for question in gold.questions:
        if question.category is None:
            skipped_unlabeled += 1
            continue
        is_resource = question.category is CoarseCategory.RESOURCE
        if is_resource and not question.gold_types:
            skipped_empty_gold += 1
            continue
        if not is_resource and mode == MODE_TYPE_ONLY:
            continue

        predicted = predictions.get(question.id)
        if predicted is None:
            missing_prediction += 1
            predicted_category, ranked = None, []
        else:
            predicted_category, ranked = predicted

        if is_resource:
            gold_set = frozenset(question.gold_types)
            if mode == MODE_END_TO_END and predicted_category is not CoarseCategory.RESOURCE:
                scores = {key: 0.0 for key in METRIC_KEYS}
            else:
                scores = {
                    "ndcg@3": ndcg_at_k(ts, ranked, gold_set, 3),
                    "ndcg@5": ndcg_at_k(ts, ranked, gold_set, 5),
                    "ndcg@10": ndcg_at_k(ts, ranked, gold_set, 10),
                    "mrr": mrr(ranked, gold_set),
                }
        else:
            hit = 1.0 if predicted_category is question.category else 0.0
            scores = {key: hit for key in METRIC_KEYS}

        per_question[question.id] = scores
        label = question.category.value
        category_counts[label] = category_counts.get(label, 0) + 1

    if not per_question:
        raise DataError(f"no questions to evaluate in mode {mode!r}")

    metric_means = {
        key: sum(scores[key] for scores in per_question.values()) / len(per_question)
        for key in METRIC_KEYS
    }
    return EvalReport(
        mode=mode,
        metric_means=metric_means,
        per_question=per_question,
        category_counts=category_counts,
        counts={
            "evaluated": len(per_question),
            "skipped_empty_gold": skipped_empty_gold,
            "skipped_unlabeled": skipped_unlabeled,
            "missing_prediction": missing_prediction,
            "unknown_prediction_ids": len(unknown),
        },
        config={
            "gain": GAIN_FUNCTION_ID,
            "k_values": [3, 5, 10],
            "mode": mode,
            "primary_metric": primary_metric,
        },
    )


def format_report_table(rows: list[tuple[str, EvalReport]]) -> str:
    """Aligned text table: one row per labeled report, metric columns."""
    header = ["method", "mode", *METRIC_KEYS, "questions"]
    body = []
    for label, report in rows:
        body.append(
            [
                label,
                report.mode,
                *(f"{report.metric_means[key]:.4f}" for key in METRIC_KEYS),
                str(report.counts.get("evaluated", 0)),
            ]
        )
    widths = [max(len(row[i]) for row in [header, *body]) for i in range(len(header))]
    lines = []
    for row in [header, *body]:
        lines.append("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip())
    return "\n".join(lines)
