"""Question datasets: ingestion, splits and the observed type vocabulary.

The JSON interchange format is an array of ``{"id", "question", "category",
"type"}`` objects.  Gold type lists matter only for resource questions and
their order is preserved (most specific first); for the other categories the
list is just an echo of the category and is cleared on load.
"""

from __future__ import annotations

import json
import logging
import math
import random
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DataError

log = logging.getLogger(__name__)


class CoarseCategory(Enum):
    BOOLEAN = "boolean"
    NUMBER = "number"
    STRING = "string"
    DATE = "date"
    RESOURCE = "resource"

    def __str__(self) -> str:
        return self.value


LITERAL_CATEGORIES = frozenset(
    (CoarseCategory.NUMBER, CoarseCategory.STRING, CoarseCategory.DATE)
)
CATEGORY_ORDER = (
    CoarseCategory.BOOLEAN,
    CoarseCategory.NUMBER,
    CoarseCategory.STRING,
    CoarseCategory.DATE,
    CoarseCategory.RESOURCE,
)


def parse_category(value: str) -> CoarseCategory:
    try:
        return CoarseCategory(value)
    except ValueError:
        raise DataError(f"unknown coarse category: {value!r}") from None


@dataclass(frozen=True)
class Question:
    """One question with its gold annotations (category may be absent for
    unlabeled input; gold types are non-empty only for resource gold)."""

    id: str
    text: str
    category: CoarseCategory | None = None
    gold_types: tuple[str, ...] = ()


@dataclass
class QuestionDataset:
    questions: list[Question]
    type_vocabulary: frozenset[str] = field(init=False)

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for q in self.questions:
            if q.id in seen:
                raise DataError(f"duplicate question id: {q.id!r}")
            seen.add(q.id)
        self.type_vocabulary = frozenset(t for q in self.questions for t in q.gold_types)

    def __len__(self) -> int:
        return len(self.questions)

    def resource_questions(self) -> list[Question]:
        return [q for q in self.questions if q.category is CoarseCategory.RESOURCE]

    def labeled_questions(self) -> list[Question]:
        return [q for q in self.questions if q.category is not None]

    def by_id(self, qid: str) -> Question:
        for q in self.questions:
            if q.id == qid:
                return q
        raise KeyError(qid)


def _question_from_record(record: dict, position: int) -> Question | None:
    if not isinstance(record, dict) or "id" not in record:
        raise DataError(f"record #{position}: expected an object with an 'id' key")
    qid = str(record["id"])
    text = record.get("question")
    if text is None or not str(text).strip():
        return None
    raw_category = record.get("category")
    raw_types = record.get("type") or []
    if not isinstance(raw_types, list):
        raise DataError(f"record {qid!r}: 'type' must be a list")
    if raw_category is None:
        return Question(id=qid, text=str(text))

    if raw_category == "literal":
        # Some releases label literals as "literal" and name the subtype in
        # the type list; fold that into the specific category.
        subtypes = {t for t in raw_types if t in ("number", "string", "date")}
        if len(subtypes) != 1:
            raise DataError(
                f"record {qid!r}: 'literal' category needs exactly one literal subtype "
                f"in its type list, got {sorted(raw_types)!r}"
            )
        category = CoarseCategory(subtypes.pop())
    else:
        try:
            category = CoarseCategory(raw_category)
        except ValueError:
            raise DataError(f"record {qid!r}: unknown coarse category {raw_category!r}") from None

    if category is CoarseCategory.RESOURCE:
        gold: list[str] = []
        for t in raw_types:
            if t not in gold:
                gold.append(str(t))
        return Question(id=qid, text=str(text), category=category, gold_types=tuple(gold))
    return Question(id=qid, text=str(text), category=category)


def load_smart_json(path: str | Path) -> QuestionDataset:
    """Load a question file; records with null or blank question text are
    dropped and their count reported."""
    file_path = Path(path)
    try:
        with file_path.open("r", encoding="utf-8") as handle:
            payload = json.load(handle)
    except OSError as exc:
        raise DataError(f"cannot read question file {file_path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"malformed JSON in {file_path}: {exc}") from exc
    if not isinstance(payload, list):
        raise DataError(f"{file_path}: expected a JSON array of question records")

    questions: list[Question] = []
    dropped = 0
    for position, record in enumerate(payload):
        question = _question_from_record(record, position)
        if question is None:
            dropped += 1
        else:
            questions.append(question)
    if dropped:
        log.warning("%s: dropped %d record(s) with null or empty question text", file_path, dropped)
    return QuestionDataset(questions)


def question_to_record(question: Question) -> dict:
    record: dict = {"id": question.id, "question": question.text}
    if question.category is not None:
        record["category"] = question.category.value
        record["type"] = list(question.gold_types)
    return record


def save_smart_json(dataset: QuestionDataset, path: str | Path) -> None:
    records = [question_to_record(q) for q in dataset.questions]
    Path(path).write_text(json.dumps(records, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def report_unknown_types(dataset: QuestionDataset, known_types: Iterable[str]) -> frozenset[str]:
    """Gold types outside the supplied type system; reported, never dropped."""
    known = set(known_types)
    unknown = frozenset(t for t in dataset.type_vocabulary if t not in known)
    if unknown:
        log.warning(
            "%d gold type(s) are outside the loaded type system (e.g. %s); "
            "they stay classifiable but earn no hierarchy credit",
            len(unknown),
            sorted(unknown)[0],
        )
    return unknown


def split_train_validation(
    dataset: QuestionDataset, ratio: float, seed: int
) -> tuple[QuestionDataset, QuestionDataset]:
    """Deterministic stratified split by coarse category.

    Each stratum contributes ceil(ratio * n) questions to the first part,
    clamped so both parts stay non-empty whenever a stratum has at least two
    questions.
    """
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"split ratio must lie strictly between 0 and 1, got {ratio}")
    if len(dataset) < 5:
        raise DataError(f"refusing to split a dataset of only {len(dataset)} question(s)")

    strata: dict[str, list[int]] = {}
    for idx, question in enumerate(dataset.questions):
        key = question.category.value if question.category else ""
        strata.setdefault(key, []).append(idx)

    rng = random.Random(seed)
    train_idx: list[int] = []
    val_idx: list[int] = []
    for key in sorted(strata):
        indices = list(strata[key])
        rng.shuffle(indices)
        n = len(indices)
        n_train = math.ceil(ratio * n)
        if n >= 2:
            n_train = min(max(n_train, 1), n - 1)
        train_idx.extend(indices[:n_train])
        val_idx.extend(indices[n_train:])

    train = QuestionDataset([dataset.questions[i] for i in sorted(train_idx)])
    validation = QuestionDataset([dataset.questions[i] for i in sorted(val_idx)])
    return train, validation
