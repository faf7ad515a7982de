"""Synthetic desk-scale fixtures with known ground truth.

The generator emits a toy KG (type tree, labels, descriptions, entities)
plus train/test question files and a manifest of intended predictions.
Construction guarantees:

  * every type gets a unique marker keyword planted in its questions, so
    linear classifiers can reach near-perfect quality;
  * sibling types (same parent) share a configurable fraction of their
    entities, giving entity-overlap representations a block structure
    aligned with the tree;
  * with ``group_level_keywords`` the marker moves up to the sibling
    group, leaving question text unable to tell siblings apart while
    entity overlap still can.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from .clustering import ClusterModel
from .dataset import CoarseCategory
from .kg_store import (
    ENTITY_DESCRIPTIONS_FILE,
    ENTITY_TYPES_FILE,
    HIERARCHY_FILE,
    TYPE_DESCRIPTIONS_FILE,
    TYPE_LABELS_FILE,
)

DEFAULT_FILLERS = (
    "ancient", "bright", "coastal", "famous", "grand", "hidden", "iron",
    "little", "modern", "northern", "old", "proud", "quiet", "rapid",
    "silver", "tall", "unusual", "vast", "wooden", "young", "place",
    "thing", "figure", "object", "item", "person", "site", "work",
    "group", "event",
)

TEST_FOLD = 5  # every TEST_FOLD-th question per stream goes to the test set


@dataclass(frozen=True)
class FixtureSpec:
    type_count: int = 27
    depth: int = 3
    entities_per_type: int = 10
    sibling_entity_overlap: float = 0.8
    questions_per_type: int = 20
    keyword_vocabulary: tuple[str, ...] = DEFAULT_FILLERS
    seed: int = 7
    group_level_keywords: bool = False

    def __post_init__(self) -> None:
        if self.type_count < 1 or self.depth < 1 or self.entities_per_type < 1:
            raise ValueError("type_count, depth, and entities_per_type must be positive")
        if self.questions_per_type < 1:
            raise ValueError("questions_per_type must be positive")
        if self.depth > self.type_count:
            raise ValueError("depth cannot exceed type_count (each level needs a type)")
        if not 0.0 <= self.sibling_entity_overlap <= 1.0:
            raise ValueError("sibling_entity_overlap must lie in [0, 1]")
        shared = round(self.sibling_entity_overlap * self.entities_per_type)
        if shared > self.entities_per_type:
            raise ValueError("overlap would require more shared entities than a type has")
        if len(self.keyword_vocabulary) < 2:
            raise ValueError("keyword_vocabulary needs at least two words")


@dataclass(frozen=True)
class FixturePaths:
    kg_dir: Path
    train_path: Path
    test_path: Path
    manifest_path: Path


def _level_sizes(type_count: int, depth: int) -> list[int]:
    """Geometric level sizes (ratio 3) by largest-remainder apportionment,
    with every level guaranteed at least one type."""
    weights = [3**i for i in range(depth)]
    remaining = type_count - depth
    total = sum(weights)
    quotas = [remaining * w / total for w in weights]
    sizes = [1 + int(q) for q in quotas]
    leftover = type_count - sum(sizes)
    fractions = sorted(
        range(depth), key=lambda i: (quotas[i] - int(quotas[i]), i), reverse=True
    )
    for i in range(leftover):
        sizes[fractions[i % depth]] += 1
    return sizes


def _build_tree(spec: FixtureSpec) -> tuple[list[str], dict[str, str | None], dict[str, list[str]]]:
    """Type ids by level, parent map, and sibling groups keyed by parent
    (roots form one group)."""
    sizes = _level_sizes(spec.type_count, spec.depth)
    levels: list[list[str]] = []
    counter = 0
    for size in sizes:
        level = [f"fx:Type{counter + j:03d}" for j in range(size)]
        counter += size
        levels.append(level)
    parents: dict[str, str | None] = {t: None for t in levels[0]}
    for upper, lower in zip(levels, levels[1:]):
        for j, type_id in enumerate(lower):
            parents[type_id] = upper[j % len(upper)]
    groups: dict[str, list[str]] = {}
    for level in levels:
        for type_id in level:
            key = parents[type_id] or "__roots__"
            groups.setdefault(key, []).append(type_id)
    return [t for level in levels for t in level], parents, groups


def _resource_text(
    rng: random.Random, spec: FixtureSpec, type_marker: str, group_marker: str
) -> str:
    fillers = rng.sample(spec.keyword_vocabulary, 3)
    if spec.group_level_keywords:
        middle = rng.choice(spec.keyword_vocabulary)
    else:
        middle = type_marker
    return f"which {fillers[0]} {group_marker} {fillers[1]} has the {middle} {fillers[2]}"


_LITERAL_TEMPLATES = {
    CoarseCategory.BOOLEAN: "is the {a} {b} really {c}",
    CoarseCategory.NUMBER: "how many {a} {b} hold the {c}",
    CoarseCategory.STRING: "what do people call the {a} {b} of {c}",
    CoarseCategory.DATE: "when did the {a} {b} reach the {c}",
}


def generate_fixture(spec: FixtureSpec, out_dir: str | Path) -> FixturePaths:
    """Write the KG tables, train/test question files, and the manifest of
    intended optimal predictions.  Fully deterministic for a given spec."""
    rng = random.Random(spec.seed)
    root = Path(out_dir)
    kg_dir = root / "kg"
    kg_dir.mkdir(parents=True, exist_ok=True)

    type_ids, parents, groups = _build_tree(spec)
    type_index = {t: i for i, t in enumerate(type_ids)}
    group_of: dict[str, str] = {}
    group_marker: dict[str, str] = {}
    for g, (key, members) in enumerate(sorted(groups.items())):
        for member in members:
            group_of[member] = key
        group_marker[key] = f"group{g:02d}mark"
    type_marker = {t: f"marker{type_index[t]:03d}" for t in type_ids}

    hierarchy_rows = [
        f"{child}\t{parent}" for child, parent in parents.items() if parent is not None
    ]
    label_rows = [f"{t}\tType {type_index[t]:03d}" for t in type_ids]
    type_desc_rows = [
        f"{t}\tthe class of {type_marker[t]} things in the {group_marker[group_of[t]]} family"
        for t in type_ids
    ]

    shared_count = round(spec.sibling_entity_overlap * spec.entities_per_type)
    entity_type_rows: list[str] = []
    entity_desc_rows: list[str] = []
    entity_counter = 0

    def new_entity() -> str:
        nonlocal entity_counter
        entity = f"fx:ent{entity_counter:04d}"
        entity_counter += 1
        return entity

    for key in sorted(groups):
        members = groups[key]
        shared = [new_entity() for _ in range(shared_count)]
        for entity in shared:
            entity_desc_rows.append(
                f"{entity}\ta shared {group_marker[key]} entity known across its family"
            )
            for member in members:
                entity_type_rows.append(f"{entity}\t{member}")
        for member in members:
            for _ in range(spec.entities_per_type - shared_count):
                entity = new_entity()
                entity_type_rows.append(f"{entity}\t{member}")
                entity_desc_rows.append(
                    f"{entity}\ta {type_marker[member]} entity of the {group_marker[key]} family"
                )

    (kg_dir / HIERARCHY_FILE).write_text("\n".join(sorted(hierarchy_rows)) + "\n")
    (kg_dir / TYPE_LABELS_FILE).write_text("\n".join(sorted(label_rows)) + "\n")
    (kg_dir / TYPE_DESCRIPTIONS_FILE).write_text("\n".join(sorted(type_desc_rows)) + "\n")
    (kg_dir / ENTITY_TYPES_FILE).write_text("\n".join(sorted(entity_type_rows)) + "\n")
    (kg_dir / ENTITY_DESCRIPTIONS_FILE).write_text("\n".join(sorted(entity_desc_rows)) + "\n")

    train_records: list[dict] = []
    test_records: list[dict] = []
    manifest: dict[str, dict] = {}
    question_counter = 0

    def emit(position: int, text: str, category: CoarseCategory, gold: list[str]) -> None:
        nonlocal question_counter
        qid = f"fxq{question_counter:05d}"
        record = {
            "id": qid,
            "question": text,
            "category": category.value,
            "type": gold,
        }
        # The per-stream position, not the global id, decides the fold so
        # every type and category contributes to both splits.
        if position % TEST_FOLD == TEST_FOLD - 1:
            test_records.append(record)
            manifest[qid] = {"category": category.value, "type": gold}
        else:
            train_records.append(record)
        question_counter += 1

    for type_id in type_ids:
        marker = type_marker[type_id]
        gmark = group_marker[group_of[type_id]]
        for position in range(spec.questions_per_type):
            text = _resource_text(rng, spec, marker, gmark)
            emit(position, text, CoarseCategory.RESOURCE, [type_id])
    for category, template in _LITERAL_TEMPLATES.items():
        for position in range(spec.questions_per_type):
            a, b, c = rng.sample(spec.keyword_vocabulary, 3)
            emit(position, template.format(a=a, b=b, c=c), category, [category.value])

    train_path = root / "train.json"
    test_path = root / "test.json"
    manifest_path = root / "manifest.json"
    train_path.write_text(json.dumps(train_records, indent=2) + "\n")
    test_path.write_text(json.dumps(test_records, indent=2) + "\n")
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return FixturePaths(
        kg_dir=kg_dir, train_path=train_path, test_path=test_path, manifest_path=manifest_path
    )


def load_manifest(path: str | Path) -> dict[str, dict]:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def manifest_as_predictions(manifest: dict[str, dict]) -> dict[str, tuple[CoarseCategory, list[str]]]:
    """The manifest replayed as a prediction map; by construction it should
    score 1.0 on every metric."""
    predictions = {}
    for qid, entry in manifest.items():
        category = CoarseCategory(entry["category"])
        types = list(entry["type"]) if category is CoarseCategory.RESOURCE else []
        predictions[qid] = (category, types)
    return predictions


def sibling_groups(parents: dict[str, str | None]) -> list[list[str]]:
    groups: dict[str, list[str]] = {}
    for type_id in sorted(parents):
        key = parents[type_id] or "__roots__"
        groups.setdefault(key, []).append(type_id)
    return [members for _, members in sorted(groups.items())]


def sibling_pair_purity(parents: dict[str, str | None], model: ClusterModel) -> float:
    """Fraction of same-parent type pairs assigned to the same cluster."""
    pairs = 0
    together = 0
    for members in sibling_groups(parents):
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                pairs += 1
                if model.assignment[members[i]] == model.assignment[members[j]]:
                    together += 1
    if pairs == 0:
        return 1.0
    return together / pairs
