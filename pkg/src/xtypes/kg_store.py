"""Type-system and entity-type stores loaded from tab-separated KG dumps.

The type store keeps the subclass DAG and answers hierarchy queries (depth,
shortest undirected distance) used both for clustering features and for the
graded gains of the evaluation metrics.  The entity index keeps entity-type
assignments and entity descriptions; it backs the entity-overlap similarity
between types and the assembly of type description documents.

All stores are immutable after loading and safe for concurrent reads.
"""

from __future__ import annotations

import logging
from collections import deque
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .errors import DataError

log = logging.getLogger(__name__)

HIERARCHY_FILE = "type_hierarchy.tsv"
TYPE_LABELS_FILE = "type_labels.tsv"
TYPE_DESCRIPTIONS_FILE = "type_descriptions.tsv"
ENTITY_TYPES_FILE = "entity_types.tsv"
ENTITY_DESCRIPTIONS_FILE = "entity_descriptions.tsv"

KG_FILES = (
    HIERARCHY_FILE,
    TYPE_LABELS_FILE,
    TYPE_DESCRIPTIONS_FILE,
    ENTITY_TYPES_FILE,
    ENTITY_DESCRIPTIONS_FILE,
)


class TypeSystem:
    """The KG type vocabulary with its subclass hierarchy.

    Multiple supertypes are allowed; the subclass graph restricted to parent
    edges must be acyclic.  Depth is the minimum edge count up to any root
    (a type with no parents), so roots have depth 0.
    """

    def __init__(
        self,
        parent_edges: Mapping[str, Iterable[str]],
        labels: Mapping[str, str] | None = None,
        descriptions: Mapping[str, str] | None = None,
        extra_types: Iterable[str] = (),
    ) -> None:
        known: set[str] = set(extra_types)
        for child, parents in parent_edges.items():
            known.add(child)
            known.update(parents)
        self._labels = dict(labels or {})
        self._descriptions = dict(descriptions or {})
        known.update(self._labels)
        known.update(self._descriptions)
        self._parents: dict[str, frozenset[str]] = {
            t: frozenset(parent_edges.get(t, ())) for t in known
        }
        self._children: dict[str, set[str]] = {t: set() for t in known}
        for child, parents in self._parents.items():
            for parent in parents:
                self._children[parent].add(child)
        self._depths = self._compute_depths()
        self._distance_cache: dict[tuple[str, str], int | None] = {}

    @property
    def types(self) -> frozenset[str]:
        return frozenset(self._parents)

    def __contains__(self, type_id: str) -> bool:
        return type_id in self._parents

    def __len__(self) -> int:
        return len(self._parents)

    def parents_of(self, type_id: str) -> frozenset[str]:
        self._check_known(type_id)
        return self._parents[type_id]

    def children_of(self, type_id: str) -> frozenset[str]:
        self._check_known(type_id)
        return frozenset(self._children[type_id])

    @property
    def roots(self) -> frozenset[str]:
        return frozenset(t for t, parents in self._parents.items() if not parents)

    def label_of(self, type_id: str) -> str:
        self._check_known(type_id)
        return self._labels.get(type_id, "")

    def description_of(self, type_id: str) -> str:
        self._check_known(type_id)
        return self._descriptions.get(type_id, "")

    def depth(self, type_id: str) -> int:
        """Minimum edge count from the type up to any root."""
        self._check_known(type_id)
        return self._depths[type_id]

    def distance(self, t1: str, t2: str) -> int | None:
        """Length of the shortest undirected path in the subclass graph,
        or None when the two types lie in disconnected components."""
        self._check_known(t1)
        self._check_known(t2)
        if t1 == t2:
            return 0
        key = (t1, t2) if t1 <= t2 else (t2, t1)
        if key not in self._distance_cache:
            self._distance_cache[key] = self._bfs_distance(*key)
        return self._distance_cache[key]

    def _bfs_distance(self, source: str, target: str) -> int | None:
        seen = {source}
        frontier = deque([(source, 0)])
        while frontier:
            node, dist = frontier.popleft()
            for neighbor in self._parents[node] | self._children[node]:
                if neighbor == target:
                    return dist + 1
                if neighbor not in seen:
                    seen.add(neighbor)
                    frontier.append((neighbor, dist + 1))
        return None

    def _check_known(self, type_id: str) -> None:
        if type_id not in self._parents:
            raise KeyError(f"unknown type id: {type_id!r}")

    def _compute_depths(self) -> dict[str, int]:
        pending = {t: len(parents) for t, parents in self._parents.items()}
        depths: dict[str, int] = {}
        queue = deque(sorted(t for t, n in pending.items() if n == 0))
        while queue:
            node = queue.popleft()
            parents = self._parents[node]
            depths[node] = 1 + min(depths[p] for p in parents) if parents else 0
            for child in sorted(self._children[node]):
                pending[child] -= 1
                if pending[child] == 0:
                    queue.append(child)
        if len(depths) != len(self._parents):
            raise DataError(
                "subclass hierarchy contains a cycle: " + " -> ".join(self._find_cycle(depths))
            )
        return depths

    def _find_cycle(self, resolved: Mapping[str, int]) -> list[str]:
        unresolved = {t for t in self._parents if t not in resolved}
        node = min(unresolved)
        path: list[str] = []
        position: dict[str, int] = {}
        while node not in position:
            position[node] = len(path)
            path.append(node)
            node = min(p for p in self._parents[node] if p in unresolved)
        return path[position[node] :] + [node]


class EntityTypeIndex:
    """Entity-to-types map with its exact inverse, plus entity descriptions.

    Entities with no type assignments are retained in the description map
    but excluded from the two index maps.
    """

    def __init__(
        self,
        entity_types: Mapping[str, Iterable[str]],
        entity_descriptions: Mapping[str, str] | None = None,
    ) -> None:
        self._entity_types: dict[str, frozenset[str]] = {
            e: frozenset(ts) for e, ts in entity_types.items() if ts
        }
        self._type_entities: dict[str, set[str]] = {}
        for entity, types in self._entity_types.items():
            for t in types:
                self._type_entities.setdefault(t, set()).add(entity)
        self._entity_descriptions = dict(entity_descriptions or {})

    @property
    def entities(self) -> frozenset[str]:
        return frozenset(self._entity_types)

    @property
    def typed_type_ids(self) -> frozenset[str]:
        """Type ids that have at least one assigned entity."""
        return frozenset(self._type_entities)

    def types_of(self, entity_id: str) -> frozenset[str]:
        return self._entity_types.get(entity_id, frozenset())

    def entities_of(self, type_id: str) -> frozenset[str]:
        return frozenset(self._type_entities.get(type_id, ()))

    def description_of(self, entity_id: str) -> str:
        return self._entity_descriptions.get(entity_id, "")

    @property
    def entity_descriptions(self) -> Mapping[str, str]:
        return self._entity_descriptions


def _read_tsv_pairs(path: Path, file_name: str) -> Iterator[tuple[int, str, str]]:
    """Yield (line_number, key, value) records; `#`-prefixed comment lines
    and blank lines are skipped."""
    with path.open("r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.rstrip("\r\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 2 or not fields[0]:
                raise DataError(f"{file_name}:{lineno}: expected two tab-separated fields")
            yield lineno, fields[0], fields[1]


def load_kg_tables(dir_path: str | Path) -> tuple[TypeSystem, EntityTypeIndex]:
    """Load the five KG dump files from a directory.

    Raises DataError for a missing file, a malformed row (with its line
    number) or a cyclic hierarchy.  Types referenced only by entity rows are
    added to the type system with empty descriptions and reported.
    """
    directory = Path(dir_path)
    paths = {name: directory / name for name in KG_FILES}
    for name, path in paths.items():
        if not path.is_file():
            raise DataError(f"missing KG table: {path}")

    parent_edges: dict[str, set[str]] = {}
    for _, child, parent in _read_tsv_pairs(paths[HIERARCHY_FILE], HIERARCHY_FILE):
        parent_edges.setdefault(child, set()).add(parent)
    labels = {t: v for _, t, v in _read_tsv_pairs(paths[TYPE_LABELS_FILE], TYPE_LABELS_FILE)}
    descriptions = {
        t: v for _, t, v in _read_tsv_pairs(paths[TYPE_DESCRIPTIONS_FILE], TYPE_DESCRIPTIONS_FILE)
    }

    entity_types: dict[str, set[str]] = {}
    referenced_types: set[str] = set()
    for _, entity, type_id in _read_tsv_pairs(paths[ENTITY_TYPES_FILE], ENTITY_TYPES_FILE):
        entity_types.setdefault(entity, set()).add(type_id)
        referenced_types.add(type_id)
    entity_descriptions = {
        e: v
        for _, e, v in _read_tsv_pairs(paths[ENTITY_DESCRIPTIONS_FILE], ENTITY_DESCRIPTIONS_FILE)
    }

    declared = set(parent_edges) | {p for ps in parent_edges.values() for p in ps}
    declared |= set(labels) | set(descriptions)
    undeclared = referenced_types - declared
    if undeclared:
        log.warning(
            "%d type(s) referenced by entity rows are absent from the hierarchy/label "
            "tables and were added with empty descriptions (e.g. %s)",
            len(undeclared),
            sorted(undeclared)[0],
        )

    type_system = TypeSystem(
        parent_edges, labels=labels, descriptions=descriptions, extra_types=referenced_types
    )
    index = EntityTypeIndex(entity_types, entity_descriptions)
    return type_system, index
