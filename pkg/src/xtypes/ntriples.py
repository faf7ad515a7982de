"""Convert N-Triples dumps into the tab-separated KG tables.

Only four predicate roles matter here: type assertion, subclass, label and
description.  The predicate IRIs for each role are configurable so the same
converter handles different ontologies.  Everything else in the dump is
ignored.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .errors import DataError
from .kg_store import (
    ENTITY_DESCRIPTIONS_FILE,
    ENTITY_TYPES_FILE,
    HIERARCHY_FILE,
    TYPE_DESCRIPTIONS_FILE,
    TYPE_LABELS_FILE,
)

log = logging.getLogger(__name__)

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
RDFS_SUBCLASS_OF = "http://www.w3.org/2000/01/rdf-schema#subClassOf"
RDFS_LABEL = "http://www.w3.org/2000/01/rdf-schema#label"
RDFS_COMMENT = "http://www.w3.org/2000/01/rdf-schema#comment"

_TRIPLE_RE = re.compile(
    r"^(<[^>]*>|_:\S+)\s+"
    r"(<[^>]*>)\s+"
    r'(<[^>]*>|_:\S+|"(?:[^"\\]|\\.)*"(?:@[A-Za-z0-9-]+|\^\^<[^>]*>)?)\s*\.\s*$'
)
_ESCAPES = {"t": "\t", "n": "\n", "r": "\r", '"': '"', "\\": "\\"}


@dataclass
class PredicateConfig:
    """Predicate IRIs recognized for each of the four roles."""

    type_assertion: tuple[str, ...] = (RDF_TYPE,)
    subclass: tuple[str, ...] = (RDFS_SUBCLASS_OF,)
    label: tuple[str, ...] = (RDFS_LABEL,)
    description: tuple[str, ...] = (RDFS_COMMENT,)
    prefixes: dict[str, str] = field(default_factory=dict)

    def compact(self, iri: str) -> str:
        for name, base in sorted(self.prefixes.items(), key=lambda kv: -len(kv[1])):
            if iri.startswith(base):
                return f"{name}:{iri[len(base):]}"
        return iri


def _unescape_literal(raw: str) -> str:
    out: list[str] = []
    i = 0
    while i < len(raw):
        ch = raw[i]
        if ch == "\\" and i + 1 < len(raw):
            nxt = raw[i + 1]
            if nxt in _ESCAPES:
                out.append(_ESCAPES[nxt])
                i += 2
                continue
            if nxt in ("u", "U"):
                width = 4 if nxt == "u" else 8
                code = raw[i + 2 : i + 2 + width]
                out.append(chr(int(code, 16)))
                i += 2 + width
                continue
        out.append(ch)
        i += 1
    return "".join(out)


def _term_value(term: str) -> tuple[str, bool]:
    """Return (value, is_literal) for an N-Triples term."""
    if term.startswith("<"):
        return term[1:-1], False
    if term.startswith("_:"):
        return term, False
    body = term[1 : term.rindex('"')]
    return _unescape_literal(body), True


def parse_ntriples(path: str | Path) -> Iterator[tuple[str, str, str, bool]]:
    """Yield (subject, predicate, object, object_is_literal) from one file.

    Raises DataError with the line number for lines that are neither blank,
    comments, nor well-formed triples.
    """
    file_path = Path(path)
    with file_path.open("r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            match = _TRIPLE_RE.match(line)
            if match is None:
                raise DataError(f"{file_path.name}:{lineno}: not a valid N-Triples line")
            subject, _ = _term_value(match.group(1))
            predicate, _ = _term_value(match.group(2))
            obj, is_literal = _term_value(match.group(3))
            yield subject, predicate, obj, is_literal


def _sanitize(text: str) -> str:
    return re.sub(r"[\t\r\n]+", " ", text).strip()


def convert_ntriples(
    inputs: Iterable[str | Path],
    out_dir: str | Path,
    config: PredicateConfig | None = None,
) -> dict[str, int]:
    """Extract the KG tables from N-Triples dumps into ``out_dir``.

    Ids appearing as subclass endpoints or as objects of type assertions are
    treated as types; assertion subjects that are not themselves types are
    entities.  Returns per-file row counts.
    """
    config = config or PredicateConfig()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    subclass_edges: set[tuple[str, str]] = set()
    assertions: set[tuple[str, str]] = set()
    labels: dict[str, str] = {}
    descriptions: dict[str, str] = {}

    type_preds = set(config.type_assertion)
    subclass_preds = set(config.subclass)
    label_preds = set(config.label)
    desc_preds = set(config.description)

    for path in inputs:
        for subject, predicate, obj, is_literal in parse_ntriples(path):
            if predicate in subclass_preds and not is_literal:
                subclass_edges.add((subject, obj))
            elif predicate in type_preds and not is_literal:
                assertions.add((subject, obj))
            elif predicate in label_preds and is_literal:
                labels[subject] = _sanitize(obj)
            elif predicate in desc_preds and is_literal:
                descriptions[subject] = _sanitize(obj)

    types = {s for s, _ in subclass_edges} | {o for _, o in subclass_edges}
    types |= {o for _, o in assertions}
    entity_rows = sorted((s, o) for s, o in assertions if s not in types)
    skipped = len(assertions) - len(entity_rows)
    if skipped:
        log.info("skipped %d type assertion(s) whose subject is itself a type", skipped)
    entities = {s for s, _ in entity_rows}

    compact = config.compact
    tables = {
        HIERARCHY_FILE: sorted((compact(c), compact(p)) for c, p in subclass_edges),
        TYPE_LABELS_FILE: sorted((compact(t), labels[t]) for t in types if t in labels),
        TYPE_DESCRIPTIONS_FILE: sorted(
            (compact(t), descriptions[t]) for t in types if t in descriptions
        ),
        ENTITY_TYPES_FILE: sorted((compact(e), compact(t)) for e, t in entity_rows),
        ENTITY_DESCRIPTIONS_FILE: sorted(
            (compact(e), descriptions[e]) for e in entities if e in descriptions
        ),
    }
    counts = {}
    for name, rows in tables.items():
        with (out / name).open("w", encoding="utf-8") as handle:
            for key, value in rows:
                handle.write(f"{key}\t{value}\n")
        counts[name] = len(rows)
    return counts
