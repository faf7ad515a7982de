"""Independent reference implementations used to check the package.

Everything here is written the slow, obvious way (dict loops, O(n^3)
Floyd-Warshall, exhaustive scoring) so it shares no code paths with the
implementations under test.
"""

from __future__ import annotations

import math
import random
from collections import Counter


def floyd_warshall_distances(nodes: list[str], edges: list[tuple[str, str]]):
    """All-pairs shortest undirected path lengths; math.inf if unreachable."""
    index = {n: i for i, n in enumerate(nodes)}
    n = len(nodes)
    dist = [[math.inf] * n for _ in range(n)]
    for i in range(n):
        dist[i][i] = 0.0
    for a, b in edges:
        i, j = index[a], index[b]
        dist[i][j] = 1.0
        dist[j][i] = 1.0
    for mid in range(n):
        for i in range(n):
            via = dist[i][mid]
            if via == math.inf:
                continue
            row = dist[i]
            mid_row = dist[mid]
            for j in range(n):
                candidate = via + mid_row[j]
                if candidate < row[j]:
                    row[j] = candidate
    return {
        (a, b): dist[index[a]][index[b]] for a in nodes for b in nodes
    }


def brute_force_jaccard(a: set[str], b: set[str]) -> float:
    union = a | b
    if not union:
        return 0.0
    return len(a & b) / len(union)


def reference_tfidf_rows(documents: dict[str, list[str]]) -> dict[str, dict[str, float]]:
    """Per-document tf*idf with the smoothed idf log((N+1)/(df+1)) + 1 and
    L2 row normalization, computed with plain dicts."""
    names = sorted(documents)
    n_docs = len(names)
    df: Counter[str] = Counter()
    for name in names:
        for token in set(documents[name]):
            df[token] += 1
    rows: dict[str, dict[str, float]] = {}
    for name in names:
        counts = Counter(documents[name])
        row = {
            token: count * (math.log((n_docs + 1) / (df[token] + 1)) + 1.0)
            for token, count in counts.items()
        }
        norm = math.sqrt(sum(v * v for v in row.values()))
        if norm > 0:
            row = {t: v / norm for t, v in row.items()}
        rows[name] = row
    return rows


def random_dag(rng: random.Random, n_types: int) -> tuple[list[str], dict[str, list[str]]]:
    """Random multi-parent DAG: each non-root picks 1-2 parents among
    earlier types, so topological order is the id order."""
    nodes = [f"t{i:02d}" for i in range(n_types)]
    parents: dict[str, list[str]] = {nodes[0]: []}
    for i, node in enumerate(nodes[1:], start=1):
        if rng.random() < 0.15:
            parents[node] = []  # extra root
            continue
        count = 1 if rng.random() < 0.7 else min(2, i)
        parents[node] = rng.sample(nodes[:i], count)
    return nodes, parents


def random_entity_assignment(
    rng: random.Random, types: list[str], n_entities: int
) -> dict[str, set[str]]:
    """Entity sets per type; some types may stay empty."""
    entity_sets: dict[str, set[str]] = {t: set() for t in types}
    for e in range(n_entities):
        entity = f"e{e:03d}"
        for type_id in rng.sample(types, rng.randint(1, min(3, len(types)))):
            entity_sets[type_id].add(entity)
    return entity_sets


def gaussian_blobs(rng, centers, points_per_blob: float, scale: float):
    """Labeled isotropic gaussian samples around the given centers.
    ``rng`` is a numpy Generator."""
    import numpy as np

    rows = []
    labels = []
    for label, center in enumerate(centers):
        sample = rng.normal(loc=center, scale=scale, size=(points_per_blob, len(center)))
        rows.append(sample)
        labels.extend([label] * points_per_blob)
    return np.vstack(rows), np.array(labels)


def kendall_tau(order_a: list[str], order_b: list[str]) -> float:
    """Kendall rank correlation between two orderings of the same items."""
    if set(order_a) != set(order_b):
        raise ValueError("orderings must cover the same items")
    pos_b = {item: i for i, item in enumerate(order_b)}
    concordant = discordant = 0
    for i in range(len(order_a)):
        for j in range(i + 1, len(order_a)):
            if pos_b[order_a[i]] < pos_b[order_a[j]]:
                concordant += 1
            else:
                discordant += 1
    total = concordant + discordant
    if total == 0:
        return 1.0
    return (concordant - discordant) / total
