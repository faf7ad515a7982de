"""Deterministic K-Means over type vectors.

Runs Lloyd iterations from a seeded k-means++ start.  Rows are
canonicalized to sorted type-id order before anything random happens, so
the grouping of types into clusters never depends on the caller's row
ordering.  Empty clusters are repaired by reseeding them on the point
farthest from its current centroid.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError
from .type_repr import TypeMatrix

log = logging.getLogger(__name__)

DEFAULT_MAX_ITERS = 100
DEFAULT_TOL = 1e-4


@dataclass
class ClusterModel:
    """Fitted clustering: centroid matrix plus a type -> cluster map."""

    k: int
    seed: int
    type_ids: tuple[str, ...]
    centroids: np.ndarray
    assignment: dict[str, int]
    inertia: float
    inertia_history: list[float] = field(default_factory=list, repr=False)

    def members_of(self, cluster: int) -> tuple[str, ...]:
        return tuple(t for t in self.type_ids if self.assignment[t] == cluster)

    def cluster_of(self, type_id: str) -> int:
        return self.assignment[type_id]

    def save(self, path: str | Path) -> None:
        payload = {
            "k": self.k,
            "seed": self.seed,
            "inertia": self.inertia,
            "type_ids": list(self.type_ids),
            "centroids": [[float(v) for v in row] for row in self.centroids],
            "assignment": {t: int(c) for t, c in sorted(self.assignment.items())},
        }
        Path(path).write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )

    @classmethod
    def load(cls, path: str | Path) -> "ClusterModel":
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"cannot read cluster model {path}: {exc}") from exc
        try:
            model = cls(
                k=int(payload["k"]),
                seed=int(payload["seed"]),
                type_ids=tuple(payload["type_ids"]),
                centroids=np.array(payload["centroids"], dtype=np.float64),
                assignment={t: int(c) for t, c in payload["assignment"].items()},
                inertia=float(payload["inertia"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed cluster model {path}: {exc}") from exc
        if set(model.assignment) != set(model.type_ids):
            raise DataError(f"cluster model {path}: assignment does not cover type_ids")
        return model


def _squared_distances(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Explicit (x - c)^2 expansion per pair.  Costs an extra broadcast over
    the usual dot-product trick but keeps exact ties exact, which the
    deterministic tie rule (lowest cluster index wins) relies on."""
    diff = points[:, None, :] - centers[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def _plus_plus_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    centers = np.empty((k, points.shape[1]), dtype=np.float64)
    first = int(rng.integers(n))
    centers[0] = points[first]
    closest = _squared_distances(points, centers[:1])[:, 0]
    for i in range(1, k):
        total = closest.sum()
        if total <= 0.0:
            # All remaining points coincide with chosen centers; any pick works.
            choice = int(rng.integers(n))
        else:
            choice = int(rng.choice(n, p=closest / total))
        centers[i] = points[choice]
        closest = np.minimum(closest, _squared_distances(points, centers[i : i + 1])[:, 0])
    return centers


def _repair_empty(
    points: np.ndarray, centers: np.ndarray, labels: np.ndarray
) -> tuple[np.ndarray, bool]:
    """Move each empty cluster's centroid onto the point currently farthest
    from its own centroid, stealing only from clusters with >1 member."""
    changed = False
    k = centers.shape[0]
    counts = np.bincount(labels, minlength=k)
    distances = _squared_distances(points, centers)
    point_cost = distances[np.arange(points.shape[0]), labels]
    for cluster in range(k):
        if counts[cluster] > 0:
            continue
        candidates = np.flatnonzero(counts[labels] > 1)
        if candidates.size == 0:
            break
        farthest = candidates[np.argmax(point_cost[candidates])]
        counts[labels[farthest]] -= 1
        labels[farthest] = cluster
        counts[cluster] = 1
        centers[cluster] = points[farthest]
        point_cost[farthest] = 0.0
        changed = True
    return labels, changed


def fit_kmeans(
    matrix: TypeMatrix,
    k: int,
    seed: int,
    max_iters: int = DEFAULT_MAX_ITERS,
    tol: float = DEFAULT_TOL,
) -> ClusterModel:
    """Cluster the matrix rows into k groups.

    Requires 1 <= k <= number of distinct rows, so every cluster can end up
    non-empty.  The final assignment is argmin-consistent with the final
    centroids (ties broken toward the lowest cluster index).
    """
    order = np.argsort(np.asarray(matrix.type_ids))
    type_ids = tuple(matrix.type_ids[i] for i in order)
    points = np.ascontiguousarray(matrix.vectors[order], dtype=np.float64)
    n = points.shape[0]
    distinct = np.unique(points, axis=0).shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    if k > distinct:
        raise ValueError(
            f"k={k} exceeds the {distinct} distinct row(s); empty clusters would be unavoidable"
        )

    rng = np.random.default_rng(seed)
    centers = _plus_plus_init(points, k, rng)
    labels = np.argmin(_squared_distances(points, centers), axis=1)
    labels, _ = _repair_empty(points, centers, labels)
    history: list[float] = []

    for _ in range(max_iters):
        new_centers = centers.copy()
        for cluster in range(k):
            members = labels == cluster
            if members.any():
                new_centers[cluster] = points[members].mean(axis=0)
        shift = float(np.max(np.linalg.norm(new_centers - centers, axis=1)))
        centers = new_centers
        labels = np.argmin(_squared_distances(points, centers), axis=1)
        labels, _ = _repair_empty(points, centers, labels)
        distances = _squared_distances(points, centers)
        history.append(float(distances[np.arange(n), labels].sum()))
        if shift < tol:
            break

    # Final pass: make assignment a pure argmin of the final centroids,
    # repairing any empties this reintroduces until a fixed point.
    while True:
        labels = np.argmin(_squared_distances(points, centers), axis=1)
        labels, changed = _repair_empty(points, centers, labels)
        if not changed:
            break
    distances = _squared_distances(points, centers)
    inertia = float(distances[np.arange(n), labels].sum())
    if not history or inertia < history[-1]:
        history.append(inertia)

    assignment = {t: int(c) for t, c in zip(type_ids, labels)}
    return ClusterModel(
        k=k,
        seed=seed,
        type_ids=type_ids,
        centroids=centers,
        assignment=assignment,
        inertia=inertia,
        inertia_history=history,
    )


def compute_inertia(points: np.ndarray, centers: np.ndarray, labels: np.ndarray) -> float:
    distances = _squared_distances(points, centers)
    return float(distances[np.arange(points.shape[0]), labels].sum())
