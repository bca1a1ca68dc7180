"""Single-source geodesic distances and farthest point sampling.

A backend answers ``distance_column(source)`` with the exact geodesic
distance from one vertex to all others: Dijkstra shortest paths on a
weighted graph, or closed forms on analytic manifolds (plane, sphere).
Farthest point sampling greedily picks landmarks that maximize the
minimum distance to those already chosen, filling the distance-column
matrix as it goes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csgraph

from .errors import Unreachable
from .geometry import PointCloud, WeightedGraph

SQUARED_GEODESIC = "squared-geodesic"
COSINE = "cosine"


class DijkstraGraph:
    """Shortest-path backend over a weighted graph (binary-heap Dijkstra,
    O(p log p) per column via scipy's compiled implementation)."""

    def __init__(self, graph: WeightedGraph):
        self.graph = graph

    @property
    def vertex_count(self) -> int:
        return self.graph.vertex_count

    def distance_column(self, source: int) -> np.ndarray:
        d = csgraph.dijkstra(self.graph.matrix, directed=False, indices=source)
        if np.isinf(d).any():
            raise Unreachable(f"vertex unreachable from source {source}")
        return d

    def all_distances(self) -> np.ndarray:
        d = csgraph.dijkstra(self.graph.matrix, directed=False)
        if np.isinf(d).any():
            raise Unreachable("graph is disconnected")
        return d


class AnalyticPlane:
    """Euclidean distances on a flat point cloud."""

    def __init__(self, cloud: PointCloud):
        self.cloud = cloud

    @property
    def vertex_count(self) -> int:
        return self.cloud.point_count

    def distance_column(self, source: int) -> np.ndarray:
        d = np.linalg.norm(self.cloud.points - self.cloud.points[source], axis=1)
        d[source] = 0.0
        return d

    def all_distances(self) -> np.ndarray:
        pts = self.cloud.points
        sq = np.sum(pts**2, axis=1)
        g = sq[:, None] + sq[None, :] - 2.0 * (pts @ pts.T)
        np.maximum(g, 0.0, out=g)
        d = np.sqrt(g)
        d = 0.5 * (d + d.T)
        np.fill_diagonal(d, 0.0)
        return d


class AnalyticSphere:
    """Great-circle distances on a radius-r sphere centered at the origin.

    Points must lie within 1e-9 * r of the sphere.
    """

    def __init__(self, cloud: PointCloud, radius: float):
        if radius <= 0:
            raise ValueError(f"radius must be positive, got {radius}")
        norms = np.linalg.norm(cloud.points, axis=1)
        off = np.abs(norms - radius).max()
        if off > 1e-9 * radius:
            raise ValueError(
                f"points deviate from the radius-{radius} sphere by {off:.3g}"
            )
        self.cloud = cloud
        self.radius = float(radius)

    @property
    def vertex_count(self) -> int:
        return self.cloud.point_count

    def distance_column(self, source: int) -> np.ndarray:
        pts = self.cloud.points
        c = pts @ pts[source] / self.radius**2
        d = self.radius * np.arccos(np.clip(c, -1.0, 1.0))
        d[source] = 0.0
        return d

    def all_distances(self) -> np.ndarray:
        pts = self.cloud.points
        c = (pts @ pts.T) / self.radius**2
        d = self.radius * np.arccos(np.clip(c, -1.0, 1.0))
        d = 0.5 * (d + d.T)
        np.fill_diagonal(d, 0.0)
        return d


def distance_column(backend, source: int) -> np.ndarray:
    """Geodesic distances from ``source`` to every vertex (zero at source)."""
    p = backend.vertex_count
    if not 0 <= source < p:
        raise ValueError(f"source {source} out of range for p={p}")
    return backend.distance_column(source)


def all_pairs_distances(backend) -> np.ndarray:
    """Dense p*p geodesic distance matrix. Quadratic; callers enforce caps."""
    return backend.all_distances()


@dataclass
class SampleSet:
    """Landmark indices in selection order plus their distance columns.

    ``distances`` is p*n; column k holds the geodesic distances from
    ``indices[k]`` to every vertex.
    """

    indices: np.ndarray
    distances: np.ndarray

    def __post_init__(self):
        self.indices = np.asarray(self.indices, dtype=np.int64)
        self.distances = np.asarray(self.distances, dtype=np.float64)
        n = self.indices.shape[0]
        if n < 1:
            raise ValueError("need at least one sample")
        if self.distances.ndim != 2 or self.distances.shape[1] != n:
            raise ValueError(
                f"distances must be (p, {n}), got {self.distances.shape}"
            )
        if np.unique(self.indices).shape[0] != n:
            raise ValueError("sample indices must be distinct")
        if self.indices.min() < 0 or self.indices.max() >= self.distances.shape[0]:
            raise ValueError("sample index out of range")
        if (self.distances < 0).any():
            raise ValueError("distances must be nonnegative")
        if (self.distances[self.indices, np.arange(n)] != 0).any():
            raise ValueError("distance of a sample to itself must be zero")
        self.indices.setflags(write=False)
        self.distances.setflags(write=False)

    @property
    def sample_count(self) -> int:
        return self.indices.shape[0]

    @property
    def vertex_count(self) -> int:
        return self.distances.shape[0]


@dataclass
class DistanceColumns:
    """Columns of the pairwise matrix being factorized.

    For the squared-geodesic metric ``values`` is the elementwise square
    of the sample distances; the cosine metric (sphere embedding) stores
    cos(distance / radius) instead.
    """

    values: np.ndarray
    indices: np.ndarray
    metric: str = SQUARED_GEODESIC

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        self.indices = np.asarray(self.indices, dtype=np.int64)
        n = self.indices.shape[0]
        if self.values.ndim != 2 or self.values.shape[1] != n:
            raise ValueError(f"values must be (p, {n}), got {self.values.shape}")
        if self.metric not in (SQUARED_GEODESIC, COSINE):
            raise ValueError(f"unknown metric {self.metric!r}")
        if self.metric == SQUARED_GEODESIC:
            if (self.values < 0).any():
                raise ValueError("squared distances must be nonnegative")
            if (self.values[self.indices, np.arange(n)] != 0).any():
                raise ValueError("squared distance of a sample to itself must be zero")
        self.values.setflags(write=False)
        self.indices.setflags(write=False)

    @property
    def sample_count(self) -> int:
        return self.indices.shape[0]

    @property
    def vertex_count(self) -> int:
        return self.values.shape[0]

    def sampled_rows(self) -> np.ndarray:
        """The n*n block of values at the sampled vertices."""
        return self.values[self.indices, :]


def farthest_point_sampling(backend, n: int, first: int = 0) -> SampleSet:
    """Greedy landmark selection maximizing distance to the chosen set.

    The first landmark is ``first``; each later one is the vertex whose
    minimum distance to all previous landmarks is largest, ties broken by
    the lowest vertex id. Fills one exact distance column per landmark.
    """
    p = backend.vertex_count
    if not 1 <= n <= p:
        raise ValueError(f"need 1 <= n <= p, got n={n}, p={p}")
    if not 0 <= first < p:
        raise ValueError(f"first vertex {first} out of range for p={p}")
    indices = np.empty(n, dtype=np.int64)
    columns = np.empty((p, n), dtype=np.float64)
    indices[0] = first
    columns[:, 0] = distance_column(backend, first)
    closest = columns[:, 0].copy()
    closest[first] = -np.inf  # never reselect
    for i in range(1, n):
        nxt = int(np.argmax(closest))
        indices[i] = nxt
        columns[:, i] = distance_column(backend, nxt)
        np.minimum(closest, columns[:, i], out=closest)
        closest[nxt] = -np.inf
    return SampleSet(indices, columns)


def square_columns(samples: SampleSet) -> DistanceColumns:
    """Elementwise square of the sampled distance columns."""
    return DistanceColumns(
        samples.distances * samples.distances,
        samples.indices,
        metric=SQUARED_GEODESIC,
    )
