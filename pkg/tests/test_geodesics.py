import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geomds.errors import Unreachable
from geomds.geodesics import (
    AnalyticPlane,
    AnalyticSphere,
    DijkstraGraph,
    SampleSet,
    all_pairs_distances,
    distance_column,
    farthest_point_sampling,
    square_columns,
)
from geomds.geometry import PointCloud, WeightedGraph
from geomds.synth import circle_points


def brute_force_shortest_paths(graph, source):
    """Oracle: enumerate all simple paths (tiny graphs only)."""
    p = graph.vertex_count
    m = graph.matrix.toarray()
    best = np.full(p, np.inf)
    best[source] = 0.0

    def visit(node, dist, seen):
        for nxt in range(p):
            if m[node, nxt] > 0 and nxt not in seen:
                nd = dist + m[node, nxt]
                if nd < best[nxt]:
                    best[nxt] = nd
                visit(nxt, nd, seen | {nxt})

    visit(source, 0.0, {source})
    return best


class TestDistanceColumn:
    def test_path_graph(self, path_graph):
        d = distance_column(DijkstraGraph(path_graph), 0)
        assert np.array_equal(d, [0.0, 1.0, 3.0])

    def test_triangle_graph_vs_path_enumeration(self, triangle_graph):
        backend = DijkstraGraph(triangle_graph)
        d = distance_column(backend, 0)
        assert np.array_equal(d, [0.0, 1.0, 2.0])
        assert np.array_equal(d, brute_force_shortest_paths(triangle_graph, 0))

    def test_sphere_antipodal(self):
        cloud = PointCloud([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]])
        d = distance_column(AnalyticSphere(cloud, 1.0), 0)
        assert d[0] == 0.0
        assert d[1] == pytest.approx(np.pi, abs=1e-15)

    def test_sphere_rejects_off_sphere_points(self):
        cloud = PointCloud([[0.0, 0.0, 1.1], [0.0, 0.0, -1.0]])
        with pytest.raises(ValueError):
            AnalyticSphere(cloud, 1.0)

    def test_plane_column(self):
        cloud = PointCloud([[0.0, 0.0], [3.0, 4.0], [1.0, 0.0]])
        d = distance_column(AnalyticPlane(cloud), 0)
        assert np.array_equal(d, [0.0, 5.0, 1.0])

    def test_unreachable(self):
        g = WeightedGraph.from_edges(4, [0, 2], [1, 3], [1.0, 1.0])
        with pytest.raises(Unreachable):
            distance_column(DijkstraGraph(g), 0)

    def test_source_out_of_range(self, path_graph):
        with pytest.raises(ValueError):
            distance_column(DijkstraGraph(path_graph), 5)

    def test_graph_symmetry_exact(self):
        # integer weights keep path sums exact, so d(a->b) == d(b->a) bitwise
        rng = np.random.default_rng(7)
        for _ in range(5):
            p = 30
            u, v = np.triu_indices(p, k=1)
            keep = rng.random(u.shape[0]) < 0.15
            u, v = u[keep], v[keep]
            u = np.concatenate([u, np.arange(p - 1)])
            v = np.concatenate([v, np.arange(1, p)])
            uv = np.unique(np.column_stack([u, v]), axis=0)
            w = rng.integers(1, 100, uv.shape[0]).astype(float)
            g = DijkstraGraph(WeightedGraph.from_edges(p, uv[:, 0], uv[:, 1], w))
            a, b = 0, p - 1
            assert distance_column(g, a)[b] == distance_column(g, b)[a]


class TestFarthestPointSampling:
    def test_unit_path_picks_far_endpoint(self, unit_path_graph):
        s = farthest_point_sampling(DijkstraGraph(unit_path_graph), 2, first=0)
        assert s.indices.tolist() == [0, 2]

    def test_single_sample(self, unit_path_graph):
        s = farthest_point_sampling(DijkstraGraph(unit_path_graph), 1, first=1)
        assert s.indices.tolist() == [1]
        assert s.distances.shape == (3, 1)

    def test_matches_brute_force_oracle_on_circle(self):
        cloud = circle_points(10, 1.0)
        backend = AnalyticPlane(cloud)
        n = 3
        s = farthest_point_sampling(backend, n, first=0)

        # independent re-implementation of the argmax-min rule
        chosen = [0]
        cols = [distance_column(backend, 0)]
        for _ in range(n - 1):
            best_j, best_val = None, -1.0
            for j in range(cloud.point_count):
                if j in chosen:
                    continue
                val = min(c[j] for c in cols)
                if val > best_val:
                    best_j, best_val = j, val
            chosen.append(best_j)
            cols.append(distance_column(backend, best_j))
        assert s.indices.tolist() == chosen
        assert np.array_equal(s.distances, np.column_stack(cols))

    def test_determinism_bitwise(self, small_grid_mesh):
        from geomds.geometry import mesh_to_graph

        backend = DijkstraGraph(mesh_to_graph(small_grid_mesh))
        a = farthest_point_sampling(backend, 8, first=0)
        b = farthest_point_sampling(backend, 8, first=0)
        assert np.array_equal(a.indices, b.indices)
        assert np.array_equal(a.distances, b.distances)

    def test_separation_at_least_covering_radius(self):
        # greedy landmarks: min pairwise sample distance >= covering radius
        rng = np.random.default_rng(11)
        pts = rng.standard_normal((150, 2))
        backend = AnalyticPlane(PointCloud(pts))
        s = farthest_point_sampling(backend, 12, first=0)
        d = all_pairs_distances(backend)
        block = d[np.ix_(s.indices, s.indices)]
        separation = block[~np.eye(12, dtype=bool)].min()
        covering = d[:, s.indices].min(axis=1).max()
        assert separation >= covering - 1e-12

    def test_sampled_row_block_symmetric_zero_diag(self, small_grid_mesh):
        from geomds.geometry import mesh_to_graph

        backend = DijkstraGraph(mesh_to_graph(small_grid_mesh))
        s = farthest_point_sampling(backend, 6, first=0)
        cols = square_columns(s)
        block = cols.sampled_rows()
        assert np.allclose(block, block.T, atol=1e-12)
        assert np.array_equal(np.diag(block), np.zeros(6))

    def test_bounds(self, unit_path_graph):
        backend = DijkstraGraph(unit_path_graph)
        with pytest.raises(ValueError):
            farthest_point_sampling(backend, 0, first=0)
        with pytest.raises(ValueError):
            farthest_point_sampling(backend, 4, first=0)
        with pytest.raises(ValueError):
            farthest_point_sampling(backend, 2, first=9)


class TestSquareColumns:
    def test_simple_column(self):
        s = SampleSet(np.array([0]), np.array([[0.0], [1.0], [3.0]]))
        r = square_columns(s)
        assert np.array_equal(r.values.ravel(), [0.0, 1.0, 9.0])
        assert r.metric == "squared-geodesic"

    def test_zero_column(self):
        s = SampleSet(np.array([1]), np.array([[0.0], [0.0]]))
        assert np.array_equal(square_columns(s).values, np.zeros((2, 1)))

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 10_000))
    def test_matches_elementwise_oracle(self, seed):
        rng = np.random.default_rng(seed)
        p, n = 17, 4
        f = np.abs(rng.standard_normal((p, n)))
        idx = rng.choice(p, size=n, replace=False)
        f[idx, np.arange(n)] = 0.0
        s = SampleSet(idx, f)
        r = square_columns(s)
        expected = np.array([[f[i, k] * f[i, k] for k in range(n)] for i in range(p)])
        assert np.array_equal(r.values, expected)
        assert np.array_equal(r.indices, idx)


class TestAllPairs:
    def test_matches_columns(self, triangle_graph):
        backend = DijkstraGraph(triangle_graph)
        d = all_pairs_distances(backend)
        for s in range(3):
            assert np.array_equal(d[s], distance_column(backend, s))

    def test_sphere_symmetric_zero_diag(self):
        cloud = circle_points(9, 2.0)
        d = all_pairs_distances(AnalyticSphere(cloud, 2.0))
        assert np.array_equal(d, d.T)
        assert np.array_equal(np.diag(d), np.zeros(9))
