import numpy as np
import pytest

from geomds.decompose import (
    SelectionMatrix,
    cur_decompose,
    default_n1,
    fmds_decompose,
    interpolation_matrix,
    nmds_decompose,
    query_pairs,
    reconstruct_dense,
)
from geomds.errors import (
    IllConditioned,
    IndexOutOfRange,
    MetricMismatch,
    RankDeficientWarning,
    ShapeMismatch,
    SingularSystem,
    TooLarge,
)
from geomds.geodesics import (
    AnalyticPlane,
    DijkstraGraph,
    DistanceColumns,
    farthest_point_sampling,
    square_columns,
)
from geomds.geometry import PointCloud, TriMesh, mesh_to_graph
from geomds.laplacian import build_laplacian
from geomds.synth import grid_mesh


@pytest.fixture(scope="module")
def grid_setup():
    """Grid mesh with Dijkstra columns: the workhorse desk instance."""
    mesh = grid_mesh(12, 10, 2.0, 1.6)
    backend = DijkstraGraph(mesh_to_graph(mesh))
    samples = farthest_point_sampling(backend, 16, first=0)
    cols = square_columns(samples)
    lap = build_laplacian(mesh)
    return mesh, backend, samples, cols, lap


class TestInterpolationMatrix:
    def test_identity_limit_full_selection(self, small_grid_mesh):
        # with every vertex constrained, huge mu forces M -> I
        lap = build_laplacian(small_grid_mesh)
        p = lap.vertex_count
        sel = SelectionMatrix(p, np.arange(p))
        interp = interpolation_matrix(lap, sel, mu=1e10)
        assert np.abs(interp.weights - np.eye(p)).max() <= 1e-4

    def test_constant_columns_reproduced(self, grid_setup):
        mesh, _, samples, _, lap = grid_setup
        sel = SelectionMatrix(mesh.vertex_count, samples.indices)
        interp = interpolation_matrix(lap, sel, mu=1e8)
        c = 3.7
        rec = interp.weights @ np.full(samples.sample_count, c)
        assert np.abs(rec - c).max() <= 1e-4 * c

    def test_grid_column_reconstruction(self):
        # squared Euclidean distance from the center vertex, rebuilt from
        # 13 samples; checked against the analytic paraboloid values
        nx = 21
        mesh = grid_mesh(nx, nx, 2.0, 2.0)
        center = nx * (nx // 2) + nx // 2
        v = mesh.vertices
        z = v[:, 0] ** 2 + v[:, 1] ** 2
        plane = AnalyticPlane(PointCloud(v[:, :2]))
        samples = farthest_point_sampling(plane, 13, first=center)
        lap = build_laplacian(mesh)
        sel = SelectionMatrix(mesh.vertex_count, samples.indices)
        interp = interpolation_matrix(lap, sel, mu=1e4)
        rebuilt = interp.weights @ z[samples.indices]
        rel = np.linalg.norm(rebuilt - z) / np.linalg.norm(z)
        assert rel <= 0.15  # measured 0.123 on this fixture

    def test_sampled_rows_approach_identity(self, grid_setup):
        mesh, _, samples, _, lap = grid_setup
        sel = SelectionMatrix(mesh.vertex_count, samples.indices)
        interp = interpolation_matrix(lap, sel, mu=1e8)
        block = interp.weights[samples.indices, :]
        assert np.abs(block - np.eye(samples.sample_count)).max() <= 1e-4

    def test_residual_contract(self, grid_setup):
        mesh, _, samples, _, lap = grid_setup
        sel = SelectionMatrix(mesh.vertex_count, samples.indices)
        interp = interpolation_matrix(lap, sel, mu=1e4)
        system = lap.energy_matrix()
        pen = np.zeros(mesh.vertex_count)
        pen[samples.indices] = 1e4
        from scipy import sparse

        system = system + sparse.diags(pen)
        rhs = np.zeros_like(interp.weights)
        rhs[samples.indices, np.arange(samples.sample_count)] = 1e4
        rel = np.linalg.norm(system @ interp.weights - rhs, axis=0) / 1e4
        assert rel.max() <= 1e-8

    def test_singular_system_on_disconnected_mesh(self):
        # two disjoint triangles, constraint only in the first component
        v = np.array(
            [[0, 0, 0], [1, 0, 0], [0, 1, 0], [5, 5, 0], [6, 5, 0], [5, 6, 0]],
            dtype=float,
        )
        f = [[0, 1, 2], [3, 4, 5]]
        lap = build_laplacian(TriMesh(v, f))
        with pytest.raises(SingularSystem):
            interpolation_matrix(lap, SelectionMatrix(6, np.array([0])), mu=1e4)

    def test_rejects_nonpositive_mu(self, grid_setup):
        mesh, _, samples, _, lap = grid_setup
        sel = SelectionMatrix(mesh.vertex_count, samples.indices)
        with pytest.raises(ValueError):
            interpolation_matrix(lap, sel, mu=0.0)


class TestFmdsDecompose:
    def test_single_column_outer_product(self):
        rng = np.random.default_rng(0)
        p = 9
        m = rng.standard_normal((p, 1))
        r = np.abs(rng.standard_normal((p, 1)))
        r[4, 0] = 0.0
        from geomds.decompose import InterpolationMatrix

        interp = InterpolationMatrix(m, np.array([4]), mu=1.0)
        cols = DistanceColumns(r, np.array([4]))
        fac = fmds_decompose(interp, cols)
        expected = 0.5 * (m @ r.T + r @ m.T)
        assert np.abs(reconstruct_dense(fac) - expected).max() <= 1e-12

    def test_matches_dense_symmetrization(self, grid_setup):
        mesh, _, samples, cols, lap = grid_setup
        sel = SelectionMatrix(mesh.vertex_count, samples.indices)
        interp = interpolation_matrix(lap, sel, mu=1e4)
        fac = fmds_decompose(interp, cols)
        m, r = interp.weights, cols.values
        dense = 0.5 * (m @ r.T + r @ m.T)
        scale = np.abs(dense).max()
        assert np.abs(reconstruct_dense(fac) - dense).max() <= 1e-12 * scale

    def test_rank_at_most_2n(self, grid_setup):
        mesh, _, samples, cols, lap = grid_setup
        sel = SelectionMatrix(mesh.vertex_count, samples.indices)
        fac = fmds_decompose(interpolation_matrix(lap, sel), cols)
        s = np.linalg.svd(reconstruct_dense(fac), compute_uv=False)
        assert (s > 1e-9 * s[0]).sum() <= 2 * samples.sample_count

    def test_shape_mismatch(self, grid_setup):
        mesh, _, samples, cols, lap = grid_setup
        sel = SelectionMatrix(mesh.vertex_count, samples.indices)
        interp = interpolation_matrix(lap, sel)
        bad = DistanceColumns(cols.values[:, :-1], cols.indices[:-1])
        with pytest.raises(ShapeMismatch):
            fmds_decompose(interp, bad)


class TestNmdsDecompose:
    def test_sampled_block_reproduced_when_full_rank(self, grid_setup):
        _, _, samples, cols, _ = grid_setup
        n = samples.sample_count
        block = cols.sampled_rows()
        assert np.linalg.cond(0.5 * (block + block.T)) < 1e10  # genuinely invertible
        fac = nmds_decompose(cols, n1=n)
        rebuilt = reconstruct_dense(fac)[:, samples.indices]
        scale = np.abs(cols.values).max()
        assert np.abs(rebuilt - cols.values).max() <= 1e-10 * scale

    def test_rank_one_matrix_exact(self):
        # algebraic identity check on E = x x^T with a single retained column
        rng = np.random.default_rng(5)
        x = rng.standard_normal(30) + 3.0
        E = np.outer(x, x)
        s = 7
        cols = DistanceColumns(E[:, [s]], np.array([s]), metric="cosine")
        fac = nmds_decompose(cols, n1=1)
        assert np.abs(reconstruct_dense(fac) - E).max() <= 1e-12 * np.abs(E).max()

    def test_default_n1_is_half(self, grid_setup):
        _, _, samples, cols, _ = grid_setup
        fac = nmds_decompose(cols)
        assert fac.n1 == default_n1(samples.sample_count)

    def test_regularization_beats_full_rank_on_desk_mesh(self):
        mesh = grid_mesh(20, 20, 2.0, 2.0)
        backend = DijkstraGraph(mesh_to_graph(mesh))
        samples = farthest_point_sampling(backend, 60, first=0)
        cols = square_columns(samples)
        from geomds.geodesics import all_pairs_distances

        E = all_pairs_distances(backend) ** 2
        err = {}
        for n1 in (default_n1(60), 60):
            fac = nmds_decompose(cols, n1=n1)
            err[n1] = np.linalg.norm(reconstruct_dense(fac) - E)
        assert err[default_n1(60)] <= err[60]

    def test_rank_deficient_warns_and_reduces(self):
        # flat-cloud squared distances have tiny exact rank; most of the
        # spectrum is numerically zero
        rng = np.random.default_rng(1)
        cloud = PointCloud(rng.standard_normal((40, 2)))
        backend = AnalyticPlane(cloud)
        samples = farthest_point_sampling(backend, 10, first=0)
        cols = square_columns(samples)
        with pytest.warns(RankDeficientWarning):
            fac = nmds_decompose(cols, n1=10)
        assert fac.rank_deficient
        assert fac.n1 < 10
        s = np.linalg.svd(reconstruct_dense(fac), compute_uv=False)
        assert (s > 1e-9 * s[0]).sum() <= fac.n1

    def test_n1_bounds(self, grid_setup):
        _, _, _, cols, _ = grid_setup
        with pytest.raises(ValueError):
            nmds_decompose(cols, n1=0)
        with pytest.raises(ValueError):
            nmds_decompose(cols, n1=17)


class TestCurDecompose:
    def test_full_subset_matches_nmds_full_rank(self, grid_setup):
        _, _, samples, cols, _ = grid_setup
        n = samples.sample_count
        fac_cur = cur_decompose(cols, subset=np.arange(n))
        fac_nys = nmds_decompose(cols, n1=n)
        a = reconstruct_dense(fac_cur)
        b = reconstruct_dense(fac_nys)
        assert np.abs(a - b).max() <= 1e-10 * np.abs(b).max()

    def test_single_column_matches_dense_oracle(self, grid_setup):
        _, _, samples, cols, _ = grid_setup
        fac = cur_decompose(cols, subset=np.array([0]))
        c = cols.values[:, [0]]
        c_s = c[samples.indices, :]
        u = np.linalg.lstsq(c_s, np.eye(samples.sample_count), rcond=None)[0]
        dense = 0.5 * (c @ u @ cols.values.T + cols.values @ u.T @ c.T)
        assert np.abs(reconstruct_dense(fac) - dense).max() <= 1e-12 * np.abs(dense).max()

    def test_least_squares_optimality(self, grid_setup):
        _, _, samples, cols, _ = grid_setup
        subset = np.arange(5)
        c_s = cols.values[samples.indices][:, subset]
        target = cols.sampled_rows().T  # fit C_s M^T ~ R^T
        q, r = np.linalg.qr(c_s)
        from scipy.linalg import solve_triangular

        u = solve_triangular(r, q.T) @ target
        base = np.linalg.norm(c_s @ u - target)
        rng = np.random.default_rng(2)
        for _ in range(100):
            perturbed = u + rng.standard_normal(u.shape) * 0.01 * np.abs(u).max()
            assert np.linalg.norm(c_s @ perturbed - target) >= base

    def test_ill_conditioned(self):
        # duplicated retained columns make the sampled block singular
        vals = np.abs(np.random.default_rng(3).standard_normal((12, 3))) + 1.0
        vals[:, 2] = vals[:, 1]
        idx = np.array([0, 1, 2])
        vals[idx, np.arange(3)] = 0.0
        vals[1, 2] = 0.0
        vals[2, 1] = 0.0
        cols = DistanceColumns(vals, idx)
        with pytest.raises(IllConditioned):
            cur_decompose(cols, subset=np.array([1, 2]))

    def test_default_subset_size(self, grid_setup):
        _, _, samples, cols, _ = grid_setup
        fac = cur_decompose(cols)
        assert fac.n1 == default_n1(samples.sample_count)
        assert fac.rank == fac.n1 + samples.sample_count


class TestQueryPairs:
    def test_sampled_self_pair_is_zero(self, grid_setup):
        _, backend, samples, cols, _ = grid_setup
        fac = nmds_decompose(cols, n1=samples.sample_count)
        k = int(samples.indices[3])
        d = query_pairs(fac, [(k, k)])
        diameter = samples.distances.max()
        assert abs(d[0]) <= 1e-6 * diameter

    def test_sampled_column_reproduction(self, grid_setup):
        _, _, samples, cols, _ = grid_setup
        fac = nmds_decompose(cols, n1=samples.sample_count)
        i, k = 37, 5
        d = query_pairs(fac, [(i, int(samples.indices[k]))])
        expected = np.sqrt(cols.values[i, k])
        assert abs(d[0] - expected) <= 1e-6 * expected

    def test_flat_grid_all_pairs_rms(self):
        mesh = grid_mesh(10, 10, 1.0, 1.0)
        cloud = PointCloud(mesh.vertices[:, :2])
        backend = AnalyticPlane(cloud)
        samples = farthest_point_sampling(backend, 30, first=0)
        with pytest.warns(RankDeficientWarning):
            fac = nmds_decompose(square_columns(samples))
        i, j = np.triu_indices(100, k=1)
        approx = query_pairs(fac, np.column_stack([i, j]))
        from geomds.geodesics import all_pairs_distances

        true = all_pairs_distances(backend)[i, j]
        rms = np.sqrt(np.mean(((approx - true) / true) ** 2))
        assert rms <= 0.05

    def test_order_preserved_and_blocking(self, grid_setup):
        _, _, samples, cols, _ = grid_setup
        fac = nmds_decompose(cols)
        rng = np.random.default_rng(4)
        p = fac.vertex_count
        pairs = np.column_stack(
            [rng.integers(0, p, 1000), rng.integers(0, p, 1000)]
        )
        a = query_pairs(fac, pairs, block_size=64)
        b = query_pairs(fac, pairs, block_size=100000)
        assert np.array_equal(a, b)

    def test_index_out_of_range(self, grid_setup):
        _, _, _, cols, _ = grid_setup
        fac = nmds_decompose(cols)
        with pytest.raises(IndexOutOfRange):
            query_pairs(fac, [(0, fac.vertex_count)])

    def test_metric_mismatch(self, grid_setup):
        _, _, samples, _, _ = grid_setup
        from geomds.scaling import cos_transform

        fac = nmds_decompose(cos_transform(samples, radius=samples.distances.max()))
        with pytest.raises(MetricMismatch):
            query_pairs(fac, [(0, 1)])


class TestReconstructDense:
    def test_symmetric(self, grid_setup):
        _, _, _, cols, _ = grid_setup
        for fac in (nmds_decompose(cols), cur_decompose(cols)):
            e = reconstruct_dense(fac)
            assert np.abs(e - e.T).max() <= 1e-12 * np.abs(e).max()

    def test_cap_and_env_override(self, grid_setup, monkeypatch):
        _, _, _, cols, _ = grid_setup
        fac = nmds_decompose(cols)
        with pytest.raises(TooLarge):
            reconstruct_dense(fac, cap=10)
        monkeypatch.setenv("GEOMDS_DENSE_CAP", "10")
        with pytest.raises(TooLarge):
            reconstruct_dense(fac)
        monkeypatch.setenv("GEOMDS_DENSE_CAP", "100000")
        assert reconstruct_dense(fac).shape[0] == fac.vertex_count

    def test_mu_monotonicity(self, grid_setup):
        mesh, backend, samples, cols, lap = grid_setup
        sel = SelectionMatrix(mesh.vertex_count, samples.indices)
        from geomds.geodesics import distance_column

        target = distance_column(backend, 17) ** 2
        r = target[samples.indices]
        errs = {}
        for mu in (1e2, 1e8):
            interp = interpolation_matrix(lap, sel, mu=mu)
            errs[mu] = np.linalg.norm(interp.weights @ r - target)
        assert errs[1e8] <= errs[1e2]

    def test_projection_onto_columns_never_beaten(self, grid_setup):
        mesh, backend, samples, cols, lap = grid_setup
        from geomds.geodesics import all_pairs_distances

        E = all_pairs_distances(backend) ** 2
        q, _ = np.linalg.qr(cols.values)
        projection_err = np.linalg.norm(q @ (q.T @ E) - E)
        sel = SelectionMatrix(mesh.vertex_count, samples.indices)
        methods = {
            "fmds": fmds_decompose(interpolation_matrix(lap, sel), cols),
            "nmds": nmds_decompose(cols),
            "cur": cur_decompose(cols),
        }
        for name, fac in methods.items():
            err = np.linalg.norm(reconstruct_dense(fac) - E)
            assert projection_err <= err + 1e-9, name

    def test_core_exactly_symmetric(self, grid_setup):
        _, _, _, cols, _ = grid_setup
        fac = cur_decompose(cols)
        assert np.array_equal(fac.core, fac.core.T)
