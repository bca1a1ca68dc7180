"""geomds: quasi-linear classical scaling from low-rank factorizations of
geodesic distance matrices."""

__version__ = "0.1.0"

from .decompose import (
    CUR,
    FMDS,
    NMDS,
    InterpolationMatrix,
    LowRankSquaredDistances,
    SelectionMatrix,
    cur_decompose,
    default_n1,
    fmds_decompose,
    interpolation_matrix,
    nmds_decompose,
    query_pairs,
    reconstruct_dense,
)
from .geodesics import (
    COSINE,
    SQUARED_GEODESIC,
    AnalyticPlane,
    AnalyticSphere,
    DijkstraGraph,
    DistanceColumns,
    SampleSet,
    all_pairs_distances,
    distance_column,
    farthest_point_sampling,
    square_columns,
)
from .geometry import (
    PointCloud,
    TriMesh,
    WeightedGraph,
    knn_graph,
    load_mesh,
    load_point_cloud,
    mesh_to_graph,
    save_mesh,
)
from .laplacian import (
    LaplacianPair,
    barycentric_mass,
    build_laplacian,
    cotan_stiffness,
)
from .metrics import (
    PairSample,
    best_rank_n,
    fps_anchors,
    procrustes_error,
    rel_frobenius_error,
    rms_relative_pair_error,
    triangle_violation,
)
from .pipeline import RunConfig, load_factors
from .scaling import (
    Embedding,
    SmallEigenProblem,
    accelerated_mds,
    classical_mds_dense,
    cos_transform,
    default_sphere_radius,
    scaled_stress,
    sphere_embed,
    stress,
    stress_from_squared_distances,
)

__all__ = [
    "__version__",
    "AnalyticPlane",
    "AnalyticSphere",
    "COSINE",
    "CUR",
    "DijkstraGraph",
    "DistanceColumns",
    "Embedding",
    "FMDS",
    "InterpolationMatrix",
    "LaplacianPair",
    "LowRankSquaredDistances",
    "NMDS",
    "PairSample",
    "PointCloud",
    "RunConfig",
    "SQUARED_GEODESIC",
    "SampleSet",
    "SelectionMatrix",
    "SmallEigenProblem",
    "TriMesh",
    "WeightedGraph",
    "accelerated_mds",
    "all_pairs_distances",
    "barycentric_mass",
    "best_rank_n",
    "build_laplacian",
    "classical_mds_dense",
    "cos_transform",
    "cotan_stiffness",
    "cur_decompose",
    "default_n1",
    "default_sphere_radius",
    "distance_column",
    "farthest_point_sampling",
    "fmds_decompose",
    "fps_anchors",
    "interpolation_matrix",
    "knn_graph",
    "load_factors",
    "load_mesh",
    "load_point_cloud",
    "mesh_to_graph",
    "nmds_decompose",
    "procrustes_error",
    "query_pairs",
    "reconstruct_dense",
    "rel_frobenius_error",
    "rms_relative_pair_error",
    "save_mesh",
    "scaled_stress",
    "sphere_embed",
    "square_columns",
    "stress",
    "stress_from_squared_distances",
    "triangle_violation",
]
