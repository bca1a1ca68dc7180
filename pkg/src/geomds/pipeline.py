"""File-based pipeline: sample -> decompose -> embed / query / eval.

Each run_* function is a pure function of its configuration and input
files. Artifact outputs (index/matrix/embedding/distance files and the
metrics records) are byte-identical across reruns; the run log
(``run_log.jsonl``) additionally carries timing diagnostics for queries
and is the one output excluded from that guarantee.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import matio
from .decompose import (
    CUR,
    FMDS,
    NMDS,
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
from .errors import InvalidConfig, MetricMismatch, TooLarge
from .geodesics import (
    COSINE,
    SQUARED_GEODESIC,
    AnalyticPlane,
    AnalyticSphere,
    DijkstraGraph,
    SampleSet,
    all_pairs_distances,
    farthest_point_sampling,
    square_columns,
)
from .geometry import (
    PointCloud,
    knn_graph,
    load_mesh,
    load_point_cloud,
    mesh_to_graph,
)
from .laplacian import build_laplacian
from .limits import ensure_dense_ok
from .metrics import (
    PairSample,
    fps_anchors,
    rel_frobenius_error,
    rms_relative_pair_error,
    triangle_violation,
)
from .scaling import (
    accelerated_mds,
    cos_transform,
    default_sphere_radius,
    scaled_stress,
    sphere_embed,
    stress,
)

INDICES_FILE = "indices.csv"
COLUMNS_FILE = "F.bin"
OUTER_FILE = "S.bin"
CORE_FILE = "T.bin"
HEADER_FILE = "header.json"
EMBEDDING_FILE = "Z.csv"
EMBEDDING_BIN_FILE = "Z.bin"
DISTANCES_FILE = "distances.csv"
METRICS_FILE = "metrics.jsonl"
RUN_LOG_FILE = "run_log.jsonl"

MESH_FORMATS = ("off", "obj")
CLOUD_FORMATS = ("csv",)
BACKENDS = ("dijkstra", "plane", "sphere")
METHODS = (FMDS, NMDS, CUR)
DEFAULT_METRICS = ("stress", "rel_frobenius_error", "rms_relative_pair_error")
KNOWN_METRICS = DEFAULT_METRICS + ("triangle_violation",)


@dataclass
class RunConfig:
    """Everything a pipeline command needs, file paths included."""

    input: str | None = None
    format: str | None = None
    backend: str = "dijkstra"
    method: str = NMDS
    n: int = 100
    n1: int | None = None
    mu: float = 1e4
    dim: int = 2
    sphere: bool = False
    k: int = 2
    radius: float | None = None
    normalize: bool = False
    first: int = 0
    seed: int = 0
    knn: int = 12
    pairs: str | None = None
    out: str = "."
    metrics: tuple[str, ...] = DEFAULT_METRICS
    pair_count: int = 1000
    anchor_count: int = 100
    dense_cap: int | None = None

    def __post_init__(self):
        if self.n < 1:
            raise InvalidConfig(f"need n >= 1, got {self.n}")
        if self.n1 is not None and not 1 <= self.n1 <= self.n:
            raise InvalidConfig(f"need 1 <= n1 <= n, got n1={self.n1}, n={self.n}")
        if not 1.0 <= self.mu <= 1e12:
            raise InvalidConfig(f"mu must lie in [1, 1e12], got {self.mu}")
        if self.dim < 1:
            raise InvalidConfig(f"need dim >= 1, got {self.dim}")
        if self.k < 0:
            raise InvalidConfig(f"need k >= 0, got {self.k}")
        if self.method not in METHODS:
            raise InvalidConfig(f"unknown method {self.method!r}")
        if self.backend not in BACKENDS:
            raise InvalidConfig(f"unknown backend {self.backend!r}")
        if self.radius is not None and self.radius <= 0:
            raise InvalidConfig(f"radius must be positive, got {self.radius}")
        unknown = set(self.metrics) - set(KNOWN_METRICS)
        if unknown:
            raise InvalidConfig(f"unknown metrics: {sorted(unknown)}")

    @property
    def out_dir(self) -> Path:
        return Path(self.out)


def _input_format(config: RunConfig) -> str:
    if config.input is None:
        raise InvalidConfig("an input file is required")
    fmt = (config.format or Path(config.input).suffix.lstrip(".")).lower()
    if fmt not in MESH_FORMATS + CLOUD_FORMATS:
        raise InvalidConfig(f"unsupported input format {fmt!r}")
    return fmt


def load_domain(config: RunConfig):
    """Build the geodesic backend (plus the mesh, when the input is one)."""
    fmt = _input_format(config)
    mesh = None
    if fmt in MESH_FORMATS:
        mesh = load_mesh(config.input, fmt)
        cloud = PointCloud(mesh.vertices)
    else:
        cloud = load_point_cloud(config.input)
    if config.backend == "dijkstra":
        graph = mesh_to_graph(mesh) if mesh is not None else knn_graph(cloud, config.knn)
        backend = DijkstraGraph(graph)
    elif config.backend == "plane":
        backend = AnalyticPlane(cloud)
    else:
        radius = config.radius
        if radius is None:
            radius = float(np.linalg.norm(cloud.points, axis=1).mean())
        backend = AnalyticSphere(cloud, radius)
    return backend, mesh


def _log(config: RunConfig, record: dict):
    matio.append_jsonl(config.out_dir / RUN_LOG_FILE, record)


def run_sample(config: RunConfig) -> dict:
    """Farthest point sampling; writes the index list and distance columns."""
    backend, _ = load_domain(config)
    samples = farthest_point_sampling(backend, config.n, config.first)
    out = config.out_dir
    matio.write_indices(out / INDICES_FILE, samples.indices)
    matio.write_matrix(out / COLUMNS_FILE, samples.distances)
    summary = {
        "event": "sample",
        "p": samples.vertex_count,
        "n": samples.sample_count,
        "first": config.first,
        "indices": [int(i) for i in samples.indices],
        "files": {
            "indices": str(out / INDICES_FILE),
            "columns": str(out / COLUMNS_FILE),
        },
    }
    _log(config, {k: v for k, v in summary.items() if k != "files"})
    return summary


def _load_samples(config: RunConfig) -> SampleSet:
    out = config.out_dir
    idx_path = out / INDICES_FILE
    col_path = out / COLUMNS_FILE
    if idx_path.exists() and col_path.exists():
        samples = SampleSet(matio.read_indices(idx_path), matio.read_matrix(col_path))
        # stale files from a different landmark count must not leak in:
        # the command stays a pure function of (config, input files)
        if samples.sample_count == config.n:
            return samples
    run_sample(config)
    return SampleSet(matio.read_indices(idx_path), matio.read_matrix(col_path))


def run_decompose(config: RunConfig) -> dict:
    """Build the factor pair from sample files (sampling inline if absent)."""
    samples = _load_samples(config)
    radius = None
    if config.sphere:
        radius = config.radius if config.radius is not None else default_sphere_radius(samples)
        cols = cos_transform(samples, radius)
    else:
        cols = square_columns(samples)
    if config.method == FMDS:
        fmt = _input_format(config)
        if fmt not in MESH_FORMATS:
            raise InvalidConfig("the smoothness method needs a triangle mesh input")
        mesh = load_mesh(config.input, fmt)
        lap = build_laplacian(mesh)
        sel = SelectionMatrix(mesh.vertex_count, samples.indices)
        interp = interpolation_matrix(lap, sel, config.mu)
        fac = fmds_decompose(interp, cols)
    elif config.method == NMDS:
        fac = nmds_decompose(cols, config.n1)
    else:
        n1 = config.n1 if config.n1 is not None else default_n1(samples.sample_count)
        fac = cur_decompose(cols, np.arange(n1))
    out = config.out_dir
    header = {
        "method": fac.method,
        "metric": fac.metric,
        "p": fac.vertex_count,
        "n": fac.n,
        "n1": fac.n1,
        "mu": fac.mu,
        "radius": radius,
        "sample_indices": [int(i) for i in fac.sample_indices],
    }
    matio.write_matrix(out / OUTER_FILE, fac.outer)
    matio.write_matrix(out / CORE_FILE, fac.core)
    matio.write_json(out / HEADER_FILE, header)
    _log(
        config,
        {
            "event": "decompose",
            "method": fac.method,
            "metric": fac.metric,
            "n": fac.n,
            "n1": fac.n1,
            "radius": radius,
            "rank_deficient": fac.rank_deficient,
        },
    )
    return {
        "event": "decompose",
        "header": header,
        "files": {
            "outer": str(out / OUTER_FILE),
            "core": str(out / CORE_FILE),
            "header": str(out / HEADER_FILE),
        },
    }


def load_factors(out_dir) -> LowRankSquaredDistances:
    """Rebuild the factor pair from S.bin / T.bin / header.json."""
    out = Path(out_dir)
    header = matio.read_json(out / HEADER_FILE)
    return LowRankSquaredDistances(
        outer=matio.read_matrix(out / OUTER_FILE),
        core=matio.read_matrix(out / CORE_FILE),
        method=header["method"],
        metric=header["metric"],
        sample_indices=np.asarray(header["sample_indices"], dtype=np.int64),
        n=int(header["n"]),
        n1=header.get("n1"),
        mu=header.get("mu"),
    )


def run_embed(config: RunConfig) -> dict:
    """Embed from factor files; flat by default, spherical for cosine factors."""
    out = config.out_dir
    fac = load_factors(out)
    header = matio.read_json(out / HEADER_FILE)
    spherical = config.sphere or fac.metric == COSINE
    if spherical:
        radius = config.radius or header.get("radius")
        if radius is None:
            raise InvalidConfig("sphere embedding needs a radius")
        emb = sphere_embed(fac, config.k, float(radius), config.normalize)
    else:
        emb = accelerated_mds(fac, config.dim)
    matio.write_embedding_csv(out / EMBEDDING_FILE, emb.coords)
    matio.write_matrix(out / EMBEDDING_BIN_FILE, emb.coords)
    record = {
        "event": "embed",
        "spherical": spherical,
        "dim": emb.dim,
        "eigenvalues": [float(v) for v in emb.eigenvalues],
        "clamped_count": emb.clamped_count,
    }
    _log(config, record)
    return {
        **record,
        "files": {
            "embedding": str(out / EMBEDDING_FILE),
            "embedding_binary": str(out / EMBEDDING_BIN_FILE),
        },
    }


def run_query(config: RunConfig) -> dict:
    """Evaluate approximate distances for an i,j pairs file."""
    if config.pairs is None:
        raise InvalidConfig("a pairs file is required")
    out = config.out_dir
    fac = load_factors(out)
    pairs = matio.read_pairs_csv(config.pairs)
    start = time.perf_counter()
    values = query_pairs(fac, pairs)
    elapsed = time.perf_counter() - start
    matio.write_distances_csv(out / DISTANCES_FILE, pairs, values)
    rate = len(values) / elapsed if elapsed > 0 else float("inf")
    _log(
        config,
        {
            "event": "query",
            "pairs": int(len(values)),
            "elapsed_seconds": elapsed,
            "pairs_per_second": rate,
        },
    )
    return {
        "event": "query",
        "count": int(len(values)),
        "pairs_per_second": rate,
        "files": {"distances": str(out / DISTANCES_FILE)},
    }


def _true_distances(config: RunConfig, backend, p: int) -> np.ndarray:
    ensure_dense_ok(p, config.dense_cap)
    return all_pairs_distances(backend)


def run_eval(config: RunConfig) -> dict:
    """Emit one JSON record per requested metric against the true geodesics."""
    out = config.out_dir
    fac = load_factors(out)
    backend, _ = load_domain(config)
    p = fac.vertex_count
    records = []
    dense_true = None
    dense_approx = None

    def true_matrix():
        nonlocal dense_true
        if dense_true is None:
            dense_true = _true_distances(config, backend, p)
        return dense_true

    def approx_matrix():
        nonlocal dense_approx
        if dense_approx is None:
            d = np.sqrt(np.maximum(reconstruct_dense(fac, config.dense_cap), 0.0))
            dense_approx = 0.5 * (d + d.T)
        return dense_approx

    for name in config.metrics:
        try:
            if name == "stress":
                if fac.metric != SQUARED_GEODESIC:
                    raise MetricMismatch("stress needs squared-geodesic factors")
                E = true_matrix() ** 2
                emb = accelerated_mds(fac, config.dim)
                value = stress(emb, E, cap=config.dense_cap)
                record = {
                    "metric": name,
                    "value": value,
                    "value_scaled": scaled_stress(value, p),
                    "params": {"dim": config.dim},
                    "seed": config.seed,
                }
            elif name == "rel_frobenius_error":
                value = rel_frobenius_error(approx_matrix(), true_matrix())
                record = {
                    "metric": name,
                    "value": value,
                    "params": {"n": fac.n, "n1": fac.n1, "method": fac.method},
                    "seed": config.seed,
                }
            elif name == "rms_relative_pair_error":
                sample = PairSample.random(p, config.pair_count, config.seed)
                value = rms_relative_pair_error(fac, backend, sample)
                record = {
                    "metric": name,
                    "value": value,
                    "params": {"pair_count": config.pair_count},
                    "seed": config.seed,
                }
            elif name == "triangle_violation":
                first = config.seed % p
                anchors = fps_anchors(true_matrix(), config.anchor_count, first)
                per_anchor = triangle_violation(
                    approx_matrix(), anchors, cap=config.dense_cap
                )
                record = {
                    "metric": name,
                    "value": float(per_anchor.sum()),
                    "params": {"anchors": config.anchor_count, "first": int(first)},
                    "seed": config.seed,
                }
            else:  # unreachable; RunConfig validates metric names
                continue
        except TooLarge as exc:
            record = {
                "metric": name,
                "skipped": True,
                "warning": str(exc),
                "seed": config.seed,
            }
        records.append(record)
    matio.write_jsonl(out / METRICS_FILE, records)
    return {
        "event": "eval",
        "records": records,
        "files": {"metrics": str(out / METRICS_FILE)},
    }
