"""Low-rank factorization of the squared-geodesic distance matrix.

Every route produces a pair (outer, core) with outer of size p*q and a
symmetric q*q core, approximating the full matrix as
``outer @ core @ outer.T`` without ever materializing it:

* the smoothness route solves a penalized bi-Laplacian system for an
  interpolation operator and symmetrizes its reconstruction,
* the learning route regularizes the Nystrom reconstruction by keeping
  only the largest-magnitude eigenvalues of the sampled block,
* the column-subset route builds a symmetrized CUR approximation.

Queries against the factors cost O(q) per pair.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.linalg import solve_triangular
from scipy.sparse.linalg import cg, splu

from .errors import (
    IllConditioned,
    IndexOutOfRange,
    MetricMismatch,
    RankDeficientWarning,
    ShapeMismatch,
    SingularSystem,
    SolverFailure,
)
from .geodesics import SQUARED_GEODESIC, DistanceColumns
from .laplacian import LaplacianPair
from .limits import ensure_dense_ok

FMDS = "fmds"
NMDS = "nmds"
CUR = "cur"

DEFAULT_MU = 1e4
SOLVE_RTOL = 1e-8
EIGENVALUE_FLOOR = 1e-12
CONDITION_LIMIT = 1e12


def default_n1(n: int) -> int:
    """Regularized eigencount: half the sample count, rounded up."""
    return (n + 1) // 2


@dataclass
class SelectionMatrix:
    """Implicit n*p 0/1 row selector: row k picks vertex ``indices[k]``."""

    size: int
    indices: np.ndarray

    def __post_init__(self):
        self.indices = np.asarray(self.indices, dtype=np.int64)
        if self.indices.ndim != 1 or self.indices.shape[0] < 1:
            raise ValueError("need at least one selected row")
        if np.unique(self.indices).shape[0] != self.indices.shape[0]:
            raise ValueError("selected rows must be distinct")
        if self.indices.min() < 0 or self.indices.max() >= self.size:
            raise ValueError("selected row out of range")

    @property
    def sample_count(self) -> int:
        return self.indices.shape[0]


@dataclass
class InterpolationMatrix:
    """Dense p*n operator mapping sampled column values to full columns."""

    weights: np.ndarray
    indices: np.ndarray
    mu: float

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.indices = np.asarray(self.indices, dtype=np.int64)
        if self.weights.ndim != 2 or self.weights.shape[1] != self.indices.shape[0]:
            raise ValueError("weights must be (p, n) with one column per sample")


@dataclass
class LowRankSquaredDistances:
    """Factor pair approximating the pairwise matrix as outer @ core @ outer.T.

    The core is symmetrized on construction so the reconstruction is
    exactly symmetric. ``metric`` tags whether the factors encode squared
    geodesic distances or the cosine transform used for sphere embedding.
    """

    outer: np.ndarray
    core: np.ndarray
    method: str
    metric: str
    sample_indices: np.ndarray
    n: int
    n1: int | None = None
    mu: float | None = None
    rank_deficient: bool = False

    def __post_init__(self):
        self.outer = np.asarray(self.outer, dtype=np.float64)
        self.core = np.asarray(self.core, dtype=np.float64)
        self.sample_indices = np.asarray(self.sample_indices, dtype=np.int64)
        if self.outer.ndim != 2 or self.core.shape != (self.rank, self.rank):
            raise ShapeMismatch(
                f"factors disagree: outer {self.outer.shape}, core {self.core.shape}"
            )
        if self.rank > 2 * self.n:
            raise ShapeMismatch(f"rank {self.rank} exceeds 2n = {2 * self.n}")
        self.core = 0.5 * (self.core + self.core.T)

    @property
    def rank(self) -> int:
        """Width q of the outer factor."""
        return self.outer.shape[1]

    @property
    def vertex_count(self) -> int:
        return self.outer.shape[0]


def interpolation_matrix(
    lap: LaplacianPair, selection: SelectionMatrix, mu: float = DEFAULT_MU
) -> InterpolationMatrix:
    """Solve (W^T A^-1 W + mu B^T B) M = mu B^T for the interpolation operator.

    Uses a sparse direct factorization with one solve per sample column and
    verifies each relative residual against 1e-8, falling back to conjugate
    gradients for any column that misses the target. The explicit inverse is
    never formed.

    Raises
    ------
    SingularSystem
        When the factorization finds an exactly singular matrix.
    SolverFailure
        When some column cannot reach the residual target.
    """
    if mu <= 0:
        raise ValueError(f"mu must be positive, got {mu}")
    p = lap.vertex_count
    if selection.size != p:
        raise ShapeMismatch(
            f"selection is over {selection.size} rows, Laplacian has {p}"
        )
    idx = selection.indices
    n = idx.shape[0]
    penalty = np.zeros(p)
    penalty[idx] = mu
    system = (lap.energy_matrix() + sparse.diags(penalty)).tocsc()
    rhs = np.zeros((p, n))
    rhs[idx, np.arange(n)] = mu
    try:
        lu = splu(system)
    except RuntimeError as exc:
        raise SingularSystem(f"penalized system is singular: {exc}") from exc
    weights = lu.solve(rhs)
    residual = system @ weights - rhs
    rel = np.linalg.norm(residual, axis=0) / mu  # each rhs column has norm mu
    for col in np.flatnonzero(rel > SOLVE_RTOL):
        x, info = cg(
            system, rhs[:, col], x0=weights[:, col], rtol=SOLVE_RTOL * 1e-2, maxiter=10 * p
        )
        if info == 0:
            weights[:, col] = x
    residual = system @ weights - rhs
    rel = np.linalg.norm(residual, axis=0) / mu
    if (rel > SOLVE_RTOL).any():
        worst = float(rel.max())
        raise SolverFailure(
            f"interpolation solve missed residual target: {worst:.3g} > {SOLVE_RTOL}"
        )
    return InterpolationMatrix(weights, idx.copy(), float(mu))


def fmds_decompose(
    interp: InterpolationMatrix, cols: DistanceColumns
) -> LowRankSquaredDistances:
    """Symmetrized smoothness reconstruction as a rank-2n factor pair.

    The outer factor is the horizontal concatenation (M | R); the core is
    the half anti-diagonal identity block so the product reproduces
    (M R^T + R M^T) / 2 exactly.
    """
    m = interp.weights
    r = cols.values
    if m.shape != r.shape or not np.array_equal(interp.indices, cols.indices):
        raise ShapeMismatch(
            "interpolation operator and distance columns disagree on samples"
        )
    n = cols.sample_count
    core = np.zeros((2 * n, 2 * n))
    half_eye = 0.5 * np.eye(n)
    core[:n, n:] = half_eye
    core[n:, :n] = half_eye
    return LowRankSquaredDistances(
        outer=np.hstack([m, r]),
        core=core,
        method=FMDS,
        metric=cols.metric,
        sample_indices=cols.indices.copy(),
        n=n,
        mu=interp.mu,
    )


def _symmetrized_sample_block(cols: DistanceColumns) -> np.ndarray:
    block = cols.sampled_rows()
    return 0.5 * (block + block.T)


def nmds_decompose(cols: DistanceColumns, n1: int | None = None) -> LowRankSquaredDistances:
    """Regularized Nystrom factorization from the sampled block.

    Keeps the ``n1`` largest-magnitude eigenpairs of the symmetrized n*n
    sampled block and inverts only those, so the core stays bounded. When
    fewer than ``n1`` eigenvalues are usable (relative magnitude above
    1e-12) the factor rank drops and a :class:`RankDeficientWarning` is
    emitted.
    """
    n = cols.sample_count
    if n1 is None:
        n1 = default_n1(n)
    if not 1 <= n1 <= n:
        raise ValueError(f"need 1 <= n1 <= n, got n1={n1}, n={n}")
    block = _symmetrized_sample_block(cols)
    lam, vec = np.linalg.eigh(block)
    order = np.argsort(-np.abs(lam), kind="stable")[:n1]
    lam = lam[order]
    vec = vec[:, order]
    floor = EIGENVALUE_FLOOR * (np.abs(lam).max() if lam.size else 0.0)
    usable = np.abs(lam) > floor
    kept = int(usable.sum())
    if kept < n1:
        warnings.warn(
            f"only {kept} of {n1} requested eigenvalues are usable",
            RankDeficientWarning,
            stacklevel=2,
        )
    lam = lam[usable]
    vec = vec[:, usable]
    core = (vec / lam) @ vec.T if kept else np.zeros((n, n))
    return LowRankSquaredDistances(
        outer=cols.values.copy(),
        core=core,
        method=NMDS,
        metric=cols.metric,
        sample_indices=cols.indices.copy(),
        n=n,
        n1=kept,
        rank_deficient=kept < n1,
    )


def cur_decompose(
    cols: DistanceColumns, subset: np.ndarray | None = None
) -> LowRankSquaredDistances:
    """Symmetrized column-subset (CUR) factorization.

    ``subset`` names the retained columns among the n sampled ones
    (default: the first ceil(n/2) in selection order). The mixing matrix
    solves the least-squares fit of the sampled block onto those columns
    through a thin QR factorization.
    """
    n = cols.sample_count
    if subset is None:
        subset = np.arange(default_n1(n))
    subset = np.asarray(subset, dtype=np.int64)
    if subset.ndim != 1 or subset.shape[0] < 1:
        raise ValueError("subset must name at least one column")
    if np.unique(subset).shape[0] != subset.shape[0]:
        raise ValueError("subset columns must be distinct")
    if subset.min() < 0 or subset.max() >= n:
        raise ValueError(f"subset column out of range for n={n}")
    n1 = subset.shape[0]
    chosen = cols.values[:, subset]
    chosen_block = chosen[cols.indices, :]
    cond = np.linalg.cond(chosen_block)
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise IllConditioned(
            f"sampled block of chosen columns has condition {cond:.3g}"
        )
    q, r = np.linalg.qr(chosen_block, mode="reduced")
    mixing = solve_triangular(r, q.T)  # (C_s^T C_s)^-1 C_s^T
    core = np.zeros((n1 + n, n1 + n))
    core[:n1, n1:] = 0.5 * mixing
    core[n1:, :n1] = 0.5 * mixing.T
    return LowRankSquaredDistances(
        outer=np.hstack([chosen, cols.values]),
        core=core,
        method=CUR,
        metric=cols.metric,
        sample_indices=cols.indices.copy(),
        n=n,
        n1=n1,
    )


def query_pairs(
    fac: LowRankSquaredDistances, pairs, block_size: int = 8192
) -> np.ndarray:
    """Approximate geodesic distances for (i, j) pairs from the factors.

    Evaluates sqrt(max(0, outer_i @ core @ outer_j)) as a blocked matrix
    product; negative reconstructed squares clamp to zero. Output order
    matches input order.
    """
    if fac.metric != SQUARED_GEODESIC:
        raise MetricMismatch(
            f"pair queries need squared-geodesic factors, got {fac.metric!r}"
        )
    pairs = np.asarray(pairs, dtype=np.int64)
    if pairs.size == 0:
        return np.empty(0)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise ShapeMismatch(f"pairs must be (k, 2), got {pairs.shape}")
    p = fac.vertex_count
    if pairs.min() < 0 or pairs.max() >= p:
        bad = int(np.flatnonzero((pairs < 0) | (pairs >= p)).ravel()[0] // 2)
        raise IndexOutOfRange(f"pair row {bad} references a vertex outside [0, {p})")
    projected = fac.outer @ fac.core
    out = np.empty(pairs.shape[0])
    for start in range(0, pairs.shape[0], block_size):
        stop = min(start + block_size, pairs.shape[0])
        i = pairs[start:stop, 0]
        j = pairs[start:stop, 1]
        vals = np.einsum("ij,ij->i", projected[i], fac.outer[j])
        out[start:stop] = np.sqrt(np.maximum(vals, 0.0))
    return out


def reconstruct_dense(fac: LowRankSquaredDistances, cap: int | None = None) -> np.ndarray:
    """Materialize outer @ core @ outer.T (evaluation only; quadratic memory)."""
    ensure_dense_ok(fac.vertex_count, cap)
    return (fac.outer @ fac.core) @ fac.outer.T
