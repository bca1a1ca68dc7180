"""Classical scaling solvers: dense reference path and the accelerated
factor-based path, plus the spherical variant.

The accelerated path never materializes the p*p matrix or the centering
operator: centering is column-mean subtraction, a thin QR of the centered
outer factor turns the eigenproblem into a q*q one, and the embedding is
assembled as Q V sqrt(Lambda). Negative retained eigenvalues clamp to
zero (squared-geodesic matrices need not embed exactly) and are counted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decompose import LowRankSquaredDistances
from .errors import (
    DegenerateEmbedding,
    MetricMismatch,
    NonSymmetric,
    ShapeMismatch,
)
from .geodesics import COSINE, SQUARED_GEODESIC, DistanceColumns, SampleSet
from .limits import ensure_dense_ok

SYMMETRY_RTOL = 1e-9
EIGENVALUE_FLOOR = 1e-12


@dataclass
class Embedding:
    """Coordinate matrix plus the eigenvalues behind it.

    ``eigenvalues`` holds the retained values of the small problem sorted
    descending (before clamping); ``clamped_count`` says how many of them
    were negative and therefore contributed a zero column.
    """

    coords: np.ndarray
    eigenvalues: np.ndarray
    clamped_count: int

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=np.float64)
        self.eigenvalues = np.asarray(self.eigenvalues, dtype=np.float64)

    @property
    def vertex_count(self) -> int:
        return self.coords.shape[0]

    @property
    def dim(self) -> int:
        return self.coords.shape[1]


@dataclass
class SmallEigenProblem:
    """Thin-QR reduction of the factor pair: basis Q with orthonormal
    columns, triangular factor, and the small symmetric core."""

    basis: np.ndarray
    triangular: np.ndarray
    core: np.ndarray


def _small_problem(outer, core, center: bool, scale: float) -> SmallEigenProblem:
    x = outer - outer.mean(axis=0) if center else outer
    q, r = np.linalg.qr(x, mode="reduced")
    small = scale * (r @ core @ r.T)
    small = 0.5 * (small + small.T)
    return SmallEigenProblem(q, r, small)


def _coords_from_eigenpairs(lam, vec, m):
    """Top-m algebraic eigenpairs -> scaled coordinates with clamping."""
    order = np.argsort(lam, kind="stable")[::-1][:m]
    top = lam[order]
    clamped = int((top < 0).sum())
    scalings = np.sqrt(np.maximum(top, 0.0))
    return vec[:, order] * scalings, top, clamped


def _center_dense(E):
    row_mean = E.mean(axis=1)
    col_mean = E.mean(axis=0)
    grand = E.mean()
    return -0.5 * (E - row_mean[:, None] - col_mean[None, :] + grand)


def classical_mds_dense(E, m: int, cap: int | None = None) -> Embedding:
    """Reference solver: eigendecomposition of the double-centered matrix.

    ``E`` must be symmetric to 1e-9 relative and look like a
    squared-distance matrix (near-zero diagonal; in particular its largest
    entry may not sit on the diagonal). The embedding takes the m
    algebraically-largest eigenpairs; negative ones are clamped to zero
    and counted.
    """
    E = np.asarray(E, dtype=np.float64)
    if E.ndim != 2 or E.shape[0] != E.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got {E.shape}")
    p = E.shape[0]
    ensure_dense_ok(p, cap)
    if not 1 <= m <= p:
        raise ValueError(f"need 1 <= m <= p, got m={m}")
    scale = np.abs(E).max()
    if scale > 0:
        if np.abs(E - E.T).max() > SYMMETRY_RTOL * scale:
            raise NonSymmetric("matrix is not symmetric")
        # low-rank reconstructions keep the diagonal only *near* zero, so
        # this is a kind-check: distance-like matrices must not carry their
        # largest entry on the diagonal the way Gram or cosine matrices do
        off = E - np.diag(np.diag(E))
        if np.abs(np.diag(E)).max() > np.abs(off).max():
            raise NonSymmetric("squared-distance matrix must have a (near-)zero diagonal")
    lam, vec = np.linalg.eigh(_center_dense(E))
    coords, top, clamped = _coords_from_eigenpairs(lam, vec, m)
    return Embedding(coords, top, clamped)


def accelerated_mds(fac: LowRankSquaredDistances, m: int) -> Embedding:
    """Classical scaling from the factor pair without forming the matrix.

    Centers the outer factor columnwise, takes its thin QR, solves the
    q*q eigenproblem of -1/2 R core R^T and maps the top-m eigenpairs
    back through Q. Deterministic for fixed factors.
    """
    if fac.metric != SQUARED_GEODESIC:
        raise MetricMismatch(
            f"flat embedding needs squared-geodesic factors, got {fac.metric!r}"
        )
    if not 1 <= m <= fac.rank:
        raise ShapeMismatch(f"need 1 <= m <= q = {fac.rank}, got m={m}")
    prob = _small_problem(fac.outer, fac.core, center=True, scale=-0.5)
    lam, vec = np.linalg.eigh(prob.core)
    coords, top, clamped = _coords_from_eigenpairs(lam, vec, m)
    return Embedding(prob.basis @ coords, top, clamped)


def cos_transform(samples: SampleSet, radius: float) -> DistanceColumns:
    """Columns of cos(distance / radius); sampled diagonal entries equal 1."""
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    return DistanceColumns(
        np.cos(samples.distances / radius), samples.indices, metric=COSINE
    )


def default_sphere_radius(samples: SampleSet) -> float:
    """Radius mapping the largest observed distance to an antipodal arc."""
    return float(samples.distances.max() / np.pi)


def sphere_embed(
    fac: LowRankSquaredDistances,
    k: int,
    radius: float,
    normalize: bool = False,
) -> Embedding:
    """Embed on a k-dimensional sphere of the given radius.

    Fits the inner-product matrix of unit directions to the cosine-metric
    factors: thin QR of the (uncentered) outer factor, eigendecomposition
    of +R core R^T, and coordinates from the k+1 algebraically-largest
    eigenpairs, scaled to radius ``radius``. With ``normalize`` every row
    is pulled exactly onto the sphere; when an exact spherical
    configuration exists the rows come out with equal norms anyway.

    Raises
    ------
    DegenerateEmbedding
        When fewer than k+1 positive eigenvalues are available.
    """
    if fac.metric != COSINE:
        raise MetricMismatch(
            f"sphere embedding needs cosine-metric factors, got {fac.metric!r}"
        )
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    if not 0 <= k <= fac.rank - 1:
        raise ShapeMismatch(f"need k + 1 <= q = {fac.rank}, got k={k}")
    prob = _small_problem(fac.outer, fac.core, center=False, scale=1.0)
    lam, vec = np.linalg.eigh(prob.core)
    order = np.argsort(lam, kind="stable")[::-1][: k + 1]
    top = lam[order]
    floor = EIGENVALUE_FLOOR * np.abs(lam).max() if lam.size else 0.0
    if (top <= floor).any():
        raise DegenerateEmbedding(
            f"only {int((lam > floor).sum())} positive eigenvalues, need {k + 1}"
        )
    directions = prob.basis @ (vec[:, order] * np.sqrt(top))
    if normalize:
        norms = np.linalg.norm(directions, axis=1)
        if (norms == 0).any():
            raise DegenerateEmbedding("cannot normalize a zero row onto the sphere")
        directions = directions / norms[:, None]
    return Embedding(radius * directions, top, 0)


def stress(Z, E, cap: int | None = None) -> float:
    """Embedding error: Frobenius norm of (Z Z^T + 1/2 J E J).

    ``Z`` may be an :class:`Embedding` or a plain coordinate matrix; ``E``
    is the dense squared-distance matrix being embedded.
    """
    coords = Z.coords if isinstance(Z, Embedding) else np.asarray(Z, dtype=np.float64)
    E = np.asarray(E, dtype=np.float64)
    if E.ndim != 2 or E.shape[0] != E.shape[1] or E.shape[0] != coords.shape[0]:
        raise ShapeMismatch(
            f"coords {coords.shape} incompatible with matrix {E.shape}"
        )
    ensure_dense_ok(E.shape[0], cap)
    return float(np.linalg.norm(coords @ coords.T - _center_dense(E)))


def scaled_stress(value: float, p: int) -> float:
    """Display scaling of the stress: 100 / p^2 times the raw value."""
    return 100.0 / (p * p) * value


def stress_from_squared_distances(E_hat, E, cap: int | None = None) -> float:
    """Stress evaluated from realized squared distances.

    For a centered flat embedding Z this equals ``stress(Z, E)`` because
    the centered Gram matrix of Z is -1/2 J D_Z^2 J; phrasing it through
    squared distances makes embeddings in other metrics (sphere arcs)
    comparable under the same objective.
    """
    E_hat = np.asarray(E_hat, dtype=np.float64)
    E = np.asarray(E, dtype=np.float64)
    if E_hat.shape != E.shape:
        raise ShapeMismatch(f"shape {E_hat.shape} vs {E.shape}")
    ensure_dense_ok(E.shape[0], cap)
    return float(np.linalg.norm(_center_dense(E_hat) - _center_dense(E)))
