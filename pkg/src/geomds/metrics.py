"""Evaluation quantities: reconstruction errors, pairwise error statistics,
triangle-inequality violations, alignment error, and the best-rank baseline.

All metrics are pure and deterministic for fixed seeds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decompose import LowRankSquaredDistances, query_pairs, reconstruct_dense
from .errors import (
    IndexOutOfRange,
    NonSymmetric,
    ShapeMismatch,
    ZeroDistancePair,
    ZeroReference,
)
from .geodesics import distance_column
from .limits import ensure_dense_ok


@dataclass
class PairSample:
    """Random evaluation pairs (i, j), i != j, reproducible from a seed."""

    pairs: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        self.pairs = np.asarray(self.pairs, dtype=np.int64)
        if self.pairs.ndim != 2 or self.pairs.shape[1] != 2:
            raise ValueError(f"pairs must be (k, 2), got {self.pairs.shape}")
        if (self.pairs < 0).any():
            raise ValueError("pair indices must be nonnegative")
        if (self.pairs[:, 0] == self.pairs[:, 1]).any():
            raise ValueError("pairs must have distinct endpoints")

    @classmethod
    def random(cls, p: int, count: int, seed: int) -> "PairSample":
        if p < 2:
            raise ValueError("need at least two vertices to draw pairs")
        rng = np.random.default_rng(seed)
        i = rng.integers(0, p, size=count)
        j = (i + 1 + rng.integers(0, p - 1, size=count)) % p
        return cls(np.column_stack([i, j]), seed)

    def __len__(self):
        return self.pairs.shape[0]


def rel_frobenius_error(D_hat, D) -> float:
    """|| D_hat - D ||_F / || D ||_F."""
    D_hat = np.asarray(D_hat, dtype=np.float64)
    D = np.asarray(D, dtype=np.float64)
    if D_hat.shape != D.shape:
        raise ShapeMismatch(f"shape {D_hat.shape} vs {D.shape}")
    ref = np.linalg.norm(D)
    if ref == 0:
        raise ZeroReference("reference matrix has zero norm")
    return float(np.linalg.norm(D_hat - D) / ref)


def rms_relative_pair_error(
    fac: LowRankSquaredDistances, backend, pairs: PairSample
) -> float:
    """Root mean square of (approx - true) / true over the pair sample.

    Approximate distances come from factor queries; true ones from the
    geodesic backend, one column per distinct source.
    """
    approx = query_pairs(fac, pairs.pairs)
    true = np.empty(len(pairs))
    sources, inverse = np.unique(pairs.pairs[:, 0], return_inverse=True)
    for s_pos, s in enumerate(sources):
        col = distance_column(backend, int(s))
        rows = np.flatnonzero(inverse == s_pos)
        true[rows] = col[pairs.pairs[rows, 1]]
    if (true <= 0).any():
        raise ZeroDistancePair("a sampled pair has zero true distance")
    rel = (approx - true) / true
    return float(np.sqrt(np.mean(rel * rel)))


def _dense_distances(source, cap=None):
    if isinstance(source, LowRankSquaredDistances):
        d = np.sqrt(np.maximum(reconstruct_dense(source, cap), 0.0))
        return 0.5 * (d + d.T)
    D = np.asarray(source, dtype=np.float64)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ShapeMismatch(f"expected a square distance matrix, got {D.shape}")
    ensure_dense_ok(D.shape[0], cap)
    return D


def triangle_violation(source, anchors, cap: int | None = None) -> np.ndarray:
    """Total triangle-inequality violation per anchor, sorted descending.

    For an anchor a, sums max(0, D(b, c) - D(b, a) - D(c, a)) over
    unordered pairs (b, c). ``source`` is either a dense distance matrix
    or a factor pair (reconstructed under the dense cap).
    """
    D = _dense_distances(source, cap)
    p = D.shape[0]
    anchors = np.asarray(anchors, dtype=np.int64)
    if anchors.size and (anchors.min() < 0 or anchors.max() >= p):
        raise IndexOutOfRange(f"anchor out of range for p={p}")
    out = np.empty(anchors.shape[0])
    work = np.empty_like(D)
    for t, a in enumerate(anchors):
        col = D[:, a]
        np.subtract(D, col[:, None], out=work)
        work -= col[None, :]
        np.maximum(work, 0.0, out=work)
        work[a, :] = 0.0
        work[:, a] = 0.0
        np.fill_diagonal(work, 0.0)
        out[t] = 0.5 * work.sum()
    return np.sort(out)[::-1]


def fps_anchors(D, count: int, first: int = 0) -> np.ndarray:
    """Deterministic anchor selection: greedy farthest points over a dense
    distance matrix (ties to the lowest vertex id)."""
    D = np.asarray(D, dtype=np.float64)
    p = D.shape[0]
    if not 1 <= count <= p:
        raise ValueError(f"need 1 <= count <= p, got {count}")
    anchors = np.empty(count, dtype=np.int64)
    anchors[0] = first
    closest = D[:, first].copy()
    closest[first] = -np.inf
    for i in range(1, count):
        nxt = int(np.argmax(closest))
        anchors[i] = nxt
        np.minimum(closest, D[:, nxt], out=closest)
        closest[nxt] = -np.inf
    return anchors


def procrustes_error(Z, Z_star) -> float:
    """Relative Frobenius distance after optimal rigid alignment.

    Minimizes over orthogonal maps (rotations and reflections) and
    translations; scale is deliberately not removed, since classical
    scaling fixes scale through its eigenvalues.
    """
    A = np.asarray(Z, dtype=np.float64)
    B = np.asarray(Z_star, dtype=np.float64)
    if A.shape != B.shape:
        raise ShapeMismatch(f"shape {A.shape} vs {B.shape}")
    ref = np.linalg.norm(B)
    if ref == 0:
        raise ZeroReference("reference embedding has zero norm")
    Ac = A - A.mean(axis=0)
    Bc = B - B.mean(axis=0)
    u, _, vt = np.linalg.svd(Ac.T @ Bc)
    rot = u @ vt
    return float(np.linalg.norm(Ac @ rot - Bc) / ref)


def best_rank_n(E, n: int, cap: int | None = None) -> np.ndarray:
    """Best Frobenius rank-n approximation of a symmetric matrix: thin
    eigendecomposition keeping the n largest-magnitude eigenvalues."""
    E = np.asarray(E, dtype=np.float64)
    if E.ndim != 2 or E.shape[0] != E.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got {E.shape}")
    p = E.shape[0]
    ensure_dense_ok(p, cap)
    scale = np.abs(E).max()
    if scale > 0 and np.abs(E - E.T).max() > 1e-9 * scale:
        raise NonSymmetric("matrix is not symmetric")
    if n < 1:
        raise ValueError(f"rank must be at least 1, got {n}")
    n = min(n, p)
    lam, vec = np.linalg.eigh(E)
    order = np.argsort(-np.abs(lam), kind="stable")[:n]
    lam = lam[order]
    vec = vec[:, order]
    return (vec * lam) @ vec.T
