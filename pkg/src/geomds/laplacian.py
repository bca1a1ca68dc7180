"""Cotangent stiffness and barycentric mass matrices for triangle meshes.

The pointwise Laplacian used by the smoothness penalty is A^-1 W, so the
assembled quadratic-energy matrix W^T A^-1 W stays symmetric. No extra
boundary rows are added: sample constraints are enforced through the
penalty term, which already pins values wherever columns are known.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .errors import IsolatedVertex, ZeroAreaFace
from .geometry import TriMesh

COT_CLAMP = 1e4


def _corner_cotangents(mesh: TriMesh):
    """Per-face cotangents of the three corner angles and twice the area."""
    v = mesh.vertices
    f = mesh.faces
    cots = np.empty((f.shape[0], 3))
    double_area = None
    for c in range(3):
        a = v[f[:, (c + 1) % 3]] - v[f[:, c]]
        b = v[f[:, (c + 2) % 3]] - v[f[:, c]]
        cross = np.cross(a, b)
        cn = np.linalg.norm(cross, axis=1)
        if double_area is None:
            double_area = cn
            if (cn == 0).any():
                bad = int(np.flatnonzero(cn == 0)[0])
                raise ZeroAreaFace(f"face {bad} has zero area")
        cots[:, c] = np.einsum("ij,ij->i", a, b) / cn
    np.clip(cots, -COT_CLAMP, COT_CLAMP, out=cots)
    return cots, double_area


def cotan_stiffness(mesh: TriMesh) -> sparse.csr_matrix:
    """Symmetric cotangent stiffness matrix W.

    Off-diagonals are -1/2 * sum of the cotangents of the angles opposite
    edge (i, j) over the faces containing it; the diagonal makes every row
    sum to zero. Cotangents are clamped to +-1e4 against near-degenerate
    triangles.
    """
    f = mesh.faces
    p = mesh.vertex_count
    cots, _ = _corner_cotangents(mesh)
    # corner c faces edge ((c+1)%3, (c+2)%3)
    i = f[:, [1, 2, 0]].ravel()
    j = f[:, [2, 0, 1]].ravel()
    w = 0.5 * cots.ravel()
    rows = np.concatenate([i, j])
    cols = np.concatenate([j, i])
    vals = np.concatenate([-w, -w])
    off = sparse.coo_matrix((vals, (rows, cols)), shape=(p, p)).tocsr()
    diag = -np.asarray(off.sum(axis=1)).ravel()
    stiff = (off + sparse.diags(diag)).tocsr()
    stiff.sort_indices()
    return stiff


def barycentric_mass(mesh: TriMesh) -> np.ndarray:
    """Diagonal of the barycentric mass matrix: one third of the total
    area of the faces incident to each vertex."""
    v = mesh.vertices
    f = mesh.faces
    cross = np.cross(v[f[:, 1]] - v[f[:, 0]], v[f[:, 2]] - v[f[:, 0]])
    area = 0.5 * np.linalg.norm(cross, axis=1)
    if (area == 0).any():
        bad = int(np.flatnonzero(area == 0)[0])
        raise ZeroAreaFace(f"face {bad} has zero area")
    mass = np.zeros(mesh.vertex_count)
    np.add.at(mass, f.ravel(), np.repeat(area / 3.0, 3))
    if (mass == 0).any():
        bad = int(np.flatnonzero(mass == 0)[0])
        raise IsolatedVertex(f"vertex {bad} belongs to no face")
    return mass


@dataclass
class LaplacianPair:
    """Stiffness matrix W plus the diagonal of the mass matrix A."""

    stiffness: sparse.csr_matrix
    mass: np.ndarray

    def __post_init__(self):
        self.mass = np.asarray(self.mass, dtype=np.float64)
        if self.stiffness.shape[0] != self.stiffness.shape[1]:
            raise ValueError("stiffness matrix must be square")
        if self.mass.shape != (self.stiffness.shape[0],):
            raise ValueError("mass diagonal does not match stiffness size")
        if (self.mass <= 0).any():
            raise ValueError("mass entries must be positive")

    @property
    def vertex_count(self) -> int:
        return self.mass.shape[0]

    def energy_matrix(self) -> sparse.csr_matrix:
        """W^T A^-1 W, the quadratic form of the smoothness energy."""
        inv = sparse.diags(1.0 / self.mass)
        return (self.stiffness @ inv @ self.stiffness).tocsr()


def build_laplacian(mesh: TriMesh) -> LaplacianPair:
    return LaplacianPair(cotan_stiffness(mesh), barycentric_mass(mesh))
