"""Discrete manifold carriers: triangle meshes, point clouds, weighted graphs.

The weighted graph is the common substrate for shortest-path geodesics;
meshes contribute edge-length graphs, point clouds contribute symmetrized
k-nearest-neighbor graphs. All carriers are immutable after construction
and safe for concurrent reads.
"""

from __future__ import annotations

import warnings
from pathlib import Path

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph
from scipy.spatial import cKDTree

from .errors import (
    ConnectivityWarning,
    DegenerateEdge,
    DisconnectedGraph,
    EmptyMesh,
    FileAccessError,
    ParseError,
)


class TriMesh:
    """Triangle mesh with p >= 3 vertices in R^3 and counter-clockwise faces.

    Parameters
    ----------
    vertices : (p, 3) array_like
        Vertex coordinates in model units.
    faces : (f, 3) array_like
        0-based vertex indices; no face may repeat a vertex.
    """

    def __init__(self, vertices, faces):
        v = np.array(vertices, dtype=np.float64)
        f = np.array(faces, dtype=np.int64)
        if v.ndim != 2 or v.shape[1] != 3:
            raise ValueError(f"vertices must be (p, 3), got {v.shape}")
        if f.ndim != 2 or f.shape[1] != 3:
            raise ValueError(f"faces must be (f, 3), got {f.shape}")
        if v.shape[0] < 3:
            raise EmptyMesh(f"mesh needs at least 3 vertices, got {v.shape[0]}")
        if f.shape[0] < 1:
            raise EmptyMesh("mesh has no faces")
        if not np.isfinite(v).all():
            raise ValueError("vertex coordinates must be finite")
        if f.min() < 0 or f.max() >= v.shape[0]:
            raise ValueError("face index out of range")
        if (
            (f[:, 0] == f[:, 1]) | (f[:, 1] == f[:, 2]) | (f[:, 0] == f[:, 2])
        ).any():
            raise ValueError("face with a repeated vertex")
        v.setflags(write=False)
        f.setflags(write=False)
        self.vertices = v
        self.faces = f

    @property
    def vertex_count(self) -> int:
        return self.vertices.shape[0]

    @property
    def face_count(self) -> int:
        return self.faces.shape[0]

    def __repr__(self):
        return f"TriMesh(p={self.vertex_count}, f={self.face_count})"


class PointCloud:
    """p >= 2 finite points in R^k."""

    def __init__(self, points):
        x = np.array(points, dtype=np.float64)
        if x.ndim == 1:
            x = x[:, None]
        if x.ndim != 2:
            raise ValueError(f"points must be (p, k), got {x.shape}")
        if x.shape[0] < 2 or x.shape[1] < 1:
            raise ValueError(f"need p >= 2 points in k >= 1 dims, got {x.shape}")
        if not np.isfinite(x).all():
            raise ValueError("point coordinates must be finite")
        x.setflags(write=False)
        self.points = x

    @property
    def point_count(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __repr__(self):
        return f"PointCloud(p={self.point_count}, k={self.dim})"


class WeightedGraph:
    """Undirected weighted graph in CSR form.

    Invariants enforced on construction: strictly positive weights, no
    self-loops, and exact symmetry (edge (i, j, w) present iff (j, i, w)
    is, with bitwise-equal weight).
    """

    def __init__(self, indptr, indices, weights):
        indptr = np.array(indptr, dtype=np.int64)
        indices = np.array(indices, dtype=np.int64)
        weights = np.array(weights, dtype=np.float64)
        p = indptr.shape[0] - 1
        if p < 1 or (np.diff(indptr) < 0).any() or indptr[0] != 0:
            raise ValueError("malformed CSR row offsets")
        if indices.shape[0] != weights.shape[0] or indices.shape[0] != indptr[-1]:
            raise ValueError("CSR arrays disagree on edge count")
        if indices.size and (indices.min() < 0 or indices.max() >= p):
            raise ValueError("column index out of range")
        if (weights <= 0).any():
            raise ValueError("edge weights must be strictly positive")
        rows = np.repeat(np.arange(p), np.diff(indptr))
        if (rows == indices).any():
            raise ValueError("self-loops are not allowed")
        m = sparse.csr_matrix((weights, indices, indptr), shape=(p, p))
        if (m != m.T).nnz != 0:
            raise ValueError("graph is not symmetric with equal weights")
        for a in (indptr, indices, weights):
            a.setflags(write=False)
        self.indptr = indptr
        self.indices = indices
        self.weights = weights
        self._matrix = m

    @classmethod
    def from_edges(cls, p, u, v, w):
        """Build from an undirected edge list (each edge listed once)."""
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        w = np.asarray(w, dtype=np.float64)
        rows = np.concatenate([u, v])
        cols = np.concatenate([v, u])
        data = np.concatenate([w, w])
        m = sparse.coo_matrix((data, (rows, cols)), shape=(p, p)).tocsr()
        if m.nnz != 2 * u.shape[0]:
            raise ValueError("duplicate edges in edge list")
        m.sort_indices()
        return cls(m.indptr, m.indices, m.data)

    @property
    def matrix(self) -> sparse.csr_matrix:
        """CSR adjacency matrix (shared storage; treat as read-only)."""
        return self._matrix

    @property
    def vertex_count(self) -> int:
        return self.indptr.shape[0] - 1

    @property
    def edge_count(self) -> int:
        """Number of undirected edges."""
        return self.indices.shape[0] // 2

    def component_count(self) -> int:
        return csgraph.connected_components(
            self._matrix, directed=False, return_labels=False
        )

    def __repr__(self):
        return f"WeightedGraph(p={self.vertex_count}, edges={self.edge_count})"


def load_mesh(path, format=None) -> TriMesh:
    """Load a triangle mesh from an OFF or OBJ file.

    Parameters
    ----------
    path : str or Path
    format : {"off", "obj"}, optional
        Defaults to the file suffix.
    """
    path = Path(path)
    fmt = (format or path.suffix.lstrip(".")).lower()
    if fmt not in ("off", "obj"):
        raise ValueError(f"unsupported mesh format {fmt!r}")
    try:
        text = path.read_text()
    except OSError as exc:
        raise FileAccessError(f"cannot read mesh file {path}: {exc}") from exc
    if fmt == "off":
        verts, faces = _parse_off(text, path)
    else:
        verts, faces = _parse_obj(text, path)
    if len(verts) == 0 or len(faces) == 0:
        raise EmptyMesh(f"{path}: mesh has {len(verts)} vertices, {len(faces)} faces")
    try:
        return TriMesh(verts, faces)
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def _significant_lines(text):
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            yield line


def _parse_off(text, path):
    lines = _significant_lines(text)
    try:
        header = next(lines)
    except StopIteration:
        raise ParseError(f"{path}: empty OFF file") from None
    if header != "OFF":
        raise ParseError(f"{path}: missing OFF header, got {header!r}")
    try:
        counts = next(lines).split()
        nv, nf = int(counts[0]), int(counts[1])
    except (StopIteration, ValueError, IndexError):
        raise ParseError(f"{path}: malformed OFF counts line") from None
    verts = []
    for _ in range(nv):
        try:
            parts = next(lines).split()
        except StopIteration:
            raise ParseError(f"{path}: unexpected end of file in vertex block") from None
        if len(parts) != 3:
            raise ParseError(f"{path}: vertex line needs 3 coordinates, got {parts!r}")
        try:
            verts.append([float(x) for x in parts])
        except ValueError:
            raise ParseError(f"{path}: bad vertex coordinate in {parts!r}") from None
    faces = []
    for _ in range(nf):
        try:
            parts = next(lines).split()
        except StopIteration:
            raise ParseError(f"{path}: unexpected end of file in face block") from None
        try:
            sides = int(parts[0])
            idx = [int(x) for x in parts[1:]]
        except ValueError:
            raise ParseError(f"{path}: bad face line {parts!r}") from None
        if sides != 3 or len(idx) != 3:
            raise ParseError(f"{path}: only triangular faces are supported")
        faces.append(idx)
    return verts, faces


def _parse_obj(text, path):
    verts = []
    faces = []
    for line in _significant_lines(text):
        parts = line.split()
        tag = parts[0]
        if tag == "v":
            if len(parts) < 4:
                raise ParseError(f"{path}: vertex record needs 3 coordinates")
            try:
                verts.append([float(x) for x in parts[1:4]])
            except ValueError:
                raise ParseError(f"{path}: bad vertex coordinate in {line!r}") from None
        elif tag == "f":
            refs = parts[1:]
            if len(refs) != 3:
                raise ParseError(f"{path}: only triangular faces are supported")
            idx = []
            for ref in refs:
                try:
                    i = int(ref.split("/")[0])
                except ValueError:
                    raise ParseError(f"{path}: bad face reference {ref!r}") from None
                if i <= 0:
                    raise ParseError(
                        f"{path}: OBJ face indices are 1-based, got {i}"
                    )
                idx.append(i - 1)
            faces.append(idx)
        # every other record type (vn, vt, o, g, s, mtllib, ...) is ignored
    return verts, faces


def save_mesh(mesh: TriMesh, path, format=None):
    """Write a mesh as OFF or OBJ; coordinates keep full double precision."""
    path = Path(path)
    fmt = (format or path.suffix.lstrip(".")).lower()
    if fmt == "off":
        lines = ["OFF", f"{mesh.vertex_count} {mesh.face_count} 0"]
        lines += [f"{x:.17g} {y:.17g} {z:.17g}" for x, y, z in mesh.vertices]
        lines += [f"3 {i} {j} {k}" for i, j, k in mesh.faces]
    elif fmt == "obj":
        lines = [f"v {x:.17g} {y:.17g} {z:.17g}" for x, y, z in mesh.vertices]
        lines += [f"f {i + 1} {j + 1} {k + 1}" for i, j, k in mesh.faces]
    else:
        raise ValueError(f"unsupported mesh format {fmt!r}")
    from .matio import atomic_write_text

    atomic_write_text(path, "\n".join(lines) + "\n")


def load_point_cloud(path) -> PointCloud:
    """Load a headerless CSV point cloud, one point per row."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise FileAccessError(f"cannot read point cloud {path}: {exc}") from exc
    try:
        pts = np.loadtxt(text.splitlines(), delimiter=",", ndmin=2)
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    try:
        return PointCloud(pts)
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def mesh_edges(mesh: TriMesh):
    """Distinct undirected mesh edges as a sorted (e, 2) index array."""
    f = mesh.faces
    e = np.vstack([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]])
    e = np.sort(e, axis=1)
    return np.unique(e, axis=0)


def mesh_to_graph(mesh: TriMesh) -> WeightedGraph:
    """Edge-length graph of a mesh: one undirected edge per mesh edge,
    weighted by the Euclidean distance between its endpoints."""
    e = mesh_edges(mesh)
    d = mesh.vertices[e[:, 0]] - mesh.vertices[e[:, 1]]
    w = np.linalg.norm(d, axis=1)
    if (w == 0).any():
        bad = e[w == 0][0]
        raise DegenerateEdge(f"zero-length edge between vertices {bad[0]} and {bad[1]}")
    return WeightedGraph.from_edges(mesh.vertex_count, e[:, 0], e[:, 1], w)


def knn_graph(cloud: PointCloud, w: int, on_disconnected="raise") -> WeightedGraph:
    """Union-symmetrized k-nearest-neighbor graph with Euclidean weights.

    An edge is kept when either endpoint lists the other among its ``w``
    nearest neighbors, so every vertex has degree >= w.

    Parameters
    ----------
    cloud : PointCloud
    w : int
        Neighbors per point, 1 <= w < p.
    on_disconnected : {"raise", "warn"}
        Disconnected results raise :class:`DisconnectedGraph` by default;
        ``"warn"`` emits :class:`ConnectivityWarning` instead, for callers
        that never run a geodesic pass over the graph.
    """
    pts = cloud.points
    p = cloud.point_count
    if not 1 <= w < p:
        raise ValueError(f"need 1 <= w < p, got w={w}, p={p}")
    tree = cKDTree(pts)
    _, nbr = tree.query(pts, k=w + 1)
    nbr = np.atleast_2d(nbr)
    rows = np.repeat(np.arange(p), w + 1)
    cols = nbr.ravel()
    keep = rows != cols
    # with duplicate points the self index may be missing from the result;
    # keep only the w nearest non-self candidates per row
    order = np.cumsum(keep.reshape(p, w + 1), axis=1).ravel()
    keep &= order <= w
    u = np.minimum(rows[keep], cols[keep])
    v = np.maximum(rows[keep], cols[keep])
    uv = np.unique(np.column_stack([u, v]), axis=0)
    dist = np.linalg.norm(pts[uv[:, 0]] - pts[uv[:, 1]], axis=1)
    if (dist == 0).any():
        bad = uv[dist == 0][0]
        raise DegenerateEdge(
            f"duplicate points {bad[0]} and {bad[1]} give a zero-length edge"
        )
    graph = WeightedGraph.from_edges(p, uv[:, 0], uv[:, 1], dist)
    ncomp = graph.component_count()
    if ncomp > 1:
        if on_disconnected == "warn":
            warnings.warn(
                f"knn graph has {ncomp} components", ConnectivityWarning, stacklevel=2
            )
        else:
            raise DisconnectedGraph(
                f"knn graph with w={w} has {ncomp} components; raise w"
            )
    return graph
