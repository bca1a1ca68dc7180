"""Synthetic manifolds for tests, demos and bundled fixtures."""

from __future__ import annotations

import numpy as np

from .geometry import PointCloud, TriMesh


def grid_mesh(nx: int, ny: int, width: float = 1.0, height: float = 1.0) -> TriMesh:
    """Regular triangulated grid in the z = 0 plane, centered at the origin.

    Vertices are row-major (index iy * nx + ix); each cell splits into two
    counter-clockwise triangles.
    """
    if nx < 2 or ny < 2:
        raise ValueError("grid needs at least 2 vertices per side")
    xs = np.linspace(-width / 2, width / 2, nx)
    ys = np.linspace(-height / 2, height / 2, ny)
    gx, gy = np.meshgrid(xs, ys)
    verts = np.column_stack([gx.ravel(), gy.ravel(), np.zeros(nx * ny)])
    faces = []
    for iy in range(ny - 1):
        for ix in range(nx - 1):
            v00 = iy * nx + ix
            v10 = v00 + 1
            v01 = v00 + nx
            v11 = v01 + 1
            faces.append([v00, v10, v11])
            faces.append([v00, v11, v01])
    return TriMesh(verts, np.array(faces))


def bumpy_grid_mesh(
    nx: int,
    ny: int,
    width: float = 2.0,
    height: float = 1.0,
    amplitude: float = 0.3,
    bumps_x: int = 3,
    bumps_y: int = 2,
) -> TriMesh:
    """Grid mesh lifted to a wavy (non-developable) surface."""
    flat = grid_mesh(nx, ny, width, height)
    v = flat.vertices.copy()
    v[:, 2] = amplitude * np.sin(
        2 * np.pi * bumps_x * (v[:, 0] / width + 0.5)
    ) * np.sin(2 * np.pi * bumps_y * (v[:, 1] / height + 0.5))
    return TriMesh(v, flat.faces)


def sphere_cloud(
    count: int, radius: float = 1.0, seed: int = 0, quarter: bool = False
) -> PointCloud:
    """Uniform random points on a 2-sphere; ``quarter`` restricts to the
    geodesically convex lune x >= 0, y >= 0 by reflection."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((count, 3))
    x /= np.linalg.norm(x, axis=1)[:, None]
    if quarter:
        x[:, 0] = np.abs(x[:, 0])
        x[:, 1] = np.abs(x[:, 1])
    return PointCloud(radius * x)


def circle_points(count: int, radius: float = 1.0) -> PointCloud:
    """Equally spaced points on a circle (a 1-sphere) in R^2."""
    theta = 2 * np.pi * np.arange(count) / count
    return PointCloud(radius * np.column_stack([np.cos(theta), np.sin(theta)]))


def random_cloud(count: int, dim: int = 3, seed: int = 0, scale: float = 1.0) -> PointCloud:
    rng = np.random.default_rng(seed)
    return PointCloud(scale * rng.standard_normal((count, dim)))
