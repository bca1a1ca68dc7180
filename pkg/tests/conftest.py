import numpy as np
import pytest

from geomds.geometry import TriMesh, WeightedGraph
from geomds.synth import grid_mesh

DATA_MESH = "data/wavy_sheet.off"


@pytest.fixture
def right_triangle_mesh():
    """Unit right triangle with the 90-degree corner at vertex 0."""
    return TriMesh(
        [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
        [[0, 1, 2]],
    )


@pytest.fixture
def equilateral_mesh():
    return TriMesh(
        [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, np.sqrt(3) / 2, 0.0]],
        [[0, 1, 2]],
    )


@pytest.fixture
def tetrahedron_mesh():
    """Regular tetrahedron with unit edges."""
    v = np.array(
        [
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.5, np.sqrt(3) / 2, 0.0],
            [0.5, np.sqrt(3) / 6, np.sqrt(6) / 3],
        ]
    )
    f = [[0, 1, 2], [0, 3, 1], [1, 3, 2], [2, 3, 0]]
    return TriMesh(v, f)


@pytest.fixture
def path_graph():
    """0 -- 1 -- 2 with weights 1 and 2."""
    return WeightedGraph.from_edges(3, [0, 1], [1, 2], [1.0, 2.0])


@pytest.fixture
def unit_path_graph():
    return WeightedGraph.from_edges(3, [0, 1], [1, 2], [1.0, 1.0])


@pytest.fixture
def triangle_graph():
    """Weights (0,1)=1, (1,2)=1, (0,2)=3: the two-hop path wins."""
    return WeightedGraph.from_edges(3, [0, 1, 0], [1, 2, 2], [1.0, 1.0, 3.0])


@pytest.fixture(scope="session")
def small_grid_mesh():
    return grid_mesh(10, 5, 1.0, 0.5)


@pytest.fixture
def off_triangle(tmp_path):
    path = tmp_path / "tri.off"
    path.write_text("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n")
    return path
