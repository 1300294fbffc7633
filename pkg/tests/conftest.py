import numpy as np
import pytest

from invpack import Geometry
from invpack.mesh import Triangulation, WeightedTriangulation

# closed surfaces used throughout the suite
TETRA_FACES = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
OCTA_FACES = [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 1),
              (5, 2, 1), (5, 3, 2), (5, 4, 3), (5, 1, 4)]
ICOSA_FACES = [
    (0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 1),
    (1, 6, 2), (2, 6, 7), (2, 7, 3), (3, 7, 8), (3, 8, 4),
    (4, 8, 9), (4, 9, 5), (5, 9, 10), (5, 10, 1), (1, 10, 6),
    (6, 11, 7), (7, 11, 8), (8, 11, 9), (9, 11, 10), (10, 11, 6),
]

# oracle values frozen from high-precision evaluation of the cosine law:
# arccos(cosh 2 / (cosh 2 + 1)) and three times it
HYP_EQUILATERAL2_ANGLE = 0.6599664042157993
HYP_TETRA_CONE_ANGLE = 1.9798992126473981

# double-precision regression values for the hyperbolic worked matrix
WORKED_M_EXACT = [
    [6.080424303435085, 0.4940114967242517, -2.9381685542516887],
    [0.4940114967242517, 6.080424303435085, -2.9381685542516887],
    [-2.9381685542516887, -2.9381685542516887, 22.107930148966254],
]
WORKED_M_EIGS_EXACT = [5.532776161892809, 5.586412806710833, 23.14958978723278]


def tetrahedron() -> Triangulation:
    return Triangulation(4, list(TETRA_FACES))


def octahedron() -> Triangulation:
    return Triangulation(6, list(OCTA_FACES))


def icosahedron() -> Triangulation:
    return Triangulation(12, list(ICOSA_FACES))


def with_weights(tri: Triangulation, value: float = 1.0) -> WeightedTriangulation:
    return WeightedTriangulation(tri, {e: value for e in tri.edges})


@pytest.fixture
def tetra() -> Triangulation:
    return tetrahedron()


@pytest.fixture
def octa() -> Triangulation:
    return octahedron()


@pytest.fixture
def icosa() -> Triangulation:
    return icosahedron()


def random_admissible_u(geometry: Geometry, wt: WeightedTriangulation,
                        rng: np.random.Generator, spread: float = 0.1,
                        margin: float = 0.0) -> np.ndarray:
    """Rejection-sample a log-radius vector admissible on every face."""
    from invpack.mesh import face_weights
    from invpack.geometry import is_admissible, r_from_u

    n = wt.vertex_count
    center = 0.0 if geometry is Geometry.EUCLIDEAN else -1.0
    for _ in range(1000):
        u = center + rng.normal(0.0, spread, n)
        if geometry is Geometry.HYPERBOLIC and np.any(u >= -1e-3):
            continue
        ok = True
        for f in wt.faces:
            r3 = r_from_u(geometry, u[list(f)])
            if not is_admissible(geometry, r3, face_weights(wt, f), margin):
                ok = False
                break
        if ok:
            return u
    raise RuntimeError("failed to sample an admissible configuration")
