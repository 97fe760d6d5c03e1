import numpy as np
import pytest

from polewarp import shapes


@pytest.fixture(scope="session")
def icosphere2():
    return shapes.icosphere(2)


@pytest.fixture(scope="session")
def icosphere3():
    return shapes.icosphere(3)


@pytest.fixture(scope="session")
def torus():
    return shapes.uv_torus()


@pytest.fixture(scope="session")
def head():
    return shapes.demo_head(3)


def random_unit_points(n, seed):
    """Uniform points on the unit sphere (Gaussian normalization)."""
    rng = np.random.default_rng(seed)
    p = rng.normal(size=(n, 3))
    return p / np.linalg.norm(p, axis=1)[:, None]


def fit_circle_3d(points):
    """RMS distance of points to the best-fit circle in 3-space.

    Plane through the centroid by SVD, then an algebraic (Kasa) circle fit
    in the plane; the residual combines out-of-plane and radial error, so
    it is ~0 iff the points lie on one common circle.
    """
    p = np.asarray(points, dtype=np.float64)
    c = p.mean(axis=0)
    m = p - c
    _, _, vt = np.linalg.svd(m, full_matrices=False)
    normal, bu, bv = vt[2], vt[0], vt[1]
    out_of_plane = m @ normal
    a, b = m @ bu, m @ bv
    design = np.column_stack((2.0 * a, 2.0 * b, np.ones_like(a)))
    (a0, b0, c0), *_ = np.linalg.lstsq(design, a * a + b * b, rcond=None)
    radius = np.sqrt(max(c0 + a0 * a0 + b0 * b0, 0.0))
    radial = np.hypot(a - a0, b - b0) - radius
    return float(np.sqrt(np.mean(out_of_plane**2 + radial**2)))
