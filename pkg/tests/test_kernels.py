"""Backend equivalence: the compiled kernels and the numpy twins must agree
bit for bit, so either can back the tolerance-carrying checks."""

import numpy as np
import pytest

from polewarp.kernels import BACKEND, available_backends
from polewarp.shapes import icosphere, octahedron, uv_torus

from conftest import random_unit_points

BACKENDS = available_backends()
needs_both = pytest.mark.skipif(
    "cython" not in BACKENDS, reason="compiled extension not built; fallback only"
)


def test_some_backend_selected():
    assert BACKEND in BACKENDS


@needs_both
def test_warp_points_bitwise_equal():
    pts = random_unit_points(20000, seed=17)
    # include near-pole rows and the exact fixed points
    pts = np.concatenate((pts, [[0.0, 1.0, 0.0], [0.0, -1.0, 0.0], [1e-9, 1.0 - 1e-13, 0.0]]))
    for sigma in (0.05, 0.3, 1.0, 3.0, 20.0):
        a = BACKENDS["python"].warp_points(pts, sigma)
        b = BACKENDS["cython"].warp_points(pts, sigma)
        assert np.array_equal(a, b)


@needs_both
def test_warp_points_off_sphere_bitwise_equal():
    rng = np.random.default_rng(18)
    pts = rng.normal(size=(5000, 3)) * 2.0
    pts = pts[np.abs(1.0 - pts[:, 1]) > 1e-9]
    a = BACKENDS["python"].warp_points(pts, 0.7)
    b = BACKENDS["cython"].warp_points(pts, 0.7)
    assert np.array_equal(a, b)


@needs_both
def test_ray_hit_counts_equal_incl_exact_ties():
    octa = octahedron()
    dirs = [v for v in octa.vertices]
    dirs += [(octa.vertices[i] + octa.vertices[j]) / 2.0 for i, j in octa.edges()]
    dirs += [c for c in octa.centroids()]
    dirs = np.array(dirs)
    a = BACKENDS["python"].ray_hit_counts(octa.vertices, octa.triangles, dirs)
    b = BACKENDS["cython"].ray_hit_counts(octa.vertices, octa.triangles, dirs)
    assert np.array_equal(a, b)
    assert (a == 1).all()


@needs_both
def test_ray_hit_counts_equal_random_meshes():
    rng = np.random.default_rng(19)
    dirs = rng.normal(size=(300, 3))
    for mesh in (icosphere(2), uv_torus(n_major=24, n_minor=12)):
        a = BACKENDS["python"].ray_hit_counts(mesh.vertices, mesh.triangles, dirs)
        b = BACKENDS["cython"].ray_hit_counts(mesh.vertices, mesh.triangles, dirs)
        assert np.array_equal(a, b)
