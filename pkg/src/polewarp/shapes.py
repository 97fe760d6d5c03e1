"""Procedural meshes for demos and tests: icospheres, tori, bumpy balls."""

from __future__ import annotations

import math

import numpy as np

from .mesh import TriMesh

# golden-ratio icosahedron; outward-oriented faces
_ICO_T = (1.0 + math.sqrt(5.0)) / 2.0
_ICO_VERTS = [
    (-1, _ICO_T, 0), (1, _ICO_T, 0), (-1, -_ICO_T, 0), (1, -_ICO_T, 0),
    (0, -1, _ICO_T), (0, 1, _ICO_T), (0, -1, -_ICO_T), (0, 1, -_ICO_T),
    (_ICO_T, 0, -1), (_ICO_T, 0, 1), (-_ICO_T, 0, -1), (-_ICO_T, 0, 1),
]
_ICO_FACES = [
    (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
    (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
    (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
    (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
]


def icosphere(subdivisions: int = 3, radius: float = 1.0) -> TriMesh:
    """Subdivided icosahedron projected to a sphere of the given radius."""
    verts = [np.array(v, dtype=np.float64) / np.linalg.norm(v) for v in _ICO_VERTS]
    faces = list(_ICO_FACES)
    for _ in range(subdivisions):
        midpoint: dict[tuple[int, int], int] = {}

        def mid(i, j):
            key = (i, j) if i < j else (j, i)
            if key not in midpoint:
                m = verts[i] + verts[j]
                verts.append(m / np.linalg.norm(m))
                midpoint[key] = len(verts) - 1
            return midpoint[key]

        new_faces = []
        for a, b, c in faces:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new_faces
    return TriMesh(np.array(verts) * radius, np.array(faces, dtype=np.int64))


def octahedron(radius: float = 1.0) -> TriMesh:
    """Axis-aligned octahedron; integer-exact coordinates for radius 1."""
    r = radius
    v = np.array(
        [(r, 0, 0), (-r, 0, 0), (0, r, 0), (0, -r, 0), (0, 0, r), (0, 0, -r)],
        dtype=np.float64,
    )
    f = np.array(
        [
            (0, 2, 4), (2, 1, 4), (1, 3, 4), (3, 0, 4),
            (2, 0, 5), (1, 2, 5), (3, 1, 5), (0, 3, 5),
        ],
        dtype=np.int64,
    )
    return TriMesh(v, f)


def uv_torus(major: float = 1.0, minor: float = 0.35, n_major: int = 48, n_minor: int = 24) -> TriMesh:
    """Closed torus around the z axis, centered at the origin."""
    verts = np.empty((n_major * n_minor, 3))
    for i in range(n_major):
        u = 2.0 * math.pi * i / n_major
        cu, su = math.cos(u), math.sin(u)
        for j in range(n_minor):
            v = 2.0 * math.pi * j / n_minor
            w = major + minor * math.cos(v)
            verts[i * n_minor + j] = (w * cu, w * su, minor * math.sin(v))
    faces = []
    for i in range(n_major):
        for j in range(n_minor):
            a = i * n_minor + j
            b = ((i + 1) % n_major) * n_minor + j
            c = ((i + 1) % n_major) * n_minor + (j + 1) % n_minor
            d = i * n_minor + (j + 1) % n_minor
            faces += [(a, b, c), (a, c, d)]
    return TriMesh(verts, np.array(faces, dtype=np.int64))


def bumpy_ball(subdivisions: int = 3, amplitude: float = 0.3, seed: int = 7) -> TriMesh:
    """Icosphere with random positive radial displacement.

    A radial graph r(u) * u with r > 0, hence star-shaped about the origin
    by construction.
    """
    base = icosphere(subdivisions)
    rng = np.random.default_rng(seed)
    radii = 1.0 + amplitude * rng.random(base.n_vertices)
    return TriMesh(base.vertices * radii[:, None], base.triangles)


def demo_head(subdivisions: int = 3) -> TriMesh:
    """Smooth star-shaped "head": unit icosphere with a gentle radial swell.

    Non-constant radii exercise the radius channel of the flattening
    pipeline while keeping the surface star-shaped.
    """
    base = icosphere(subdivisions)
    v = base.vertices
    radii = 1.0 + 0.08 * np.sin(3.0 * v[:, 0]) * np.sin(2.0 * v[:, 1]) + 0.05 * v[:, 2]
    return TriMesh(v * radii[:, None], base.triangles)


def cap_band_roi(mesh: TriMesh, center_dir, angular_radius: float) -> list[int]:
    """Triangle ids whose centroid direction lies within a spherical cap."""
    c = np.asarray(center_dir, dtype=np.float64)
    c = c / np.linalg.norm(c)
    cen = mesh.centroids()
    cen = cen / np.linalg.norm(cen, axis=1)[:, None]
    cosang = np.clip(cen @ c, -1.0, 1.0)
    return [int(i) for i in np.flatnonzero(np.arccos(cosang) <= angular_radius)]
