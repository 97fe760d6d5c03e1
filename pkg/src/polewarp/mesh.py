"""Indexed triangle meshes, Wavefront OBJ I/O, and star-shape validation.

A mesh is star-shaped about the origin when every ray from the origin
crosses the surface exactly once; that is what makes the theta-phi
projection injective. Validation samples rays toward every vertex, every
triangle centroid, and a Fibonacci-sphere sweep, and counts watertight
ray crossings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .geom import Vec3

AREA_EPS = 1e-12


class MeshError(ValueError):
    """Structural mesh problem (indices, degeneracy, closedness)."""


class ObjParseError(MeshError):
    """Malformed OBJ content; carries the offending line number."""

    def __init__(self, path, line_no, message):
        super().__init__(f"{path}:{line_no}: {message}")
        self.line_no = line_no


class TriMesh:
    """Immutable vertex/triangle arrays with structural validation."""

    __slots__ = ("vertices", "triangles")

    def __init__(self, vertices, triangles):
        v = np.ascontiguousarray(vertices, dtype=np.float64)
        t = np.ascontiguousarray(triangles, dtype=np.int64)
        if v.ndim != 2 or v.shape[1] != 3:
            raise MeshError(f"vertices must be (N, 3), got {v.shape}")
        if t.ndim != 2 or t.shape[1] != 3:
            raise MeshError(f"triangles must be (M, 3), got {t.shape}")
        if not np.isfinite(v).all():
            raise MeshError("vertex positions must be finite")
        if len(t) and (t.min() < 0 or t.max() >= len(v)):
            raise MeshError("triangle index out of range")
        same = (t[:, 0] == t[:, 1]) | (t[:, 1] == t[:, 2]) | (t[:, 2] == t[:, 0])
        if same.any():
            raise MeshError(f"degenerate triangles (repeated index): {np.flatnonzero(same)[:8].tolist()}")
        if len(t):
            e1 = v[t[:, 1]] - v[t[:, 0]]
            e2 = v[t[:, 2]] - v[t[:, 0]]
            areas = 0.5 * np.linalg.norm(np.cross(e1, e2), axis=1)
            flat = areas < AREA_EPS
            if flat.any():
                raise MeshError(f"zero-area triangles: {np.flatnonzero(flat)[:8].tolist()}")
        v.setflags(write=False)
        t.setflags(write=False)
        self.vertices = v
        self.triangles = t

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def edges(self) -> np.ndarray:
        """Unique undirected edges as sorted (i, j) rows."""
        t = self.triangles
        e = np.concatenate((t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]))
        e = np.sort(e, axis=1)
        return np.unique(e, axis=0)

    def closedness_errors(self) -> list[tuple[int, int]]:
        """Edges not shared by exactly two triangles, one per direction."""
        t = self.triangles
        directed = np.concatenate((t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]))
        und = np.sort(directed, axis=1)
        uniq, counts = np.unique(und, axis=0, return_counts=True)
        bad = uniq[counts != 2]
        dir_uniq, dir_counts = np.unique(directed, axis=0, return_counts=True)
        dup = dir_uniq[dir_counts > 1]
        out = {tuple(int(i) for i in row) for row in bad}
        out.update(tuple(sorted(int(i) for i in row)) for row in dup)
        return sorted(out)

    def centroids(self) -> np.ndarray:
        v, t = self.vertices, self.triangles
        return (v[t[:, 0]] + v[t[:, 1]] + v[t[:, 2]]) / 3.0

    def __repr__(self):
        return f"TriMesh({self.n_vertices} vertices, {self.n_triangles} triangles)"


def load_obj(path) -> TriMesh:
    """Parse the v/f subset of Wavefront OBJ.

    Faces with more than three corners are fan-triangulated from the first
    corner. Indices are 1-based; negative indices count back from the
    vertices defined so far. vt/vn/materials and unknown keywords are
    ignored.
    """
    vertices: list[tuple[float, float, float]] = []
    faces: list[tuple[int, int, int]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            key = tokens[0]
            if key == "v":
                if len(tokens) < 4:
                    raise ObjParseError(path, line_no, f"vertex needs 3 coordinates: {raw.rstrip()}")
                try:
                    vertices.append((float(tokens[1]), float(tokens[2]), float(tokens[3])))
                except ValueError:
                    raise ObjParseError(path, line_no, f"bad vertex coordinate: {raw.rstrip()}") from None
            elif key == "f":
                if len(tokens) < 4:
                    raise ObjParseError(path, line_no, f"face needs at least 3 indices: {raw.rstrip()}")
                idx = []
                for tok in tokens[1:]:
                    head = tok.split("/", 1)[0]
                    try:
                        value = int(head)
                    except ValueError:
                        raise ObjParseError(path, line_no, f"bad face index {tok!r}") from None
                    if value == 0:
                        raise ObjParseError(path, line_no, "face index 0 is not valid (OBJ is 1-based)")
                    i = value - 1 if value > 0 else len(vertices) + value
                    if not 0 <= i < len(vertices):
                        raise ObjParseError(path, line_no, f"face index {value} out of range")
                    idx.append(i)
                for j in range(1, len(idx) - 1):
                    faces.append((idx[0], idx[j], idx[j + 1]))
    return TriMesh(np.array(vertices, dtype=np.float64).reshape(-1, 3), np.array(faces, dtype=np.int64).reshape(-1, 3))


def save_obj(mesh: TriMesh, path) -> None:
    """Write v/f records; coordinates carry 9 significant digits."""
    with open(path, "w", encoding="utf-8") as fh:
        for x, y, z in mesh.vertices:
            fh.write(f"v {x:.9g} {y:.9g} {z:.9g}\n")
        for i, j, k in mesh.triangles:
            fh.write(f"f {i + 1} {j + 1} {k + 1}\n")


def fibonacci_directions(n: int) -> np.ndarray:
    """n roughly uniform unit directions (deterministic golden-angle spiral)."""
    if n <= 0:
        return np.zeros((0, 3))
    i = np.arange(n, dtype=np.float64)
    z = 1.0 - (2.0 * i + 1.0) / n
    rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    az = math.pi * (3.0 - math.sqrt(5.0)) * i
    return np.stack((rho * np.cos(az), rho * np.sin(az), z), axis=1)


def ray_surface_hits(mesh: TriMesh, direction) -> int:
    """Number of surface crossings of the origin ray along `direction`.

    Only the direction of the vector matters (the test is homogeneous in
    it), so callers may pass unnormalized vectors; exact vertex
    coordinates make vertex-tie rays exact. Boundary hits on shared
    edges/vertices are counted exactly once.
    """
    d = np.asarray(direction, dtype=np.float64)
    if d.shape != (3,) or not np.isfinite(d).all() or not d.any():
        raise ValueError(f"direction must be a finite nonzero 3-vector, got {direction}")
    return int(kernels.ray_hit_counts(mesh.vertices, mesh.triangles, d[None, :])[0])


@dataclass(frozen=True)
class StarReport:
    """Sampled evidence for star-shapedness about the origin.

    A sampling check: is_star_shaped = True means every tested ray crossed
    exactly once, which is necessary but (for adversarial meshes) not
    sufficient. samples_tested records the confidence level.
    """

    is_star_shaped: bool
    offending_directions: list[tuple[Vec3, int]]
    samples_tested: int


def validate_star_shaped(mesh: TriMesh, n_samples: int = 256) -> StarReport:
    """Cast rays toward vertices, centroids, and a Fibonacci sweep.

    Requires a closed, consistently oriented mesh (every edge shared by
    exactly two triangles, once per direction); raises MeshError naming
    offending edges otherwise.
    """
    bad_edges = mesh.closedness_errors()
    if bad_edges:
        raise MeshError(f"mesh is not closed/oriented; offending edges: {bad_edges[:8]}")
    vnorm = np.linalg.norm(mesh.vertices, axis=1)
    if (vnorm < 1e-15).any():
        raise MeshError(f"vertex at the origin: {np.flatnonzero(vnorm < 1e-15)[:8].tolist()}")
    dirs = np.concatenate(
        (mesh.vertices, mesh.centroids(), fibonacci_directions(int(n_samples)))
    )
    counts = kernels.ray_hit_counts(mesh.vertices, mesh.triangles, dirs)
    offending = []
    for i in np.flatnonzero(counts != 1):
        d = dirs[i]
        d = d / np.linalg.norm(d)
        offending.append((Vec3(*d), int(counts[i])))
    return StarReport(not offending, offending, len(dirs))
