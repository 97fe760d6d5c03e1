"""End-to-end flattening: center, rotate, warp, project; diagnostics; fitting.

Every vertex v maps through

    q = R (v - t),   dir = q / |q|,   w = warp(dir, sigma),
    (theta, phi) = spherical(w),      r = |q|

and back. Directions are normalized before warping (the warp's exact
inverse holds only on the unit sphere) and the radius rides along as a
separate channel.

The flattened chart is "cohesive" when no region-of-interest edge crosses
the azimuth branch cut (the seam) and no triangle contains a chart pole.
For sigma < 1 both trouble spots cluster toward the post-rotation +y
direction, so fitting searches rotations that steer +y away from the ROI
together with a sigma that shrinks the cluster.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels, warp
from .geom import (
    Rotation,
    Vec3,
    as_vec3,
    cartesian_to_spherical_arrays,
    rotation_between,
    spherical_to_cartesian_arrays,
)
from .mesh import MeshError, TriMesh, fibonacci_directions
from .warp import DomainError


class PoleAmbiguityWarning(UserWarning):
    """Chart vertices at theta = 0 or pi have an unconstrained phi."""


class InfeasibleFitError(RuntimeError):
    """No grid candidate produced an empty seam/singular report."""

    def __init__(self, message, best_frame=None, seam_count=None, singular_count=None):
        super().__init__(message)
        self.best_frame = best_frame
        self.seam_count = seam_count
        self.singular_count = singular_count


@dataclass(frozen=True)
class WarpFrame:
    """Flattening parameters: star center, rotation, warp scale."""

    translation: Vec3
    rotation: Rotation
    sigma: float

    @classmethod
    def identity(cls) -> "WarpFrame":
        return cls(Vec3(0.0, 0.0, 0.0), Rotation.identity(), 1.0)


@dataclass(frozen=True)
class DistortionStats:
    """Aggregate per-triangle angle distortion (radians)."""

    min: float
    max: float
    mean: float
    degenerate_faces: list[int] = field(default_factory=list)


@dataclass(frozen=True)
class ParamChart:
    """Flattened mesh plus diagnostics."""

    theta: np.ndarray
    phi: np.ndarray
    r: np.ndarray
    triangles: np.ndarray
    seam_crossings: list[tuple[int, int]]
    singular_faces: list[int]
    distortion_stats: DistortionStats

    @property
    def is_cohesive(self) -> bool:
        return not self.seam_crossings and not self.singular_faces

    @property
    def n_vertices(self) -> int:
        return len(self.theta)


def _roi_triangle_ids(mesh: TriMesh, roi) -> np.ndarray:
    if roi is None:
        return np.arange(mesh.n_triangles, dtype=np.int64)
    ids = np.unique(np.asarray(sorted(int(i) for i in roi), dtype=np.int64))
    if len(ids) and (ids[0] < 0 or ids[-1] >= mesh.n_triangles):
        raise MeshError("ROI triangle id out of range")
    return ids


def _edges_of(tris: np.ndarray) -> np.ndarray:
    e = np.concatenate((tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]))
    return np.unique(np.sort(e, axis=1), axis=0)


def _warped_directions(mesh: TriMesh, frame: WarpFrame):
    """(warped unit dirs, radii) after center/rotate/normalize/warp."""
    rel = mesh.vertices - np.asarray(frame.translation, dtype=np.float64)
    q = frame.rotation.apply(rel)
    r = np.linalg.norm(q, axis=1)
    tiny = r < 1e-15
    if tiny.any():
        raise DomainError(f"vertex at the star center: {np.flatnonzero(tiny)[:8].tolist()}")
    dirs = q / r[:, None]
    return warp.warp_points(dirs, frame.sigma), r


def _seam_edge_mask(phi: np.ndarray, edges: np.ndarray) -> np.ndarray:
    return np.abs(phi[edges[:, 0]] - phi[edges[:, 1]]) > np.pi


def _pole_containment_mask(warped: np.ndarray, tris: np.ndarray) -> np.ndarray:
    """Triangles whose warped image is crossed by a chart-pole ray.

    Chart poles sit along (0, 0, +-1); a triangle is singular when the
    origin ray toward either pole crosses it. For small spherical
    triangles this is exactly the containing-spherical-triangle test, and
    it stays correct for triangles stretched over more than a hemisphere
    (strong warps), where a vertex-cone test silently fails. Uses the same
    edge functions and tie rules as the watertight ray kernel, so summing
    the mask over a closed mesh matches ray_surface_hits along +-z.
    """
    a, b, c = warped[tris[:, 0]], warped[tris[:, 1]], warped[tris[:, 2]]
    e_ab = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    e_bc = b[:, 0] * c[:, 1] - b[:, 1] * c[:, 0]
    e_ca = c[:, 0] * a[:, 1] - c[:, 1] * a[:, 0]
    big_w = e_ab + e_bc + e_ca
    flip = np.where(big_w < 0.0, -1.0, 1.0)
    f_ab, f_bc, f_ca = e_ab * flip, e_bc * flip, e_ca * flip
    inside = (big_w != 0.0) & (f_ab >= 0.0) & (f_bc >= 0.0) & (f_ca >= 0.0)

    def _edge_ok(f_e, p0, p1):
        g0 = (p1[:, 0] - p0[:, 0]) * flip
        g1 = (p1[:, 1] - p0[:, 1]) * flip
        return (f_e != 0.0) | (g0 > 0.0) | ((g0 == 0.0) & (g1 > 0.0))

    inside &= _edge_ok(f_ab, a, b) & _edge_ok(f_bc, b, c) & _edge_ok(f_ca, c, a)
    num = f_bc * a[:, 2] + f_ca * b[:, 2] + f_ab * c[:, 2]
    return inside & (num != 0.0)


def segment_crosses_seam(d0, d1) -> bool:
    """Geometric seam test: does the 3D segment d0-d1 cross {y = 0, x < 0}?

    This is the definitional branch-cut crossing; the edge detector's
    |delta phi| > pi shortcut agrees with it for edges subtending less
    than pi of azimuth.
    """
    x0, y0 = float(d0[0]), float(d0[1])
    x1, y1 = float(d1[0]), float(d1[1])
    if y0 == 0.0 and y1 == 0.0:
        return x0 < 0.0 or x1 < 0.0
    if (y0 > 0.0 and y1 > 0.0) or (y0 < 0.0 and y1 < 0.0):
        return False
    t = y0 / (y0 - y1)
    return x0 + t * (x1 - x0) < 0.0


def _tri_angles_3d(p0, p1, p2) -> np.ndarray:
    out = np.empty((len(p0), 3))
    for k, (a, b, c) in enumerate(((p0, p1, p2), (p1, p2, p0), (p2, p0, p1))):
        u, w = b - a, c - a
        cr = np.linalg.norm(np.cross(u, w), axis=1)
        out[:, k] = np.arctan2(cr, np.einsum("ij,ij->i", u, w))
    return out


def _tri_angles_2d(p0, p1, p2) -> tuple[np.ndarray, np.ndarray]:
    """(corner angles, degenerate mask) for 2D triangles."""
    out = np.empty((len(p0), 3))
    for k, (a, b, c) in enumerate(((p0, p1, p2), (p1, p2, p0), (p2, p0, p1))):
        u, w = b - a, c - a
        cr = u[:, 0] * w[:, 1] - u[:, 1] * w[:, 0]
        out[:, k] = np.arctan2(np.abs(cr), np.einsum("ij,ij->i", u, w))
    u, w = p1 - p0, p2 - p0
    area2 = u[:, 0] * w[:, 1] - u[:, 1] * w[:, 0]
    return out, area2 == 0.0


def _distortion_values(verts3d, tris, theta, phi, angles3d=None) -> np.ndarray:
    if angles3d is None:
        angles3d = _tri_angles_3d(verts3d[tris[:, 0]], verts3d[tris[:, 1]], verts3d[tris[:, 2]])
    p2 = np.column_stack((theta, phi))
    angles2d, degenerate = _tri_angles_2d(p2[tris[:, 0]], p2[tris[:, 1]], p2[tris[:, 2]])
    per_tri = np.max(np.abs(angles3d - angles2d), axis=1)
    per_tri[degenerate] = np.inf
    return per_tri


def summarize_distortion(per_tri: np.ndarray) -> DistortionStats:
    degenerate = [int(i) for i in np.flatnonzero(~np.isfinite(per_tri))]
    finite = per_tri[np.isfinite(per_tri)]
    if len(finite) == 0:
        return DistortionStats(math.inf, math.inf, math.inf, degenerate)
    return DistortionStats(float(finite.min()), float(finite.max()), float(finite.mean()), degenerate)


def triangle_angle_distortion(mesh: TriMesh, chart: ParamChart) -> np.ndarray:
    """Per-triangle max |interior angle difference|, 3D vs (theta, phi).

    Degenerate (zero-area) chart triangles record inf rather than being
    averaged away.
    """
    if chart.n_vertices != mesh.n_vertices:
        raise ValueError("chart and mesh vertex counts differ")
    return _distortion_values(mesh.vertices, mesh.triangles, chart.theta, chart.phi)


def triangle_distortion(mesh: TriMesh, chart: ParamChart) -> DistortionStats:
    """Aggregate angle distortion between a mesh and its chart."""
    return summarize_distortion(triangle_angle_distortion(mesh, chart))


def forward_chart(mesh: TriMesh, frame: WarpFrame) -> ParamChart:
    """Flatten a mesh; diagnostics cover the whole mesh.

    Preconditions: the mesh should be star-shaped about frame.translation
    (not re-validated here). Raises DomainError for a vertex at the star
    center.
    """
    warped, r = _warped_directions(mesh, frame)
    theta, phi, _ = cartesian_to_spherical_arrays(warped)
    edges = _edges_of(mesh.triangles)
    seam = [(int(i), int(j)) for i, j in edges[_seam_edge_mask(phi, edges)]]
    singular = [int(i) for i in np.flatnonzero(_pole_containment_mask(warped, mesh.triangles))]
    per_tri = _distortion_values(mesh.vertices, mesh.triangles, theta, phi)
    return ParamChart(theta, phi, r, mesh.triangles, seam, singular, summarize_distortion(per_tri))


def inverse_from_arrays(theta, phi, r, triangles, frame: WarpFrame) -> TriMesh:
    """Rebuild Cartesian vertices from raw chart arrays."""
    theta = np.asarray(theta, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    near_pole = (theta < 1e-12) | (theta > math.pi - 1e-12)
    if near_pole.any():
        warnings.warn(
            f"{int(near_pole.sum())} chart vertices sit at theta in {{0, pi}}; phi is unconstrained there",
            PoleAmbiguityWarning,
            stacklevel=2,
        )
    dirs = spherical_to_cartesian_arrays(theta, phi, np.ones_like(theta))
    un = warp.unwarp_points(dirs, frame.sigma)
    q = un * r[:, None]
    verts = frame.rotation.apply_inverse(q) + np.asarray(frame.translation, dtype=np.float64)
    return TriMesh(verts, triangles)


def inverse_chart(chart: ParamChart, frame: WarpFrame) -> TriMesh:
    """Rebuild Cartesian vertices from a chart produced with the same frame."""
    return inverse_from_arrays(chart.theta, chart.phi, chart.r, chart.triangles, frame)


def detect_seam_crossings(mesh: TriMesh, frame: WarpFrame, roi=None) -> list[tuple[int, int]]:
    """ROI edges whose endpoints wrap across the phi = +-pi branch cut."""
    warped, _ = _warped_directions(mesh, frame)
    _, phi, _ = cartesian_to_spherical_arrays(warped)
    edges = _edges_of(mesh.triangles[_roi_triangle_ids(mesh, roi)])
    return [(int(i), int(j)) for i, j in edges[_seam_edge_mask(phi, edges)]]


def detect_singular_faces(mesh: TriMesh, frame: WarpFrame, roi=None) -> list[int]:
    """ROI triangles whose warped image contains a chart pole direction (0, 0, +-1)."""
    warped, _ = _warped_directions(mesh, frame)
    ids = _roi_triangle_ids(mesh, roi)
    mask = _pole_containment_mask(warped, mesh.triangles[ids])
    return [int(i) for i in ids[mask]]


@dataclass(frozen=True)
class GridSearchSpec:
    """Deterministic search grid for fit_parameters."""

    pole_directions: int = 64
    roll_angles: int = 8
    sigma_steps: int = 16
    sigma_min: float = 0.05
    sigma_max: float = 1.0
    center: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if min(self.pole_directions, self.roll_angles, self.sigma_steps) < 1:
            raise ValueError("grid counts must be >= 1")
        if not 0.0 < self.sigma_min <= self.sigma_max:
            raise ValueError("need 0 < sigma_min <= sigma_max")


def fit_parameters(mesh: TriMesh, roi, search: GridSearchSpec | None = None) -> WarpFrame:
    """Grid-search a frame making the ROI chart cohesive.

    Candidates: rotations steering each Fibonacci direction to +y crossed
    with rolls about +y, and log-spaced sigma. Among candidates with no
    ROI seam crossing and no ROI singular face, minimizes the max ROI
    angle distortion; ties keep the first (lexicographic grid order), so
    the result is deterministic. Raises InfeasibleFitError when nothing
    feasible exists in the grid.

    Candidates that stretch any ROI triangle over a quarter sphere or more
    (some pair of warped vertex directions >= 90 degrees apart) are
    rejected outright: the edge/face detectors are only meaningful for
    small simplices, and such charts are unusable anyway.
    """
    spec = search if search is not None else GridSearchSpec()
    roi_ids = _roi_triangle_ids(mesh, roi)
    if len(roi_ids) == 0:
        raise ValueError("ROI must be nonempty")
    center = as_vec3(spec.center)

    rel = mesh.vertices - np.asarray(center, dtype=np.float64)
    r = np.linalg.norm(rel, axis=1)
    if (r < 1e-15).any():
        raise DomainError("vertex at the star center")
    dirs = rel / r[:, None]

    tris_global = mesh.triangles[roi_ids]
    vids = np.unique(tris_global)
    remap = np.full(mesh.n_vertices, -1, dtype=np.int64)
    remap[vids] = np.arange(len(vids))
    tris = remap[tris_global]
    edges = _edges_of(tris)
    dirs_roi = dirs[vids]
    p3 = mesh.vertices[vids]
    angles3d = _tri_angles_3d(p3[tris[:, 0]], p3[tris[:, 1]], p3[tris[:, 2]])

    sigmas = np.geomspace(spec.sigma_min, spec.sigma_max, spec.sigma_steps)
    fib = fibonacci_directions(spec.pole_directions)
    rolls = [2.0 * math.pi * j / spec.roll_angles for j in range(spec.roll_angles)]

    best_key = math.inf
    best_frame = None
    worst_best = (math.inf, None, 0, 0)  # least-violating infeasible candidate
    n_wrapped = 0
    for u in fib:
        align = rotation_between(u, (0.0, 1.0, 0.0))
        for gamma in rolls:
            rot = Rotation.from_axis_angle((0.0, 1.0, 0.0), gamma) @ align
            rdirs = rot.apply(dirs_roi)
            for sigma in sigmas:
                warped = kernels.warp_points(rdirs, float(sigma))
                wa, wb, wc = warped[tris[:, 0]], warped[tris[:, 1]], warped[tris[:, 2]]
                spread = min(
                    float(np.min(np.einsum("ij,ij->i", wa, wb))),
                    float(np.min(np.einsum("ij,ij->i", wb, wc))),
                    float(np.min(np.einsum("ij,ij->i", wc, wa))),
                )
                if spread <= 0.0:  # wrapped triangle; detectors out of contract
                    n_wrapped += 1
                    continue
                n_sing = int(np.count_nonzero(_pole_containment_mask(warped, tris)))
                theta, phi, _ = cartesian_to_spherical_arrays(warped)
                n_seam = int(np.count_nonzero(_seam_edge_mask(phi, edges)))
                if n_seam or n_sing:
                    viol = n_seam + n_sing
                    if viol < worst_best[0]:
                        worst_best = (viol, WarpFrame(center, rot, float(sigma)), n_seam, n_sing)
                    continue
                per_tri = _distortion_values(None, tris, theta, phi, angles3d=angles3d)
                key = float(np.max(per_tri))
                if key < best_key:
                    best_key = key
                    best_frame = WarpFrame(center, rot, float(sigma))
    if best_frame is None:
        _, frame, n_seam, n_sing = worst_best
        detail = (
            f"{n_seam} seam crossings and {n_sing} singular faces"
            if frame is not None
            else "only wrapped-triangle charts"
        )
        raise InfeasibleFitError(
            f"no feasible frame in the grid ({n_wrapped} wrapped candidates); "
            f"best candidate has {detail}",
            best_frame=frame,
            seam_count=n_seam,
            singular_count=n_sing,
        )
    return best_frame


def chart_to_obj(chart: ParamChart, path) -> None:
    """Write the 2D inspection OBJ: vertices (phi, theta, 0)."""
    with open(path, "w", encoding="utf-8") as fh:
        for th, ph in zip(chart.theta, chart.phi):
            fh.write(f"v {ph:.9g} {th:.9g} 0\n")
        for i, j, k in chart.triangles:
            fh.write(f"f {i + 1} {j + 1} {k + 1}\n")


def write_chart_radii(chart: ParamChart, path) -> None:
    """Radius sidecar for chart inversion: one value per vertex line."""
    with open(path, "w", encoding="utf-8") as fh:
        for r in chart.r:
            fh.write(f"{r:.9g}\n")


def load_radii(path) -> np.ndarray:
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if line:
                values.append(float(line))
    return np.asarray(values, dtype=np.float64)


def diagnostics_report(chart: ParamChart, frame: WarpFrame | None = None) -> str:
    """Tab-separated key/value diagnostics block."""
    lines = []
    if frame is not None:
        axis, angle = frame.rotation.axis_angle()
        t = frame.translation
        lines += [
            f"sigma\t{frame.sigma:.9g}",
            f"rotate_axis\t{axis.x:.9g},{axis.y:.9g},{axis.z:.9g}",
            f"rotate_deg\t{math.degrees(angle):.9g}",
            f"center\t{t.x:.9g},{t.y:.9g},{t.z:.9g}",
        ]
    st = chart.distortion_stats
    seam = ",".join(f"{i}-{j}" for i, j in chart.seam_crossings) or "-"
    sing = ",".join(str(i) for i in chart.singular_faces) or "-"
    degen = ",".join(str(i) for i in st.degenerate_faces) or "-"
    lines += [
        f"vertices\t{chart.n_vertices}",
        f"triangles\t{len(chart.triangles)}",
        f"seam_crossings\t{len(chart.seam_crossings)}",
        f"seam_edges\t{seam}",
        f"singular_faces\t{len(chart.singular_faces)}",
        f"singular_ids\t{sing}",
        f"distortion_min\t{st.min:.9g}",
        f"distortion_max\t{st.max:.9g}",
        f"distortion_mean\t{st.mean:.9g}",
        f"degenerate_faces\t{degen}",
        f"cohesive\t{'true' if chart.is_cohesive else 'false'}",
    ]
    return "\n".join(lines) + "\n"


def write_diagnostics(chart: ParamChart, path, frame: WarpFrame | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(diagnostics_report(chart, frame))


def load_roi(path) -> list[int]:
    """Read a triangle-id list: one id per line, # comments allowed."""
    ids = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if line:
                ids.append(int(line))
    return ids


def save_roi(ids, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for i in sorted(int(v) for v in ids):
            fh.write(f"{i}\n")
