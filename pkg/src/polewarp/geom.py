"""Coordinate primitives: spherical conversions and rigid rotations.

Conventions used throughout the package: theta is the inclination from the
+z axis in [0, pi]; phi is the azimuth atan2(y, x) in (-pi, pi]; r >= 0.
atan2(0, 0) is taken to be 0, so the origin maps to (0, 0, 0).
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np


class Vec3(NamedTuple):
    """Point or direction in Cartesian 3-space (double precision)."""

    x: float
    y: float
    z: float

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)


class SphericalCoord(NamedTuple):
    """Spherical triple (inclination theta, azimuth phi, radius r)."""

    theta: float
    phi: float
    r: float


def as_vec3(p) -> Vec3:
    x, y, z = p
    return Vec3(float(x), float(y), float(z))


def _require_finite(values, what):
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"{what} has non-finite component: {values}")


def cartesian_to_spherical(p) -> SphericalCoord:
    """Map a Cartesian point to (theta, phi, r).

    theta = atan2(sqrt(x^2 + y^2), z), phi = atan2(y, x), r = |p|.
    Total on finite inputs; phi = -pi (reachable only through a signed
    zero) is folded to +pi so phi stays in (-pi, pi].
    """
    x, y, z = (float(v) for v in p)
    _require_finite((x, y, z), "point")
    rho = math.hypot(x, y)
    phi = math.atan2(y, x)
    if phi <= -math.pi:
        phi = math.pi
    return SphericalCoord(math.atan2(rho, z), phi, math.hypot(rho, z))


def spherical_to_cartesian(s) -> Vec3:
    """Inverse spherical map consistent with cartesian_to_spherical.

    x = r sin(theta) cos(phi), y = r sin(theta) sin(phi), z = r cos(theta).
    """
    theta, phi, r = (float(v) for v in s)
    _require_finite((theta, phi, r), "spherical coordinate")
    if r < 0.0:
        raise ValueError(f"radius must be >= 0, got {r}")
    if not -1e-12 <= theta <= math.pi + 1e-12:
        raise ValueError(f"theta must lie in [0, pi], got {theta}")
    if not -math.pi - 1e-12 <= phi <= math.pi + 1e-12:
        raise ValueError(f"phi must lie in (-pi, pi], got {phi}")
    st = math.sin(theta)
    return Vec3(r * st * math.cos(phi), r * st * math.sin(phi), r * math.cos(theta))


def project_theta_phi(s) -> tuple[float, float]:
    """Drop the radius: (theta, phi, r) -> (theta, phi)."""
    theta, phi = float(s[0]), float(s[1])
    return theta, phi


def cartesian_to_spherical_arrays(points):
    """Vectorized cartesian_to_spherical over an (N, 3) array.

    Returns (theta, phi, r) float64 arrays of length N.
    """
    p = np.asarray(points, dtype=np.float64)
    x, y, z = p[..., 0], p[..., 1], p[..., 2]
    rho = np.hypot(x, y)
    phi = np.arctan2(y, x)
    phi = np.where(phi <= -np.pi, np.pi, phi)
    return np.arctan2(rho, z), phi, np.hypot(rho, z)


def spherical_to_cartesian_arrays(theta, phi, r):
    """Vectorized spherical_to_cartesian; returns an (N, 3) array."""
    theta = np.asarray(theta, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    st = np.sin(theta)
    return np.stack((r * st * np.cos(phi), r * st * np.sin(phi), r * np.cos(theta)), axis=-1)


class Rotation:
    """Proper rotation stored as a unit quaternion with a cached matrix.

    Non-unit quaternions are rejected at construction (tolerance 1e-9);
    accepted ones are renormalized so the matrix is orthonormal to machine
    precision.
    """

    __slots__ = ("w", "x", "y", "z", "_m")

    def __init__(self, w: float, x: float, y: float, z: float):
        n = math.sqrt(w * w + x * x + y * y + z * z)
        if not math.isfinite(n) or abs(n - 1.0) > 1e-9:
            raise ValueError(f"quaternion must have unit length, |q| = {n}")
        w, x, y, z = w / n, x / n, y / n, z / n
        self.w, self.x, self.y, self.z = w, x, y, z
        self._m = np.array(
            [
                [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
                [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
                [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
            ]
        )

    @classmethod
    def identity(cls) -> "Rotation":
        return cls(1.0, 0.0, 0.0, 0.0)

    @classmethod
    def from_axis_angle(cls, axis, radians: float) -> "Rotation":
        ax, ay, az = (float(v) for v in axis)
        n = math.sqrt(ax * ax + ay * ay + az * az)
        if n == 0.0 or not math.isfinite(n):
            raise ValueError("rotation axis must be a finite nonzero vector")
        h = 0.5 * float(radians)
        s = math.sin(h) / n
        return cls(math.cos(h), ax * s, ay * s, az * s)

    @property
    def matrix(self) -> np.ndarray:
        return self._m.copy()

    def apply(self, p):
        """Rotate a (3,) point or an (N, 3) batch."""
        return np.asarray(p, dtype=np.float64) @ self._m.T

    def apply_inverse(self, p):
        return np.asarray(p, dtype=np.float64) @ self._m

    def inverse(self) -> "Rotation":
        return Rotation(self.w, -self.x, -self.y, -self.z)

    def __matmul__(self, other: "Rotation") -> "Rotation":
        """Composition: (self @ other) applies other first, then self."""
        w1, x1, y1, z1 = self.w, self.x, self.y, self.z
        w2, x2, y2, z2 = other.w, other.x, other.y, other.z
        return Rotation(
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 + y1 * w2 + z1 * x2 - x1 * z2,
            w1 * z2 + z1 * w2 + x1 * y2 - y1 * x2,
        )

    def axis_angle(self) -> tuple[Vec3, float]:
        """Return (unit axis, angle in [0, pi]); axis is +z for the identity."""
        s = math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)
        w = min(1.0, max(-1.0, self.w))
        angle = 2.0 * math.atan2(s, w)
        if s < 1e-15:
            return Vec3(0.0, 0.0, 1.0), 0.0
        if angle > math.pi:
            angle = 2.0 * math.pi - angle
            return Vec3(-self.x / s, -self.y / s, -self.z / s), angle
        return Vec3(self.x / s, self.y / s, self.z / s), angle

    def __repr__(self):
        return f"Rotation(w={self.w:.17g}, x={self.x:.17g}, y={self.y:.17g}, z={self.z:.17g})"


def rotate(p, rotation: Rotation) -> Vec3:
    """Rotate a single point; returns Vec3."""
    return Vec3(*rotation.apply(p))


def rotate_inverse(p, rotation: Rotation) -> Vec3:
    """Apply the inverse rotation to a single point; returns Vec3."""
    return Vec3(*rotation.apply_inverse(p))


def rotation_between(u, v) -> Rotation:
    """Shortest-arc rotation taking direction u to direction v."""
    ux, uy, uz = (float(c) for c in u)
    vx, vy, vz = (float(c) for c in v)
    nu = math.sqrt(ux * ux + uy * uy + uz * uz)
    nv = math.sqrt(vx * vx + vy * vy + vz * vz)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("directions must be nonzero")
    ux, uy, uz = ux / nu, uy / nu, uz / nu
    vx, vy, vz = vx / nv, vy / nv, vz / nv
    cx = uy * vz - uz * vy
    cy = uz * vx - ux * vz
    cz = ux * vy - uy * vx
    s = math.sqrt(cx * cx + cy * cy + cz * cz)
    c = ux * vx + uy * vy + uz * vz
    if s < 1e-12:
        if c > 0.0:
            return Rotation.identity()
        # antiparallel: rotate pi about any axis perpendicular to u
        if abs(ux) <= abs(uy) and abs(ux) <= abs(uz):
            px, py, pz = 0.0, -uz, uy
        elif abs(uy) <= abs(uz):
            px, py, pz = uz, 0.0, -ux
        else:
            px, py, pz = -uy, ux, 0.0
        return Rotation.from_axis_angle((px, py, pz), math.pi)
    return Rotation.from_axis_angle((cx, cy, cz), math.atan2(s, c))
