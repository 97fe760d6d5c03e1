"""Conformal pole warp of the unit sphere and its exact inverse.

The map stereographically projects from (0, 1, 0) onto the x-z plane,
dilates the plane by sigma, and projects back:

    xs = sigma x / (1 - y),   zs = sigma z / (1 - y),
    delta = 2 / (1 + xs^2 + zs^2),
    (x, y, z) -> (xs delta, 1 - delta, zs delta).

It maps any y != 1 input onto the unit sphere, fixes (0, -1, 0) and (in
the continuous limit) (0, 1, 0), maps circles to circles, preserves
angles, and is undone by warping again with 1/sigma. sigma = 1 is the
identity on the unit sphere; sigma < 1 draws the images of the coordinate
poles (0, 0, +-1) toward (0, -1, 0) and the preimages of the coordinate
poles toward (0, +1, 0).
"""

from __future__ import annotations

import math
import warnings
from typing import NamedTuple

import numpy as np

from . import kernels
from .geom import Vec3

SIGMA_SAFE_RANGE = (1e-3, 1e3)
POLE_SNAP = 1e-12


class StereoPlanePoint(NamedTuple):
    """Dilated stereographic-plane coordinates of a point.

    x_sigma = sigma x / (1 - y), z_sigma = sigma z / (1 - y); the inverse
    projection factor delta = 2 / (1 + x_sigma^2 + z_sigma^2) is derived.
    """

    x_sigma: float
    z_sigma: float

    def delta(self) -> float:
        return 2.0 / (1.0 + (self.x_sigma * self.x_sigma + self.z_sigma * self.z_sigma))


class DomainError(ValueError):
    """Input outside a map's domain (e.g. the singular ray y = 1, (x, z) != 0)."""


class SigmaPrecisionWarning(UserWarning):
    """sigma outside the precision-safe range [1e-3, 1e3]."""


def check_sigma(sigma) -> float:
    """Validate a warp scale: finite, > 0; warn outside the safe range."""
    s = float(sigma)
    if not math.isfinite(s) or s <= 0.0:
        raise ValueError(f"sigma must be finite and > 0, got {sigma}")
    if not SIGMA_SAFE_RANGE[0] <= s <= SIGMA_SAFE_RANGE[1]:
        warnings.warn(
            f"sigma = {s:g} is outside [{SIGMA_SAFE_RANGE[0]:g}, {SIGMA_SAFE_RANGE[1]:g}]; "
            "results may lose precision",
            SigmaPrecisionWarning,
            stacklevel=3,
        )
    return s


def to_stereo_plane(p, sigma) -> StereoPlanePoint:
    """Project a point to the dilated stereographic plane.

    Decomposition helper: warp_poles is this projection followed by the
    inverse projection back to the unit sphere.
    """
    s = check_sigma(sigma)
    x, y, z = (float(v) for v in p)
    if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(z)):
        raise ValueError(f"point has non-finite components: ({x}, {y}, {z})")
    one_m_y = 1.0 - y
    if one_m_y == 0.0:
        raise DomainError(f"y = 1 has no stereographic image: ({x}, {y}, {z})")
    return StereoPlanePoint(s * x / one_m_y, s * z / one_m_y)


def from_stereo_plane(sp: StereoPlanePoint) -> Vec3:
    """Inverse stereographic projection back onto the unit sphere."""
    d = sp.delta()
    return Vec3(sp.x_sigma * d, 1.0 - d, sp.z_sigma * d)


def warp_poles(p, sigma) -> Vec3:
    """Warp a single point; intended domain is the unit sphere.

    Inputs within 1e-12 of (0, 1, 0) snap to the fixed point. The
    off-sphere singular ray (y = 1 exactly, (x, z) != (0, 0)) raises
    DomainError. Off-sphere points with y != 1 are mapped verbatim; only
    unit-sphere inputs carry the round-trip guarantee.
    """
    s = check_sigma(sigma)
    x, y, z = (float(v) for v in p)
    if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(z)):
        raise ValueError(f"point has non-finite components: ({x}, {y}, {z})")
    one_m_y = 1.0 - y
    if abs(one_m_y) < POLE_SNAP:
        if x * x + z * z < 4.0 * POLE_SNAP:
            return Vec3(0.0, 1.0, 0.0)
        if one_m_y == 0.0:
            raise DomainError(f"singular ray: y = 1 with (x, z) = ({x}, {z}) != (0, 0)")
    xs = s * x / one_m_y
    zs = s * z / one_m_y
    delta = 2.0 / (1.0 + (xs * xs + zs * zs))
    return Vec3(xs * delta, 1.0 - delta, zs * delta)


def unwarp_poles(p, sigma) -> Vec3:
    """Exact inverse of warp_poles on the unit sphere: warp with 1/sigma."""
    s = check_sigma(sigma)
    return warp_poles(p, 1.0 / s)


def warp_poles_expanded(p, sigma) -> Vec3:
    """Single-fraction rational form of the warp; differential cross-check.

    Algebraically identical to warp_poles but evaluated as

        den = s^2 x^2 + s^2 z^2 + (y - 1)^2
        ( -2 s x (y - 1) / den,
          (s^2 x^2 + s^2 z^2 - (y - 1)^2) / den,
          -2 s z (y - 1) / den )

    along a different floating-point path. The quadratic y^2 - 2y + 1 is
    grouped as (y - 1)^2, which is the same polynomial without the
    catastrophic cancellation near y = 1. Kept independent of the
    stereographic composition so the two can be tested against each other.
    """
    s = check_sigma(sigma)
    x, y, z = (float(v) for v in p)
    sx2 = s * s * x * x
    sz2 = s * s * z * z
    ym1 = y - 1.0
    den = sx2 + sz2 + ym1 * ym1
    if den == 0.0:
        raise DomainError(f"zero denominator at ({x}, {y}, {z})")
    return Vec3(
        -2.0 * s * x * ym1 / den,
        (sx2 + sz2 - ym1 * ym1) / den,
        -2.0 * s * z * ym1 / den,
    )


def warped_pole_positions(sigma) -> tuple[Vec3, Vec3]:
    """Images of the coordinate poles (0, 0, +-1) under the warp.

    Both lie on the x = 0 great circle at y = (sigma^2 - 1)/(sigma^2 + 1),
    z = +-2 sigma/(sigma^2 + 1); for sigma < 1 they sit at y < 0.
    """
    return warp_poles((0.0, 0.0, 1.0), sigma), warp_poles((0.0, 0.0, -1.0), sigma)


def chart_pole_preimages(sigma) -> tuple[Vec3, Vec3]:
    """Unit-sphere points the warp sends to (0, 0, +-1).

    These are where the post-warp spherical chart degenerates; for
    sigma < 1 they cluster toward the (0, 1, 0) fixed point.
    """
    s = check_sigma(sigma)
    return warp_poles((0.0, 0.0, 1.0), 1.0 / s), warp_poles((0.0, 0.0, -1.0), 1.0 / s)


def _checked_batch(points) -> np.ndarray:
    p = np.ascontiguousarray(points, dtype=np.float64)
    if p.ndim != 2 or p.shape[1] != 3:
        raise ValueError(f"expected an (N, 3) array, got shape {p.shape}")
    if not np.isfinite(p).all():
        raise ValueError("points contain non-finite components")
    one_m_y = 1.0 - p[:, 1]
    bad = (one_m_y == 0.0) & (p[:, 0] ** 2 + p[:, 2] ** 2 >= 4.0 * POLE_SNAP)
    if bad.any():
        raise DomainError(f"singular ray at rows {np.flatnonzero(bad)[:8].tolist()}")
    return p


def warp_points(points, sigma) -> np.ndarray:
    """Batch warp_poles over an (N, 3) array (kernel-backed)."""
    s = check_sigma(sigma)
    return kernels.warp_points(_checked_batch(points), s)


def warp_points_expanded(points, sigma) -> np.ndarray:
    """Batch warp_poles_expanded; plain numpy, independent of the kernels.

    Keeps the rational-form route separate from the stereographic kernel
    route so the two can be compared wholesale.
    """
    s = check_sigma(sigma)
    p = _checked_batch(points)
    x, y, z = p[:, 0], p[:, 1], p[:, 2]
    sx2 = s * s * x * x
    sz2 = s * s * z * z
    ym1 = y - 1.0
    den = sx2 + sz2 + ym1 * ym1
    if (den == 0.0).any():
        raise DomainError(f"zero denominator at rows {np.flatnonzero(den == 0.0)[:8].tolist()}")
    return np.stack(
        (
            -2.0 * s * x * ym1 / den,
            (sx2 + sz2 - ym1 * ym1) / den,
            -2.0 * s * z * ym1 / den,
        ),
        axis=1,
    )


def unwarp_points(points, sigma) -> np.ndarray:
    """Batch inverse warp over an (N, 3) array."""
    s = check_sigma(sigma)
    return kernels.warp_points(_checked_batch(points), 1.0 / s)
