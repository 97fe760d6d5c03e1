"""Coordinate-wise theta/phi extraction for a distorted pole.

Unlike the full warp-then-project path, theta and phi are computed
independently here. theta is the planar angle of the XY offset from the
pole's XY projection. phi comes from a one-parameter family of unit-circle
chords in the YZ plane: as phi runs from 0 to pi/2 the chord sweeps from
the horizontal diameter down to the single point (o_y, o_z) where the
pole projects, and from pi/2 to pi it opens back out to a diameter.
Finding the chord through a query point yields its phi.

The endpoint angles of the chord move linearly with phi at rates set by
the pole angle, so this family is a simplified measure and is not claimed
to coincide with the warp-then-project composition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geom import Vec3
from .warp import check_sigma, warp_poles

VERTICAL_EPS = 1e-14
_DEG_EPS = 1e-12


class NotInChordFamilyError(ValueError):
    """Query point is outside the region swept by the chord family."""


@dataclass(frozen=True)
class DistortedPole:
    """North-pole image constrained to the unit circle of the YZ plane.

    o.x is 0 (the distortion acts along the y axis) and (o.y, o.z) =
    (cos(sigma_angle), sin(sigma_angle)).
    """

    o: Vec3
    sigma_angle: float

    def __post_init__(self):
        if self.o.x != 0.0:
            raise ValueError(f"pole must have x = 0, got {self.o.x}")
        r2 = self.o.y * self.o.y + self.o.z * self.o.z
        if abs(r2 - 1.0) > 1e-12:
            raise ValueError(f"pole must lie on the unit YZ circle, |o|^2 = {r2}")
        if abs(math.atan2(self.o.z, self.o.y) - self.sigma_angle) > 1e-12:
            raise ValueError("sigma_angle inconsistent with atan2(o_z, o_y)")

    @classmethod
    def from_angle(cls, sigma_angle: float) -> "DistortedPole":
        a = float(sigma_angle)
        return cls(Vec3(0.0, math.cos(a), math.sin(a)), math.atan2(math.sin(a), math.cos(a)))

    @classmethod
    def from_warp_sigma(cls, sigma) -> "DistortedPole":
        """Bridge from the warp scale: pole = warp of (0, 0, 1).

        The warped pole has x = 0 exactly and unit norm, so it is a valid
        distorted pole; sigma_angle is its YZ polar angle (equals
        2*atan(1/sigma), decreasing from pi to 0 as sigma grows).
        """
        check_sigma(sigma)
        w = warp_poles((0.0, 0.0, 1.0), sigma)
        n = math.hypot(w.y, w.z)
        o = Vec3(0.0, w.y / n, w.z / n)  # renormalize to kill ulp drift
        return cls(o, math.atan2(o.z, o.y))


def pole_from_warp_sigma(sigma) -> DistortedPole:
    return DistortedPole.from_warp_sigma(sigma)


def distorted_theta(p, pole: DistortedPole) -> float:
    """theta for the distorted system: atan2(p_y - o_y, p_x).

    The anticlockwise angle between [p_x, p_y - o_y] and [1, 0]; reads
    only (p_x, p_y). Evaluates atan2 directly (bitwise comparable). The
    degenerate query (p_x, p_y) = (0, o_y) yields 0; use
    distorted_theta_ex to detect it.
    """
    return math.atan2(float(p[1]) - pole.o.y, float(p[0]))


def distorted_theta_ex(p, pole: DistortedPole) -> tuple[float, bool]:
    """(theta, degenerate) where degenerate flags (p_x, p_y) = (0, o_y)."""
    px, py = float(p[0]), float(p[1])
    return math.atan2(py - pole.o.y, px), px == 0.0 and py == pole.o.y


def angle_to_02pi(angle: float) -> float:
    """Map an (-pi, pi]-style angle into [0, 2 pi)."""
    a = math.fmod(float(angle), 2.0 * math.pi)
    if a < 0.0:
        a += 2.0 * math.pi
    return a


@dataclass(frozen=True)
class Chord:
    """Unit-circle chord in the (y, z) plane for one phi value."""

    a: tuple[float, float]
    b: tuple[float, float]
    mid: tuple[float, float]
    slope: float
    vertical: bool


def chord_at_phi(phi: float, pole: DistortedPole) -> Chord:
    """Chord endpoints for phi in [0, pi].

    a sits at angle 2*sa*phi/pi and b at -(pi + 2*(pi - sa)*phi/pi),
    where sa is the pole angle. Both endpoint angles reach sa at
    phi = pi/2, where the chord degenerates to the pole point; phi = 0
    and phi = pi give diameters.
    """
    ph = float(phi)
    if not -1e-12 <= ph <= math.pi + 1e-12:
        raise ValueError(f"phi must lie in [0, pi], got {phi}")
    sa = pole.sigma_angle
    ang_a = 2.0 * sa * ph / math.pi
    ang_b = math.pi + 2.0 * (math.pi - sa) * ph / math.pi
    a = (math.cos(ang_a), math.sin(ang_a))
    b = (math.cos(ang_b), -math.sin(ang_b))
    mid = (0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]))
    du = a[0] - b[0]
    vertical = abs(du) < VERTICAL_EPS
    slope = math.inf if vertical else (a[1] - b[1]) / du
    return Chord(a, b, mid, slope, vertical)


def chord_line_residual(q, chord: Chord) -> float:
    """Line-equation residual of query (q_y, q_z) against a chord.

    Slope form (q_z - g_z) - slope*(q_y - g_y); the vertical branch falls
    back to q_y - g_y.
    """
    qy, qz = float(q[0]), float(q[1])
    if chord.vertical:
        return qy - chord.mid[0]
    return (qz - chord.mid[1]) - chord.slope * (qy - chord.mid[0])


@dataclass(frozen=True)
class ChordSolution:
    phi: float
    branch: str
    residual: float  # signed perpendicular distance at the root
    line_residual: float  # slope-form residual (chord_line_residual)
    degenerate: bool


def _perp_residual(phi, pole, qy, qz, branch):
    """Signed distance from (qy, qz) to the chord line at phi.

    At phi = pi/2 the chord degenerates and the line's limit is the circle
    tangent at the pole; its closed form is +-(1 - q . o), positive side
    facing the disc interior for the lower branch.
    """
    half_pi = 0.5 * math.pi
    if abs(phi - half_pi) < 1e-15:
        v = 1.0 - (qy * pole.o.y + qz * pole.o.z)
        return v if branch == "lower" else -v
    c = chord_at_phi(phi, pole)
    uy = c.b[0] - c.a[0]
    uz = c.b[1] - c.a[1]
    ln = math.hypot(uy, uz)
    return (uy * (qz - c.a[1]) - uz * (qy - c.a[0])) / ln


def _bisect_branch(pole, qy, qz, branch):
    half_pi = 0.5 * math.pi
    lo, hi = (0.0, half_pi) if branch == "lower" else (half_pi, math.pi)
    s_lo = _perp_residual(lo, pole, qy, qz, branch)
    s_hi = _perp_residual(hi, pole, qy, qz, branch)
    if s_lo == 0.0:
        return lo
    if s_hi == 0.0:
        return hi
    if (s_lo > 0.0) == (s_hi > 0.0):
        return None
    # refine well below the 1e-12 contract so the slope-form residual
    # stays tiny even on steep chords
    while hi - lo > 1e-15:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        s_mid = _perp_residual(mid, pole, qy, qz, branch)
        if s_mid == 0.0:
            return mid
        if (s_mid > 0.0) == (s_lo > 0.0):
            lo, s_lo = mid, s_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def distorted_phi_detail(p, pole: DistortedPole, tol: float = 1e-10, branch: str | None = None) -> ChordSolution:
    """Solve for the chord containing (p_y, p_z) and report details.

    branch selects the family half: "lower" ([0, pi/2]), "upper"
    ([pi/2, pi]), or None to pick by the query's angular position
    relative to the pole angle (falling back to the other half if the
    first does not bracket). The root is bracketed by bisection on the
    signed perpendicular distance to the chord line, refined below a
    1e-12 bracket (to ~1e-15); success requires that distance <= tol.
    Accuracy degrades as the query approaches the degenerate pole point,
    where the whole family collapses.
    """
    if tol <= 0.0:
        raise ValueError(f"tol must be > 0, got {tol}")
    if branch not in (None, "lower", "upper"):
        raise ValueError(f"branch must be 'lower', 'upper' or None, got {branch!r}")
    qy, qz = float(p[1]), float(p[2])
    r2 = qy * qy + qz * qz
    if r2 > 1.0 + 1e-9:
        raise NotInChordFamilyError(f"({qy}, {qz}) lies outside the unit YZ disc")
    half_pi = 0.5 * math.pi
    if math.hypot(qy - pole.o.y, qz - pole.o.z) < _DEG_EPS:
        sol_branch = branch if branch is not None else "lower"
        return ChordSolution(half_pi, sol_branch, 0.0, 0.0, True)
    if branch is not None:
        order = (branch,)
    else:
        psi = angle_to_02pi(math.atan2(qz, qy))
        order = ("lower", "upper") if psi <= pole.sigma_angle else ("upper", "lower")
    worst = None
    for br in order:
        root = _bisect_branch(pole, qy, qz, br)
        if root is None:
            continue
        resid = _perp_residual(root, pole, qy, qz, br)
        if abs(resid) > tol:
            worst = (root, resid)
            continue
        line_res = chord_line_residual((qy, qz), chord_at_phi(root, pole))
        return ChordSolution(root, br, resid, line_res, False)
    if worst is not None:
        raise NotInChordFamilyError(
            f"bracketed root at phi = {worst[0]} has residual {worst[1]:g} > tol = {tol:g}"
        )
    raise NotInChordFamilyError(
        f"({qy}, {qz}) is not crossed by any chord of the "
        f"{'requested' if branch else 'selected'} branch(es)"
    )


def distorted_phi(p, pole: DistortedPole, tol: float = 1e-10, branch: str | None = None) -> float:
    """phi of the chord through (p_y, p_z); see distorted_phi_detail."""
    return distorted_phi_detail(p, pole, tol, branch).phi
