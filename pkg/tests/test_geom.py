import math

import numpy as np
import pytest

from polewarp.geom import (
    Rotation,
    Vec3,
    cartesian_to_spherical,
    cartesian_to_spherical_arrays,
    project_theta_phi,
    rotate,
    rotate_inverse,
    rotation_between,
    spherical_to_cartesian,
    spherical_to_cartesian_arrays,
)

from conftest import random_unit_points

# atan2(sqrt(2), 1) evaluated at 50-digit precision: 0.95531661812450927816...
THETA_111 = 0.9553166181245093


def test_cartesian_to_spherical_axis_point():
    s = cartesian_to_spherical((1.0, 0.0, 0.0))
    assert s == (math.pi / 2, 0.0, 1.0)


def test_cartesian_to_spherical_pole_is_total():
    s = cartesian_to_spherical((0.0, 0.0, 1.0))
    assert s == (0.0, 0.0, 1.0)
    assert cartesian_to_spherical((0.0, 0.0, 0.0)) == (0.0, 0.0, 0.0)


def test_cartesian_to_spherical_diagonal():
    theta, phi, r = cartesian_to_spherical((1.0, 1.0, 1.0))
    assert theta == pytest.approx(THETA_111, abs=1e-15)
    assert phi == pytest.approx(math.pi / 4, abs=1e-15)
    assert r == pytest.approx(math.sqrt(3.0), abs=1e-15)


def test_spherical_to_cartesian_equator_and_pole():
    assert spherical_to_cartesian((math.pi / 2, 0.0, 2.0)) == pytest.approx((2.0, 0.0, 0.0), abs=1e-15)
    # pole collapse: phi is irrelevant at theta = 0
    for phi in (0.0, 1.0, -2.5):
        assert spherical_to_cartesian((0.0, phi, 1.0)) == pytest.approx((0.0, 0.0, 1.0), abs=1e-15)


def test_spherical_to_cartesian_diagonal_roundtrip():
    p = spherical_to_cartesian((THETA_111, math.pi / 4, math.sqrt(3.0)))
    assert p == pytest.approx((1.0, 1.0, 1.0), abs=1e-9)


def test_roundtrip_sweep_cart_first():
    pts = random_unit_points(5000, seed=11) * np.random.default_rng(12).uniform(0.1, 10.0, size=(5000, 1))
    theta, phi, r = cartesian_to_spherical_arrays(pts)
    back = spherical_to_cartesian_arrays(theta, phi, r)
    err = np.abs(back - pts).max(axis=1) / np.linalg.norm(pts, axis=1)
    assert err.max() < 1e-12


def test_roundtrip_sweep_spherical_first():
    rng = np.random.default_rng(5)
    theta = rng.uniform(1e-6, math.pi - 1e-6, size=3000)
    phi = rng.uniform(-math.pi + 1e-9, math.pi, size=3000)
    r = rng.uniform(0.05, 20.0, size=3000)
    p = spherical_to_cartesian_arrays(theta, phi, r)
    th2, ph2, r2 = cartesian_to_spherical_arrays(p)
    assert np.abs(th2 - theta).max() < 1e-12
    assert np.abs(ph2 - phi).max() < 1e-12
    assert np.abs(r2 - r).max() / r.max() < 1e-12


def test_phi_branch_is_half_open():
    # y = -0.0 with x < 0 is the only route to atan2 = -pi; folded to +pi
    s = cartesian_to_spherical((-1.0, -0.0, 0.0))
    assert s.phi == math.pi
    theta, phi, _ = cartesian_to_spherical_arrays(np.array([[-1.0, -0.0, 0.0]]))
    assert phi[0] == math.pi


def test_project_theta_phi_drops_r():
    assert project_theta_phi((math.pi / 2, 0.0, 1.0)) == (math.pi / 2, 0.0)
    assert project_theta_phi((0.3, -1.1, 7.5)) == (0.3, -1.1)
    for r in (0.1, 1.0, 42.0):
        assert project_theta_phi((0.3, -1.1, r)) == (0.3, -1.1)


def test_nonfinite_rejected():
    with pytest.raises(ValueError):
        cartesian_to_spherical((math.nan, 0.0, 0.0))
    with pytest.raises(ValueError):
        spherical_to_cartesian((0.1, math.inf, 1.0))
    with pytest.raises(ValueError):
        spherical_to_cartesian((0.1, 0.0, -1.0))


def test_rotation_identity_and_axis_permutation():
    ident = Rotation.identity()
    assert rotate((1.0, 2.0, 3.0), ident) == pytest.approx((1.0, 2.0, 3.0), abs=0)
    r90 = Rotation.from_axis_angle((0, 0, 1), math.pi / 2)
    assert rotate((1.0, 0.0, 0.0), r90) == pytest.approx((0.0, 1.0, 0.0), abs=1e-12)


def test_rotation_rejects_non_unit_quaternion():
    with pytest.raises(ValueError):
        Rotation(1.0, 1.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        Rotation(0.0, 0.0, 0.0, 0.0)


def test_rotation_matrix_orthonormal():
    rng = np.random.default_rng(3)
    for _ in range(50):
        axis = rng.normal(size=3)
        rot = Rotation.from_axis_angle(axis, rng.uniform(-8, 8))
        m = rot.matrix
        assert np.abs(m.T @ m - np.eye(3)).max() < 1e-12
        assert abs(np.linalg.det(m) - 1.0) < 1e-12


def test_rotation_roundtrip_and_norm_preservation():
    rng = np.random.default_rng(4)
    pts = rng.normal(size=(200, 3)) * 3.0
    for _ in range(20):
        rot = Rotation.from_axis_angle(rng.normal(size=3), rng.uniform(-8, 8))
        out = rot.apply(pts)
        assert np.abs(np.linalg.norm(out, axis=1) - np.linalg.norm(pts, axis=1)).max() < 1e-12
        back = rot.apply_inverse(out)
        assert np.abs(back - pts).max() < 1e-12
        # pairwise dot products preserved
        assert np.abs(out @ out.T - pts @ pts.T).max() < 1e-10


def test_rotation_scalar_roundtrip():
    rot = Rotation.from_axis_angle((1, 2, -1), 0.77)
    p = (0.3, -0.4, 2.0)
    assert rotate_inverse(rotate(p, rot), rot) == pytest.approx(p, abs=1e-12)


def test_rotation_compose_matches_matrix_product():
    a = Rotation.from_axis_angle((1, 0, 0), 0.3)
    b = Rotation.from_axis_angle((0, 1, 0), -1.1)
    ab = a @ b
    assert np.abs(ab.matrix - a.matrix @ b.matrix).max() < 1e-12


def test_rotation_between():
    rng = np.random.default_rng(9)
    for _ in range(50):
        u = rng.normal(size=3)
        v = rng.normal(size=3)
        rot = rotation_between(u, v)
        got = rot.apply(u / np.linalg.norm(u))
        assert got == pytest.approx(list(v / np.linalg.norm(v)), abs=1e-12)
    # antiparallel corner
    rot = rotation_between((0, 0, 1), (0, 0, -1))
    assert rot.apply((0.0, 0.0, 1.0)) == pytest.approx((0.0, 0.0, -1.0), abs=1e-12)


def test_axis_angle_report_roundtrip():
    rot = Rotation.from_axis_angle((0.3, -1.0, 0.5), 2.0)
    axis, angle = rot.axis_angle()
    again = Rotation.from_axis_angle(axis, angle)
    assert np.abs(again.matrix - rot.matrix).max() < 1e-12


def test_vec3_norm():
    assert Vec3(3.0, 4.0, 0.0).norm() == 5.0
