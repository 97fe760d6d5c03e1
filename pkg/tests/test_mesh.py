import numpy as np
import pytest

from polewarp.mesh import (
    MeshError,
    ObjParseError,
    TriMesh,
    fibonacci_directions,
    load_obj,
    ray_surface_hits,
    save_obj,
    validate_star_shaped,
)
from polewarp.shapes import bumpy_ball, icosphere, octahedron, uv_torus

TETRA_OBJ = """\
# minimal tetrahedron
v 1 1 1
v -1 -1 1
v -1 1 -1
v 1 -1 -1
f 1 2 3
f 1 4 2
f 1 3 4
f 2 4 3
"""


def _moller_trumbore_count(mesh, d):
    """Brute-force crossing count; independent of the kernel's tie logic.

    Only trustworthy for generic directions (no edge/vertex grazes).
    """
    d = np.asarray(d, dtype=np.float64)
    v, t = mesh.vertices, mesh.triangles
    count = 0
    for ia, ib, ic in t:
        e1 = v[ib] - v[ia]
        e2 = v[ic] - v[ia]
        pvec = np.cross(d, e2)
        det = e1 @ pvec
        if abs(det) < 1e-14:
            continue
        tvec = -v[ia]
        u = (tvec @ pvec) / det
        if not 0.0 <= u <= 1.0:
            continue
        qvec = np.cross(tvec, e1)
        w = (d @ qvec) / det
        if w < 0.0 or u + w > 1.0:
            continue
        if (e2 @ qvec) / det > 0.0:
            count += 1
    return count


def test_load_obj_tetrahedron(tmp_path):
    path = tmp_path / "tet.obj"
    path.write_text(TETRA_OBJ)
    mesh = load_obj(path)
    assert mesh.n_vertices == 4
    assert mesh.n_triangles == 4
    assert mesh.vertices[0].tolist() == [1.0, 1.0, 1.0]


def test_load_obj_quad_fan(tmp_path):
    path = tmp_path / "quad.obj"
    path.write_text("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 1\nf 1 2 3 4\n")
    mesh = load_obj(path)
    assert mesh.triangles.tolist() == [[0, 1, 2], [0, 2, 3]]


def test_load_obj_negative_indices_and_slashes(tmp_path):
    path = tmp_path / "rel.obj"
    path.write_text(
        "v 0 0 0\nv 1 0 0\nv 0 1 1\nvt 0 0\nvn 0 0 1\nusemtl whatever\nf -3/1/1 -2/1/1 -1/1/1\n"
    )
    mesh = load_obj(path)
    assert mesh.triangles.tolist() == [[0, 1, 2]]


def test_load_obj_malformed_vertex_reports_line(tmp_path):
    path = tmp_path / "bad.obj"
    path.write_text("v 0 0 0\nv nope 0 0\n")
    with pytest.raises(ObjParseError) as exc:
        load_obj(path)
    assert exc.value.line_no == 2


def test_load_obj_index_out_of_range(tmp_path):
    path = tmp_path / "oob.obj"
    path.write_text("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n")
    with pytest.raises(ObjParseError):
        load_obj(path)


def test_save_load_roundtrip_10k_icosphere(tmp_path):
    mesh = icosphere(5)  # 10242 vertices, 20480 triangles
    assert mesh.n_vertices == 10242
    path = tmp_path / "ico.obj"
    save_obj(mesh, path)
    again = load_obj(path)
    assert np.array_equal(again.triangles, mesh.triangles)
    assert np.abs(again.vertices - mesh.vertices).max() < 1e-9


def test_trimesh_validation():
    v = np.array([[0, 0, 0.0], [1, 0, 0], [0, 1, 0]])
    with pytest.raises(MeshError):
        TriMesh(v, [[0, 1, 3]])  # out of range
    with pytest.raises(MeshError):
        TriMesh(v, [[0, 1, 1]])  # repeated index
    with pytest.raises(MeshError):
        TriMesh(np.array([[0, 0, 0.0], [1, 0, 0], [2, 0, 1e-13]]), [[0, 1, 2]])  # flat
    with pytest.raises(MeshError):
        TriMesh(np.array([[np.nan, 0, 0], [1, 0, 0], [0, 1, 0]]), [[0, 1, 2]])


def test_ray_hits_convex_is_one(icosphere2):
    rng = np.random.default_rng(2)
    for _ in range(50):
        d = rng.normal(size=3)
        assert ray_surface_hits(icosphere2, d) == 1


def test_ray_hits_through_exact_vertices_and_edges():
    octa = octahedron()
    for v in octa.vertices:
        assert ray_surface_hits(octa, v) == 1
    for i, j in octa.edges():
        assert ray_surface_hits(octa, (octa.vertices[i] + octa.vertices[j]) / 2.0) == 1
    # face centroids too
    for c in octa.centroids():
        assert ray_surface_hits(octa, c) == 1


def test_ray_hits_vertex_rays_on_icosphere(icosphere2):
    for v in icosphere2.vertices[::7]:
        assert ray_surface_hits(icosphere2, v) == 1


def test_ray_hits_torus_in_plane(torus):
    assert ray_surface_hits(torus, (1.0, 0.0017, 0.0)) == 2
    assert ray_surface_hits(torus, (0.0, 0.0, 1.0)) == 0


def test_ray_hits_match_brute_force(torus, icosphere2):
    rng = np.random.default_rng(5)
    for mesh in (torus, icosphere2):
        for _ in range(25):
            d = rng.normal(size=3)  # generic: no ties
            assert ray_surface_hits(mesh, d) == _moller_trumbore_count(mesh, d)


def test_ray_parity_odd_inside_even_outside(icosphere2, torus):
    rng = np.random.default_rng(6)
    for _ in range(40):
        d = rng.normal(size=3)
        assert ray_surface_hits(icosphere2, d) % 2 == 1  # origin inside
        assert ray_surface_hits(torus, d) % 2 == 0  # origin in the hole


def test_validate_icosphere(icosphere2):
    report = validate_star_shaped(icosphere2, 256)
    assert report.is_star_shaped
    assert report.offending_directions == []
    assert report.samples_tested == icosphere2.n_vertices + icosphere2.n_triangles + 256


def test_validate_torus(torus):
    report = validate_star_shaped(torus, 128)
    assert not report.is_star_shaped
    assert report.offending_directions


def test_validate_displaced_icosphere(icosphere2):
    displaced = TriMesh(icosphere2.vertices + np.array([0.0, 0.0, 2.0]), icosphere2.triangles)
    report = validate_star_shaped(displaced, 128)
    assert not report.is_star_shaped


def test_validate_bumpy_ball():
    report = validate_star_shaped(bumpy_ball(3, amplitude=0.3, seed=42), 128)
    assert report.is_star_shaped


def test_validate_requires_closed_mesh(icosphere2):
    open_mesh = TriMesh(icosphere2.vertices, icosphere2.triangles[:-3])
    with pytest.raises(MeshError, match="closed"):
        validate_star_shaped(open_mesh, 16)


def test_validate_rejects_origin_vertex():
    v = np.array([[0.0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]])
    t = [[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]]
    with pytest.raises(MeshError, match="origin"):
        validate_star_shaped(TriMesh(v, t), 4)


def test_fibonacci_directions_unit_and_spread():
    d = fibonacci_directions(500)
    assert np.abs(np.linalg.norm(d, axis=1) - 1.0).max() < 1e-12
    assert d[:, 2].max() > 0.99 and d[:, 2].min() < -0.99
    # deterministic
    assert np.array_equal(d, fibonacci_directions(500))


def test_edges_unique_undirected(icosphere2):
    e = icosphere2.edges()
    # Euler: V - E + F = 2 for a sphere
    assert icosphere2.n_vertices - len(e) + icosphere2.n_triangles == 2
