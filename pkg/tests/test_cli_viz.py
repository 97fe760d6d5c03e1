import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from polewarp.cli import main
from polewarp.geom import cartesian_to_spherical
from polewarp.mesh import load_obj, save_obj
from polewarp.pipeline import WarpFrame, forward_chart, save_roi
from polewarp.plots import PlotSpec, plot_chart, plot_warp_grid
from polewarp.shapes import cap_band_roi, demo_head, icosphere
from polewarp.warp import warped_pole_positions

SVG_NS = "{http://www.w3.org/2000/svg}"


@pytest.fixture(scope="module")
def work(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    head = demo_head(2)
    save_obj(head, root / "head.obj")
    save_roi(cap_band_roi(head, (0.3, 0.1, 0.95), 0.9), root / "head.roi")
    save_obj(icosphere(2), root / "ico.obj")
    return root


def test_validate_star_shaped_exits_zero(work, capsys):
    assert main(["validate", str(work / "ico.obj")]) == 0
    out = capsys.readouterr().out
    assert "star_shaped\ttrue" in out


def test_validate_failure_exits_one(work, capsys, tmp_path):
    ico = load_obj(work / "ico.obj")
    from polewarp.mesh import TriMesh

    save_obj(TriMesh(ico.vertices + np.array([0.0, 0.0, 2.0]), ico.triangles), tmp_path / "off.obj")
    assert main(["validate", str(tmp_path / "off.obj")]) == 1
    assert "star_shaped\tfalse" in capsys.readouterr().out


def test_usage_error_exits_two(capsys):
    assert main(["no-such-command"]) == 2
    assert main(["flatten"]) == 2
    capsys.readouterr()


def test_missing_file_exits_one(capsys, tmp_path):
    assert main(["validate", str(tmp_path / "nope.obj")]) == 1
    capsys.readouterr()


def test_flatten_outputs_and_determinism(work, capsys):
    args = [
        "flatten", str(work / "head.obj"), "-o", str(work / "chart.obj"),
        "--sigma", "0.3", "--rotate-axis", "1,0,0", "--rotate-deg", "90",
        "--roi", str(work / "head.roi"),
    ]
    assert main(args) == 0
    first = {
        name: (work / name).read_bytes()
        for name in ("chart.obj", "chart.obj.radii.txt", "chart.obj.diag.txt")
    }
    assert main(args) == 0
    for name, blob in first.items():
        assert (work / name).read_bytes() == blob
    capsys.readouterr()
    diag = first["chart.obj.diag.txt"].decode()
    assert "sigma\t0.3" in diag
    assert "roi_seam_crossings\t0" in diag
    assert "roi_singular_faces\t0" in diag


def test_flatten_invert_roundtrip(work, capsys):
    flags = ["--sigma", "0.3", "--rotate-axis", "1,0,0", "--rotate-deg", "90"]
    assert main(["flatten", str(work / "head.obj"), "-o", str(work / "c2.obj"), *flags]) == 0
    assert (
        main(
            [
                "invert", str(work / "c2.obj"), "-o", str(work / "back.obj"),
                "--radii", str(work / "c2.obj.radii.txt"), *flags,
            ]
        )
        == 0
    )
    capsys.readouterr()
    a = load_obj(work / "head.obj")
    b = load_obj(work / "back.obj")
    # limited by the chart file's 9 significant digits
    assert np.abs(a.vertices - b.vertices).max() < 1e-6
    assert np.array_equal(a.triangles, b.triangles)


def test_transform_preserves_radii(work, capsys):
    assert (
        main(["transform", str(work / "head.obj"), "-o", str(work / "warped.obj"), "--sigma", "0.3"]) == 0
    )
    capsys.readouterr()
    a = load_obj(work / "head.obj")
    b = load_obj(work / "warped.obj")
    ra = np.linalg.norm(a.vertices, axis=1)
    rb = np.linalg.norm(b.vertices, axis=1)
    assert np.abs(ra - rb).max() < 1e-6
    assert not np.allclose(a.vertices, b.vertices)  # actually warped


def test_fit_prints_reusable_flags(work, capsys):
    assert (
        main(
            [
                "fit", str(work / "head.obj"), "--roi", str(work / "head.roi"),
                "--pole-dirs", "16", "--rolls", "4", "--sigma-steps", "6",
            ]
        )
        == 0
    )
    out = capsys.readouterr().out
    assert out.startswith("--sigma ")
    assert "roi_seam_crossings\t0" in out
    assert "roi_singular_faces\t0" in out


def test_plot_grid_determinism_and_wellformed(work, capsys):
    args = ["plot-grid", "--sigma", "0.3", "-o", str(work / "grid.svg")]
    assert main(args) == 0
    blob = (work / "grid.svg").read_bytes()
    assert main(args) == 0
    assert (work / "grid.svg").read_bytes() == blob
    capsys.readouterr()
    ET.fromstring(blob.decode())  # well-formed XML
    assert b'version="1.1"' in blob


@pytest.mark.parametrize("plane", ["xy", "yz"])
def test_plot_grid_plane_variants(work, capsys, plane):
    out = work / f"grid_{plane}.svg"
    assert main(["plot-grid", "--sigma", "0.3", "-o", str(out), "--plane", plane]) == 0
    capsys.readouterr()
    ET.parse(out)


def test_plot_grid_sigma_one_rectilinear(tmp_path):
    spec = PlotSpec(width=640, height=400, lat_circles=5, lon_circles=6)
    path = tmp_path / "grid1.svg"
    plot_warp_grid(1.0, spec, path)
    root = ET.parse(path).getroot()
    polylines = root.findall(f"{SVG_NS}polyline")
    assert len(polylines) == 11
    horizontal = vertical = 0
    for pl in polylines:
        pts = np.array([tuple(map(float, p.split(","))) for p in pl.get("points").split()])
        is_h = np.ptp(pts[:, 1]) < 0.02
        is_v = np.ptp(pts[:, 0]) < 0.02
        assert is_h or is_v  # every grid line is straight at sigma = 1
        horizontal += is_h
        vertical += is_v
    assert horizontal == 5
    assert vertical == 6


def test_plot_grid_pole_markers_match_analytic(tmp_path):
    spec = PlotSpec(width=800, height=480)
    path = tmp_path / "grid03.svg"
    plot_warp_grid(0.3, spec, path)
    root = ET.parse(path).getroot()
    markers = {c.get("id"): (float(c.get("cx")), float(c.get("cy"))) for c in root.findall(f"{SVG_NS}circle")}
    north, south = warped_pole_positions(0.3)
    for name, p in (("pole-north", north), ("pole-south", south)):
        theta, phi, _ = cartesian_to_spherical(p)
        ex = (phi + math.pi) / (2 * math.pi) * spec.width
        ey = theta / math.pi * spec.height
        px, py = markers[name]
        assert math.hypot(px - ex, py - ey) <= 0.5
        # both pole images sit on the phi = +-pi/2 meridians
        assert abs(abs(phi) - math.pi / 2) < 1e-12


def test_plot_chart_alert_counts_match_detectors(tmp_path):
    head = demo_head(2)
    roi = cap_band_roi(head, (0.3, 0.1, 0.95), 0.9)
    frame = WarpFrame.identity()
    chart = forward_chart(head, frame)
    path = tmp_path / "chart.svg"
    plot_chart(chart, roi, PlotSpec(), path, frame=frame, mesh=head)
    root = ET.parse(path).getroot()
    seam_elems = [e for e in root.iter() if e.get("class") == "alert-seam"]
    sing_elems = [e for e in root.iter() if e.get("class") == "alert-singular"]
    roi_elems = [e for e in root.iter() if e.get("class") == "roi"]
    assert len(seam_elems) == len(chart.seam_crossings) > 0
    assert len(sing_elems) == len(chart.singular_faces) > 0
    assert 0 < len(roi_elems) <= len(roi)
    legend = [e for e in root.iter() if e.tag == f"{SVG_NS}text"]
    assert legend and "sigma=1" in legend[0].text


def test_plot_chart_cohesive_has_no_alerts(tmp_path):
    ico = icosphere(2)
    # an equatorial patch (not a full ring: a ring must cross the seam)
    patch = [int(i) for i, c in enumerate(ico.centroids()) if abs(c[2]) < 0.3 and c[0] > 0.4]
    from polewarp.mesh import TriMesh

    sub = TriMesh(ico.vertices, ico.triangles[np.array(patch)])
    chart = forward_chart(sub, WarpFrame.identity())
    assert chart.is_cohesive
    path = tmp_path / "band.svg"
    plot_chart(chart, None, PlotSpec(), path)
    root = ET.parse(path).getroot()
    assert not [e for e in root.iter() if (e.get("class") or "").startswith("alert")]


def test_plot_chart_empty_roi_plain_wireframe(tmp_path):
    ico = icosphere(1)
    band = [int(i) for i, c in enumerate(ico.centroids()) if abs(c[2]) < 0.35 and c[0] > 0]
    from polewarp.mesh import TriMesh

    sub = TriMesh(ico.vertices, ico.triangles[np.array(band)])
    chart = forward_chart(sub, WarpFrame.identity())
    path = tmp_path / "plain.svg"
    plot_chart(chart, [], PlotSpec(), path)
    root = ET.parse(path).getroot()
    assert not [e for e in root.iter() if e.get("class") == "roi"]
    assert [e for e in root.iter() if e.get("class") == "wire"]


def test_plot_spec_validation():
    with pytest.raises(ValueError):
        PlotSpec(width=0)
    with pytest.raises(ValueError):
        PlotSpec(lat_circles=-1)
