"""Static SVG plots: warped coordinate grids and flattened charts.

Hand-rolled SVG 1.1 so output is byte-stable and diffable. The theta-phi
viewport puts phi in (-pi, pi] left to right and theta in [0, pi] top to
bottom.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import warp
from .geom import cartesian_to_spherical_arrays
from .mesh import TriMesh
from .pipeline import ParamChart, WarpFrame, _roi_triangle_ids

_CIRCLE_SAMPLES = 256


@dataclass(frozen=True)
class PlotSpec:
    width: int = 800
    height: int = 480
    lat_circles: int = 11
    lon_circles: int = 12
    stroke_width: float = 1.0
    wire_color: str = "#4a6fa5"
    roi_color: str = "#1a9850"
    alert_color: str = "#d73027"

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("plot dimensions must be positive")
        if self.lat_circles < 0 or self.lon_circles < 0:
            raise ValueError("grid counts must be >= 0")


def _theta_phi_to_px(theta, phi, spec: PlotSpec):
    x = (np.asarray(phi) + math.pi) / (2.0 * math.pi) * spec.width
    y = np.asarray(theta) / math.pi * spec.height
    return x, y


def _plane_to_px(u, v, spec: PlotSpec):
    # [-1.15, 1.15]^2 window, y up
    half = 1.15
    x = (np.asarray(u) + half) / (2 * half) * spec.width
    y = (half - np.asarray(v)) / (2 * half) * spec.height
    return x, y


def _polyline(x, y, color, width, cls=None):
    pts = " ".join(f"{px:.2f},{py:.2f}" for px, py in zip(x, y))
    c = f' class="{cls}"' if cls else ""
    return f'<polyline{c} fill="none" stroke="{color}" stroke-width="{width:g}" points="{pts}"/>'


def _split_on_seam(theta, phi):
    """Split a theta-phi polyline where phi wraps across +-pi."""
    jumps = np.flatnonzero(np.abs(np.diff(phi)) > math.pi)
    pieces = []
    start = 0
    for j in jumps:
        pieces.append((theta[start : j + 1], phi[start : j + 1]))
        start = j + 1
    pieces.append((theta[start:], phi[start:]))
    return [(t, p) for t, p in pieces if len(t) >= 2]


def _svg_document(spec: PlotSpec, body: list[str]) -> str:
    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{spec.width}" '
        f'height="{spec.height}" viewBox="0 0 {spec.width} {spec.height}">\n'
        f'<rect x="0" y="0" width="{spec.width}" height="{spec.height}" fill="white" stroke="#999"/>\n'
    )
    return head + "\n".join(body) + "\n</svg>\n"


def plot_warp_grid(sigma, spec: PlotSpec, out_path, plane: str = "thetaphi") -> None:
    """Draw warped latitude/longitude circles of the unit sphere.

    plane = "thetaphi" (default) shows the flattened grid; "xy" and "yz"
    show the warped circles projected onto those Cartesian planes (the yz
    projection of a warped latitude circle is a chord of the unit circle).
    Pole image markers carry ids pole-north / pole-south.
    """
    s = warp.check_sigma(sigma)
    if plane not in ("thetaphi", "xy", "yz"):
        raise ValueError(f"plane must be thetaphi, xy or yz, got {plane!r}")
    body = []
    t = (np.arange(_CIRCLE_SAMPLES) + 0.5) / _CIRCLE_SAMPLES * 2.0 * math.pi - math.pi

    def emit(points, color):
        w = warp.warp_points(points, s)
        if plane == "thetaphi":
            th, ph, _ = cartesian_to_spherical_arrays(w)
            for tt, pp in _split_on_seam(th, ph):
                x, y = _theta_phi_to_px(tt, pp, spec)
                body.append(_polyline(x, y, color, spec.stroke_width))
        else:
            u, v = (w[:, 0], w[:, 1]) if plane == "xy" else (w[:, 1], w[:, 2])
            x, y = _plane_to_px(u, v, spec)
            body.append(_polyline(x, y, color, spec.stroke_width))

    for k in range(1, spec.lat_circles + 1):
        theta0 = math.pi * k / (spec.lat_circles + 1)
        st, ct = math.sin(theta0), math.cos(theta0)
        emit(np.stack((st * np.cos(t), st * np.sin(t), np.full_like(t, ct)), axis=1), spec.wire_color)
    tm = (np.arange(_CIRCLE_SAMPLES) + 0.5) / _CIRCLE_SAMPLES * math.pi
    for k in range(spec.lon_circles):
        # half-step offset keeps meridians off the phi = +-pi branch cut
        phi0 = -math.pi + 2.0 * math.pi * (k + 0.5) / spec.lon_circles
        cp, sp = math.cos(phi0), math.sin(phi0)
        emit(np.stack((np.sin(tm) * cp, np.sin(tm) * sp, np.cos(tm)), axis=1), spec.wire_color)

    if plane == "yz":
        circ = np.linspace(0.0, 2.0 * math.pi, _CIRCLE_SAMPLES + 1)
        x, y = _plane_to_px(np.cos(circ), np.sin(circ), spec)
        body.append(_polyline(x, y, "#999999", spec.stroke_width))

    north, south = warp.warped_pole_positions(s)
    for name, p in (("pole-north", north), ("pole-south", south)):
        if plane == "thetaphi":
            th, ph, _ = cartesian_to_spherical_arrays(np.asarray(p)[None, :])
            x, y = _theta_phi_to_px(th, ph, spec)
        elif plane == "xy":
            x, y = _plane_to_px([p.x], [p.y], spec)
        else:
            x, y = _plane_to_px([p.y], [p.z], spec)
        body.append(f'<circle id="{name}" cx="{x[0]:.2f}" cy="{y[0]:.2f}" r="3" fill="{spec.alert_color}"/>')

    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(_svg_document(spec, body))


def plot_chart(
    chart: ParamChart,
    roi,
    spec: PlotSpec,
    out_path,
    frame: WarpFrame | None = None,
    mesh: TriMesh | None = None,
) -> None:
    """Wireframe of a flattened chart with ROI and alert styling.

    Seam-crossing edges and singular faces (the chart's diagnostics) are
    drawn in the alert style with classes alert-seam / alert-singular; ROI
    triangles use class roi. A legend line summarizes the frame.
    """
    body = []
    x, y = _theta_phi_to_px(chart.theta, chart.phi, spec)
    roi_set = set()
    if roi is not None:
        if mesh is not None:
            roi_set = {int(i) for i in _roi_triangle_ids(mesh, roi)}
        else:
            roi_set = {int(i) for i in roi}
    singular = set(chart.singular_faces)
    for tid, (i, j, k) in enumerate(chart.triangles):
        xs = (x[i], x[j], x[k], x[i])
        ys = (y[i], y[j], y[k], y[i])
        if tid in singular:
            pts = " ".join(f"{px:.2f},{py:.2f}" for px, py in zip(xs[:3], ys[:3]))
            body.append(
                f'<polygon class="alert-singular" points="{pts}" fill="{spec.alert_color}" '
                f'fill-opacity="0.45" stroke="{spec.alert_color}" stroke-width="{spec.stroke_width:g}"/>'
            )
        else:
            color = spec.roi_color if tid in roi_set else spec.wire_color
            cls = "roi" if tid in roi_set else "wire"
            body.append(_polyline(xs, ys, color, spec.stroke_width, cls=cls))
    for i, j in chart.seam_crossings:
        body.append(
            _polyline((x[i], x[j]), (y[i], y[j]), spec.alert_color, 2.0 * spec.stroke_width, cls="alert-seam")
        )
    if frame is not None:
        axis, angle = frame.rotation.axis_angle()
        legend = (
            f"sigma={frame.sigma:.9g} rotate-axis={axis.x:.9g},{axis.y:.9g},{axis.z:.9g} "
            f"rotate-deg={math.degrees(angle):.9g}"
        )
        body.append(f'<text x="6" y="{spec.height - 6}" font-size="11" fill="#222">{legend}</text>')
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(_svg_document(spec, body))
