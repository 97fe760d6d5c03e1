"""polewarp command line: transform, flatten, invert, validate, fit, plots.

Exit codes: 0 success, 1 validation/processing failure, 2 usage error.
All numeric output is printed with 9 significant digits and fixed
ordering, so identical inputs give byte-identical outputs.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import pipeline, plots, warp
from .altmap import NotInChordFamilyError
from .geom import Rotation, Vec3
from .mesh import MeshError, TriMesh, load_obj, save_obj, validate_star_shaped
from .pipeline import GridSearchSpec, InfeasibleFitError, WarpFrame
from .warp import DomainError


def _triple(text):
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected X,Y,Z, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number in {text!r}") from None


def _add_frame_flags(sp):
    sp.add_argument("--sigma", type=float, default=1.0, help="warp scale (1 = identity)")
    sp.add_argument("--rotate-axis", type=_triple, default=(0.0, 0.0, 1.0), metavar="X,Y,Z")
    sp.add_argument("--rotate-deg", type=float, default=0.0, metavar="DEG")
    sp.add_argument("--center", type=_triple, default=(0.0, 0.0, 0.0), metavar="X,Y,Z",
                    help="star center to translate to the origin")


def _frame_from(args) -> WarpFrame:
    rot = Rotation.from_axis_angle(args.rotate_axis, math.radians(args.rotate_deg))
    return WarpFrame(Vec3(*args.center), rot, float(args.sigma))


def _plot_spec(args) -> plots.PlotSpec:
    kw = {"width": args.width, "height": args.height}
    if getattr(args, "lat", None) is not None:
        kw["lat_circles"] = args.lat
    if getattr(args, "lon", None) is not None:
        kw["lon_circles"] = args.lon
    return plots.PlotSpec(**kw)


def _cmd_transform(args) -> int:
    mesh = load_obj(args.input)
    frame = _frame_from(args)
    rel = mesh.vertices - np.asarray(frame.translation)
    q = frame.rotation.apply(rel)
    r = np.linalg.norm(q, axis=1)
    if (r < 1e-15).any():
        raise DomainError("vertex at the star center")
    warped = warp.warp_points(q / r[:, None], frame.sigma) * r[:, None]
    save_obj(TriMesh(warped, mesh.triangles), args.output)
    print(f"wrote {args.output}")
    return 0


def _cmd_flatten(args) -> int:
    mesh = load_obj(args.input)
    frame = _frame_from(args)
    chart = pipeline.forward_chart(mesh, frame)
    pipeline.chart_to_obj(chart, args.output)
    radii_path = args.radii or args.output + ".radii.txt"
    diag_path = args.diagnostics or args.output + ".diag.txt"
    pipeline.write_chart_radii(chart, radii_path)
    report = pipeline.diagnostics_report(chart, frame)
    if args.roi:
        roi = pipeline.load_roi(args.roi)
        seam = pipeline.detect_seam_crossings(mesh, frame, roi)
        sing = pipeline.detect_singular_faces(mesh, frame, roi)
        report += f"roi_seam_crossings\t{len(seam)}\n"
        report += f"roi_singular_faces\t{len(sing)}\n"
    with open(diag_path, "w", encoding="utf-8") as fh:
        fh.write(report)
    print(f"wrote {args.output} {radii_path} {diag_path}")
    return 0


def _cmd_invert(args) -> int:
    chart_mesh = load_obj(args.input)
    phi = chart_mesh.vertices[:, 0]
    theta = chart_mesh.vertices[:, 1]
    if args.radii:
        r = pipeline.load_radii(args.radii)
        if len(r) != len(theta):
            raise ValueError(f"radii count {len(r)} != vertex count {len(theta)}")
    else:
        r = np.ones_like(theta)
    frame = _frame_from(args)
    mesh = pipeline.inverse_from_arrays(theta, phi, r, chart_mesh.triangles, frame)
    save_obj(mesh, args.output)
    print(f"wrote {args.output}")
    return 0


def _cmd_validate(args) -> int:
    mesh = load_obj(args.input)
    report = validate_star_shaped(mesh, n_samples=args.samples)
    print(f"star_shaped\t{'true' if report.is_star_shaped else 'false'}")
    print(f"rays_tested\t{report.samples_tested}")
    print(f"offending_directions\t{len(report.offending_directions)}")
    for d, hits in report.offending_directions[:10]:
        print(f"offender\t{d.x:.9g},{d.y:.9g},{d.z:.9g}\thits={hits}")
    return 0 if report.is_star_shaped else 1


def _cmd_fit(args) -> int:
    mesh = load_obj(args.input)
    roi = pipeline.load_roi(args.roi)
    spec = GridSearchSpec(
        pole_directions=args.pole_dirs,
        roll_angles=args.rolls,
        sigma_steps=args.sigma_steps,
        sigma_min=args.sigma_min,
        sigma_max=args.sigma_max,
        center=args.center,
    )
    frame = pipeline.fit_parameters(mesh, roi, spec)
    axis, angle = frame.rotation.axis_angle()
    t = frame.translation
    print(
        f"--sigma {frame.sigma:.9g} "
        f"--rotate-axis {axis.x:.9g},{axis.y:.9g},{axis.z:.9g} "
        f"--rotate-deg {math.degrees(angle):.9g} "
        f"--center {t.x:.9g},{t.y:.9g},{t.z:.9g}"
    )
    seam = pipeline.detect_seam_crossings(mesh, frame, roi)
    sing = pipeline.detect_singular_faces(mesh, frame, roi)
    print(f"roi_seam_crossings\t{len(seam)}")
    print(f"roi_singular_faces\t{len(sing)}")
    if args.output:
        chart = pipeline.forward_chart(mesh, frame)
        pipeline.chart_to_obj(chart, args.output)
        pipeline.write_chart_radii(chart, args.output + ".radii.txt")
        pipeline.write_diagnostics(chart, args.output + ".diag.txt", frame)
        print(f"wrote {args.output}")
    return 0


def _cmd_plot_grid(args) -> int:
    plots.plot_warp_grid(args.sigma, _plot_spec(args), args.output, plane=args.plane)
    print(f"wrote {args.output}")
    return 0


def _cmd_plot_chart(args) -> int:
    mesh = load_obj(args.input)
    frame = _frame_from(args)
    chart = pipeline.forward_chart(mesh, frame)
    roi = pipeline.load_roi(args.roi) if args.roi else None
    plots.plot_chart(chart, roi, _plot_spec(args), args.output, frame=frame, mesh=mesh)
    print(f"wrote {args.output}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polewarp",
        description="Seam-free theta-phi charts for star-shaped meshes via conformal pole warping.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("transform", help="center, rotate and pole-warp mesh vertices (radius preserved)")
    sp.add_argument("input")
    sp.add_argument("-o", "--output", required=True)
    _add_frame_flags(sp)
    sp.set_defaults(func=_cmd_transform)

    sp = sub.add_parser("flatten", help="flatten a mesh to a theta-phi chart OBJ plus diagnostics")
    sp.add_argument("input")
    sp.add_argument("-o", "--output", required=True)
    sp.add_argument("--diagnostics", help="diagnostics path (default OUTPUT.diag.txt)")
    sp.add_argument("--radii", help="radius sidecar path (default OUTPUT.radii.txt)")
    sp.add_argument("--roi", help="triangle-id file; adds ROI-restricted detector counts")
    _add_frame_flags(sp)
    sp.set_defaults(func=_cmd_flatten)

    sp = sub.add_parser("invert", help="rebuild a mesh from a chart OBJ produced by flatten")
    sp.add_argument("input")
    sp.add_argument("-o", "--output", required=True)
    sp.add_argument("--radii", help="radius sidecar written by flatten (default: unit radii)")
    _add_frame_flags(sp)
    sp.set_defaults(func=_cmd_invert)

    sp = sub.add_parser("validate", help="sampled star-shapedness check about the origin")
    sp.add_argument("input")
    sp.add_argument("--samples", type=int, default=256, help="extra Fibonacci ray count")
    sp.set_defaults(func=_cmd_validate)

    sp = sub.add_parser("fit", help="search rotation and sigma making the ROI chart cohesive")
    sp.add_argument("input")
    sp.add_argument("--roi", required=True, help="triangle-id file (one id per line, # comments)")
    sp.add_argument("-o", "--output", help="also write the fitted chart OBJ here")
    sp.add_argument("--pole-dirs", type=int, default=64)
    sp.add_argument("--rolls", type=int, default=8)
    sp.add_argument("--sigma-steps", type=int, default=16)
    sp.add_argument("--sigma-min", type=float, default=0.05)
    sp.add_argument("--sigma-max", type=float, default=1.0)
    sp.add_argument("--center", type=_triple, default=(0.0, 0.0, 0.0), metavar="X,Y,Z")
    sp.set_defaults(func=_cmd_fit)

    sp = sub.add_parser("plot-grid", help="SVG of the warped latitude/longitude grid")
    sp.add_argument("--sigma", type=float, required=True)
    sp.add_argument("-o", "--output", required=True)
    sp.add_argument("--plane", choices=("thetaphi", "xy", "yz"), default="thetaphi")
    sp.add_argument("--width", type=int, default=800)
    sp.add_argument("--height", type=int, default=480)
    sp.add_argument("--lat", type=int, help="latitude circle count")
    sp.add_argument("--lon", type=int, help="longitude circle count")
    sp.set_defaults(func=_cmd_plot_grid)

    sp = sub.add_parser("plot-chart", help="SVG wireframe of a flattened mesh with alerts")
    sp.add_argument("input")
    sp.add_argument("-o", "--output", required=True)
    sp.add_argument("--roi", help="triangle-id file to highlight")
    sp.add_argument("--width", type=int, default=800)
    sp.add_argument("--height", type=int, default=480)
    _add_frame_flags(sp)
    sp.set_defaults(func=_cmd_plot_chart)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already reported usage problems
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except (MeshError, DomainError, NotInChordFamilyError, InfeasibleFitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def console_entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    console_entry()
