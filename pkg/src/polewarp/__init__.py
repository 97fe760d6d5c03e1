"""Seam-free theta-phi parameterization of star-shaped triangle meshes.

The spherical chart's poles and azimuth branch cut are steered away from
a region of interest by composing a rotation with a conformal pole warp
of the unit sphere (stereographic projection, planar dilation, inverse
projection), which admits an exact inverse.
"""

from .altmap import (
    Chord,
    ChordSolution,
    DistortedPole,
    NotInChordFamilyError,
    angle_to_02pi,
    chord_at_phi,
    chord_line_residual,
    distorted_phi,
    distorted_phi_detail,
    distorted_theta,
    distorted_theta_ex,
    pole_from_warp_sigma,
)
from .geom import (
    Rotation,
    SphericalCoord,
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
from .kernels import BACKEND
from .mesh import (
    MeshError,
    ObjParseError,
    StarReport,
    TriMesh,
    fibonacci_directions,
    load_obj,
    ray_surface_hits,
    save_obj,
    validate_star_shaped,
)
from .pipeline import (
    DistortionStats,
    GridSearchSpec,
    InfeasibleFitError,
    ParamChart,
    PoleAmbiguityWarning,
    WarpFrame,
    chart_to_obj,
    detect_seam_crossings,
    detect_singular_faces,
    diagnostics_report,
    fit_parameters,
    forward_chart,
    inverse_chart,
    load_roi,
    save_roi,
    segment_crosses_seam,
    triangle_angle_distortion,
    triangle_distortion,
)
from .plots import PlotSpec, plot_chart, plot_warp_grid
from .warp import (
    DomainError,
    SigmaPrecisionWarning,
    StereoPlanePoint,
    chart_pole_preimages,
    check_sigma,
    from_stereo_plane,
    to_stereo_plane,
    unwarp_points,
    unwarp_poles,
    warp_points,
    warp_points_expanded,
    warp_poles,
    warp_poles_expanded,
    warped_pole_positions,
)

__version__ = "0.1.0"
