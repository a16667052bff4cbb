"""Rotational constant-mean-curvature surfaces at desk scale.

Generate Delaunay-family surfaces from their profile ODE, fit annular
pieces tangent to unit spheres (or meeting a plane at constant contact
angle), build parallel surfaces, verify the curvature identities and
inequalities the configurations satisfy, and recover rotational symmetry
from sampled surfaces with a moving-plane reflection sweep.
"""

from .checks import (
    CaseClass,
    CheckResult,
    EllipticityResult,
    VerificationReport,
    boundary_suite,
    classify_case,
    ellipticity_check,
    fixture_case,
    full_report,
    offset_suite,
    pde_residual,
)
from .contact import (
    AnnulusFixture,
    PlaneCfg,
    SphereCfg,
    ball_containment,
    boundary_speed_check,
    contact_angle,
    fit_tangent_annulus,
    interior_lambda_bound,
    planar_convexity,
    rescale_configuration,
    self_intersection_check,
    spherical_convexity,
    tangency_residual,
)
from .delaunay import (
    DelaunaySpec,
    ProfileCurve,
    classify_family,
    conformal_delaunay_patch,
    first_integral,
    integrate_profile,
    reparametrize_conformal,
    revolve,
    turning_radii,
)
from .errors import (
    DegeneratePointError,
    GeometryError,
    InfeasibleConfigurationError,
    InjectivityError,
    InputError,
    IntegrationError,
    NotCurvatureCoordinateError,
    SingularOffsetError,
)
from .moving_plane import (
    PointCloud,
    SweepResult,
    SymmetryResult,
    axis_angle,
    detect_rotational_symmetry,
    hausdorff,
    reflect,
    sweep_first_touch,
)
from .offsets import OffsetPatch, offset, offset_curvature, singular_locus, weingarten_residual
from .surfaces import (
    CurvatureSample,
    FundForms,
    GraphPatch,
    Jet2,
    SurfacePatch,
    catenoid_patch,
    curvature,
    curvature_at,
    cylinder_patch,
    fd_jet,
    fundamental_forms,
    gauss_equation_residual,
    hopf_constant,
    local_graph,
    patch_from_positions,
    plane_patch,
    sphere_patch,
)

__version__ = "0.1.0"
