"""Sphere-tangency and plane-contact boundary configurations.

A fixture is an annular piece of a rotational CMC surface, in conformal
curvature coordinates, whose boundary circles either sit tangentially on
unit spheres or meet a horizontal plane at a prescribed contact angle.
``fit_tangent_annulus`` shoots on the family parameter to realize a
configuration; the remaining operations verify the boundary identities a
converged fixture must satisfy:

* tangency circles have kappa_2 = -1 and constant speed sqrt(c / 2(1+H));
* lambda^2 stays below (K < 0) or above (K > 0) its boundary value
  c / 2(1+H) in the interior;
* boundary circles and the meridian-direction spherical images are convex
  spherical curves;
* plane boundaries meet the plane at a constant angle, with curve
  curvature |kappa| = -kappa_2 / sin(alpha).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .delaunay import (
    DEFAULT_STEP,
    DelaunaySpec,
    ProfileCurve,
    classify_family,
    first_integral,
    integrate_profile,
    reparametrize_conformal,
    revolve,
)
from .errors import InfeasibleConfigurationError, InputError
from .intersect import mesh_self_intersection, triangulate_grid
from .offsets import OffsetPatch
from .surfaces import SurfacePatch, TWO_PI, curvature, fundamental_forms

CONVEXITY_BAND = 1e-8     # geodesic curvature within this band counts as zero


@dataclass
class SphereCfg:
    center: np.ndarray
    radius: float = 1.0

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float)
        if self.radius <= 0.0:
            raise InputError("sphere radius must be positive")


@dataclass
class PlaneCfg:
    unit_normal: np.ndarray
    offset: float = 0.0
    contact_angle_target: float | None = None

    def __post_init__(self):
        self.unit_normal = np.asarray(self.unit_normal, dtype=float)
        n = np.linalg.norm(self.unit_normal)
        if abs(n - 1.0) > 1e-12:
            raise InputError("plane normal must be a unit vector")
        if self.contact_angle_target is not None and not (
                0.0 < self.contact_angle_target < math.pi):
            raise InputError("contact angle must lie in (0, pi)")

    def signed_distance(self, points):
        return np.asarray(points, dtype=float) @ self.unit_normal - self.offset


@dataclass
class AnnulusFixture:
    """A fitted annulus plus the configuration it satisfies."""

    patch: SurfacePatch
    profile: ProfileCurve
    H: float
    force: float
    start_radius: float          # profile radius at the vertical-tangent anchor
    c: float                     # constant of the Hopf differential
    kind: str                    # "two_spheres" or "sphere_plane"
    spheres: list
    plane: PlaneCfg | None
    s_bounds: tuple              # profile arclength of (lower, upper) boundary
    u_bounds: tuple
    family: str = ""
    step: float = DEFAULT_STEP
    solver_trace: list = field(default_factory=list)
    residuals: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.family:
            self.family = classify_family(self.H, self.force)

    # -- boundary access ---------------------------------------------------

    def boundary_u(self, which):
        if which == "lower":
            return self.u_bounds[0]
        if which == "upper":
            return self.u_bounds[1]
        raise InputError(f"unknown boundary '{which}' (use 'lower'/'upper')")

    def tangent_boundaries(self):
        """Boundary names tangent to a sphere, paired with their SphereCfg."""
        if self.kind == "two_spheres":
            return [("lower", self.spheres[0]), ("upper", self.spheres[1])]
        return [("upper", self.spheres[0])]

    def boundary_points(self, which, n=128):
        u = self.boundary_u(which)
        vs = self.patch.v_grid(n)
        return np.array([self.patch.position(u, v) for v in vs])

    def boundary_normals(self, which, n=128):
        u = self.boundary_u(which)
        vs = self.patch.v_grid(n)
        return np.array([self.patch.normal(u, v) for v in vs])

    def meridian_direction_curve(self, which, n=128):
        """nu(v) = X_u/|X_u| along a boundary row (a spherical curve)."""
        u = self.boundary_u(which)
        vs = self.patch.v_grid(n)
        out = np.empty((n, 3))
        for i, v in enumerate(vs):
            du = self.patch.jet(u, v).du
            out[i] = du / np.linalg.norm(du)
        return out

    @property
    def axis(self):
        """Rotation axis (point, direction) of the fixture."""
        return (np.zeros(3), np.array([0.0, 0.0, 1.0]))


# ---------------------------------------------------------------------------
# boundary identity checks
# ---------------------------------------------------------------------------

def tangency_residual(fixture: AnnulusFixture, which, sphere: SphereCfg = None, n=128):
    """(max | |X-C| - rho |, max |N - (X-C)/rho|) along a boundary circle."""
    if n < 64:
        raise InputError("sample the boundary with at least 64 points")
    if sphere is None:
        sphere = dict(fixture.tangent_boundaries()).get(which)
        if sphere is None:
            raise InputError(f"boundary '{which}' has no configured sphere")
    pts = fixture.boundary_points(which, n)
    nrm = fixture.boundary_normals(which, n)
    d = pts - sphere.center
    dist = np.linalg.norm(d, axis=1)
    res_dist = float(np.max(np.abs(dist - sphere.radius)))
    res_normal = float(np.max(np.linalg.norm(nrm - d / sphere.radius, axis=1)))
    return res_dist, res_normal


@dataclass
class BoundarySpeed:
    which: str
    speed_dev: float        # max |lambda - sqrt(c / 2(1+H))|
    kappa2_dev: float       # max |kappa2 + 1|
    kappa2: np.ndarray


def boundary_speed_check(fixture: AnnulusFixture, n=128):
    """Boundary speed and kappa_2 identities on the sphere-tangent rows.

    Each tangency circle must have constant speed sqrt(c / 2(1+H)) and
    kappa_2 = -1.  H = -1 is the excluded sphere case; a fixture with
    K = 0 (cylinder) is degenerate and rejected here as out of scope.
    """
    if abs(1.0 + fixture.H) < 1e-12:
        raise InputError("H = -1 is the excluded (sphere) case")
    arg = fixture.c / (2.0 * (1.0 + fixture.H))
    if arg <= 0.0:
        raise InputError("c / 2(1+H) must be positive on a tangency fixture")
    if fixture.family == "cylinder":
        raise InputError("cylinder fixture has K = 0: degenerate, out of scope")
    target = math.sqrt(arg)
    out = []
    for which, _sphere in fixture.tangent_boundaries():
        u = fixture.boundary_u(which)
        vs = fixture.patch.v_grid(n)
        lam = np.empty(n)
        k2 = np.empty(n)
        for i, v in enumerate(vs):
            forms = fundamental_forms(fixture.patch, u, v)
            lam[i] = math.sqrt(forms.E)
            k2[i] = curvature(forms).kappa2
        out.append(BoundarySpeed(
            which=which,
            speed_dev=float(np.max(np.abs(lam - target))),
            kappa2_dev=float(np.max(np.abs(k2 + 1.0))),
            kappa2=k2,
        ))
    return out


def interior_lambda_bound(fixture: AnnulusFixture, grid=(48, 8), inset=0.02):
    """Margin of the interior bound on lambda^2 against c / 2(1+H).

    For K < 0 the conformal factor satisfies lambda^2 < c/2(1+H) away from
    the tangency circles, for K > 0 the reverse.  Returns (margin, sign_K);
    a fixture with K = 0 everywhere reports (0.0, 0) as the degenerate
    borderline, while genuinely mixed curvature raises.
    """
    bound = fixture.c / (2.0 * (1.0 + fixture.H))
    us = _interior_us(fixture, grid[0], inset)
    vs = fixture.patch.v_grid(grid[1])
    lam2 = []
    Ks = []
    for u in us:
        for v in vs:
            forms = fundamental_forms(fixture.patch, u, v)
            lam2.append(forms.E)
            Ks.append(curvature(forms).K)
    lam2 = np.asarray(lam2)
    Ks = np.asarray(Ks)
    kscale = max(1.0, float(np.max(np.abs(Ks))))
    if np.all(np.abs(Ks) < 1e-9 * kscale):
        return 0.0, 0
    if np.min(Ks) < 0.0 < np.max(Ks):
        raise InputError("Gaussian curvature changes sign on the interior grid")
    if Ks[0] < 0.0:
        return float(np.min(bound - lam2)), -1
    return float(np.min(lam2 - bound)), +1


def _interior_us(fixture, nu, inset):
    """Interior u-samples.  Sphere-tangent rows are excluded by ``inset``;
    a plane boundary belongs to the checked region and is kept."""
    u_lo, u_hi = fixture.u_bounds
    span = u_hi - u_lo
    lo = u_lo + inset * span
    hi = u_hi - inset * span
    if fixture.kind == "sphere_plane":
        lo = u_lo  # the plane row is interior for the lambda bound
    return np.linspace(lo, hi, nu)


# ---------------------------------------------------------------------------
# convexity of closed curves
# ---------------------------------------------------------------------------

def fit_sphere(points):
    """Least-squares sphere through a point cloud: returns (center, radius, rms)."""
    P = np.asarray(points, dtype=float)
    A = np.hstack([2.0 * P, np.ones((len(P), 1))])
    b = (P * P).sum(axis=1)
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    center = sol[:3]
    r2 = sol[3] + center @ center
    radius = math.sqrt(max(r2, 0.0))
    rms = float(np.sqrt(np.mean((np.linalg.norm(P - center, axis=1) - radius) ** 2)))
    return center, radius, rms


def spherical_convexity(points, center=None, radius=None, band=CONVEXITY_BAND,
                        sphere_tol=1e-6):
    """Geodesic curvature of a closed spherical curve and its convexity.

    ``points`` samples the curve once around (uniformly in the parameter,
    endpoint excluded).  The curve is convex when the discrete geodesic
    curvature does not change sign; values inside ``band`` count as zero.
    """
    P = np.asarray(points, dtype=float)
    if len(P) < 8:
        raise InputError("need at least 8 samples of the closed curve")
    if center is None or radius is None:
        center, radius, rms = fit_sphere(P)
        if rms > sphere_tol * radius:
            raise InputError(
                f"samples do not lie on a common sphere (rms {rms:.3e})")
    else:
        center = np.asarray(center, dtype=float)
        d = np.abs(np.linalg.norm(P - center, axis=1) - radius)
        if np.max(d) > sphere_tol * radius:
            raise InputError(
                f"samples are off the given sphere by {np.max(d):.3e}")
    # periodic central differences in the sample parameter
    dP = (np.roll(P, -1, axis=0) - np.roll(P, 1, axis=0)) * 0.5
    d2P = np.roll(P, -1, axis=0) - 2.0 * P + np.roll(P, 1, axis=0)
    speed = np.linalg.norm(dP, axis=1)
    if np.min(speed) < 1e-14:
        raise InputError("curve parametrization degenerates (zero speed sample)")
    T = dP / speed[:, None]
    # curvature vector d T / ds
    dT = (np.roll(T, -1, axis=0) - np.roll(T, 1, axis=0)) * 0.5
    kvec = dT / speed[:, None]
    ns = (P - center) / radius
    binorm = np.cross(ns, T)
    kg = np.einsum("ij,ij->i", kvec, binorm)
    pos = np.any(kg > band)
    neg = np.any(kg < -band)
    return kg, not (pos and neg)


def planar_convexity(points, unit_normal, band=CONVEXITY_BAND):
    """Signed curvature of a closed planar curve and its convexity."""
    P = np.asarray(points, dtype=float)
    n = np.asarray(unit_normal, dtype=float)
    dP = (np.roll(P, -1, axis=0) - np.roll(P, 1, axis=0)) * 0.5
    d2P = np.roll(P, -1, axis=0) - 2.0 * P + np.roll(P, 1, axis=0)
    speed = np.linalg.norm(dP, axis=1)
    cross = np.cross(dP, d2P)
    k = (cross @ n) / speed ** 3
    pos = np.any(k > band)
    neg = np.any(k < -band)
    return k, not (pos and neg)


def curve_curvature_magnitude(points):
    """|curvature vector| of a closed sampled curve (periodic differences)."""
    P = np.asarray(points, dtype=float)
    dP = (np.roll(P, -1, axis=0) - np.roll(P, 1, axis=0)) * 0.5
    speed = np.linalg.norm(dP, axis=1)
    T = dP / speed[:, None]
    dT = (np.roll(T, -1, axis=0) - np.roll(T, 1, axis=0)) * 0.5
    return np.linalg.norm(dT, axis=1) / speed


# ---------------------------------------------------------------------------
# contact angle along a plane boundary
# ---------------------------------------------------------------------------

@dataclass
class ContactAngleResult:
    angles: np.ndarray
    mean: float
    max_dev: float


def contact_angle(fixture: AnnulusFixture, plane: PlaneCfg = None, n=128,
                  plane_tol=1e-8) -> ContactAngleResult:
    """Angle between the outward conormal and the planar domain's conormal.

    Measured along the plane boundary row (the lower row of a
    sphere+plane fixture).  The boundary must lie on the plane.
    """
    if plane is None:
        plane = fixture.plane
    if plane is None:
        raise InputError("fixture has no plane boundary")
    which = "lower"
    pts = fixture.boundary_points(which, n)
    if np.max(np.abs(plane.signed_distance(pts))) > plane_tol:
        raise InputError("boundary row does not lie on the plane")
    u = fixture.boundary_u(which)
    vs = fixture.patch.v_grid(n)
    centroid = pts.mean(axis=0)
    angles = np.empty(n)
    sign = -1.0 if which == "lower" else 1.0
    for i, v in enumerate(vs):
        j = fixture.patch.jet(u, v)
        eta = sign * j.du / np.linalg.norm(j.du)        # outward conormal
        omega = np.cross(j.dv, plane.unit_normal)
        omega /= np.linalg.norm(omega)
        if float(omega @ (pts[i] - centroid)) < 0.0:
            omega = -omega                              # outward within the plane
        angles[i] = math.acos(max(-1.0, min(1.0, float(eta @ omega))))
    mean = float(angles.mean())
    return ContactAngleResult(angles=angles, mean=mean,
                              max_dev=float(np.max(np.abs(angles - mean))))


# ---------------------------------------------------------------------------
# ball containment
# ---------------------------------------------------------------------------

@dataclass
class ContainmentReport:
    margins: list            # per sphere: min signed distance (positive = outside)
    verdict: str             # "outside", "inside", "mixed"


def ball_containment(fixture: AnnulusFixture, grid=(48, 32), inset=0.02):
    """Signed distances of interior samples to the configured spheres."""
    if fixture.kind != "two_spheres":
        raise InputError("ball containment applies to two-sphere fixtures")
    span = fixture.u_bounds[1] - fixture.u_bounds[0]
    us = np.linspace(fixture.u_bounds[0] + inset * span,
                     fixture.u_bounds[1] - inset * span, grid[0])
    vs = fixture.patch.v_grid(grid[1])
    pts = np.array([fixture.patch.position(u, v) for u in us for v in vs])
    margins = []
    for sph in fixture.spheres:
        d = np.linalg.norm(pts - sph.center, axis=1) - sph.radius
        margins.append((float(np.min(d)), float(np.max(d))))
    lo = [m[0] for m in margins]
    hi = [m[1] for m in margins]
    if all(m > 0.0 for m in lo):
        verdict = "outside"
    elif all(m < 0.0 for m in hi):
        verdict = "inside"
    else:
        verdict = "mixed"
    return ContainmentReport(margins=[m[0] if verdict != "inside" else m[1]
                                      for m in margins],
                             verdict=verdict)


# ---------------------------------------------------------------------------
# self-intersection
# ---------------------------------------------------------------------------

def self_intersection_check(patch: SurfacePatch, grid=(48, 64), inset=0.0):
    """Approximate self-intersection test on a triangulated sampling."""
    nu, nv = grid
    us = patch.u_grid(nu, inset=inset)
    vs = patch.v_grid(nv)
    verts = np.array([patch.position(u, v) for u in us for v in vs])
    tris = triangulate_grid(nu, nv, periodic_v=patch.periodic_v)
    return mesh_self_intersection(verts, tris)


# ---------------------------------------------------------------------------
# the shooting solver
# ---------------------------------------------------------------------------

_S_CAP = 12.0        # absolute cap on the tangency search length
_PAD = 0.03          # extra profile arclength kept beyond the fixture


def _profile_forward(H, r_w, s_hi, step):
    spec = DelaunaySpec(H=H, force=first_integral(H, r_w, 0.5 * math.pi))
    return integrate_profile(spec, r_w, 0.5 * math.pi, s_hi, step=step)


def _first_tangency(prof: ProfileCurve):
    """Smallest s > 0 with sin(phi(s)) = r(s), or None.

    Start radii below 1 cross from sin(phi) > r (neck/waist pieces); start
    radii above 1 cross the other way (bulge pieces around overlapping
    balls).  Either transversal crossing is a tangency circle.
    """
    s = prof.samples[:, 0]
    g = np.sin(prof.samples[:, 3]) - prof.samples[:, 1]
    sgn0 = math.copysign(1.0, g[0])
    flip = np.nonzero(np.sign(g[1:]) != sgn0)[0]
    if len(flip) == 0:
        return None
    k = flip[0]
    return brentq(lambda t: math.sin(prof.state(t)[2]) - prof.state(t)[0],
                  s[k], s[k + 1], xtol=1e-14, rtol=8.9e-16)


def _angle_crossing(prof: ProfileCurve, phi_target):
    """Smallest s >= 0 with phi(s) = phi_target, or None."""
    phi0 = prof.state(0.0)[2]
    if abs(phi0 - phi_target) < 1e-13:
        return 0.0
    s = prof.samples[:, 0]
    g = prof.samples[:, 3] - phi_target
    sgn0 = math.copysign(1.0, g[0])
    flip = np.nonzero(np.sign(g[1:]) != sgn0)[0]
    if len(flip) == 0:
        return None
    k = flip[0]
    return brentq(lambda t: prof.state(t)[2] - phi_target,
                  s[k], s[k + 1], xtol=1e-14, rtol=8.9e-16)


def _two_sphere_distance(H, r_w, step, s_cap=_S_CAP):
    """Sphere-center separation achieved by the tangent piece started at r_w.

    The center of the sphere tangent to the upper circle sits at height
    z + cos(phi), which is negative when the tangency angle passes pi/2
    (overlapping balls with the annular band around their waist); the
    separation is the absolute value.
    """
    prof = _profile_forward(H, r_w, s_cap, step)
    s0 = _first_tangency(prof)
    if s0 is None:
        return None, None
    r, z, phi, _ = prof.state(s0)
    return abs(2.0 * (z + math.cos(phi))), s0


def _plane_sphere_height(H, r_w, alpha, step, s_cap=_S_CAP):
    """Plane-to-center height of the sphere+plane piece started at r_w."""
    prof = _profile_forward(H, r_w, s_cap, step)
    s0 = _first_tangency(prof)
    if s0 is None:
        return None, None, None
    s1 = _angle_crossing(prof, math.pi - alpha)
    if s1 is None or s1 >= s0:
        return None, None, None
    r0, z0, phi0, _ = prof.state(s0)
    z1 = prof.state(s1)[1]
    return (z0 + math.cos(phi0)) - z1, s0, s1


def fit_tangent_annulus(H, distance, contact_angle_target=None, *,
                        radius=1.0, bracket=None, scan=91, step=DEFAULT_STEP,
                        scan_step=5e-3, r_range=(0.02, 1.5)) -> AnnulusFixture:
    """Fit a rotational CMC annulus to a tangency configuration.

    Two unit spheres with centers ``distance`` apart (contact_angle_target
    None), or one unit sphere at height ``distance`` above a plane met at
    the given constant contact angle.  The shooting parameter is the
    profile radius r_w at the vertical-tangent anchor point; the tangency
    and contact-angle conditions are solved exactly along each trial
    profile and the remaining distance residual is driven to zero by
    bracketed root finding over r_w.  When several branches match the
    distance, the one with the largest r_w is returned unless ``bracket``
    narrows the search.

    Only unit spheres are supported directly; for radius rho, rescale to
    (H*rho, distance/rho) first (see ``rescale_configuration``).
    """
    if radius != 1.0:
        raise InputError(
            "fit works at sphere radius 1; rescale inputs with rescale_configuration()")
    if abs(1.0 + H) < 1e-12:
        raise InputError("H = -1 is the excluded case (the annulus would be a sphere)")
    if distance <= 0.0:
        raise InputError("distance must be positive")

    if contact_angle_target is None:
        def resid(r_w, st):
            d, s0 = _two_sphere_distance(H, r_w, st)
            return (None if d is None else d - distance), s0, None
    else:
        alpha = float(contact_angle_target)
        if not 0.0 < alpha < math.pi:
            raise InputError("contact angle must lie in (0, pi)")

        def resid(r_w, st):
            hgt, s0, s1 = _plane_sphere_height(H, r_w, alpha, st)
            return (None if hgt is None else hgt - distance), s0, s1

    lo, hi = bracket if bracket is not None else r_range
    trace = []
    rs = np.linspace(lo, hi, scan)
    vals = []
    for r_w in rs:
        r_val, s0, s1 = resid(float(r_w), scan_step)
        vals.append(r_val)
        trace.append({"r_w": float(r_w), "residual": r_val, "phase": "scan"})
    brackets = []
    for i in range(len(rs) - 1):
        a, b = vals[i], vals[i + 1]
        if a is None or b is None:
            continue
        if a == 0.0 or (a < 0.0) != (b < 0.0):
            brackets.append((float(rs[i]), float(rs[i + 1])))
    if not brackets:
        feas = [v for v in vals if v is not None]
        msg = "no feasible branch in the scanned range"
        if feas:
            msg += (f"; achievable distance offsets span "
                    f"[{min(feas):+.4g}, {max(feas):+.4g}] around the target")
        raise InfeasibleConfigurationError(msg)

    a, b = brackets[-1]     # largest-r_w branch

    def f(r_w):
        r_val, _, _ = resid(r_w, step)
        if r_val is None:
            raise InfeasibleConfigurationError(
                f"tangency lost inside bracket at r_w={r_w:.6g}")
        trace.append({"r_w": float(r_w), "residual": r_val, "phase": "refine"})
        return r_val

    # the scan ran at a coarser integration step; re-certify the bracket at
    # the fine step, widening by one scan cell if the sign change migrated
    cell = float(rs[1] - rs[0])
    fa, fb = f(a), f(b)
    widen = 0
    while fa * fb > 0.0 and widen < 3:
        widen += 1
        a = max(lo, a - cell)
        b = min(hi, b + cell)
        fa, fb = f(a), f(b)
    if fa * fb > 0.0:
        raise InfeasibleConfigurationError(
            "bracket did not survive refinement at the fine integration step")
    r_star = brentq(f, a, b, xtol=1e-13, rtol=8.9e-16)
    return _build_fixture(H, r_star, contact_angle_target, step, trace)


def rescale_configuration(H, distance, radius):
    """Map a radius-``radius`` configuration to the equivalent unit-radius one."""
    return H * radius, distance / radius


def _build_fixture(H, r_w, alpha, step, trace):
    prof_scan = _profile_forward(H, r_w, _S_CAP, step)
    s0 = _first_tangency(prof_scan)
    if s0 is None:
        raise InfeasibleConfigurationError("converged parameter lost its tangency")
    if alpha is None:
        s1 = -s0
        kind = "two_spheres"
    else:
        s1 = _angle_crossing(prof_scan, math.pi - alpha)
        kind = "sphere_plane"
        if s1 is None:
            raise InfeasibleConfigurationError("converged parameter lost its plane cut")

    # final profile, z-shifted so the lower boundary is at its reference
    # height (z = 0 for a plane boundary; symmetric for two spheres)
    z_ref = 0.0 if alpha is None else -float(prof_scan.state(s1)[1])
    span = (min(s1, 0.0) - _PAD, s0 + _PAD)
    spec = DelaunaySpec(H=H, force=first_integral(H, r_w, 0.5 * math.pi))
    prof = integrate_profile(spec, r_w, 0.5 * math.pi, None, span=span,
                             z_start=z_ref, step=step)
    patch = reparametrize_conformal(revolve(prof, t_range=(s1, s0)))

    r0, z0, phi0, _ = prof.state(s0)
    center_hi = np.array([0.0, 0.0, z0 + math.cos(phi0)])
    if alpha is None:
        spheres = [SphereCfg(center=-center_hi), SphereCfg(center=center_hi)]
        plane = None
    else:
        spheres = [SphereCfg(center=center_hi)]
        plane = PlaneCfg(unit_normal=np.array([0.0, 0.0, 1.0]), offset=0.0,
                         contact_angle_target=alpha)

    # Hopf constant from the anchor point: c = lambda^2 (kappa1 - kappa2)
    phip = -2.0 * H - 1.0 / r_w
    c = r_w * r_w * (-phip + 1.0 / r_w)

    fixture = AnnulusFixture(
        patch=patch, profile=prof, H=float(H),
        force=float(spec.force), start_radius=float(r_w), c=float(c),
        kind=kind, spheres=spheres, plane=plane,
        s_bounds=(float(s1), float(s0)), u_bounds=patch.u_range,
        step=float(step), solver_trace=trace,
    )
    fixture.residuals = validate_fixture(fixture)
    return fixture


def validate_fixture(fixture: AnnulusFixture, n=128):
    """Recompute the converged residual summary of a fixture."""
    out = {}
    for which, sph in fixture.tangent_boundaries():
        rd, rn = tangency_residual(fixture, which, sph, n=n)
        out[f"tangency_dist_{which}"] = rd
        out[f"tangency_normal_{which}"] = rn
    for bs in boundary_speed_check(fixture, n=n):
        out[f"speed_dev_{bs.which}"] = bs.speed_dev
        out[f"kappa2_dev_{bs.which}"] = bs.kappa2_dev
    if fixture.plane is not None:
        ca = contact_angle(fixture, n=n)
        out["contact_angle_mean"] = ca.mean
        out["contact_angle_dev"] = ca.max_dev
        target = fixture.plane.contact_angle_target
        if target is not None:
            out["contact_angle_err"] = abs(ca.mean - target)
    return out
