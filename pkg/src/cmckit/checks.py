"""Report-level verification suites for fitted annulus fixtures.

Each suite turns the pointwise identities of the geometry into named
checks with residuals or margins, a tolerance, and a recomputable verdict:

* ``boundary_suite`` covers the conformal-coordinate identities and the
  boundary-circle facts (Hopf constant, Gauss equation, tangency,
  kappa_2 = -1, constant speed, interior bound on lambda^2, convexity);
* ``offset_suite`` covers the -1-parallel surface (linear Weingarten
  identity from independent finite differences, the per-case curvature
  inequalities, and the range of c / 2 lambda^2 (1+H));
* ``full_report`` composes both with ball containment, self-intersection,
  local-graph PDE/ellipticity spot checks and rotational-symmetry
  recovery on the offset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .contact import (
    AnnulusFixture,
    ball_containment,
    boundary_speed_check,
    contact_angle,
    curve_curvature_magnitude,
    interior_lambda_bound,
    planar_convexity,
    self_intersection_check,
    spherical_convexity,
    tangency_residual,
)
from .errors import GeometryError, InjectivityError, InputError
from .moving_plane import PointCloud, axis_angle, detect_rotational_symmetry
from .offsets import OffsetPatch, weingarten_residual
from .surfaces import (
    GraphPatch,
    curvature,
    fundamental_forms,
    gauss_equation_residual,
    graph_derivatives,
    hopf_constant,
    local_graph,
)

MARGIN_GUARD = 1e-10      # strict inequalities pass above this numerical guard


# ---------------------------------------------------------------------------
# case classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CaseClass:
    tag: str                 # "i", "ii", "iii", "excluded", "degenerate", "boundary"
    expected_surface: str

    def describe(self):
        return f"case {self.tag} ({self.expected_surface})"


def classify_case(H, sign_K, rho=1.0) -> CaseClass:
    """Case trichotomy of a tangency fixture from (sign of K, range of H).

    With sphere radius rho the thresholds are -1/rho and -1/(2 rho):
    K < 0 with H > -1/rho is case i (unduloid / catenoid / nodoid as H is
    negative / zero / positive), K > 0 splits into case ii for
    -1/rho < H < -1/(2 rho) (unduloid) and case iii for H < -1/rho
    (nodoid).  H = -1/rho is the excluded sphere case, K = 0 the
    degenerate cylinder, and H = -1/(2 rho) with K > 0 the borderline the
    trichotomy omits.
    """
    if sign_K not in (-1, 0, +1):
        raise InputError("sign_K must be -1, 0 or +1")
    H = float(H)
    t1 = -1.0 / rho
    t2 = -0.5 / rho
    if sign_K == 0:
        return CaseClass("degenerate", "cylinder")
    if H == t1:
        return CaseClass("excluded", "sphere")
    if sign_K < 0:
        if H < t1:
            raise InputError(
                "K < 0 with H < -1/rho does not occur on a tangency fixture")
        if H < 0.0:
            return CaseClass("i", "unduloid")
        if H == 0.0:
            return CaseClass("i", "catenoid")
        return CaseClass("i", "nodoid")
    if H == t2:
        return CaseClass("boundary", "cylinder")
    if t1 < H < t2:
        return CaseClass("ii", "unduloid")
    if H < t1:
        return CaseClass("iii", "nodoid")
    raise InputError(
        f"K > 0 with H = {H} > -1/(2 rho) does not occur on a tangency fixture")


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass
class CheckResult:
    name: str
    kind: str              # "residual" (value < tol), "margin" (value > tol), "flag"
    value: float
    tolerance: float
    passed: bool
    note: str = ""

    @staticmethod
    def residual(name, value, tol, note=""):
        return CheckResult(name, "residual", float(value), float(tol),
                           bool(value < tol), note)

    @staticmethod
    def margin(name, value, tol=MARGIN_GUARD, note=""):
        return CheckResult(name, "margin", float(value), float(tol),
                           bool(value > tol), note)

    @staticmethod
    def flag(name, ok, note=""):
        return CheckResult(name, "flag", 1.0 if ok else 0.0, 0.5, bool(ok), note)

    @staticmethod
    def failure(name, note):
        return CheckResult(name, "flag", 0.0, 0.5, False, note)

    def to_dict(self):
        return {"name": self.name, "kind": self.kind, "value": self.value,
                "tolerance": self.tolerance, "passed": self.passed,
                "note": self.note}


@dataclass
class VerificationReport:
    title: str
    checks: list = field(default_factory=list)
    case: CaseClass | None = None
    provenance: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def add(self, check: CheckResult):
        self.checks.append(check)

    def extend(self, other: "VerificationReport"):
        self.checks.extend(other.checks)

    def failing(self):
        return [c for c in self.checks if not c.passed]

    def to_dict(self):
        return {
            "title": self.title,
            "case": None if self.case is None else
                {"tag": self.case.tag, "expected_surface": self.case.expected_surface},
            "checks": [c.to_dict() for c in self.checks],
            "provenance": self.provenance,
            "passed": self.passed,
        }

    def table(self):
        lines = [f"# {self.title}"]
        if self.case is not None:
            lines.append(f"# classification: {self.case.describe()}")
        lines.append(f"{'check':48s} {'kind':9s} {'value':>13s} {'tol':>10s} verdict")
        for c in self.checks:
            lines.append(
                f"{c.name:48s} {c.kind:9s} {c.value:13.4e} {c.tolerance:10.1e} "
                f"{'PASS' if c.passed else 'FAIL'}"
                + (f"   [{c.note}]" if c.note else ""))
        lines.append(f"# overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def verdicts_recomputable(report: VerificationReport):
    """True when every stored verdict follows from its value and tolerance."""
    for c in report.checks:
        if c.kind == "residual":
            ok = c.value < c.tolerance
        elif c.kind == "margin":
            ok = c.value > c.tolerance
        else:
            ok = c.value > 0.5
        if ok != c.passed:
            return False
    return True


# ---------------------------------------------------------------------------
# sign of K on a fixture
# ---------------------------------------------------------------------------

def interior_sign_K(fixture: AnnulusFixture, grid=(24, 6), inset=0.03):
    u_lo, u_hi = fixture.u_bounds
    span = u_hi - u_lo
    us = np.linspace(u_lo + inset * span, u_hi - inset * span, grid[0])
    vs = fixture.patch.v_grid(grid[1])
    Ks = np.array([curvature(fundamental_forms(fixture.patch, u, v)).K
                   for u in us for v in vs])
    scale = max(1.0, float(np.max(np.abs(Ks))))
    if np.all(np.abs(Ks) < 1e-9 * scale):
        return 0
    if np.min(Ks) < 0.0 < np.max(Ks):
        raise InputError("Gaussian curvature changes sign on the fixture interior")
    return -1 if Ks[0] < 0.0 else +1


def fixture_case(fixture: AnnulusFixture) -> CaseClass:
    return classify_case(fixture.H, interior_sign_K(fixture))


# ---------------------------------------------------------------------------
# boundary suite
# ---------------------------------------------------------------------------

def boundary_suite(fixture: AnnulusFixture, *, grid=(48, 32), gauss_grid=(96, 48),
                   n_boundary=128, tol_tangency=1e-8, tol_kappa2=1e-6,
                   tol_speed=1e-6, tol_hopf=1e-6, tol_gauss=1e-3) -> VerificationReport:
    """Conformal-coordinate and boundary-circle checks of a fixture."""
    rep = VerificationReport(title=f"boundary identities [{fixture.kind}]")
    try:
        rep.case = fixture_case(fixture)
    except (InputError, GeometryError) as e:
        rep.add(CheckResult.failure("case classification", str(e)))

    try:
        hc = hopf_constant(fixture.patch, grid=grid)
        rep.add(CheckResult.residual("hopf constancy max|h11-h22-c|", hc.max_dev, tol_hopf))
        rep.add(CheckResult.residual("hopf constancy max|h12|", hc.max_h12, tol_hopf))
        rep.provenance["hopf_c"] = hc.c
    except GeometryError as e:
        rep.add(CheckResult.failure("hopf constancy", str(e)))

    try:
        gr = gauss_equation_residual(fixture.patch, grid=gauss_grid)
        rep.add(CheckResult.residual("gauss equation residual", gr, tol_gauss))
    except (GeometryError, ValueError) as e:
        rep.add(CheckResult.failure("gauss equation residual", str(e)))

    for which, sph in fixture.tangent_boundaries():
        rd, rn = tangency_residual(fixture, which, sph, n=n_boundary)
        rep.add(CheckResult.residual(f"tangency distance ({which})", rd, tol_tangency))
        rep.add(CheckResult.residual(f"tangency normal ({which})", rn, tol_tangency))

    try:
        for bs in boundary_speed_check(fixture, n=n_boundary):
            rep.add(CheckResult.residual(
                f"boundary speed deviation ({bs.which})", bs.speed_dev, tol_speed))
            rep.add(CheckResult.residual(
                f"boundary |kappa2 + 1| ({bs.which})", bs.kappa2_dev, tol_kappa2))
    except InputError as e:
        rep.add(CheckResult.failure("boundary speed / kappa2", str(e)))

    try:
        margin, sk = interior_lambda_bound(fixture)
        if sk == 0:
            rep.add(CheckResult.failure(
                "interior lambda^2 bound", "K = 0: degenerate cylinder borderline"))
        else:
            side = "below" if sk < 0 else "above"
            rep.add(CheckResult.margin(
                f"interior lambda^2 strictly {side} c/2(1+H)", margin))
    except InputError as e:
        rep.add(CheckResult.failure("interior lambda^2 bound", str(e)))

    for which, sph in fixture.tangent_boundaries():
        pts = fixture.boundary_points(which, n=256)
        try:
            _, convex = spherical_convexity(pts, center=sph.center, radius=sph.radius)
            rep.add(CheckResult.flag(f"boundary circle convex ({which})", convex))
        except InputError as e:
            rep.add(CheckResult.failure(f"boundary circle convex ({which})", str(e)))
        nu_curve = fixture.meridian_direction_curve(which, n=256)
        try:
            _, convex = spherical_convexity(nu_curve, center=np.zeros(3), radius=1.0)
            rep.add(CheckResult.flag(
                f"meridian direction curve convex ({which})", convex))
        except InputError as e:
            rep.add(CheckResult.failure(
                f"meridian direction curve convex ({which})", str(e)))
    return rep


# ---------------------------------------------------------------------------
# offset suite
# ---------------------------------------------------------------------------

def _offset_case_margins(fixture: AnnulusFixture, case: CaseClass,
                         grid=(40, 12), band=0.05):
    """Pointwise minima of the per-case offset-curvature inequalities.

    Values come from the transformation law kappa/(1+kappa) applied to the
    analytic base curvatures; points too close to the singular circles
    (|1+kappa_i| <= band) are excluded.
    """
    H = fixture.H
    u_lo, u_hi = fixture.u_bounds
    us = np.linspace(u_lo, u_hi, grid[0] + 2)[1:-1]
    vs = fixture.patch.v_grid(grid[1])
    k1t, k2t, Ht, q = [], [], [], []
    for u in us:
        for v in vs:
            forms = fundamental_forms(fixture.patch, u, v)
            cs = curvature(forms)
            if min(abs(1.0 + cs.kappa1), abs(1.0 + cs.kappa2)) <= band:
                continue
            k1t.append(cs.kappa1 / (1.0 + cs.kappa1))
            k2t.append(cs.kappa2 / (1.0 + cs.kappa2))
            Ht.append(0.5 * (k1t[-1] + k2t[-1]))
            q.append(fixture.c / (2.0 * forms.lambda_sq * (1.0 + H)))
    if not k1t:
        raise InputError("no regular interior points for the offset inequalities")
    k1t = np.asarray(k1t)
    k2t = np.asarray(k2t)
    Ht = np.asarray(Ht)
    q = np.asarray(q)

    checks = []
    if case.tag == "i":
        checks.append(CheckResult.margin("offset kappa1 > 0", float(k1t.min())))
        checks.append(CheckResult.margin("offset kappa2 > 1", float(k2t.min() - 1.0)))
        checks.append(CheckResult.margin("offset H > 1", float(Ht.min() - 1.0)))
        checks.append(CheckResult.margin("c/2lam^2(1+H) > 1", float(q.min() - 1.0)))
    elif case.tag == "ii":
        bound = H / (1.0 + H)
        qcap = min(1.0, -H / (1.0 + H))
        checks.append(CheckResult.margin("offset kappa1 < 0", float(-k1t.max())))
        checks.append(CheckResult.margin(
            "offset kappa2 < H/(1+H)", float(bound - k2t.max())))
        checks.append(CheckResult.margin(
            "offset H < H/(1+H)", float(bound - Ht.max())))
        checks.append(CheckResult.margin("c/2lam^2(1+H) > 0", float(q.min())))
        checks.append(CheckResult.margin(
            "c/2lam^2(1+H) < min(1, -H/(1+H))", float(qcap - q.max())))
    elif case.tag == "iii":
        bound = H / (1.0 + H)
        k1_bound = (1.0 + 2.0 * H) / (2.0 * (1.0 + H))
        k1_alt = (1.0 + 2.0 * H) / (1.0 + H)
        checks.append(CheckResult.margin(
            "offset kappa1 > (1+2H)/2(1+H)", float(k1t.min() - k1_bound)))
        checks.append(CheckResult(
            "offset kappa1 vs (1+2H)/(1+H) [informational]", "margin",
            float(k1t.min() - k1_alt), -math.inf, True,
            note="alternative printed bound; margin reported, not gated"))
        checks.append(CheckResult.margin(
            "offset kappa2 > H/(1+H)", float(k2t.min() - bound)))
        checks.append(CheckResult.margin(
            "offset H > H/(1+H)", float(Ht.min() - bound)))
        checks.append(CheckResult.margin("c/2lam^2(1+H) > 0", float(q.min())))
        checks.append(CheckResult.margin("c/2lam^2(1+H) < 1", float(1.0 - q.max())))
    else:
        raise InputError(f"offset inequalities undefined for case '{case.tag}'")
    return checks


def offset_suite(fixture: AnnulusFixture, *, grid=(20, 20), tol_weingarten=1e-5,
                 margin_grid=(40, 12)) -> VerificationReport:
    """Linear-Weingarten identity and case inequalities on the -1 offset."""
    rep = VerificationReport(title=f"parallel surface checks [{fixture.kind}]")
    try:
        rep.case = fixture_case(fixture)
    except (InputError, GeometryError) as e:
        rep.add(CheckResult.failure("case classification", str(e)))
        return rep
    try:
        wr = weingarten_residual(fixture.patch, fixture.H, grid=grid)
        rep.add(CheckResult.residual(
            "weingarten identity (1+H)K~ - (1+2H)H~ + H", wr, tol_weingarten,
            note="H~, K~ from finite-difference jets of the offset"))
    except GeometryError as e:
        rep.add(CheckResult.failure("weingarten identity", str(e)))
    try:
        for chk in _offset_case_margins(fixture, rep.case, grid=margin_grid):
            rep.add(chk)
    except InputError as e:
        rep.add(CheckResult.failure("offset case inequalities", str(e)))
    return rep


# ---------------------------------------------------------------------------
# graph-level PDE residual and ellipticity
# ---------------------------------------------------------------------------

def pde_residual(graph: GraphPatch, H) -> float:
    """Max residual of the Weingarten graph equation on the sampled disk.

    The equation, in the exact algebraic form used everywhere in this
    package, reads

        2(1+H)(f_xx f_yy - f_xy^2) + 2H (1 + f_x^2 + f_y^2)^2
          = (1+2H) ((1+f_y^2) f_xx - 2 f_x f_y f_xy + (1+f_x^2) f_yy) W,

    with W = sqrt(1 + f_x^2 + f_y^2).  Derivatives are second-order
    central differences on the graph grid.
    """
    if graph.f.shape[0] < 5:
        raise InputError("graph grid too coarse for second differences")
    fx, fy, fxx, fxy, fyy = graph_derivatives(graph)
    W2 = 1.0 + fx ** 2 + fy ** 2
    W = np.sqrt(W2)
    lhs = 2.0 * (1.0 + H) * (fxx * fyy - fxy ** 2) + 2.0 * H * W2 ** 2
    M = (1.0 + fy ** 2) * fxx - 2.0 * fx * fy * fxy + (1.0 + fx ** 2) * fyy
    rhs = (1.0 + 2.0 * H) * M * W
    return float(np.max(np.abs(lhs - rhs)))


@dataclass
class EllipticityResult:
    trace: np.ndarray          # trace of 2(1+H) D^2 f + A(Df) on the interior grid
    is_elliptic: bool
    branch: str                # "growth", "unconditional" or "flipped-growth"
    margin_growth: float | None   # min of M - 2 W^{3/2}          (branch "growth")
    margin_flipped: float | None  # min of M - (2H/(1+H)) W^{3/2} (branch "flipped-growth")
    trace_center: float


def ellipticity_check(graph: GraphPatch, H) -> EllipticityResult:
    """Certify ellipticity of the graph equation for the offset surface.

    The operator 2(1+H) D^2 f + A(Df) has determinant W^4 > 0, so it is
    definite; ellipticity needs its trace bounded away from zero.  The
    certifying branch depends on the range of H:

    * H > -1/2 ("growth"): the mean-curvature growth inequality
      M > 2 W^{3/2} must hold on the sampled graph, which makes the trace
      strictly positive near the center;
    * -1 < H < -1/2 ("unconditional"): the trace expression is definite
      with no extra hypothesis;
    * H < -1 ("flipped-growth"): the sign-flipped operator
      -2(1+H) D^2 f - A(Df) (same determinant) is used, certified by
      M > (2H/(1+H)) W^{3/2}.
    """
    fx, fy, fxx, fxy, fyy = graph_derivatives(graph)
    W2 = 1.0 + fx ** 2 + fy ** 2
    W = np.sqrt(W2)
    lap = fxx + fyy
    M = (1.0 + fy ** 2) * fxx - 2.0 * fx * fy * fxy + (1.0 + fx ** 2) * fyy
    trace = 2.0 * (1.0 + H) * lap - (1.0 + 2.0 * H) * (2.0 + fx ** 2 + fy ** 2) * W
    mid = trace.shape[0] // 2
    trace_center = float(trace[mid, mid])

    if -1.0 < H < -0.5:
        return EllipticityResult(trace=trace, is_elliptic=True,
                                 branch="unconditional", margin_growth=None,
                                 margin_flipped=None, trace_center=trace_center)
    if H > -0.5:
        margin = float(np.min(M - 2.0 * W ** 1.5))
        ok = margin > MARGIN_GUARD and trace_center > 0.0
        return EllipticityResult(trace=trace, is_elliptic=ok, branch="growth",
                                 margin_growth=margin, margin_flipped=None,
                                 trace_center=trace_center)
    if H < -1.0:
        margin = float(np.min(M - (2.0 * H / (1.0 + H)) * W ** 1.5))
        ok = margin > MARGIN_GUARD and trace_center < 0.0
        return EllipticityResult(trace=trace, is_elliptic=ok, branch="flipped-growth",
                                 margin_growth=None, margin_flipped=margin,
                                 trace_center=trace_center)
    raise InputError("H in {-1, -1/2} is outside the certified ranges")


def extract_offset_graph(off: OffsetPatch, u, v, radius=0.02, n=17, shrink_max=6):
    """Local graph of an offset patch, auto-shrinking the radius on failure."""
    r = radius
    last = None
    for _ in range(shrink_max):
        try:
            return local_graph(off, u, v, r, n=n)
        except InjectivityError as e:
            last = e
            r = max(0.5 * r, 0.25 * e.max_radius) if e.max_radius > 0 else 0.5 * r
    raise last


def regular_spot_points(fixture: AnnulusFixture, n_u=3, n_v=4, band=0.15):
    """Interior (u, v) points with both |1 + kappa_i| above ``band``."""
    u_lo, u_hi = fixture.u_bounds
    us = np.linspace(u_lo, u_hi, 4 * n_u + 2)[1:-1]
    vs = fixture.patch.v_grid(n_v)
    good_us = []
    for u in us:
        cs = curvature(fundamental_forms(fixture.patch, u, vs[0]))
        if min(abs(1.0 + cs.kappa1), abs(1.0 + cs.kappa2)) > band:
            good_us.append(u)
    if not good_us:
        raise InputError("no interior rows clear the offset-regularity band")
    sel = np.linspace(0, len(good_us) - 1, min(n_u, len(good_us))).astype(int)
    return [(good_us[i], v) for i in sel for v in vs]


# ---------------------------------------------------------------------------
# full report
# ---------------------------------------------------------------------------

def full_report(fixture: AnnulusFixture, *, cloud_grid=(64, 64),
                self_grid=(40, 56), tol_pde=1e-4, tol_symmetry_axis=1e-4,
                n_spots=(2, 3), check_symmetry=True,
                check_self_intersection=True) -> VerificationReport:
    """Everything the fixture must satisfy to be consistent with a
    rotational (Delaunay) classification."""
    rep = VerificationReport(title=f"full verification [{fixture.kind}]")
    rep.provenance["H"] = fixture.H
    rep.provenance["force"] = fixture.force
    rep.provenance["family"] = fixture.family
    rep.provenance["hopf_c"] = fixture.c
    rep.provenance["solver_iterations"] = len(fixture.solver_trace)
    rep.provenance["residuals"] = dict(fixture.residuals)

    rep.extend(boundary_suite(fixture))
    osuite = offset_suite(fixture)
    rep.extend(osuite)
    rep.case = osuite.case

    # containment vs classification (two-sphere configurations)
    if fixture.kind == "two_spheres" and rep.case is not None:
        try:
            cont = ball_containment(fixture)
            expected = "inside" if rep.case.tag == "iii" else "outside"
            rep.add(CheckResult.flag(
                f"stays {expected} the balls", cont.verdict == expected,
                note=f"verdict={cont.verdict}, margins={cont.margins}"))
        except InputError as e:
            rep.add(CheckResult.failure("ball containment", str(e)))

    # plane-boundary checks (sphere+plane configurations)
    if fixture.kind == "sphere_plane" and fixture.plane is not None:
        _plane_boundary_checks(rep, fixture)

    off = OffsetPatch(fixture.patch, 1.0)

    if check_self_intersection:
        si = self_intersection_check(off, grid=self_grid, inset=0.01)
        rep.add(CheckResult.flag("offset free of self-intersections", not si.found,
                                 note=f"candidate pairs tested: {si.n_candidates}"))

    # PDE residual + ellipticity on extracted local graphs
    if rep.case is not None and rep.case.tag in ("i", "ii", "iii"):
        try:
            spots = regular_spot_points(fixture, n_u=n_spots[0], n_v=n_spots[1])
            worst_pde = 0.0
            elliptic_ok = True
            branch = ""
            for (u, v) in spots:
                g = extract_offset_graph(off, u, v)
                worst_pde = max(worst_pde, pde_residual(g, fixture.H))
                er = ellipticity_check(g, fixture.H)
                branch = er.branch
                elliptic_ok = elliptic_ok and er.is_elliptic
            rep.add(CheckResult.residual(
                "offset graph equation residual", worst_pde, tol_pde,
                note=f"{len(spots)} local graphs"))
            rep.add(CheckResult.flag(
                "graph equation elliptic at sampled points", elliptic_ok,
                note=f"branch: {branch}"))
        except (GeometryError, InputError) as e:
            rep.add(CheckResult.failure("offset graph checks", str(e)))

    if check_symmetry:
        cloud = _offset_cloud(off, cloud_grid)
        try:
            sym = detect_rotational_symmetry(cloud)
            if sym.axis is None:
                rep.add(CheckResult.failure(
                    "rotational symmetry of the offset",
                    f"no axis found (best residual {sym.residual:.3e})"))
            else:
                ang = axis_angle(sym.axis[1], fixture.axis[1])
                rep.add(CheckResult.residual(
                    "recovered axis angle error", ang, tol_symmetry_axis))
                rep.add(CheckResult.residual(
                    "reflection symmetry residual", sym.residual,
                    2.0 * cloud.pitch, note="tolerance = 2x sampling pitch"))
        except InputError as e:
            rep.add(CheckResult.failure("rotational symmetry of the offset", str(e)))
    return rep


def _plane_boundary_checks(rep, fixture, n=256, tol_angle=1e-6, tol_kappa=1e-6):
    plane = fixture.plane
    try:
        ca = contact_angle(fixture, n=n)
        rep.add(CheckResult.residual(
            "contact angle constancy (max dev from mean)", ca.max_dev, tol_angle))
        if plane.contact_angle_target is not None:
            rep.add(CheckResult.residual(
                "contact angle matches target",
                abs(ca.mean - plane.contact_angle_target), 1e-6))
    except InputError as e:
        rep.add(CheckResult.failure("contact angle", str(e)))

    pts = fixture.boundary_points("lower", n)
    _, convex = planar_convexity(pts, plane.unit_normal)
    rep.add(CheckResult.flag("plane boundary curve convex", convex))

    # |curvature| of the plane boundary equals -kappa2 / sin(alpha)
    try:
        ca_mean = contact_angle(fixture, n=n).mean
        kmag = curve_curvature_magnitude(pts)
        u = fixture.boundary_u("lower")
        vs = fixture.patch.v_grid(n)
        k2 = np.array([curvature(fundamental_forms(fixture.patch, u, v)).kappa2
                       for v in vs])
        target = -k2 / math.sin(ca_mean)
        rep.add(CheckResult.residual(
            "plane boundary |curvature| = -kappa2/sin(alpha)",
            float(np.max(np.abs(kmag - target))), tol_kappa))
    except InputError as e:
        rep.add(CheckResult.failure("plane boundary curvature identity", str(e)))

    # lambda_u > 0 along the plane boundary for K < 0, alpha > pi/2
    try:
        sk = interior_sign_K(fixture)
        alpha = plane.contact_angle_target
        if sk < 0 and alpha is not None and alpha > 0.5 * math.pi:
            u = fixture.boundary_u("lower")
            h = 1e-5 * (fixture.u_bounds[1] - fixture.u_bounds[0])
            vs = fixture.patch.v_grid(32)
            lam_u = []
            for v in vs:
                e_hi = fundamental_forms(fixture.patch, u + h, v).E
                e_lo = fundamental_forms(fixture.patch, u, v).E
                lam_u.append((math.sqrt(e_hi) - math.sqrt(e_lo)) / h)
            rep.add(CheckResult.margin(
                "lambda_u > 0 on the plane boundary", float(np.min(lam_u))))
    except (InputError, GeometryError) as e:
        rep.add(CheckResult.failure("lambda_u sign on the plane boundary", str(e)))


def _offset_cloud(off: OffsetPatch, grid):
    nu, nv = grid
    us = off.u_grid(nu, inset=0.01)
    vs = off.v_grid(nv)
    pts = np.array([off.position(u, v) for u in us for v in vs])
    boundary = np.zeros(len(pts), dtype=bool)
    boundary[:nv] = True
    boundary[-nv:] = True
    return PointCloud(points=pts, boundary=boundary)
