"""Parametric surface patches with second-order jets and curvature machinery.

A patch is a map X(u, v) on a rectangle, periodic in v for surfaces of
revolution.  All curvature quantities follow the convention

    h_ij = N . X_ij,   kappa_i = eigenvalues of the shape operator,

with N the oriented unit normal.  Under this convention the unit sphere
with outward normal has H = -1 and K = +1, and a catenoid with the normal
pointing away from its axis has h11 = +1, h22 = -1 in its standard
conformal parametrization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePointError, InjectivityError, NotCurvatureCoordinateError

TWO_PI = 2.0 * math.pi

# Default tolerances (stated per report by the callers that use them).
CONFORMAL_TOL = 1e-8          # relative |E-G|/E and |F|/E for analytic patches
DERIVED_TOL_ANALYTIC = 1e-10  # algebraic identities on analytic jets
DERIVED_TOL_NUMERIC = 1e-4    # same identities via finite-difference jets


@dataclass
class Jet2:
    """Second-order jet of a surface map at one parameter point."""

    x: np.ndarray     # position
    du: np.ndarray
    dv: np.ndarray
    duu: np.ndarray
    duv: np.ndarray
    dvv: np.ndarray


@dataclass
class FundForms:
    """First and second fundamental form coefficients at a point."""

    E: float
    F: float
    G: float
    h11: float
    h12: float
    h22: float
    conformal: bool = False
    lambda_sq: float | None = None

    def area_element_sq(self):
        return self.E * self.G - self.F * self.F


@dataclass
class CurvatureSample:
    """Curvatures derived from fundamental forms.

    ``kappa1`` is the curvature of the u-coordinate direction whenever the
    coordinates are (close to) curvature lines; otherwise the two values are
    the shape-operator eigenvalues in descending order.
    """

    H: float
    K: float
    kappa1: float
    kappa2: float
    normal: np.ndarray | None = None


class SurfacePatch:
    """Parametric patch on [u0,u1] x [v0,v1] with a second-order jet evaluator.

    ``orientation`` = +1 keeps N = X_u x X_v / |X_u x X_v|; -1 flips it.
    A ``normal_fn`` overrides the cross-product normal entirely (used by
    parallel surfaces, which inherit the base normal).
    """

    def __init__(self, jet_fn, u_range, v_range=(0.0, TWO_PI), periodic_v=True,
                 orientation=1.0, conformal=False, name="patch", normal_fn=None,
                 profile=None, chart=None):
        self.jet_fn = jet_fn
        self.u_range = (float(u_range[0]), float(u_range[1]))
        self.v_range = (float(v_range[0]), float(v_range[1]))
        self.periodic_v = bool(periodic_v)
        self.orientation = float(orientation)
        self.conformal = bool(conformal)
        self.name = name
        self.normal_fn = normal_fn
        self.profile = profile     # set by delaunay.revolve / reparametrize
        self.chart = chart         # extra chart data for revolved patches

    # -- evaluation ------------------------------------------------------

    def jet(self, u, v) -> Jet2:
        return self.jet_fn(float(u), float(v))

    def position(self, u, v) -> np.ndarray:
        return self.jet(u, v).x

    def normal(self, u, v) -> np.ndarray:
        if self.normal_fn is not None:
            return self.normal_fn(float(u), float(v))
        j = self.jet(u, v)
        return self.normal_from_jet(j)

    def normal_from_jet(self, j: Jet2) -> np.ndarray:
        n = np.cross(j.du, j.dv)
        nn = np.linalg.norm(n)
        if nn <= 0.0:
            raise DegeneratePointError("normal undefined: |X_u x X_v| = 0")
        return self.orientation * n / nn

    # -- sampling helpers --------------------------------------------------

    def u_grid(self, nu, inset=0.0):
        u0, u1 = self.u_range
        span = u1 - u0
        return np.linspace(u0 + inset * span, u1 - inset * span, nu)

    def v_grid(self, nv):
        v0, v1 = self.v_range
        if self.periodic_v:
            return v0 + (v1 - v0) * np.arange(nv) / nv
        return np.linspace(v0, v1, nv)


# ---------------------------------------------------------------------------
# fundamental forms and curvature
# ---------------------------------------------------------------------------

def fundamental_forms(patch: SurfacePatch, u, v) -> FundForms:
    """First/second fundamental forms at (u, v) with the patch's normal."""
    j = patch.jet(u, v)
    n = patch.normal(u, v)
    E = float(j.du @ j.du)
    F = float(j.du @ j.dv)
    G = float(j.dv @ j.dv)
    if E * G - F * F <= 0.0:
        raise DegeneratePointError(f"degenerate metric at (u,v)=({u},{v}): EG-F^2 <= 0")
    forms = FundForms(
        E=E, F=F, G=G,
        h11=float(n @ j.duu), h12=float(n @ j.duv), h22=float(n @ j.dvv),
    )
    if patch.conformal:
        scale = max(abs(E), abs(G))
        if abs(E - G) <= CONFORMAL_TOL * scale and abs(F) <= CONFORMAL_TOL * scale:
            forms.conformal = True
            forms.lambda_sq = E
    return forms


def curvature(forms: FundForms, normal=None) -> CurvatureSample:
    """Principal curvatures, H and K from fundamental forms.

    The eigenvalue labelled ``kappa1`` is the one attached to the
    u-direction (h11/E) when that is meaningful, so that directional
    statements about curvature-line coordinates survive the round trip.
    """
    W2 = forms.area_element_sq()
    if W2 <= 0.0:
        raise DegeneratePointError("degenerate metric: EG - F^2 <= 0")
    E, F, G = forms.E, forms.F, forms.G
    h11, h12, h22 = forms.h11, forms.h12, forms.h22
    H = (E * h22 - 2.0 * F * h12 + G * h11) / (2.0 * W2)
    K = (h11 * h22 - h12 * h12) / W2
    disc = H * H - K
    s = math.sqrt(disc) if disc > 0.0 else 0.0
    hi, lo = H + s, H - s
    # attach kappa1 to the u-direction
    if h11 / E >= h22 / G:
        k1, k2 = hi, lo
    else:
        k1, k2 = lo, hi
    return CurvatureSample(H=H, K=K, kappa1=k1, kappa2=k2, normal=normal)


def curvature_at(patch: SurfacePatch, u, v) -> CurvatureSample:
    return curvature(fundamental_forms(patch, u, v), normal=patch.normal(u, v))


# ---------------------------------------------------------------------------
# finite-difference jets (the independent oracle)
# ---------------------------------------------------------------------------

def fd_jet(position_fn, u, v, step=1e-4, richardson=True) -> Jet2:
    """Second-order jet of a position map by central differences.

    Entirely independent of any analytic jet: only positions are sampled.
    With ``richardson`` the first and pure second derivatives use the
    4th-order five-point formulas; the mixed derivative stays 2nd-order.
    """
    h = float(step)
    f = lambda a, b: np.asarray(position_fn(a, b), dtype=float)
    x0 = f(u, v)
    fu1, fu_1 = f(u + h, v), f(u - h, v)
    fv1, fv_1 = f(u, v + h), f(u, v - h)
    fpp, fmm = f(u + h, v + h), f(u - h, v - h)
    fpm, fmp = f(u + h, v - h), f(u - h, v + h)
    if richardson:
        fu2, fu_2 = f(u + 2 * h, v), f(u - 2 * h, v)
        fv2, fv_2 = f(u, v + 2 * h), f(u, v - 2 * h)
        du = (8.0 * (fu1 - fu_1) - (fu2 - fu_2)) / (12.0 * h)
        dv = (8.0 * (fv1 - fv_1) - (fv2 - fv_2)) / (12.0 * h)
        duu = (-fu2 + 16.0 * fu1 - 30.0 * x0 + 16.0 * fu_1 - fu_2) / (12.0 * h * h)
        dvv = (-fv2 + 16.0 * fv1 - 30.0 * x0 + 16.0 * fv_1 - fv_2) / (12.0 * h * h)
    else:
        du = (fu1 - fu_1) / (2.0 * h)
        dv = (fv1 - fv_1) / (2.0 * h)
        duu = (fu1 - 2.0 * x0 + fu_1) / (h * h)
        dvv = (fv1 - 2.0 * x0 + fv_1) / (h * h)
    duv = (fpp + fmm - fpm - fmp) / (4.0 * h * h)
    return Jet2(x=x0, du=du, dv=dv, duu=duu, duv=duv, dvv=dvv)


def patch_from_positions(position_fn, u_range, v_range=(0.0, TWO_PI), periodic_v=True,
                         orientation=1.0, conformal=False, name="numeric patch",
                         step_rel=1e-5):
    """Wrap a bare position map into a patch with finite-difference jets.

    The differencing step is ``step_rel`` times the u-span.
    """
    span = abs(u_range[1] - u_range[0])
    h = step_rel * span if span > 0 else step_rel
    return SurfacePatch(
        lambda u, v: fd_jet(position_fn, u, v, step=h),
        u_range, v_range, periodic_v=periodic_v, orientation=orientation,
        conformal=conformal, name=name,
    )


# ---------------------------------------------------------------------------
# built-in analytic generators
# ---------------------------------------------------------------------------

def catenoid_patch(scale=1.0, u_range=(-1.0, 1.0)) -> SurfacePatch:
    """Catenoid X = a (cosh u cos v, cosh u sin v, u), normal away from the axis."""
    a = float(scale)

    def jet(u, v):
        ch, sh = math.cosh(u), math.sinh(u)
        c, s = math.cos(v), math.sin(v)
        return Jet2(
            x=np.array([a * ch * c, a * ch * s, a * u]),
            du=np.array([a * sh * c, a * sh * s, a]),
            dv=np.array([-a * ch * s, a * ch * c, 0.0]),
            duu=np.array([a * ch * c, a * ch * s, 0.0]),
            duv=np.array([-a * sh * s, a * sh * c, 0.0]),
            dvv=np.array([-a * ch * c, -a * ch * s, 0.0]),
        )

    return SurfacePatch(jet, u_range, orientation=-1.0, conformal=True,
                        name=f"catenoid(a={a})")


def sphere_patch(radius=1.0, u_range=(-1.0, 1.0)) -> SurfacePatch:
    """Unit-type sphere in conformal (Mercator) coordinates, outward normal.

    X = R (sech u cos v, sech u sin v, tanh u); lambda = R sech u.
    """
    R = float(radius)

    def jet(u, v):
        se, ta = 1.0 / math.cosh(u), math.tanh(u)
        c, s = math.cos(v), math.sin(v)
        # d/du sech = -sech*tanh ; d/du tanh = sech^2
        dse = -se * ta
        d2se = se * (ta * ta - se * se)     # sech(tanh^2 - sech^2)
        return Jet2(
            x=np.array([R * se * c, R * se * s, R * ta]),
            du=np.array([R * dse * c, R * dse * s, R * se * se]),
            dv=np.array([-R * se * s, R * se * c, 0.0]),
            duu=np.array([R * d2se * c, R * d2se * s, -2.0 * R * se * se * ta]),
            duv=np.array([-R * dse * s, R * dse * c, 0.0]),
            dvv=np.array([-R * se * c, -R * se * s, 0.0]),
        )

    return SurfacePatch(jet, u_range, orientation=-1.0, conformal=True,
                        name=f"sphere(R={R})")


def cylinder_patch(radius=1.0, u_range=(-1.0, 1.0)) -> SurfacePatch:
    """Cylinder in conformal coordinates X = (r cos v, r sin v, r u), outward normal."""
    r = float(radius)

    def jet(u, v):
        c, s = math.cos(v), math.sin(v)
        z3 = np.zeros(3)
        return Jet2(
            x=np.array([r * c, r * s, r * u]),
            du=np.array([0.0, 0.0, r]),
            dv=np.array([-r * s, r * c, 0.0]),
            duu=z3.copy(), duv=z3.copy(),
            dvv=np.array([-r * c, -r * s, 0.0]),
        )

    def normal(u, v):
        return np.array([math.cos(v), math.sin(v), 0.0])

    return SurfacePatch(jet, u_range, orientation=-1.0, conformal=True,
                        name=f"cylinder(r={r})", normal_fn=normal)


def plane_patch(u_range=(-1.0, 1.0), v_range=(-1.0, 1.0)) -> SurfacePatch:
    """Plane z = 0 parametrized by (u, v), normal +z."""

    def jet(u, v):
        z3 = np.zeros(3)
        return Jet2(
            x=np.array([u, v, 0.0]),
            du=np.array([1.0, 0.0, 0.0]),
            dv=np.array([0.0, 1.0, 0.0]),
            duu=z3.copy(), duv=z3.copy(), dvv=z3.copy(),
        )

    return SurfacePatch(jet, u_range, v_range, periodic_v=False,
                        orientation=1.0, conformal=True, name="plane")


# ---------------------------------------------------------------------------
# Hopf constant and the Gauss equation
# ---------------------------------------------------------------------------

@dataclass
class HopfResult:
    c: float            # mean of h11 - h22 over the grid
    max_dev: float      # max |h11 - h22 - c|
    max_h12: float      # max |h12|
    h_dev: float        # max |H - mean H|


def hopf_constant(patch: SurfacePatch, grid=(64, 64), h_tol=1e-6) -> HopfResult:
    """Constant of the Hopf differential in conformal curvature coordinates.

    Requires a conformal patch with constant mean curvature; on such a patch
    h12 vanishes and h11 - h22 is a single constant c.  Returns c together
    with the deviations that certify the claim on the sampled grid.
    """
    if not patch.conformal:
        raise NotCurvatureCoordinateError("patch is not flagged conformal")
    us = patch.u_grid(grid[0])
    vs = patch.v_grid(grid[1])
    cs, h12s, Hs = [], [], []
    for u in us:
        for v in vs:
            forms = fundamental_forms(patch, u, v)
            if not forms.conformal:
                raise NotCurvatureCoordinateError(
                    f"conformality violated at (u,v)=({u:.6g},{v:.6g}): "
                    f"|E-G|/E={abs(forms.E - forms.G) / forms.E:.3e}")
            cs.append(forms.h11 - forms.h22)
            h12s.append(abs(forms.h12))
            Hs.append(curvature(forms).H)
    Hs = np.asarray(Hs)
    h_scale = max(1.0, float(np.max(np.abs(Hs))))
    h_dev = float(np.max(np.abs(Hs - Hs.mean())))
    if h_dev > h_tol * h_scale:
        raise NotCurvatureCoordinateError(
            f"mean curvature is not constant on the grid: max deviation {h_dev:.3e}")
    cs = np.asarray(cs)
    c = float(cs.mean())
    return HopfResult(c=c, max_dev=float(np.max(np.abs(cs - c))),
                      max_h12=float(np.max(h12s)), h_dev=h_dev)


def gauss_equation_residual(patch: SurfacePatch, grid=(64, 64)) -> float:
    """Max residual of  Delta log(lambda) + K lambda^2  on an interior grid.

    The Laplacian is taken with second-order central differences in (u, v);
    the v-direction wraps when the patch is periodic.
    """
    nu, nv = grid
    if nu < 5 or nv < 5:
        raise ValueError(f"grid {nu}x{nv} too coarse for the Laplacian stencil (need >= 5)")
    us = patch.u_grid(nu)
    vs = patch.v_grid(nv)
    hu = us[1] - us[0]
    hv = vs[1] - vs[0]
    lam2 = np.empty((nu, nv))
    Kg = np.empty((nu, nv))
    for i, u in enumerate(us):
        for j, v in enumerate(vs):
            forms = fundamental_forms(patch, u, v)
            lam2[i, j] = forms.E
            Kg[i, j] = curvature(forms).K
    loglam = 0.5 * np.log(lam2)
    # u-direction: interior rows only; v-direction wraps for periodic patches
    lap = np.full((nu, nv), np.nan)
    core = (loglam[2:, :] - 2.0 * loglam[1:-1, :] + loglam[:-2, :]) / (hu * hu)
    if patch.periodic_v:
        lv = (np.roll(loglam, -1, axis=1) - 2.0 * loglam + np.roll(loglam, 1, axis=1)) / (hv * hv)
        lap[1:-1, :] = core + lv[1:-1, :]
        resid = lap[1:-1, :] + Kg[1:-1, :] * lam2[1:-1, :]
    else:
        lv = (loglam[:, 2:] - 2.0 * loglam[:, 1:-1] + loglam[:, :-2]) / (hv * hv)
        lap[1:-1, 1:-1] = core[:, 1:-1] + lv[1:-1, :]
        resid = lap[1:-1, 1:-1] + Kg[1:-1, 1:-1] * lam2[1:-1, 1:-1]
    return float(np.max(np.abs(resid)))


# ---------------------------------------------------------------------------
# local graph extraction
# ---------------------------------------------------------------------------

@dataclass
class GraphPatch:
    """Height samples of a patch over its tangent plane at one point.

    The frame (e1, e2, up) is orthonormal with e1, e2 the principal
    directions, so f(0) = 0, grad f(0) = 0 and the Hessian at 0 is
    diagonal.  ``f[i, j]`` is the height at (xs[i], xs[j]).
    """

    center: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    up: np.ndarray
    xs: np.ndarray
    f: np.ndarray
    kappa1: float
    kappa2: float

    @property
    def spacing(self):
        return float(self.xs[1] - self.xs[0])


def local_graph(patch: SurfacePatch, u, v, radius, n=17, along=+1.0,
                newton_tol=1e-13, max_iter=40) -> GraphPatch:
    """Sample the patch as a height function over its tangent plane.

    The graph direction is ``along`` * N (pass along=-1 to measure heights
    toward the opposite side, e.g. toward a sphere's center when N points
    outward).  Points are sampled on an n x n grid over the square
    [-radius, radius]^2 in the principal frame.  Raises InjectivityError,
    reporting the largest radius whose full ring of samples projected
    injectively, when the Newton projection fails.
    """
    if n < 5 or n % 2 == 0:
        raise ValueError("n must be odd and >= 5")
    j0 = patch.jet(u, v)
    n0 = patch.normal(u, v)
    forms = fundamental_forms(patch, u, v)
    cs = curvature(forms, normal=n0)
    e1 = j0.du / math.sqrt(forms.E)
    e2 = j0.dv - (forms.F / forms.E) * j0.du
    e2 = e2 / np.linalg.norm(e2)
    up = along * n0
    p0 = j0.x

    xs = np.linspace(-radius, radius, n)
    f = np.zeros((n, n))
    # scale of parameter increments for the Newton initial guess
    su = 1.0 / math.sqrt(forms.E)
    sv = 1.0 / math.sqrt(forms.G)
    # visit points by increasing distance from the center so that, on a
    # failure, every smaller offset is known to project injectively
    idx = [(i, j) for i in range(n) for j in range(n)]
    idx.sort(key=lambda ij: math.hypot(xs[ij[0]], xs[ij[1]]))
    ok_radius = 0.0
    for i, j in idx:
        x, y = xs[i], xs[j]
        gu, gv = u + x * su, v + y * sv
        for _ in range(max_iter):
            jj = patch.jet(gu, gv)
            d = jj.x - p0
            g1 = float(d @ e1) - x
            g2 = float(d @ e2) - y
            if abs(g1) + abs(g2) < newton_tol * (1.0 + abs(x) + abs(y)):
                break
            a11, a12 = float(jj.du @ e1), float(jj.dv @ e1)
            a21, a22 = float(jj.du @ e2), float(jj.dv @ e2)
            det = a11 * a22 - a12 * a21
            if abs(det) < 1e-14:
                raise InjectivityError(
                    f"projection Jacobian degenerate near ({x:.3g},{y:.3g})",
                    max_radius=ok_radius)
            gu -= (g1 * a22 - g2 * a12) / det
            gv -= (-g1 * a21 + g2 * a11) / det
        else:
            raise InjectivityError(
                f"tangent projection did not converge at offset ({x:.3g},{y:.3g}); "
                f"shrink the radius", max_radius=ok_radius)
        f[i, j] = float((jj.x - p0) @ up)
        ok_radius = max(ok_radius, math.hypot(x, y))

    k1 = along * cs.kappa1
    k2 = along * cs.kappa2
    return GraphPatch(center=p0, e1=e1, e2=e2, up=up, xs=xs, f=f,
                      kappa1=k1, kappa2=k2)


def graph_derivatives(graph: GraphPatch):
    """Central-difference derivative grids of a graph (interior points).

    Returns (fx, fy, fxx, fxy, fyy) on the (n-2) x (n-2) interior, where
    axis 0 is x and axis 1 is y.
    """
    f = graph.f
    h = graph.spacing
    fx = (f[2:, 1:-1] - f[:-2, 1:-1]) / (2 * h)
    fy = (f[1:-1, 2:] - f[1:-1, :-2]) / (2 * h)
    fxx = (f[2:, 1:-1] - 2 * f[1:-1, 1:-1] + f[:-2, 1:-1]) / (h * h)
    fyy = (f[1:-1, 2:] - 2 * f[1:-1, 1:-1] + f[1:-1, :-2]) / (h * h)
    fxy = (f[2:, 2:] + f[:-2, :-2] - f[2:, :-2] - f[:-2, 2:]) / (4 * h * h)
    return fx, fy, fxx, fxy, fyy
