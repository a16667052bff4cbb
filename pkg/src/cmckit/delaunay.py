"""Rotational constant-mean-curvature surfaces via their profile curve.

The profile (r(s), z(s)) is parametrized by arclength with tangent angle
phi, so that

    r' = cos(phi),  z' = sin(phi),  phi' = -2H - sin(phi)/r.

This sign convention reproduces the unit sphere at H = -1 with the normal
pointing away from the axis, the catenoid r = cosh(z) at H = 0, and the
radius-r0 cylinder at H = -1/(2 r0).  Along any solution the force

    F = r sin(phi) + H r^2

is conserved; (H, F) selects the member of the rotational family
(cylinder, sphere, catenoid, unduloid or nodoid).

Integration uses a fixed-step classical Runge-Kutta scheme with exact
partial-step evaluation between checkpoints.  That keeps the evaluated
profile smooth to machine precision, which the finite-difference curvature
cross-checks elsewhere in the package rely on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, IntegrationError
from .surfaces import Jet2, SurfacePatch, TWO_PI, fundamental_forms

try:
    from numba import njit
except Exception:  # pragma: no cover - numba is optional
    def njit(*args, **kwargs):
        def wrap(fn):
            return fn
        if args and callable(args[0]):
            return args[0]
        return wrap


FAMILIES = ("cylinder", "sphere", "catenoid", "unduloid", "nodoid", "plane")

DEFAULT_STEP = 1e-3
_AXIS_FLOOR_STEPS = 4.0   # truncate when r falls below this many steps


def first_integral(H, r, phi):
    return r * math.sin(phi) + H * r * r


def classify_family(H, force):
    """Family tag of the rotational CMC member with data (H, force).

    Flipping the normal maps (H, force) -> (-H, -force) and describes the
    same point set, so classification is done after normalizing to H <= 0.
    Boundary values use exact equality: force == 0 is the sphere, force ==
    -1/(4H) the cylinder.  (H, force) pairs admitting no real profile raise
    ValueError.
    """
    H = float(H)
    force = float(force)
    if not (math.isfinite(H) and math.isfinite(force)):
        raise ValueError("H and force must be finite")
    if H == 0.0:
        return "catenoid" if force != 0.0 else "plane"
    h, f = (H, force) if H < 0.0 else (-H, -force)
    f_cyl = -1.0 / (4.0 * h)
    if f == 0.0:
        return "sphere"
    if f == f_cyl:
        return "cylinder"
    if 0.0 < f < f_cyl:
        return "unduloid"
    if f < 0.0:
        return "nodoid"
    raise ValueError(
        f"(H={H}, force={force}) admits no profile: |force| exceeds 1/(4|H|)")


def turning_radii(H, force):
    """Radii where the profile tangent is vertical (sin(phi) = +-1).

    Returns (ups, downs): ascending tuples of the positive radii at which
    sin(phi) = +1 and sin(phi) = -1.  Unduloids have two entries in one of
    the tuples (neck and bulge); nodoids one in each; spheres and
    catenoids a single turning radius.
    """
    H = float(H)
    force = float(force)
    if H == 0.0:
        if force > 0.0:
            return ((force,), ())
        if force < 0.0:
            return ((), (-force,))
        return ((), ())
    disc = 1.0 + 4.0 * H * force
    if disc < 0.0:
        return ((), ())
    sq = math.sqrt(disc)
    ups = tuple(sorted(r for r in ((-1.0 + sq) / (2.0 * H), (-1.0 - sq) / (2.0 * H))
                       if r > 0.0))
    downs = tuple(sorted(r for r in ((1.0 + sq) / (2.0 * H), (1.0 - sq) / (2.0 * H))
                         if r > 0.0))
    return ups, downs


@dataclass
class DelaunaySpec:
    """Rotational CMC family member: mean curvature H and force F."""

    H: float
    force: float
    family: str = ""

    def __post_init__(self):
        tag = classify_family(self.H, self.force)
        if self.family:
            if self.family != tag:
                raise InputError(
                    f"family '{self.family}' inconsistent with (H={self.H}, "
                    f"force={self.force}): classification gives '{tag}'")
        else:
            self.family = tag


# ---------------------------------------------------------------------------
# fixed-step RK4 on the profile system (r, z, phi, U) with U' = 1/r
# ---------------------------------------------------------------------------

@njit(cache=True)
def _rk4_run(y0, H, h, n_steps, r_floor):
    """Integrate n_steps of size h from y0; stop early if r <= r_floor.

    Returns (checkpoints, n_done): checkpoints[k] is the state after k
    steps, valid for k <= n_done.
    """
    out = np.empty((n_steps + 1, 4))
    out[0] = y0
    r, z, phi, U = y0[0], y0[1], y0[2], y0[3]
    n_done = 0
    for k in range(n_steps):
        # k1
        k1r = math.cos(phi)
        k1z = math.sin(phi)
        k1p = -2.0 * H - math.sin(phi) / r
        k1u = 1.0 / r
        # k2
        r2 = r + 0.5 * h * k1r
        p2 = phi + 0.5 * h * k1p
        if r2 <= r_floor:
            break
        k2r = math.cos(p2)
        k2z = math.sin(p2)
        k2p = -2.0 * H - math.sin(p2) / r2
        k2u = 1.0 / r2
        # k3
        r3 = r + 0.5 * h * k2r
        p3 = phi + 0.5 * h * k2p
        if r3 <= r_floor:
            break
        k3r = math.cos(p3)
        k3z = math.sin(p3)
        k3p = -2.0 * H - math.sin(p3) / r3
        k3u = 1.0 / r3
        # k4
        r4 = r + h * k3r
        p4 = phi + h * k3p
        if r4 <= r_floor:
            break
        k4r = math.cos(p4)
        k4z = math.sin(p4)
        k4p = -2.0 * H - math.sin(p4) / r4
        k4u = 1.0 / r4

        rn = r + (h / 6.0) * (k1r + 2.0 * k2r + 2.0 * k3r + k4r)
        if rn <= r_floor:
            break
        r = rn
        z = z + (h / 6.0) * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)
        phi = phi + (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        U = U + (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        n_done = k + 1
        out[n_done, 0] = r
        out[n_done, 1] = z
        out[n_done, 2] = phi
        out[n_done, 3] = U
    return out, n_done


def _rk4_partial(y, H, h):
    """One RK4 step of size h from state array y (shape (..., 4)), vectorized."""
    y = np.asarray(y, dtype=float)
    r, z, phi, U = y[..., 0], y[..., 1], y[..., 2], y[..., 3]

    def rhs(rr, pp):
        return (np.cos(pp), np.sin(pp), -2.0 * H - np.sin(pp) / rr, 1.0 / rr)

    k1r, k1z, k1p, k1u = rhs(r, phi)
    k2r, k2z, k2p, k2u = rhs(r + 0.5 * h * k1r, phi + 0.5 * h * k1p)
    k3r, k3z, k3p, k3u = rhs(r + 0.5 * h * k2r, phi + 0.5 * h * k2p)
    k4r, k4z, k4p, k4u = rhs(r + h * k3r, phi + h * k3p)
    out = np.empty_like(y)
    out[..., 0] = r + (h / 6.0) * (k1r + 2 * k2r + 2 * k3r + k4r)
    out[..., 1] = z + (h / 6.0) * (k1z + 2 * k2z + 2 * k3z + k4z)
    out[..., 2] = phi + (h / 6.0) * (k1p + 2 * k2p + 2 * k3p + k4p)
    out[..., 3] = U + (h / 6.0) * (k1u + 2 * k2u + 2 * k3u + k4u)
    return out


@dataclass
class ProfileCurve:
    """Arclength profile of a rotational CMC surface.

    Checkpoints live on the uniform grid s_k = k*h for integer k in
    [k_lo, k_hi]; state(s) evaluates anywhere in between with one partial
    Runge-Kutta step, so the evaluated curve is smooth to machine
    precision.  The fourth state component U(s) = integral of ds/r is the
    conformal coordinate used by ``reparametrize_conformal``.
    """

    H: float
    force: float
    step: float
    k_lo: int
    k_hi: int
    states: np.ndarray          # shape (k_hi - k_lo + 1, 4), rows (r, z, phi, U)
    truncated_lo: bool = False
    truncated_hi: bool = False
    truncation_reason: str = ""

    @property
    def s_lo(self):
        return self.k_lo * self.step

    @property
    def s_hi(self):
        return self.k_hi * self.step

    @property
    def samples(self):
        """Checkpoint samples as an (n, 4) array of (s, r, z, phi)."""
        s = (np.arange(self.k_lo, self.k_hi + 1)) * self.step
        out = np.empty((len(s), 4))
        out[:, 0] = s
        out[:, 1:] = self.states[:, :3]
        return out

    def state(self, s):
        """(r, z, phi, U) at arclength s (scalar)."""
        return self.state_many(np.asarray([s]))[0]

    def state_many(self, s):
        s = np.asarray(s, dtype=float)
        if np.any(s < self.s_lo - 1e-12) or np.any(s > self.s_hi + 1e-12):
            raise InputError(
                f"arclength outside profile range [{self.s_lo:.6g}, {self.s_hi:.6g}]")
        k = np.floor(s / self.step).astype(int)
        k = np.clip(k, self.k_lo, self.k_hi)
        delta = s - k * self.step
        # exact checkpoint hits need no partial step (also avoids stepping
        # past the last checkpoint)
        at_node = np.abs(delta) < 1e-15
        k = np.where(~at_node & (k == self.k_hi), k - 1, k)
        delta = s - k * self.step
        base = self.states[k - self.k_lo]
        out = np.array(base, copy=True)
        todo = ~(np.abs(delta) < 1e-15)
        if np.any(todo):
            # partial steps have distinct sizes; group identical deltas
            sub = base[todo]
            dsub = delta[todo]
            res = np.empty_like(sub)
            for dval in np.unique(dsub):
                m = dsub == dval
                res[m] = _rk4_partial(sub[m], self.H, dval)
            out[todo] = res
        return out

    def rzphi(self, s):
        st = self.state(s)
        return st[0], st[1], st[2]

    def phi_prime(self, r, phi):
        return -2.0 * self.H - math.sin(phi) / r

    def first_integral_drift(self):
        r = self.states[:, 0]
        phi = self.states[:, 2]
        F = r * np.sin(phi) + self.H * r * r
        return float(np.max(np.abs(F - self.force)))

    @property
    def truncated(self):
        return self.truncated_lo or self.truncated_hi


def integrate_profile(spec: DelaunaySpec, r_start, phi_start, length,
                      *, z_start=0.0, span=None, step=DEFAULT_STEP) -> ProfileCurve:
    """Integrate the profile ODE from (r_start, phi_start) at s = 0.

    By default the curve covers [0, length]; pass ``span=(s_lo, s_hi)``
    with s_lo <= 0 <= s_hi to integrate in both directions.  The starting
    data must match spec.force to 1e-12.  If the profile reaches the axis
    (r -> 0, sphere family) it is truncated with a reason instead of
    failing.
    """
    r0 = float(r_start)
    phi0 = float(phi_start)
    if r0 <= 0.0:
        raise InputError("r_start must be positive")
    F0 = first_integral(spec.H, r0, phi0)
    if abs(F0 - spec.force) > 1e-12 * max(1.0, abs(spec.force)):
        raise InputError(
            f"(r_start, phi_start) give force {F0!r}, spec has {spec.force!r}")
    if span is None:
        span = (0.0, float(length))
    s_lo, s_hi = float(span[0]), float(span[1])
    if s_lo > 0.0 or s_hi < 0.0 or s_hi <= s_lo:
        raise InputError("span must satisfy s_lo <= 0 <= s_hi, s_lo < s_hi")
    h = float(step)
    if h <= 0.0 or not math.isfinite(h):
        raise IntegrationError("step size underflow")
    r_floor = _AXIS_FLOOR_STEPS * h

    y0 = np.array([r0, z_start, phi0, 0.0])
    n_fwd = int(round(s_hi / h))
    n_bwd = int(round(-s_lo / h))
    fwd, done_f = _rk4_run(y0, spec.H, h, n_fwd, r_floor) if n_fwd > 0 else (y0[None, :], 0)
    bwd, done_b = _rk4_run(y0, spec.H, -h, n_bwd, r_floor) if n_bwd > 0 else (y0[None, :], 0)

    states = np.vstack([bwd[1:done_b + 1][::-1], fwd[:done_f + 1]])
    prof = ProfileCurve(
        H=spec.H, force=spec.force, step=h,
        k_lo=-done_b, k_hi=done_f, states=states,
        truncated_lo=(done_b < n_bwd), truncated_hi=(done_f < n_fwd),
    )
    if prof.truncated:
        prof.truncation_reason = "profile reached the rotation axis (r -> 0)"
    return prof


# ---------------------------------------------------------------------------
# surfaces of revolution and their conformal reparametrization
# ---------------------------------------------------------------------------

def revolve(profile: ProfileCurve, t_range=None) -> SurfacePatch:
    """Revolve a profile about the z-axis: (t, v) -> (r cos v, r sin v, z).

    t is arclength along the profile.  The normal points away from the
    axis, N = (sin(phi) cos v, sin(phi) sin v, -cos(phi)).
    """
    if t_range is None:
        t_range = (profile.s_lo, profile.s_hi)
    H = profile.H

    def jet(t, v):
        r, z, phi, _ = profile.state(t)
        sp, cp = math.sin(phi), math.cos(phi)
        php = -2.0 * H - sp / r
        c, s = math.cos(v), math.sin(v)
        rpp = -sp * php   # r'' = -sin(phi) phi'
        zpp = cp * php
        return Jet2(
            x=np.array([r * c, r * s, z]),
            du=np.array([cp * c, cp * s, sp]),
            dv=np.array([-r * s, r * c, 0.0]),
            duu=np.array([rpp * c, rpp * s, zpp]),
            duv=np.array([-cp * s, cp * c, 0.0]),
            dvv=np.array([-r * c, -r * s, 0.0]),
        )

    def normal(t, v):
        phi = profile.state(t)[2]
        return np.array([math.sin(phi) * math.cos(v),
                         math.sin(phi) * math.sin(v),
                         -math.cos(phi)])

    return SurfacePatch(jet, t_range, orientation=-1.0, conformal=False,
                        name="revolved profile", normal_fn=normal,
                        profile=profile, chart={"kind": "arclength"})


def reparametrize_conformal(patch: SurfacePatch, conformal_check_tol=1e-6) -> SurfacePatch:
    """Rescale the profile coordinate so the patch becomes conformal.

    The new coordinate u satisfies du/dt = 1/r(t); it is carried along the
    profile integration as the state component U, and inverted here with a
    Newton iteration (du/dt = 1/r gives the exact derivative).  The output
    metric satisfies E = G = r^2 and F = 0, and the coordinates are
    curvature lines.
    """
    profile = patch.profile
    if profile is None or patch.chart is None or patch.chart.get("kind") != "arclength":
        raise InputError("conformal reparametrization needs a revolved-profile patch")
    H = profile.H
    t_lo, t_hi = patch.u_range
    u_lo = float(profile.state(t_lo)[3])
    u_hi = float(profile.state(t_hi)[3])

    t_nodes = np.arange(profile.k_lo, profile.k_hi + 1) * profile.step
    u_nodes = profile.states[:, 3]
    cache = {}

    def t_of_u(u):
        t = cache.get(u)
        if t is not None:
            return t
        t0 = float(np.interp(u, u_nodes, t_nodes))
        t0 = min(max(t0, profile.s_lo), profile.s_hi)
        for _ in range(60):
            st = profile.state(t0)
            err = st[3] - u
            if abs(err) < 1e-14 * max(1.0, abs(u)):
                break
            t0 = min(max(t0 - err * st[0], profile.s_lo), profile.s_hi)  # dt = -err * r
        cache[u] = t0
        return t0

    def jet(u, v):
        t = t_of_u(u)
        r, z, phi, _ = profile.state(t)
        sp, cp = math.sin(phi), math.cos(phi)
        php = -2.0 * H - sp / r
        c, s = math.cos(v), math.sin(v)
        # d/du = r d/dt; X_uu = r cos(phi) X_t + r^2 X_tt
        xt = np.array([cp * c, cp * s, sp])
        xtt = np.array([-sp * php * c, -sp * php * s, cp * php])
        return Jet2(
            x=np.array([r * c, r * s, z]),
            du=r * xt,
            dv=np.array([-r * s, r * c, 0.0]),
            duu=r * cp * xt + r * r * xtt,
            duv=r * np.array([-cp * s, cp * c, 0.0]),
            dvv=np.array([-r * c, -r * s, 0.0]),
        )

    def normal(u, v):
        phi = profile.state(t_of_u(u))[2]
        return np.array([math.sin(phi) * math.cos(v),
                         math.sin(phi) * math.sin(v),
                         -math.cos(phi)])

    out = SurfacePatch(jet, (u_lo, u_hi), orientation=-1.0, conformal=True,
                       name=patch.name + " (conformal)", normal_fn=normal,
                       profile=profile, chart={"kind": "conformal", "t_of_u": t_of_u})

    # cheap certification on a coarse grid
    worst = 0.0
    for u in np.linspace(u_lo, u_hi, 7):
        for v in np.linspace(0.0, TWO_PI, 5, endpoint=False):
            forms = fundamental_forms(out, u, v)
            worst = max(worst, abs(forms.E - forms.G) / forms.E,
                        abs(forms.F) / forms.E)
    if worst > conformal_check_tol:
        raise IntegrationError(
            f"conformal reparametrization failed certification: residual {worst:.3e}")
    return out


# ---------------------------------------------------------------------------
# convenience generators used by fixtures, tests and the CLI
# ---------------------------------------------------------------------------

def profile_from_turning_point(H, r_turn, span, *, step=DEFAULT_STEP, z_start=0.0,
                               phi=0.5 * math.pi) -> ProfileCurve:
    """Profile started at a vertical-tangent point (phi = pi/2 by default)."""
    spec = DelaunaySpec(H=H, force=first_integral(H, r_turn, phi))
    return integrate_profile(spec, r_turn, phi, None, span=span, z_start=z_start,
                             step=step)


def conformal_delaunay_patch(H, r_turn, span, *, step=DEFAULT_STEP, z_start=0.0,
                             phi=0.5 * math.pi):
    """Conformal curvature-coordinate patch of a rotational CMC piece."""
    prof = profile_from_turning_point(H, r_turn, span, step=step, z_start=z_start,
                                      phi=phi)
    if prof.truncated:
        raise IntegrationError(
            f"profile truncated before requested span: {prof.truncation_reason}")
    return reparametrize_conformal(revolve(prof))
