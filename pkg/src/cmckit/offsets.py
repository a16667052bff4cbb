"""Parallel (offset) surfaces X - rho*N and their curvature transformation.

The offset keeps the normal of the base surface, so its principal
curvatures are kappa / (1 + rho*kappa); it degenerates where
1 + rho*kappa = 0.  For a base of constant mean curvature H the rho = 1
offset is a linear Weingarten surface:

    (1 + H) K~ = (1 + 2H) H~ - H.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularOffsetError
from .surfaces import (
    CurvatureSample,
    Jet2,
    SurfacePatch,
    curvature,
    fd_jet,
    fundamental_forms,
)

EPS_SING = 1e-6          # |1 + rho*kappa| below this counts as singular
FD_CROSSCHECK_BAND = 0.1  # cross-checks stay where |1 + rho*kappa| exceeds this


def offset_curvature(kappa, rho=1.0):
    """Principal curvature of the rho-offset: kappa / (1 + rho*kappa)."""
    denom = 1.0 + rho * kappa
    if abs(denom) <= EPS_SING:
        raise SingularOffsetError(
            f"offset singular: 1 + rho*kappa = {denom:.3e} for kappa={kappa}, rho={rho}")
    return kappa / denom


class OffsetPatch(SurfacePatch):
    """The surface X - rho*N with the base normal retained.

    First derivatives come from the Weingarten map of the base
    (X~_u = X_u - rho N_u with N_u expressed in the tangent basis); second
    derivatives are central differences of those analytic first
    derivatives, which keeps them accurate near the singular circles where
    differencing raw positions would not be.
    """

    def __init__(self, base: SurfacePatch, rho: float, d2_step=1e-5):
        self.base = base
        self.rho = float(rho)
        self._d2_step = float(d2_step)
        super().__init__(
            self._jet, base.u_range, base.v_range, periodic_v=base.periodic_v,
            orientation=base.orientation, conformal=False,
            name=f"{base.name} offset(rho={rho})",
            normal_fn=base.normal, profile=getattr(base, "profile", None),
        )

    def position(self, u, v):
        j = self.base.jet(u, v)
        return j.x - self.rho * self.base.normal(u, v)

    def _first_derivs(self, u, v):
        """(position, X~_u, X~_v) from the base Weingarten map."""
        j = self.base.jet(u, v)
        n = self.base.normal(u, v)
        E = float(j.du @ j.du)
        F = float(j.du @ j.dv)
        G = float(j.dv @ j.dv)
        h11 = float(n @ j.duu)
        h12 = float(n @ j.duv)
        h22 = float(n @ j.dvv)
        det = E * G - F * F
        # Weingarten matrix A = I^-1 II; N_u = -(A00 X_u + A10 X_v), etc.
        a00 = (G * h11 - F * h12) / det
        a10 = (E * h12 - F * h11) / det
        a01 = (G * h12 - F * h22) / det
        a11 = (E * h22 - F * h12) / det
        du = j.du + self.rho * (a00 * j.du + a10 * j.dv)
        dv = j.dv + self.rho * (a01 * j.du + a11 * j.dv)
        return j.x - self.rho * n, du, dv

    def _jet(self, u, v):
        h = self._d2_step
        x0, du, dv = self._first_derivs(u, v)
        _, du_up, dv_up = self._first_derivs(u + h, v)
        _, du_um, dv_um = self._first_derivs(u - h, v)
        _, du_vp, dv_vp = self._first_derivs(u, v + h)
        _, du_vm, dv_vm = self._first_derivs(u, v - h)
        duu = (du_up - du_um) / (2.0 * h)
        dvv = (dv_vp - dv_vm) / (2.0 * h)
        # the mixed derivative is available both ways; average for symmetry
        duv = 0.5 * ((du_vp - du_vm) + (dv_up - dv_um)) / (2.0 * h)
        return Jet2(x=x0, du=du, dv=dv, duu=duu, duv=duv, dvv=dvv)


def offset(patch: SurfacePatch, rho=1.0) -> OffsetPatch:
    """Construct the rho-offset X - rho*N of a patch.

    Positive rho moves against the normal (toward the sphere centers in the
    tangency fixtures).  Construction never fails; singular points show up
    on evaluation as degenerate metrics and via ``singular_locus``.
    """
    return OffsetPatch(patch, rho)


@dataclass
class SingularPoint:
    u: float
    v: float
    which: int       # 1 or 2: which principal curvature triggers
    factor: float    # the offending 1 + rho*kappa value


def singular_locus(patch: SurfacePatch, rho, grid=(33, 16), eps=EPS_SING):
    """Grid points where the rho-offset of ``patch`` degenerates."""
    out = []
    for u in patch.u_grid(grid[0]):
        for v in patch.v_grid(grid[1]):
            cs = curvature(fundamental_forms(patch, u, v))
            f1 = 1.0 + rho * cs.kappa1
            f2 = 1.0 + rho * cs.kappa2
            if abs(f1) < eps:
                out.append(SingularPoint(float(u), float(v), 1, float(f1)))
            if abs(f2) < eps:
                out.append(SingularPoint(float(u), float(v), 2, float(f2)))
    return out


def offset_curvature_fd(off: OffsetPatch, u, v, step=1e-4) -> CurvatureSample:
    """Curvatures of an offset from finite differences of raw positions.

    Independent of both the analytic offset jets and the
    kappa/(1 + rho*kappa) law; the normal sign is matched to the base
    normal, as the offset keeps it by definition.
    """
    j = fd_jet(off.position, u, v, step=step)
    n = np.cross(j.du, j.dv)
    n /= np.linalg.norm(n)
    nb = off.base.normal(u, v)
    if float(n @ nb) < 0.0:
        n = -n
    E = float(j.du @ j.du)
    F = float(j.du @ j.dv)
    G = float(j.dv @ j.dv)
    forms_args = dict(E=E, F=F, G=G, h11=float(n @ j.duu),
                      h12=float(n @ j.duv), h22=float(n @ j.dvv))
    from .surfaces import FundForms
    return curvature(FundForms(**forms_args), normal=n)


def weingarten_residual(patch: SurfacePatch, H, grid=(24, 24), rho=1.0,
                        band=FD_CROSSCHECK_BAND, fd_step=1e-4):
    """Max residual of (1+H) K~ - (1+2H) H~ + H on the rho-offset.

    H~ and K~ come from finite-difference jets of the offset position map,
    independent of the curvature transformation law.  Points where
    |1 + rho*kappa_i| <= band are skipped (the offset is singular or too
    ill-conditioned for differencing there); if every grid point is
    skipped an error is raised.
    """
    if abs(1.0 + H) <= EPS_SING:
        raise SingularOffsetError("H = -1 is excluded (offset of a unit sphere degenerates)")
    off = OffsetPatch(patch, rho)
    worst = None
    for u in patch.u_grid(grid[0]):
        for v in patch.v_grid(grid[1]):
            cs = curvature(fundamental_forms(patch, u, v))
            if min(abs(1.0 + rho * cs.kappa1), abs(1.0 + rho * cs.kappa2)) <= band:
                continue
            ct = offset_curvature_fd(off, u, v, step=fd_step)
            res = abs((1.0 + H) * ct.K - (1.0 + 2.0 * H) * ct.H + H)
            worst = res if worst is None else max(worst, res)
    if worst is None:
        raise SingularOffsetError("no nonsingular grid points to check")
    return float(worst)
