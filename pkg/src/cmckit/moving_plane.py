"""Reflection-sweep symmetry detection on sampled surfaces.

A numerical version of the Alexandrov moving-plane procedure: for planes
containing a candidate axis, sweep a parallel plane in from far away,
reflect the far side of the cloud and record the first offset at which the
reflection touches the rest of the cloud.  A rotationally symmetric cloud
touches only at offset zero for every plane angle, and every such
reflection reproduces the cloud itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.spatial import cKDTree

from .contact import PlaneCfg
from .errors import InputError


@dataclass
class PointCloud:
    points: np.ndarray
    normals: np.ndarray | None = None
    boundary: np.ndarray | None = None   # marker for boundary samples

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        if self.points.shape[1] != 3:
            raise InputError("point cloud must be (n, 3)")
        if not np.all(np.isfinite(self.points)):
            raise InputError("point cloud contains non-finite coordinates")
        if len(self.points) < 4:
            raise InputError("point cloud needs at least 4 points")
        if self.normals is not None:
            self.normals = np.asarray(self.normals, dtype=float)
        if self.boundary is not None:
            self.boundary = np.asarray(self.boundary, dtype=bool)
        self._tree = None
        self._pitch = None

    @property
    def tree(self):
        if self._tree is None:
            self._tree = cKDTree(self.points)
        return self._tree

    @property
    def pitch(self):
        """Median nearest-neighbour spacing of the samples."""
        if self._pitch is None:
            d, _ = self.tree.query(self.points, k=2)
            self._pitch = float(np.median(d[:, 1]))
        return self._pitch

    def __len__(self):
        return len(self.points)


def reflect(cloud: PointCloud, plane: PlaneCfg) -> PointCloud:
    """Mirror a cloud (and its normals) across a plane."""
    n = plane.unit_normal
    h = cloud.points @ n - plane.offset
    pts = cloud.points - 2.0 * h[:, None] * n
    nrm = None
    if cloud.normals is not None:
        nrm = cloud.normals - 2.0 * (cloud.normals @ n)[:, None] * n
    bnd = None if cloud.boundary is None else cloud.boundary.copy()
    return PointCloud(points=pts, normals=nrm, boundary=bnd)


def hausdorff(a: PointCloud, b: PointCloud) -> float:
    """Symmetric Hausdorff distance between two sampled clouds."""
    if len(a) == 0 or len(b) == 0:
        raise InputError("hausdorff needs nonempty clouds")
    d_ab, _ = b.tree.query(a.points)
    d_ba, _ = a.tree.query(b.points)
    return float(max(d_ab.max(), d_ba.max()))


@dataclass
class SweepResult:
    theta: float
    l_touch: float | None
    touch_kind: str          # "interior", "boundary" or "none"
    residual: float | None   # contact distance at the touch offset


def _axis_frame(direction):
    a = np.asarray(direction, dtype=float)
    a = a / np.linalg.norm(a)
    helper = np.array([1.0, 0.0, 0.0])
    if abs(a @ helper) > 0.9:
        helper = np.array([0.0, 1.0, 0.0])
    e1 = np.cross(helper, a)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(a, e1)
    return a, e1, e2


def sweep_first_touch(cloud: PointCloud, axis, theta, L, *, contact_tol=None,
                      collar=None, n_bisect=40) -> SweepResult:
    """First touch offset of the reflection sweep at plane angle theta.

    ``axis`` is (point, direction).  The sweep plane at offset l is normal
    to n_theta = cos(theta) e1 + sin(theta) e2 at distance l on the
    positive side of the plane through the axis.  L must clear the cloud.

    Contact at offset l means the whole reflected far part conforms to the
    cloud: the one-sided Hausdorff distance of the reflected samples of
    depth at least ``collar`` beyond the plane into the cloud is below
    ``contact_tol``.  Taking the maximum over reflected samples (rather
    than the minimum) is what makes the criterion meaningful: near the
    sweep plane the reflection always agrees with the surface to first
    order, so minima are small for every offset.  The depth collar keeps
    the freshly swept shallow cap, which conforms trivially, from
    triggering.

    The descent from L exploits that the conforming distance at offset l
    is at most twice the remaining offset gap, so Newton-style jumps of
    half the measured distance can never skip past the touch offset.
    """
    point, direction = axis
    point = np.asarray(point, dtype=float)
    _, e1, e2 = _axis_frame(direction)
    n_theta = math.cos(theta) * e1 + math.sin(theta) * e2
    h = (cloud.points - point) @ n_theta
    if contact_tol is None:
        contact_tol = 2.0 * cloud.pitch
    if collar is None:
        collar = max(4.0 * cloud.pitch, 2.0 * contact_tol)
    if float(h.max()) >= L:
        raise InputError(f"L={L} does not clear the cloud (max offset {h.max():.6g})")

    def conform_distance(l):
        src = h > l + collar
        if not np.any(src):
            return math.inf
        refl = cloud.points[src] - 2.0 * (h[src] - l)[:, None] * n_theta
        d, _ = cloud.tree.query(refl)
        return float(d.max())

    # descend from L; stop at first contact
    l = float(L)
    hi = float(L)                      # last offset known to be contact-free
    touch = None
    while True:
        d = conform_distance(l)
        if d <= contact_tol:
            touch = l
            break
        hi = l
        if l <= 0.0:
            break
        if math.isfinite(d):
            jump = max(0.5 * d - 0.25 * contact_tol, 0.25 * contact_tol)
        else:
            jump = max(collar, 0.02 * L)   # far side still empty: creep in
        l = max(l - jump, 0.0)

    if touch is None:
        return SweepResult(theta=float(theta), l_touch=None, touch_kind="none",
                           residual=None)

    lo = touch
    for _ in range(n_bisect):
        if hi - lo <= 1e-3 * contact_tol:
            break
        mid = 0.5 * (lo + hi)
        if conform_distance(mid) <= contact_tol:
            lo = mid
        else:
            hi = mid
    l_touch = lo
    res = conform_distance(l_touch)

    # classify the touch by the deepest reflected sample (the last part of
    # the cloud the sweep forces into agreement)
    kind = "interior"
    if cloud.boundary is not None and np.any(cloud.boundary):
        src = np.nonzero(h > l_touch + collar)[0]
        if len(src):
            deepest = src[np.argmax(h[src])]
            q = cloud.points[deepest] - 2.0 * (h[deepest] - l_touch) * n_theta
            _, idx = cloud.tree.query(q[None, :])
            if cloud.boundary[int(idx[0])]:
                kind = "boundary"
    return SweepResult(theta=float(theta), l_touch=float(l_touch),
                       touch_kind=kind, residual=res)


@dataclass
class SymmetryResult:
    axis: tuple | None           # (point, direction) or None
    residual: float              # max over theta of the reflection Hausdorff
    touches: list                # SweepResult per theta
    thetas: np.ndarray
    residuals_by_theta: np.ndarray
    diagnostics: dict


def _reflection_residual(cloud, point, direction, thetas):
    _, e1, e2 = _axis_frame(direction)
    out = np.empty(len(thetas))
    for i, th in enumerate(thetas):
        n_theta = math.cos(th) * e1 + math.sin(th) * e2
        h = (cloud.points - point) @ n_theta
        refl = cloud.points - 2.0 * h[:, None] * n_theta
        d, _ = cloud.tree.query(refl)
        out[i] = d.max()
    return out


def detect_rotational_symmetry(cloud: PointCloud, axis_hint=None, *,
                               n_theta=32, sym_tol=None, axis_tol=None,
                               refine=True) -> SymmetryResult:
    """Search for a rotation axis by reflection sweeps.

    Candidate axes come from the hint or from the principal axes of
    inertia; the accepted axis must keep every plane-angle reflection
    within ``sym_tol`` (default 2x sampling pitch) and every first-touch
    offset within ``axis_tol`` (default 4x pitch).  Returns the axis or
    None with the best candidate's diagnostics.
    """
    if len(cloud) < 100:
        raise InputError("need at least 100 points for symmetry detection")
    pitch = cloud.pitch
    if sym_tol is None:
        sym_tol = 2.0 * pitch
    if axis_tol is None:
        axis_tol = 4.0 * pitch
    thetas = np.pi * np.arange(n_theta) / n_theta

    centroid = cloud.points.mean(axis=0)
    candidates = []
    if axis_hint is not None:
        p, d = axis_hint
        candidates.append((np.asarray(p, dtype=float),
                           np.asarray(d, dtype=float) / np.linalg.norm(d)))
    q = cloud.points - centroid
    inertia = q.T @ q
    _, vecs = np.linalg.eigh(inertia)
    for k in range(3):
        candidates.append((centroid, vecs[:, k]))

    scale = float(np.max(np.linalg.norm(q, axis=1)))
    best = None
    for point, direction in candidates:
        res = _reflection_residual(cloud, point, direction, thetas)
        worst = float(res.max())
        if best is None or worst < best[0]:
            best = (worst, point, direction, res)
        if worst <= sym_tol:
            break

    worst, point, direction, res = best
    if worst > sym_tol and refine:
        point, direction = _refine_axis(cloud, point, direction)
        res = _reflection_residual(cloud, point, direction, thetas)
        worst = float(res.max())

    diagnostics = {"pitch": pitch, "sym_tol": sym_tol, "axis_tol": axis_tol,
                   "candidate_count": len(candidates)}
    if worst > sym_tol:
        return SymmetryResult(axis=None, residual=worst, touches=[],
                              thetas=thetas, residuals_by_theta=res,
                              diagnostics=diagnostics)

    L = 1.5 * scale
    touches = []
    for th in thetas:
        sw = sweep_first_touch(cloud, (point, direction), th, L)
        if sw.l_touch is None:
            sw = sweep_first_touch(cloud, (point, direction), th + math.pi, L)
        touches.append(sw)
    cleared = all(t.l_touch is not None and t.l_touch <= axis_tol for t in touches)
    axis = (point, direction) if cleared else None
    return SymmetryResult(axis=axis, residual=worst, touches=touches,
                          thetas=thetas, residuals_by_theta=res,
                          diagnostics=diagnostics)


def _refine_axis(cloud, point, direction, n_theta=8, n_sub=1500):
    """Local search over the 4 axis parameters on a subsampled cloud."""
    rng = np.random.RandomState(0)
    sub = cloud.points[rng.choice(len(cloud), min(n_sub, len(cloud)), replace=False)]
    subcloud = PointCloud(points=sub)
    a, e1, e2 = _axis_frame(direction)
    thetas = np.pi * np.arange(n_theta) / n_theta
    scale = float(np.max(np.linalg.norm(sub - sub.mean(axis=0), axis=1)))

    def objective(x):
        d = a + x[0] * e1 + x[1] * e2
        d /= np.linalg.norm(d)
        p = point + x[2] * e1 + x[3] * e2
        return float(_reflection_residual(subcloud, p, d, thetas).max())

    res = minimize(objective, np.zeros(4), method="Nelder-Mead",
                   options={"xatol": 1e-6 * scale, "fatol": 1e-9,
                            "maxiter": 400, "disp": False})
    x = res.x
    d = a + x[0] * e1 + x[1] * e2
    d /= np.linalg.norm(d)
    return point + x[2] * e1 + x[3] * e2, d


def axis_angle(direction_a, direction_b):
    """Unsigned angle between two axis directions (orientation-free)."""
    a = np.asarray(direction_a, dtype=float)
    b = np.asarray(direction_b, dtype=float)
    c = abs(float(a @ b)) / (np.linalg.norm(a) * np.linalg.norm(b))
    return math.acos(min(1.0, c))
