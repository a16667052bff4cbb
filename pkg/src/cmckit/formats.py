"""File formats: OBJ meshes, curvature tables, point clouds, fixtures, reports.

All numbers are printed with 17 significant digits so that files round-trip
exactly; nothing in these writers depends on wall-clock time or dict
ordering, which keeps repeated runs byte-identical.
"""

from __future__ import annotations

import json
import math
import os

import numpy as np

from .contact import AnnulusFixture, PlaneCfg, SphereCfg
from .delaunay import (
    DelaunaySpec,
    first_integral,
    integrate_profile,
    reparametrize_conformal,
    revolve,
)
from .errors import InputError
from .intersect import triangulate_grid
from .surfaces import SurfacePatch, curvature, fundamental_forms

FMT = "%.17g"


def _fmt(x):
    return FMT % float(x)


# ---------------------------------------------------------------------------
# meshes and tables
# ---------------------------------------------------------------------------

def sample_mesh(patch: SurfacePatch, grid=(64, 128), inset=0.0):
    """(vertices, normals, triangles, us, vs) for a patch grid.

    Triangles wind counterclockwise as seen from the patch normal side.
    """
    nu, nv = grid
    us = patch.u_grid(nu, inset=inset)
    vs = patch.v_grid(nv)
    verts = np.empty((nu * nv, 3))
    normals = np.empty((nu * nv, 3))
    for i, u in enumerate(us):
        for j, v in enumerate(vs):
            k = i * nv + j
            jet = patch.jet(u, v)
            verts[k] = jet.x
            normals[k] = patch.normal(u, v)
    tris = triangulate_grid(nu, nv, periodic_v=patch.periodic_v)
    # orient triangles with the stored normals
    P = verts[tris]
    face_n = np.cross(P[:, 1] - P[:, 0], P[:, 2] - P[:, 0])
    vert_n = normals[tris].mean(axis=1)
    flip = np.einsum("ij,ij->i", face_n, vert_n) < 0.0
    tris[flip] = tris[flip][:, ::-1]
    return verts, normals, tris, us, vs


def write_obj(path, verts, normals, tris):
    with open(path, "w") as fh:
        fh.write("# cmckit mesh\n")
        for p in verts:
            fh.write(f"v {_fmt(p[0])} {_fmt(p[1])} {_fmt(p[2])}\n")
        for n in normals:
            fh.write(f"vn {_fmt(n[0])} {_fmt(n[1])} {_fmt(n[2])}\n")
        for t in tris:
            a, b, c = (int(t[0]) + 1, int(t[1]) + 1, int(t[2]) + 1)
            fh.write(f"f {a}//{a} {b}//{b} {c}//{c}\n")


def read_obj_vertices(path):
    pts = []
    with open(path) as fh:
        for line in fh:
            if line.startswith("v "):
                parts = line.split()
                pts.append([float(parts[1]), float(parts[2]), float(parts[3])])
    if not pts:
        raise InputError(f"no vertices found in {path}")
    return np.asarray(pts)


def write_curvature_csv(path, patch: SurfacePatch, us, vs):
    """Per-vertex table (u, v, x, y, z, lambda_sq, H, K, kappa1, kappa2)."""
    with open(path, "w") as fh:
        fh.write("u,v,x,y,z,lambda_sq,H,K,kappa1,kappa2\n")
        for u in us:
            for v in vs:
                forms = fundamental_forms(patch, u, v)
                cs = curvature(forms)
                p = patch.position(u, v)
                lam2 = forms.lambda_sq if forms.lambda_sq is not None else forms.E
                row = [u, v, p[0], p[1], p[2], lam2, cs.H, cs.K, cs.kappa1, cs.kappa2]
                fh.write(",".join(_fmt(x) for x in row) + "\n")


def write_xyz(path, points, normals=None):
    points = np.asarray(points, dtype=float)
    with open(path, "w") as fh:
        for i, p in enumerate(points):
            row = [p[0], p[1], p[2]]
            if normals is not None:
                row += [normals[i][0], normals[i][1], normals[i][2]]
            fh.write(" ".join(_fmt(x) for x in row) + "\n")


def read_xyz(path):
    """Whitespace-separated points; 3 columns, or 6 with normals."""
    try:
        data = np.loadtxt(path, ndmin=2)
    except (OSError, ValueError) as e:
        raise InputError(f"cannot read point cloud from {path}: {e}")
    if data.shape[1] < 3:
        raise InputError(f"{path}: need at least 3 columns, found {data.shape[1]}")
    pts = data[:, :3]
    normals = data[:, 3:6] if data.shape[1] >= 6 else None
    return pts, normals


def read_cloud(path):
    """Point cloud from a .xyz table or the vertices of an .obj mesh."""
    if str(path).lower().endswith(".obj"):
        return read_obj_vertices(path), None
    return read_xyz(path)


# ---------------------------------------------------------------------------
# JSON helpers (deterministic layout)
# ---------------------------------------------------------------------------

def dump_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read JSON from {path}: {e}")


# ---------------------------------------------------------------------------
# fixture (de)serialization
# ---------------------------------------------------------------------------

def fixture_to_dict(fx: AnnulusFixture):
    d = {
        "kind": fx.kind,
        "H": fx.H,
        "force": fx.force,
        "start_radius": fx.start_radius,
        "family": fx.family,
        "hopf_c": fx.c,
        "step": fx.step,
        "s_bounds": list(fx.s_bounds),
        "u_bounds": list(fx.u_bounds),
        "z_anchor": float(fx.profile.state(0.0)[1]),
        "spheres": [{"center": list(map(float, s.center)), "radius": s.radius}
                    for s in fx.spheres],
        "solver_trace": fx.solver_trace,
        "residuals": fx.residuals,
    }
    if fx.plane is not None:
        d["plane"] = {
            "unit_normal": list(map(float, fx.plane.unit_normal)),
            "offset": fx.plane.offset,
            "contact_angle_target": fx.plane.contact_angle_target,
        }
    return d


def fixture_from_dict(d) -> AnnulusFixture:
    """Rebuild a fixture by re-integrating its profile (no re-fitting)."""
    try:
        H = float(d["H"])
        r_w = float(d["start_radius"])
        s1, s0 = (float(x) for x in d["s_bounds"])
        step = float(d.get("step", 1e-3))
        kind = d["kind"]
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"invalid fixture record: {e}")
    pad = 0.03
    spec = DelaunaySpec(H=H, force=first_integral(H, r_w, 0.5 * math.pi))
    prof = integrate_profile(spec, r_w, 0.5 * math.pi, None,
                             span=(min(s1, 0.0) - pad, s0 + pad),
                             z_start=float(d.get("z_anchor", 0.0)), step=step)
    patch = reparametrize_conformal(revolve(prof, t_range=(s1, s0)))
    spheres = [SphereCfg(center=np.asarray(s["center"], dtype=float),
                         radius=float(s["radius"])) for s in d["spheres"]]
    plane = None
    if d.get("plane") is not None:
        p = d["plane"]
        plane = PlaneCfg(unit_normal=np.asarray(p["unit_normal"], dtype=float),
                         offset=float(p["offset"]),
                         contact_angle_target=p.get("contact_angle_target"))
    return AnnulusFixture(
        patch=patch, profile=prof, H=H, force=float(d["force"]),
        start_radius=r_w, c=float(d["hopf_c"]), kind=kind, spheres=spheres,
        plane=plane, s_bounds=(s1, s0), u_bounds=patch.u_range,
        family=d.get("family", ""), step=step,
        solver_trace=d.get("solver_trace", []),
        residuals=d.get("residuals", {}),
    )


def save_fixture(path, fx: AnnulusFixture):
    dump_json(path, fixture_to_dict(fx))


def load_fixture(path) -> AnnulusFixture:
    return fixture_from_dict(load_json(path))


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path
