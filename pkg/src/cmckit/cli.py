"""Command-line driver.

Subcommands: generate, fit, offset, verify, symmetry, export.  Exit codes
are stable for harnesses: 0 on success, 1 when verification checks fail,
2 for usage or input errors.  Flags override config-file values, which
override defaults; identical inputs produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import checks, formats
from .contact import fit_tangent_annulus
from .delaunay import (
    DelaunaySpec,
    classify_family,
    conformal_delaunay_patch,
    first_integral,
    turning_radii,
)
from .errors import GeometryError, InfeasibleConfigurationError, InputError
from .moving_plane import PointCloud, detect_rotational_symmetry
from .offsets import OffsetPatch
from .surfaces import catenoid_patch, cylinder_patch, sphere_patch


def _parse_grid(text):
    try:
        nu, nv = text.lower().split("x")
        nu, nv = int(nu), int(nv)
    except ValueError:
        raise InputError(f"bad grid '{text}', expected NxM")
    if nu < 16 or nv < 16:
        raise InputError("grid must be at least 16 per direction")
    return nu, nv


def _parse_range(text):
    try:
        a, b = (float(x) for x in text.split(":"))
    except ValueError:
        raise InputError(f"bad range '{text}', expected a:b")
    if b <= a:
        raise InputError("range upper bound must exceed lower bound")
    return a, b


def _resolve(args, config, key, default):
    cli = getattr(args, key, None)
    if cli is not None:
        return cli
    if key in config:
        return config[key]
    return default


def _load_config(args):
    if getattr(args, "config", None):
        cfg = formats.load_json(args.config)
        if not isinstance(cfg, dict):
            raise InputError("config file must hold a JSON object")
        return cfg
    return {}


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_generate(args):
    config = _load_config(args)
    grid = _parse_grid(_resolve(args, config, "grid", "128x256"))
    out = formats.ensure_dir(_resolve(args, config, "out", "."))
    family = args.family

    if family in ("catenoid", "sphere", "cylinder"):
        scale = _resolve(args, config, "scale", 1.0)
        u_range = _parse_range(_resolve(args, config, "u_range", "-1:1"))
        patch = {"catenoid": catenoid_patch, "sphere": sphere_patch,
                 "cylinder": cylinder_patch}[family](scale, u_range)
    elif family in ("unduloid", "nodoid"):
        H = _resolve(args, config, "H", None)
        force = _resolve(args, config, "force", None)
        if H is None or force is None:
            raise InputError(f"--H and --force are required for family '{family}'")
        tag = classify_family(H, force)
        if tag != family:
            raise InputError(
                f"(H={H}, force={force}) is a {tag}, not a {family}")
        ups, downs = turning_radii(H, force)
        if ups:
            r_start, phi0 = max(ups), 0.5 * math.pi
        elif downs:
            r_start, phi0 = max(downs), -0.5 * math.pi
        else:
            raise InfeasibleConfigurationError("no turning point for these parameters")
        half = 0.5 * float(_resolve(args, config, "length", 2.0))
        patch = conformal_delaunay_patch(H, r_start, (-half, half), phi=phi0)
    else:
        raise InputError(f"unknown family '{family}'")

    verts, normals, tris, us, vs = formats.sample_mesh(patch, grid)
    formats.write_obj(os.path.join(out, f"{family}.obj"), verts, normals, tris)
    formats.write_curvature_csv(os.path.join(out, f"{family}.csv"), patch, us, vs)
    print(f"wrote {family}.obj and {family}.csv to {out}")
    return 0


def cmd_fit(args):
    config = _load_config(args)
    out = formats.ensure_dir(_resolve(args, config, "out", "."))
    H = _resolve(args, config, "H", None)
    distance = _resolve(args, config, "sphere_distance", None)
    if H is None or distance is None:
        raise InputError("--H and --sphere-distance are required")
    alpha = _resolve(args, config, "contact_angle", None)
    bracket = _resolve(args, config, "bracket", None)
    if isinstance(bracket, str):
        bracket = _parse_range(bracket)
    fx = fit_tangent_annulus(H, distance, contact_angle_target=alpha,
                             bracket=bracket)
    path = os.path.join(out, "fixture.json")
    formats.save_fixture(path, fx)
    print(f"converged: family={fx.family}, start radius={fx.start_radius:.12g}")
    print(f"wrote {path}")
    return 0


def cmd_offset(args):
    config = _load_config(args)
    out = formats.ensure_dir(_resolve(args, config, "out", "."))
    grid = _parse_grid(_resolve(args, config, "grid", "64x128"))
    rho = _resolve(args, config, "rho", 1.0)
    fx = formats.load_fixture(args.fixture)
    off = OffsetPatch(fx.patch, rho)
    verts, normals, tris, us, vs = formats.sample_mesh(off, grid, inset=0.01)
    formats.write_obj(os.path.join(out, "offset.obj"), verts, normals, tris)
    formats.write_curvature_csv(os.path.join(out, "offset.csv"), off, us, vs)
    print(f"wrote offset.obj and offset.csv to {out}")
    return 0


def cmd_verify(args):
    config = _load_config(args)
    out = formats.ensure_dir(_resolve(args, config, "out", "."))
    if not os.path.exists(args.fixture):
        raise InputError(f"fixture file not found: {args.fixture}")
    fx = formats.load_fixture(args.fixture)
    if args.case_only:
        case = checks.fixture_case(fx)
        print(case.describe())
        return 0
    rep = checks.full_report(fx, tol_pde=_resolve(args, config, "tol_pde", 1e-4))
    formats.dump_json(os.path.join(out, "report.json"), rep.to_dict())
    with open(os.path.join(out, "report.txt"), "w") as fh:
        fh.write(rep.table() + "\n")
    print(rep.table())
    if not rep.passed:
        names = ", ".join(c.name for c in rep.failing())
        print(f"FAILED checks: {names}", file=sys.stderr)
        return 1
    return 0


def cmd_symmetry(args):
    config = _load_config(args)
    out = formats.ensure_dir(_resolve(args, config, "out", "."))
    pts, normals = formats.read_cloud(args.cloud)
    cloud = PointCloud(points=pts, normals=normals)
    hint = None
    if args.axis_hint:
        vals = [float(x) for x in args.axis_hint.split(",")]
        if len(vals) != 6:
            raise InputError("--axis-hint needs 6 numbers: px,py,pz,dx,dy,dz")
        hint = (np.array(vals[:3]), np.array(vals[3:]))
    n_theta = int(_resolve(args, config, "n_theta", 32))
    res = detect_rotational_symmetry(cloud, axis_hint=hint, n_theta=n_theta)
    record = {
        "rotational": res.axis is not None,
        "residual": res.residual,
        "pitch": res.diagnostics["pitch"],
    }
    if res.axis is not None:
        record["axis_point"] = [float(x) for x in res.axis[0]]
        record["axis_direction"] = [float(x) for x in res.axis[1]]
    formats.dump_json(os.path.join(out, "axis.json"), record)
    with open(os.path.join(out, "residuals.csv"), "w") as fh:
        fh.write("theta,reflection_residual,l_touch\n")
        touches = {t.theta: t for t in res.touches}
        for th, r in zip(res.thetas, res.residuals_by_theta):
            t = touches.get(float(th))
            l_val = "" if t is None or t.l_touch is None else formats.FMT % t.l_touch
            fh.write(f"{formats.FMT % th},{formats.FMT % r},{l_val}\n")
    print("rotational" if res.axis is not None else "not rotational",
          f"(residual {res.residual:.6g})")
    return 0


def cmd_export(args):
    config = _load_config(args)
    out = formats.ensure_dir(_resolve(args, config, "out", "."))
    fx = formats.load_fixture(args.fixture)
    grid = _parse_grid(_resolve(args, config, "grid", "64x128"))
    what = args.what
    if what == "mesh":
        verts, normals, tris, us, vs = formats.sample_mesh(fx.patch, grid)
        formats.write_obj(os.path.join(out, "fixture.obj"), verts, normals, tris)
        formats.write_curvature_csv(os.path.join(out, "fixture.csv"), fx.patch, us, vs)
    elif what == "cloud":
        verts, normals, _, _, _ = formats.sample_mesh(fx.patch, grid)
        formats.write_xyz(os.path.join(out, "fixture.xyz"), verts, normals)
    elif what == "profile":
        with open(os.path.join(out, "profile.csv"), "w") as fh:
            fh.write("s,r,z,phi\n")
            for row in fx.profile.samples:
                fh.write(",".join(formats.FMT % x for x in row) + "\n")
    else:
        raise InputError(f"unknown export target '{what}'")
    print(f"exported {what} to {out}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(
        prog="cmckit",
        description="Rotational CMC surfaces: generation, tangency fitting, "
                    "offset surfaces, verification, symmetry detection.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help="output directory (default .)")
        sp.add_argument("--config", help="JSON config file with default flag values")
        sp.add_argument("--grid", help="sampling grid NxM")
        sp.add_argument("--seed", type=int, default=0,
                        help="seed recorded for perturbation experiments")

    g = sub.add_parser("generate", help="generate a surface mesh + curvature table")
    g.add_argument("--family", required=True,
                   choices=["catenoid", "sphere", "cylinder", "unduloid", "nodoid"])
    g.add_argument("--scale", type=float, help="scale/radius for closed-form families")
    g.add_argument("--u-range", dest="u_range", help="parameter range a:b")
    g.add_argument("--H", type=float, help="mean curvature (unduloid/nodoid)")
    g.add_argument("--force", type=float, help="first-integral value (unduloid/nodoid)")
    g.add_argument("--length", type=float, help="profile arclength to cover")
    common(g)
    g.set_defaults(func=cmd_generate)

    f = sub.add_parser("fit", help="fit a tangent annulus to a configuration")
    f.add_argument("--H", type=float, help="mean curvature of the annulus")
    f.add_argument("--sphere-distance", dest="sphere_distance", type=float,
                   help="center separation (two spheres) or plane-to-center height")
    f.add_argument("--contact-angle", dest="contact_angle", type=float,
                   help="constant contact angle (sphere+plane configuration)")
    f.add_argument("--bracket", help="shooting bracket lo:hi on the start radius")
    common(f)
    f.set_defaults(func=cmd_fit)

    o = sub.add_parser("offset", help="offset surface of a fitted fixture")
    o.add_argument("--fixture", required=True)
    o.add_argument("--rho", type=float, help="offset distance (default 1)")
    common(o)
    o.set_defaults(func=cmd_offset)

    v = sub.add_parser("verify", help="run the verification report on a fixture")
    v.add_argument("--fixture", required=True)
    v.add_argument("--case-only", action="store_true",
                   help="print the case classification and exit")
    v.add_argument("--tol-pde", dest="tol_pde", type=float)
    common(v)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("symmetry", help="detect a rotation axis in a point cloud")
    s.add_argument("--cloud", required=True, help=".xyz table or .obj mesh")
    s.add_argument("--axis-hint", dest="axis_hint",
                   help="px,py,pz,dx,dy,dz starting axis")
    s.add_argument("--n-theta", dest="n_theta", type=int)
    common(s)
    s.set_defaults(func=cmd_symmetry)

    e = sub.add_parser("export", help="export mesh/cloud/profile from a fixture")
    e.add_argument("--fixture", required=True)
    e.add_argument("--what", required=True, choices=["mesh", "cloud", "profile"])
    common(e)
    e.set_defaults(func=cmd_export)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        return args.func(args)
    except (InputError, InfeasibleConfigurationError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except GeometryError as e:
        print(f"geometry error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
