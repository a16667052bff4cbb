"""Triangulated self-intersection testing with spatial-hash pruning."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def triangulate_grid(nu, nv, periodic_v=True):
    """Triangle index array for an nu x nv parameter grid.

    Vertices are numbered i*nv + j.  With ``periodic_v`` the seam j = nv-1
    connects back to j = 0, so triangles across the seam share vertex
    indices and are recognized as adjacent.
    """
    tris = []
    jmax = nv if periodic_v else nv - 1
    for i in range(nu - 1):
        for j in range(jmax):
            j1 = (j + 1) % nv
            a = i * nv + j
            b = i * nv + j1
            c = (i + 1) * nv + j
            d = (i + 1) * nv + j1
            tris.append((a, b, c))
            tris.append((b, d, c))
    return np.asarray(tris, dtype=np.int64)


def _hash_candidates(verts, tris, cell=None):
    """Candidate triangle pairs from a uniform-grid spatial hash of AABBs."""
    P = verts[tris]                       # (m, 3, 3)
    lo = P.min(axis=1)
    hi = P.max(axis=1)
    if cell is None:
        ext = hi - lo
        cell = 2.0 * float(np.median(ext.max(axis=1)))
        if cell <= 0.0:
            cell = 1.0
    buckets = {}
    ilo = np.floor(lo / cell).astype(np.int64)
    ihi = np.floor(hi / cell).astype(np.int64)
    for t in range(len(tris)):
        for ix in range(ilo[t, 0], ihi[t, 0] + 1):
            for iy in range(ilo[t, 1], ihi[t, 1] + 1):
                for iz in range(ilo[t, 2], ihi[t, 2] + 1):
                    buckets.setdefault((ix, iy, iz), []).append(t)
    pairs = set()
    for members in buckets.values():
        if len(members) < 2:
            continue
        for a in range(len(members)):
            ta = members[a]
            for b in range(a + 1, len(members)):
                tb = members[b]
                pairs.add((ta, tb) if ta < tb else (tb, ta))
    return pairs


def _interval_on_line(d, p):
    """Intersection interval of a triangle with the plane-crossing line.

    d: (m, 3) signed distances of the vertices, not all of one sign;
    p: (m, 3) projections of the vertices onto the line direction.
    Returns (t0, t1) per row.
    """
    m = d.shape[0]
    t = np.empty((m, 2))
    for row in range(m):
        dr, pr = d[row], p[row]
        # the vertex on its own side of the plane
        pos = dr > 0
        if pos.sum() == 1:
            iso = int(np.argmax(pos))
        elif pos.sum() == 2:
            iso = int(np.argmin(pos))
        else:
            # one vertex exactly on the plane: treat it as the isolated one
            iso = int(np.argmin(np.abs(dr)))
        o1, o2 = [k for k in range(3) if k != iso]
        den1 = dr[iso] - dr[o1]
        den2 = dr[iso] - dr[o2]
        t1 = pr[iso] + (pr[o1] - pr[iso]) * (dr[iso] / den1) if den1 != 0 else pr[iso]
        t2 = pr[iso] + (pr[o2] - pr[iso]) * (dr[iso] / den2) if den2 != 0 else pr[iso]
        t[row, 0] = min(t1, t2)
        t[row, 1] = max(t1, t2)
    return t


def tri_tri_intersect(T1, T2, eps_rel=1e-12):
    """Vectorized triangle-triangle intersection (interval method).

    T1, T2: (m, 3, 3) vertex arrays.  Coplanar pairs are reported as
    non-intersecting; transversal crossings are what the self-intersection
    test is after.
    """
    T1 = np.asarray(T1, dtype=float)
    T2 = np.asarray(T2, dtype=float)
    m = T1.shape[0]
    result = np.zeros(m, dtype=bool)
    if m == 0:
        return result
    scale = max(float(np.max(np.abs(T1))), float(np.max(np.abs(T2))), 1.0)
    eps = eps_rel * scale

    n2 = np.cross(T2[:, 1] - T2[:, 0], T2[:, 2] - T2[:, 0])
    d1 = np.einsum("mij,mj->mi", T1 - T2[:, 0:1], n2)
    sep1 = np.all(d1 > eps, axis=1) | np.all(d1 < -eps, axis=1)

    n1 = np.cross(T1[:, 1] - T1[:, 0], T1[:, 2] - T1[:, 0])
    d2 = np.einsum("mij,mj->mi", T2 - T1[:, 0:1], n1)
    sep2 = np.all(d2 > eps, axis=1) | np.all(d2 < -eps, axis=1)

    coplanar = np.all(np.abs(d1) <= eps, axis=1) | np.all(np.abs(d2) <= eps, axis=1)
    active = ~(sep1 | sep2 | coplanar)
    if not np.any(active):
        return result

    idx = np.nonzero(active)[0]
    D = np.cross(n1[idx], n2[idx])
    # project on the dominant axis of D for numerical stability
    ax = np.argmax(np.abs(D), axis=1)
    rows = np.arange(len(idx))
    p1 = T1[idx][rows, :, ax]
    p2 = T2[idx][rows, :, ax]
    # zero out distances within eps so the interval endpoints stay finite
    d1a = np.where(np.abs(d1[idx]) <= eps, 0.0, d1[idx])
    d2a = np.where(np.abs(d2[idx]) <= eps, 0.0, d2[idx])
    i1 = _interval_on_line(d1a, p1)
    i2 = _interval_on_line(d2a, p2)
    overlap = (i1[:, 0] <= i2[:, 1] + eps) & (i2[:, 0] <= i1[:, 1] + eps)
    result[idx] = overlap
    return result


@dataclass
class SelfIntersection:
    found: bool
    witness: tuple | None = None    # (triangle index, triangle index)
    n_candidates: int = 0


def mesh_self_intersection(verts, tris, batch=20000) -> SelfIntersection:
    """Search a triangle mesh for non-adjacent intersecting triangle pairs.

    Pairs sharing a vertex index are skipped (grid neighbours always touch
    along their common edge); degenerate slivers are dropped up front.
    """
    verts = np.asarray(verts, dtype=float)
    tris = np.asarray(tris, dtype=np.int64)
    P = verts[tris]
    area2 = np.linalg.norm(np.cross(P[:, 1] - P[:, 0], P[:, 2] - P[:, 0]), axis=1)
    scale = float(np.max(np.abs(verts))) or 1.0
    keep = area2 > (1e-10 * scale) ** 2
    live = np.nonzero(keep)[0]
    pairs = _hash_candidates(verts, tris[live])
    vsets = [frozenset(t) for t in tris]
    cand = []
    for a, b in pairs:
        ta, tb = live[a], live[b]
        if vsets[ta] & vsets[tb]:
            continue
        cand.append((ta, tb))
    cand.sort()
    for k0 in range(0, len(cand), batch):
        chunk = cand[k0:k0 + batch]
        ia = np.array([c[0] for c in chunk])
        ib = np.array([c[1] for c in chunk])
        hit = tri_tri_intersect(verts[tris[ia]], verts[tris[ib]])
        if np.any(hit):
            w = int(np.argmax(hit))
            return SelfIntersection(True, (int(ia[w]), int(ib[w])), len(cand))
    return SelfIntersection(False, None, len(cand))
