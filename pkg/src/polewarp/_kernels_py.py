"""Pure-numpy kernels; semantics mirror the compiled extension exactly.

Both implementations perform the same elementwise IEEE operations in the
same order, so results agree bit for bit and either backend can serve the
tolerance-bearing checks.
"""

import numpy as np

POLE_SNAP = 1e-12


def warp_points(points, sigma):
    """Pole-warp an (N, 3) batch of points.

    Stereographic projection from (0, 1, 0), dilation by sigma in the
    plane, inverse projection:

        xs = sigma x / (1 - y),  zs = sigma z / (1 - y),
        delta = 2 / (1 + xs^2 + zs^2),
        out = (xs delta, 1 - delta, zs delta).

    Rows within 1e-12 of the fixed point (0, 1, 0) snap to it exactly.
    Rows exactly on the singular ray (y = 1, (x, z) != 0) are the caller's
    responsibility; here they produce non-finite output.
    """
    p = np.ascontiguousarray(points, dtype=np.float64)
    x, y, z = p[:, 0], p[:, 1], p[:, 2]
    one_m_y = 1.0 - y
    with np.errstate(divide="ignore", invalid="ignore"):
        xs = sigma * x / one_m_y
        zs = sigma * z / one_m_y
        delta = 2.0 / (1.0 + (xs * xs + zs * zs))
        out = np.empty_like(p)
        out[:, 0] = xs * delta
        out[:, 1] = 1.0 - delta
        out[:, 2] = zs * delta
    snap = (np.abs(one_m_y) < POLE_SNAP) & (x * x + z * z < 4.0 * POLE_SNAP)
    if snap.any():
        out[snap] = (0.0, 1.0, 0.0)
    return out


def ray_hit_counts(vertices, triangles, directions):
    """Count triangle crossings of rays {t d : t > 0} from the origin.

    Watertight: after projecting along the dominant axis of d, a triangle
    counts iff the 2D origin lies in its closed projection (winding
    normalized to CCW) with boundary ties resolved by a lexicographic
    positive-edge rule, and the crossing parameter t is positive. Shared
    edge functions negate exactly in IEEE arithmetic, so every boundary
    crossing is counted exactly once. Triangles that project to a zero-area
    sliver (ray in the triangle plane) never count.
    """
    v = np.ascontiguousarray(vertices, dtype=np.float64)
    t = np.ascontiguousarray(triangles, dtype=np.int64)
    d = np.atleast_2d(np.asarray(directions, dtype=np.float64))
    counts = np.zeros(len(d), dtype=np.int64)
    ia, ib, ic = t[:, 0], t[:, 1], t[:, 2]
    for k in range(len(d)):
        dx, dy, dz = d[k]
        ax = int(np.argmax(np.abs(d[k])))
        if ax == 0:
            a1, a2, a3 = 1, 2, 0
        elif ax == 1:
            a1, a2, a3 = 2, 0, 1
        else:
            a1, a2, a3 = 0, 1, 2
        d1, d2, d3 = d[k][a1], d[k][a2], d[k][a3]
        u = v[:, a1] * d3 - v[:, a3] * d1
        w = v[:, a2] * d3 - v[:, a3] * d2
        h = v[:, a3]
        ua, wa, ha = u[ia], w[ia], h[ia]
        ub, wb, hb = u[ib], w[ib], h[ib]
        uc, wc, hc = u[ic], w[ic], h[ic]
        e_ab = ua * wb - wa * ub
        e_bc = ub * wc - wb * uc
        e_ca = uc * wa - wc * ua
        big_w = e_ab + e_bc + e_ca
        flip = np.where(big_w < 0.0, -1.0, 1.0)
        f_ab, f_bc, f_ca = e_ab * flip, e_bc * flip, e_ca * flip
        inside = (big_w != 0.0) & (f_ab >= 0.0) & (f_bc >= 0.0) & (f_ca >= 0.0)

        def _edge_ok(f_e, u0, w0, u1, w1):
            # boundary tie (f_e == 0): owned iff post-flip direction is
            # lexicographically positive
            g0 = (u1 - u0) * flip
            g1 = (w1 - w0) * flip
            return (f_e != 0.0) | (g0 > 0.0) | ((g0 == 0.0) & (g1 > 0.0))

        inside &= _edge_ok(f_ab, ua, wa, ub, wb)
        inside &= _edge_ok(f_bc, ub, wb, uc, wc)
        inside &= _edge_ok(f_ca, uc, wc, ua, wa)
        num = (f_bc * ha + f_ca * hb + f_ab * hc) * d3
        counts[k] = int(np.count_nonzero(inside & (num > 0.0)))
    return counts
