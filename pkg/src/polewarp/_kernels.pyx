# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: batch pole warp and watertight ray-hit counting.

Mirrors polewarp._kernels_py operation for operation; see that module for
the algorithm notes. Keep the arithmetic order in sync so the two backends
stay bit-identical.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()

cdef double POLE_SNAP = 1e-12


def warp_points(points, double sigma):
    """Pole-warp an (N, 3) batch; see _kernels_py.warp_points."""
    cdef const double[:, ::1] p = np.ascontiguousarray(points, dtype=np.float64)
    cdef Py_ssize_t n = p.shape[0]
    out_arr = np.empty((n, 3), dtype=np.float64)
    cdef double[:, ::1] o = out_arr
    cdef Py_ssize_t i
    cdef double x, y, z, one_m_y, xs, zs, delta
    with nogil:
        for i in range(n):
            x = p[i, 0]
            y = p[i, 1]
            z = p[i, 2]
            one_m_y = 1.0 - y
            if fabs(one_m_y) < POLE_SNAP and x * x + z * z < 4.0 * POLE_SNAP:
                o[i, 0] = 0.0
                o[i, 1] = 1.0
                o[i, 2] = 0.0
                continue
            xs = sigma * x / one_m_y
            zs = sigma * z / one_m_y
            delta = 2.0 / (1.0 + (xs * xs + zs * zs))
            o[i, 0] = xs * delta
            o[i, 1] = 1.0 - delta
            o[i, 2] = zs * delta
    return out_arr


cdef inline bint _edge_ok(double f_e, double g0, double g1) nogil:
    # boundary tie (f_e == 0): owned iff direction lexicographically positive
    if f_e != 0.0:
        return True
    if g0 > 0.0:
        return True
    return g0 == 0.0 and g1 > 0.0


def ray_hit_counts(vertices, triangles, directions):
    """Count crossings of origin rays; see _kernels_py.ray_hit_counts."""
    cdef const double[:, ::1] v = np.ascontiguousarray(vertices, dtype=np.float64)
    cdef const long long[:, ::1] t = np.ascontiguousarray(triangles, dtype=np.int64)
    d_arr = np.atleast_2d(np.asarray(directions, dtype=np.float64))
    cdef const double[:, ::1] d = np.ascontiguousarray(d_arr, dtype=np.float64)
    counts_arr = np.zeros(d.shape[0], dtype=np.int64)
    cdef long long[::1] counts = counts_arr
    cdef Py_ssize_t nt = t.shape[0]
    cdef Py_ssize_t k, j
    cdef int a1, a2, a3
    cdef long long ia, ib, ic, hits
    cdef double dx, dy, dz, d1, d2, d3
    cdef double ua, wa, ha, ub, wb, hb, uc, wc, hc
    cdef double e_ab, e_bc, e_ca, big_w, flip, f_ab, f_bc, f_ca, num
    with nogil:
        for k in range(d.shape[0]):
            dx = d[k, 0]
            dy = d[k, 1]
            dz = d[k, 2]
            # dominant axis, first index on ties (matches np.argmax)
            if fabs(dx) >= fabs(dy) and fabs(dx) >= fabs(dz):
                a1, a2, a3 = 1, 2, 0
            elif fabs(dy) >= fabs(dz):
                a1, a2, a3 = 2, 0, 1
            else:
                a1, a2, a3 = 0, 1, 2
            d1 = d[k, a1]
            d2 = d[k, a2]
            d3 = d[k, a3]
            hits = 0
            for j in range(nt):
                ia = t[j, 0]
                ib = t[j, 1]
                ic = t[j, 2]
                ua = v[ia, a1] * d3 - v[ia, a3] * d1
                wa = v[ia, a2] * d3 - v[ia, a3] * d2
                ha = v[ia, a3]
                ub = v[ib, a1] * d3 - v[ib, a3] * d1
                wb = v[ib, a2] * d3 - v[ib, a3] * d2
                hb = v[ib, a3]
                uc = v[ic, a1] * d3 - v[ic, a3] * d1
                wc = v[ic, a2] * d3 - v[ic, a3] * d2
                hc = v[ic, a3]
                e_ab = ua * wb - wa * ub
                e_bc = ub * wc - wb * uc
                e_ca = uc * wa - wc * ua
                big_w = e_ab + e_bc + e_ca
                if big_w == 0.0:
                    continue
                flip = -1.0 if big_w < 0.0 else 1.0
                f_ab = e_ab * flip
                f_bc = e_bc * flip
                f_ca = e_ca * flip
                if f_ab < 0.0 or f_bc < 0.0 or f_ca < 0.0:
                    continue
                if not _edge_ok(f_ab, (ub - ua) * flip, (wb - wa) * flip):
                    continue
                if not _edge_ok(f_bc, (uc - ub) * flip, (wc - wb) * flip):
                    continue
                if not _edge_ok(f_ca, (ua - uc) * flip, (wa - wc) * flip):
                    continue
                num = (f_bc * ha + f_ca * hb + f_ab * hc) * d3
                if num > 0.0:
                    hits += 1
            counts[k] = hits
    return counts_arr
