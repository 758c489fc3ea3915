# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops; ``_pykernels`` mirrors every function here."""
from libc.math cimport NAN, cos, sin, floor, ceil

import numpy as np

BACKEND = "cython"


def project_batch(const double[:, ::1] params, double eps):
    """Project n parameter rows (x0, y0, h, alpha, theta, f, c, r) to the ground.

    Returns ``(xy, valid)``; rows whose ray misses the ground get NaN and
    ``valid == 0``.
    """
    cdef Py_ssize_t n = params.shape[0], i
    out = np.empty((n, 2), dtype=np.float64)
    ok = np.empty(n, dtype=np.uint8)
    cdef double[:, ::1] xy = out
    cdef unsigned char[::1] valid = ok
    cdef double h, ca, sa, ct, st, f, c, r, den, scale
    with nogil:
        for i in range(n):
            h = params[i, 2]
            ca = cos(params[i, 3])
            sa = sin(params[i, 3])
            ct = cos(params[i, 4])
            st = sin(params[i, 4])
            f = params[i, 5]
            c = params[i, 6]
            r = params[i, 7]
            den = st * f + ct * r
            if den <= eps:
                xy[i, 0] = NAN
                xy[i, 1] = NAN
                valid[i] = 0
                continue
            scale = h / den
            xy[i, 0] = params[i, 0] + (ct * ca * f - sa * c - st * ca * r) * scale
            xy[i, 1] = params[i, 1] + (ct * sa * f + ca * c - st * sa * r) * scale
            valid[i] = 1
    return out, ok


cdef inline bint _inside(const double[:, ::1] hull, Py_ssize_t m, double pu, double pv) noexcept nogil:
    cdef Py_ssize_t k, k1
    for k in range(m):
        k1 = k + 1 if k + 1 < m else 0
        if (hull[k1, 0] - hull[k, 0]) * (pv - hull[k, 1]) - (hull[k1, 1] - hull[k, 1]) * (pu - hull[k, 0]) < 0.0:
            return False
    return True


def hull_coverage(long long[:, ::1] counts, const double[:, ::1] hull, double cell):
    """Add one to every cell whose center lies inside or on a CCW convex hull.

    Each row of cell centers meets the hull in one interval; its ends are
    estimated from the edge crossings and then settled with the exact
    point test, which is monotone along a row, so the result matches a
    cell-by-cell test.
    """
    cdef Py_ssize_t nrows = counts.shape[0], ncols = counts.shape[1]
    cdef Py_ssize_t m = hull.shape[0], k, k1, i, j, i0, i1, js, je
    cdef double vmin = hull[0, 1], vmax = hull[0, 1]
    cdef double pv, au, av, bu, bv, u, ulo, uhi
    cdef bint hit
    for k in range(1, m):
        vmin = min(vmin, hull[k, 1])
        vmax = max(vmax, hull[k, 1])
    i0 = <Py_ssize_t>max(0.0, ceil(vmin / cell - 0.5))
    i1 = <Py_ssize_t>min(<double>(nrows - 1), floor(vmax / cell - 0.5))
    with nogil:
        for i in range(i0, i1 + 1):
            pv = (i + 0.5) * cell
            hit = False
            ulo = 0.0
            uhi = 0.0
            for k in range(m):
                k1 = k + 1 if k + 1 < m else 0
                au = hull[k, 0]
                av = hull[k, 1]
                bu = hull[k1, 0]
                bv = hull[k1, 1]
                if av == bv or (av - pv) * (bv - pv) > 0.0:
                    continue
                u = au + (pv - av) * (bu - au) / (bv - av)
                if not hit:
                    ulo = u
                    uhi = u
                    hit = True
                else:
                    ulo = min(ulo, u)
                    uhi = max(uhi, u)
            if not hit:
                continue
            js = <Py_ssize_t>max(0.0, min(<double>ncols, ceil(ulo / cell - 0.5)))
            je = <Py_ssize_t>max(-1.0, min(<double>(ncols - 1), floor(uhi / cell - 0.5)))
            while js > 0 and _inside(hull, m, (js - 0.5) * cell, pv):
                js -= 1
            while js < ncols and js <= je + 1 and not _inside(hull, m, (js + 0.5) * cell, pv):
                js += 1
            if js >= ncols:
                continue
            if je < js:
                je = js
            while je + 1 < ncols and _inside(hull, m, (je + 1.5) * cell, pv):
                je += 1
            while je >= js and not _inside(hull, m, (je + 0.5) * cell, pv):
                je -= 1
            for j in range(js, je + 1):
                counts[i, j] += 1
