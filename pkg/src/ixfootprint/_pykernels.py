"""Numpy implementations of the compiled kernels, same signatures and semantics."""
import math

import numpy as np

BACKEND = "numpy"


def project_batch(params, eps):
    params = np.ascontiguousarray(params, dtype=np.float64)
    x0, y0, h, alpha, theta, f, c, r = params.T
    ca, sa = np.cos(alpha), np.sin(alpha)
    ct, st = np.cos(theta), np.sin(theta)
    den = st * f + ct * r
    valid = den > eps
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(valid, h / den, np.nan)
    xy = np.empty((params.shape[0], 2))
    xy[:, 0] = x0 + (ct * ca * f - sa * c - st * ca * r) * scale
    xy[:, 1] = y0 + (ct * sa * f + ca * c - st * sa * r) * scale
    return xy, valid.astype(np.uint8)


def hull_coverage(counts, hull, cell):
    nrows, ncols = counts.shape
    hull = np.asarray(hull, dtype=np.float64)
    umin, vmin = hull.min(axis=0)
    umax, vmax = hull.max(axis=0)
    j0 = int(max(0.0, math.ceil(umin / cell - 0.5)))
    j1 = int(min(ncols - 1.0, math.floor(umax / cell - 0.5)))
    i0 = int(max(0.0, math.ceil(vmin / cell - 0.5)))
    i1 = int(min(nrows - 1.0, math.floor(vmax / cell - 0.5)))
    if i1 < i0 or j1 < j0:
        return
    pv, pu = np.meshgrid((np.arange(i0, i1 + 1) + 0.5) * cell,
                         (np.arange(j0, j1 + 1) + 0.5) * cell, indexing="ij")
    inside = np.ones(pu.shape, dtype=bool)
    nxt = np.roll(hull, -1, axis=0)
    for (au, av), (bu, bv) in zip(hull, nxt):
        inside &= (bu - au) * (pv - av) - (bv - av) * (pu - au) >= 0.0
    counts[i0:i1 + 1, j0:j1 + 1] += inside
