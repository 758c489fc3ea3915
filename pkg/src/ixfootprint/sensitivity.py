"""Jacobian of the ground point with respect to the eight error parameters.

Columns follow :data:`PARAM_NAMES`. The analytic path evaluates the closed-form
partials term by term; :func:`finite_difference_jacobian` is an independent
check built only on :func:`~ixfootprint.geometry.project_params`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import HorizonRay
from .geometry import HORIZON_EPS, CameraIntrinsics, CameraPose, ImagePoint, project_params

PARAM_NAMES = ("x0", "y0", "h", "alpha", "theta", "f", "c", "r")
PARAM_UNITS = ("m", "m", "m", "rad", "rad", "px", "px", "px")


class ParamVector(NamedTuple):
    x0: float
    y0: float
    h: float
    alpha: float
    theta: float
    f: float
    c: float
    r: float

    @classmethod
    def from_camera(cls, pose: CameraPose, intr: CameraIntrinsics, p: ImagePoint) -> "ParamVector":
        return cls(pose.x0, pose.y0, pose.h, pose.alpha, pose.theta, intr.f, p.c, p.r)

    def as_array(self) -> np.ndarray:
        return np.array(self, dtype=float)

    def ground(self):
        return project_params(*self)


def analytic_jacobian(par: ParamVector) -> np.ndarray:
    """2x8 matrix of partials [dX/dpar; dY/dpar]."""
    _, _, h, alpha, theta, f, c, r = par
    ca, sa = math.cos(alpha), math.sin(alpha)
    ct, st = math.cos(theta), math.sin(theta)
    den = st * f + ct * r
    if den <= HORIZON_EPS:
        raise HorizonRay(f"pixel ({c}, {r}) does not intersect the ground (denom={den:.3g})")
    den2 = den * den
    nx = ct * ca * f - sa * c - st * ca * r
    ny = ct * sa * f + ca * c - st * sa * r
    # derivative of the denominator with respect to theta
    dden_dtheta = ct * f - st * r

    jac = np.empty((2, 8))
    jac[:, 0] = (1.0, 0.0)
    jac[:, 1] = (0.0, 1.0)
    jac[0, 2] = nx / den
    jac[1, 2] = ny / den
    jac[0, 3] = (-ct * sa * f - ca * c + st * sa * r) * h / den
    jac[1, 3] = (ct * ca * f - sa * c - st * ca * r) * h / den
    jac[0, 4] = (-st * ca * f - ct * ca * r) * h / den - nx * h * dden_dtheta / den2
    jac[1, 4] = (-st * sa * f - ct * sa * r) * h / den - ny * h * dden_dtheta / den2
    jac[0, 5] = ct * ca * h / den - nx * h * st / den2
    jac[1, 5] = ct * sa * h / den - ny * h * st / den2
    jac[0, 6] = -sa * h / den
    jac[1, 6] = ca * h / den
    jac[0, 7] = -st * ca * h / den - nx * h * ct / den2
    jac[1, 7] = -st * sa * h / den - ny * h * ct / den2
    return jac


def default_steps(par: ParamVector) -> np.ndarray:
    """Central-difference steps sized to the curvature seen by each parameter.

    f, r and theta move the ray denominator, so they step by a small fraction
    of it; c and the translations enter linearly and get steps that only need
    to beat round-off.
    """
    _, _, h, _, theta, f, c, r = par
    den = math.sin(theta) * f + math.cos(theta) * r
    length = math.sqrt(f * f + c * c + r * r)
    rel = 1e-5
    return np.array(
        [
            max(1e-6, 1e-6 * abs(par.x0)),
            max(1e-6, 1e-6 * abs(par.y0)),
            1e-3 * abs(h),  # X and Y are linear in h
            rel,
            rel * abs(den) / length,
            rel * abs(den),
            1e-2 * f,
            rel * abs(den),
        ]
    )


def finite_difference_jacobian(par: ParamVector, steps=None) -> np.ndarray:
    """Central-difference Jacobian; the x0/y0 columns are fixed to the identity."""
    steps = default_steps(par) if steps is None else np.asarray(steps, dtype=float)
    base = np.array(par, dtype=float)
    # translations are hard-coded; dropping them keeps round-off off the local part
    base[0] = base[1] = 0.0
    jac = np.zeros((2, 8))
    jac[0, 0] = 1.0
    jac[1, 1] = 1.0
    for i in range(2, 8):
        plus = base.copy()
        minus = base.copy()
        plus[i] += steps[i]
        minus[i] -= steps[i]
        gp = project_params(*plus)
        gm = project_params(*minus)
        jac[0, i] = (gp.x - gm.x) / (2 * steps[i])
        jac[1, i] = (gp.y - gm.y) / (2 * steps[i])
    return jac


@dataclass
class JacobianCheck:
    analytic: np.ndarray
    numeric: np.ndarray
    rel_error: np.ndarray
    tol: float
    flagged: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.flagged

    def max_rel_error(self):
        return float(self.rel_error.max())


def relative_discrepancy(a, b, floor=1e-12) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)
    return np.abs(a - b) / scale


def fd_noise_floor(par: ParamVector, steps=None) -> np.ndarray:
    """Round-off level of each central-difference column, shape (8,).

    Entries smaller than this cannot be resolved by differencing, so a
    relative comparison against them is meaningless.
    """
    steps = default_steps(par) if steps is None else np.asarray(steps, dtype=float)
    g = project_params(0.0, 0.0, *par[2:])
    mag = abs(g.x) + abs(g.y) + par.h
    return 4 * np.finfo(float).eps * mag / steps


def jacobian_check(par: ParamVector, tol=1e-6, analytic=None, numeric=None) -> JacobianCheck:
    """Compare analytic and finite-difference Jacobians entry by entry.

    ``analytic`` and ``numeric`` may be passed in to check a precomputed
    matrix (for instance one with a deliberately corrupted entry).
    """
    a = analytic_jacobian(par) if analytic is None else np.asarray(analytic, dtype=float)
    n = finite_difference_jacobian(par) if numeric is None else np.asarray(numeric, dtype=float)
    # below the differencing noise an entry only has to agree to that noise
    floor = np.maximum(fd_noise_floor(par) / tol, 1e-12)
    floor[:2] = 1e-12
    rel = relative_discrepancy(a, n, floor)
    flagged = [
        ("XY"[i] + "/" + PARAM_NAMES[j], float(rel[i, j]))
        for i in range(2)
        for j in range(8)
        if rel[i, j] > tol
    ]
    return JacobianCheck(a, n, rel, tol, flagged)
