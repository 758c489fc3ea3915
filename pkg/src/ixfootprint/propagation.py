"""First-order covariance propagation, error budgets, ellipses and the Monte-Carlo check."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels
from .catalog import CameraErrorPreset
from .errors import DegenerateSamples, HorizonRay, NotPSD
from .geometry import HORIZON_EPS, CameraIntrinsics, CameraPose, GroundPoint, ImagePoint
from .sensitivity import PARAM_NAMES, ParamVector, analytic_jacobian

_INDEX = {name: i for i, name in enumerate(PARAM_NAMES)}

# (source, parameter, preset field); "ground" is resolved from the ground-plane hook.
ERROR_SOURCES = (
    ("intrinsic focal length", "f", "sigma_f"),
    ("intrinsic column", "c", "sigma_c"),
    ("intrinsic row", "r", "sigma_r"),
    ("extrinsic X", "x0", "sigma_x0"),
    ("extrinsic Y", "y0", "sigma_y0"),
    ("extrinsic height", "h", "sigma_h"),
    ("extrinsic azimuth", "alpha", "sigma_alpha"),
    ("extrinsic pitch", "theta", "sigma_theta"),
    ("ground plane height", "h", "ground"),
    ("imaging column", "c", "sigma_imaging"),
    ("imaging row", "r", "sigma_imaging"),
    ("resolution column", "c", "sigma_resolution"),
    ("resolution row", "r", "sigma_resolution"),
)

#: Scale on the 1-sigma ellipse for each confidence level (two-dof Gaussian).
CONFIDENCE_LEVELS = {"one_sigma": None, "p90": 0.90, "p95": 0.95, "p99": 0.99}


def confidence_scale(confidence: str) -> float:
    try:
        p = CONFIDENCE_LEVELS[confidence]
    except KeyError:
        raise ValueError(f"confidence must be one of {', '.join(CONFIDENCE_LEVELS)}") from None
    if p is None:
        return 1.0
    return math.sqrt(-2.0 * math.log(1.0 - p))


def ground_sigma(preset: CameraErrorPreset, distance: float) -> float:
    """Height error from ground-plane undulation, growing linearly with range."""
    return preset.ground_sigma0 + preset.ground_slope * distance


def source_sigmas(preset: CameraErrorPreset, distance: float = 0.0):
    """Yield ``(source, parameter index, sigma)`` for every error source."""
    for source, param, key in ERROR_SOURCES:
        sigma = ground_sigma(preset, distance) if key == "ground" else getattr(preset, key)
        yield source, _INDEX[param], sigma


def build_param_covariance(preset: CameraErrorPreset, distance: float = 0.0) -> np.ndarray:
    """Diagonal 8x8 parameter covariance; independent sources add in variance.

    ``distance`` is the ray length D used by the ground-plane term.
    """
    var = np.zeros(8)
    for _, idx, sigma in source_sigmas(preset, distance):
        var[idx] += sigma * sigma
    return np.diag(var)


def propagate_covariance(par: ParamVector, cov) -> np.ndarray:
    jac = analytic_jacobian(par)
    out = jac @ np.asarray(cov, dtype=float) @ jac.T
    return 0.5 * (out + out.T)


class ErrorBudgetRow(NamedTuple):
    source: str
    param_index: int
    var_x: float
    var_y: float

    @property
    def param(self):
        return PARAM_NAMES[self.param_index]


def ray_distance(par: ParamVector) -> float:
    """Focal point to ground intersection distance D for a parameter vector."""
    denom = math.sin(par.theta) * par.f + math.cos(par.theta) * par.r
    if denom <= HORIZON_EPS:
        raise HorizonRay(f"pixel ({par.c}, {par.r}) does not intersect the ground")
    return par.h * math.sqrt(par.f ** 2 + par.c ** 2 + par.r ** 2) / denom


def param_covariance_at(par: ParamVector, preset: CameraErrorPreset) -> np.ndarray:
    """Parameter covariance with the ground-plane term evaluated at this ray's D."""
    distance = ray_distance(par) if preset.ground_slope else 0.0
    return build_param_covariance(preset, distance)


def error_budget(par: ParamVector, preset: CameraErrorPreset) -> list[ErrorBudgetRow]:
    jac = analytic_jacobian(par)
    distance = ray_distance(par) if preset.ground_slope else 0.0
    rows = []
    for source, idx, sigma in source_sigmas(preset, distance):
        var = sigma * sigma
        rows.append(ErrorBudgetRow(source, idx, jac[0, idx] ** 2 * var, jac[1, idx] ** 2 * var))
    return rows


@dataclass(frozen=True)
class UncertaintyEllipse:
    center: GroundPoint
    semi_major: float
    semi_minor: float
    orientation: float  # major axis angle from +X, in [0, pi)
    k: float = 1.0

    @property
    def area(self):
        return math.pi * self.semi_major * self.semi_minor


def ellipse_from_covariance(center, gc, confidence: str = "one_sigma") -> UncertaintyEllipse:
    k = confidence_scale(confidence)
    a, c, b = float(gc[0][0]), float(gc[0][1]), float(gc[1][1])
    half_trace = 0.5 * (a + b)
    spread = math.hypot(0.5 * (a - b), c)
    lam1 = half_trace + spread
    lam2 = half_trace - spread
    if lam2 < -1e-12 * (a + b) or lam1 < 0:
        raise NotPSD(f"ground covariance is not positive semi-definite (eigenvalues {lam1}, {lam2})")
    if spread == 0.0:
        orientation = 0.0
    else:
        orientation = (0.5 * math.atan2(2.0 * c, a - b)) % math.pi
    return UncertaintyEllipse(
        GroundPoint(*center), k * math.sqrt(lam1), k * math.sqrt(max(lam2, 0.0)), orientation, k
    )


@dataclass(frozen=True)
class PointUncertainty:
    ground: GroundPoint
    covariance: np.ndarray
    ellipse: UncertaintyEllipse


def point_uncertainty(pose: CameraPose, intr: CameraIntrinsics, preset: CameraErrorPreset,
                      pixel: ImagePoint, confidence: str = "one_sigma") -> PointUncertainty:
    par = ParamVector.from_camera(pose, intr, pixel)
    gc = propagate_covariance(par, param_covariance_at(par, preset))
    ground = par.ground()
    return PointUncertainty(ground, gc, ellipse_from_covariance(ground, gc, confidence))


@dataclass(frozen=True)
class MonteCarloResult:
    mean: GroundPoint
    covariance: np.ndarray
    n_used: int
    n_rejected: int

    @property
    def rejection_fraction(self):
        return self.n_rejected / (self.n_used + self.n_rejected)


MC_BLOCK = 1 << 16
MAX_REJECTION = 0.01


def _sampling_factor(cov):
    cov = np.asarray(cov, dtype=float)
    if not np.any(cov - np.diag(np.diag(cov))):
        # per-parameter standard deviations; applied elementwise
        return np.sqrt(np.maximum(np.diag(cov), 0.0))
    w, v = np.linalg.eigh(0.5 * (cov + cov.T))
    if w.min() < -1e-12 * max(w.sum(), 0.0):
        raise NotPSD("parameter covariance is not positive semi-definite")
    return v * np.sqrt(np.maximum(w, 0.0))


def _draw_block(seed, index, count, mean, factor):
    # one counter-based stream per block of samples, independent of worker count
    bitgen = np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,)))
    z = np.random.Generator(bitgen).standard_normal((count, 8))
    draws = mean + (z * factor if factor.ndim == 1 else z @ factor.T)
    return kernels.project_batch(draws, HORIZON_EPS)


def monte_carlo_covariance(par: ParamVector, cov, n: int, seed: int, workers: int = 1) -> MonteCarloResult:
    """Sample covariance of exact projections of Gaussian parameter draws.

    Draws are split into fixed blocks of ``MC_BLOCK`` samples, each with its
    own stream keyed by (seed, block index), so results do not depend on
    ``workers``.
    """
    if n < 2:
        raise ValueError("need at least two samples")
    mean = np.array(par, dtype=float)
    factor = _sampling_factor(cov)
    blocks = [(i, min(MC_BLOCK, n - i * MC_BLOCK)) for i in range(-(-n // MC_BLOCK))]

    def run(block):
        return _draw_block(seed, block[0], block[1], mean, factor)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, blocks))
    else:
        results = [run(b) for b in blocks]

    xy = np.concatenate([r[0] for r in results])
    valid = np.concatenate([r[1] for r in results]).astype(bool)
    n_rejected = int(n - valid.sum())
    if n_rejected > MAX_REJECTION * n:
        raise DegenerateSamples(
            f"{n_rejected} of {n} draws missed the ground; the linear model is not meaningful here"
        )
    good = xy[valid]
    if good.shape[0] < 2:
        raise DegenerateSamples("fewer than two valid draws")
    sample_mean = good.mean(axis=0)
    sample_cov = np.cov(good, rowvar=False, ddof=1)
    return MonteCarloResult(GroundPoint(*sample_mean), sample_cov, int(good.shape[0]), n_rejected)


def normalized_discrepancy(analytic, sampled) -> np.ndarray:
    """Entrywise |analytic - sampled| divided by the analytic trace."""
    analytic = np.asarray(analytic, dtype=float)
    return np.abs(analytic - np.asarray(sampled, dtype=float)) / np.trace(analytic)
