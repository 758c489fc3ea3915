"""Closed-form ground-plane projection for a panned, pitched-down pinhole camera.

Frames
------
Camera frame: x along the boresight, y and z parallel to the image plane.
A pixel (c, r) is measured from the image center, c along +y and r along +z,
so the ray through it is (f, c, r) in camera coordinates.

Earth frame: X and Y horizontal, Z pointing down. The camera focal point sits
at planimetric position (x0, y0) and height h above the ground, so every
ground point has Z = +h relative to the focal point.

The camera starts aligned with the earth frame, is panned by ``alpha`` about
its z axis and then pitched down by ``theta``. There is no roll.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import BehindCamera, HorizonRay

#: Guard on the ray denominator (pixels) and on the camera-frame depth.
HORIZON_EPS = 1e-9


@dataclass(frozen=True)
class CameraIntrinsics:
    """Focal length and sensor half-extents, all in pixels."""

    f: float
    half_width: float
    half_height: float

    def __post_init__(self):
        if not self.f > 0:
            raise ValueError(f"focal length must be positive, got {self.f}")
        if not (self.half_width > 0 and self.half_height > 0):
            raise ValueError("sensor half-extents must be positive")

    @classmethod
    def from_resolution(cls, f, width, height):
        return cls(float(f), width / 2.0, height / 2.0)

    def contains(self, p: "ImagePoint") -> bool:
        return bool(abs(p.c) <= self.half_width and abs(p.r) <= self.half_height)


@dataclass(frozen=True)
class CameraPose:
    """Focal-point position (m) and pan/pitch-down angles (rad)."""

    x0: float
    y0: float
    h: float
    alpha: float
    theta: float

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError(f"camera height must be positive, got {self.h}")
        if not 0.0 < self.theta <= math.pi / 2:
            raise ValueError(f"pitch-down angle must lie in (0, pi/2], got {self.theta}")
        if not -math.pi <= self.alpha < math.pi:
            raise ValueError(f"pan angle must lie in [-pi, pi), got {self.alpha}")

    @classmethod
    def from_degrees(cls, x0, y0, h, pan_deg, pitch_deg):
        alpha = math.radians(pan_deg)
        # wrap into [-pi, pi)
        alpha = (alpha + math.pi) % (2 * math.pi) - math.pi
        return cls(float(x0), float(y0), float(h), alpha, math.radians(pitch_deg))


class ImagePoint(NamedTuple):
    c: float
    r: float


class GroundPoint(NamedTuple):
    x: float
    y: float


class RayScalars(NamedTuple):
    length: float  # L, pixels
    distance: float  # D, meters
    denom: float  # sin(theta) f + cos(theta) r, pixels


def rotation_c_to_e(pose: CameraPose) -> np.ndarray:
    """Rotation taking camera-frame vectors to the earth frame."""
    return _rotation(pose.alpha, pose.theta)


def _rotation(alpha, theta):
    ca, sa = math.cos(alpha), math.sin(alpha)
    ct, st = math.cos(theta), math.sin(theta)
    return np.array(
        [
            [ct * ca, -sa, -st * ca],
            [ct * sa, ca, -st * sa],
            [st, 0.0, ct],
        ]
    )


def ray_scalars(pose: CameraPose, intr: CameraIntrinsics, p: ImagePoint) -> RayScalars:
    f, c, r = intr.f, p.c, p.r
    length = math.sqrt(f * f + c * c + r * r)
    denom = math.sin(pose.theta) * f + math.cos(pose.theta) * r
    if denom <= HORIZON_EPS:
        raise HorizonRay(f"pixel ({c}, {r}) does not intersect the ground (denom={denom:.3g})")
    return RayScalars(length, pose.h * length / denom, denom)


def project_params(x0, y0, h, alpha, theta, f, c, r) -> GroundPoint:
    """Ground point for one raw parameter set; no pose validation.

    Used directly by the sensitivity and Monte-Carlo code, which perturb
    parameters outside the ranges a :class:`CameraPose` would accept.
    """
    ca, sa = math.cos(alpha), math.sin(alpha)
    ct, st = math.cos(theta), math.sin(theta)
    denom = st * f + ct * r
    if denom <= HORIZON_EPS:
        raise HorizonRay(f"pixel ({c}, {r}) does not intersect the ground (denom={denom:.3g})")
    # D / L collapses to h / denom
    scale = h / denom
    x = (ct * ca * f - sa * c - st * ca * r) * scale
    y = (ct * sa * f + ca * c - st * sa * r) * scale
    return GroundPoint(x0 + x, y0 + y)


def image_to_ground(pose: CameraPose, intr: CameraIntrinsics, p: ImagePoint) -> GroundPoint:
    return project_params(pose.x0, pose.y0, pose.h, pose.alpha, pose.theta, intr.f, p.c, p.r)


def ground_to_image(pose: CameraPose, intr: CameraIntrinsics, g: GroundPoint) -> ImagePoint:
    """Pixel at which a ground point is imaged.

    The result may fall outside the sensor; callers check bounds with
    :meth:`CameraIntrinsics.contains`.
    """
    t = rotation_c_to_e(pose)
    xc, yc, zc = (float(v) for v in t.T @ np.array([g.x - pose.x0, g.y - pose.y0, pose.h]))
    if xc <= HORIZON_EPS:
        raise BehindCamera(f"ground point ({g.x}, {g.y}) is behind the camera")
    return ImagePoint(intr.f * yc / xc, intr.f * zc / xc)


def horizon_row(pose: CameraPose, intr: CameraIntrinsics) -> float:
    """Row offset of the horizon line; rows above it (smaller r) never hit ground."""
    if pose.theta == math.pi / 2:
        return -math.inf
    return -intr.f * math.tan(pose.theta)
