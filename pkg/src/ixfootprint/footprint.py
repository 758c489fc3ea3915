"""Ground footprints of 3D boxes and their pooled uncertainty reports."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .catalog import CameraErrorPreset
from .errors import GeometryError
from .geometry import CameraIntrinsics, CameraPose, GroundPoint, ImagePoint, ground_to_image
from .propagation import PointUncertainty, point_uncertainty


@dataclass(frozen=True)
class Box3D:
    """Object box; ``center`` is (X, Y, height above ground), ``extent`` is (length, width, height)."""

    center: tuple
    extent: tuple
    yaw: float = 0.0

    def __post_init__(self):
        if len(self.extent) != 3 or min(self.extent) <= 0:
            raise ValueError(f"box extent must be three positive lengths, got {self.extent}")


@dataclass(frozen=True)
class FootprintQuad:
    corners: tuple  # four GroundPoints, counter-clockwise

    def signed_area(self) -> float:
        pts = np.asarray(self.corners, dtype=float)
        x, y = pts[:, 0], pts[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))

    def centroid(self) -> GroundPoint:
        """Arithmetic mean of the corners (the area centroid for a parallelogram)."""
        pts = np.asarray(self.corners, dtype=float)
        return GroundPoint(*(float(v) for v in pts.mean(axis=0)))


def box_to_footprint(box: Box3D) -> FootprintQuad:
    """Bottom corners of ``box``, counter-clockwise from front-left."""
    half_l, half_w = 0.5 * box.extent[0], 0.5 * box.extent[1]
    cy, sy = math.cos(box.yaw), math.sin(box.yaw)
    local = ((half_l, half_w), (-half_l, half_w), (-half_l, -half_w), (half_l, -half_w))
    corners = tuple(
        GroundPoint(box.center[0] + cy * u - sy * v, box.center[1] + sy * u + cy * v) for u, v in local
    )
    return FootprintQuad(corners)


@dataclass(frozen=True)
class FootprintReport:
    per_corner: tuple  # PointUncertainty per corner
    corner_pixels: tuple
    largest_index: int
    center: PointUncertainty
    center_pixel: ImagePoint

    @property
    def largest_point(self):
        return self.largest_index, self.per_corner[self.largest_index].ellipse.semi_major


def footprint_uncertainty(pose: CameraPose, intr: CameraIntrinsics, preset: CameraErrorPreset,
                          quad: FootprintQuad, confidence: str = "one_sigma") -> FootprintReport:
    """Propagate camera errors to every corner and to the footprint centroid.

    Each corner is imaged with :func:`ground_to_image` and its covariance is
    propagated at that pixel. The largest point is chosen by the 1-sigma
    semi-major axis, ties going to the lowest corner index.
    """
    per_corner = []
    pixels = []
    for i, corner in enumerate(quad.corners):
        try:
            pixel = ground_to_image(pose, intr, corner)
            per_corner.append(point_uncertainty(pose, intr, preset, pixel, confidence))
        except GeometryError as exc:
            raise type(exc)(f"corner {i}: {exc}", corner=i) from exc
        pixels.append(pixel)

    # ranking uses the 1-sigma axis regardless of the reporting confidence
    scores = [pu.ellipse.semi_major / pu.ellipse.k for pu in per_corner]
    largest = max(range(len(scores)), key=lambda i: (scores[i], -i))

    centroid = quad.centroid()
    center_pixel = ground_to_image(pose, intr, centroid)
    center = point_uncertainty(pose, intr, preset, center_pixel, confidence)
    return FootprintReport(tuple(per_corner), tuple(pixels), largest, center, center_pixel)


def largest_point_report(report: FootprintReport) -> float:
    """Upper bound on the footprint's 1-sigma positional uncertainty."""
    return max(pu.ellipse.semi_major / pu.ellipse.k for pu in report.per_corner)


def center_report(report: FootprintReport):
    return report.center.ground, report.center.ellipse
