"""Image-space gridding of checkerboard detections.

Two diagnostics over an externally produced calibration:

* coverage: how many boards' convex hulls cover each grid cell, using
  cell-center-in-hull membership;
* reprojection error: mean Euclidean distance between detected and
  reprojected corners, per cell of the detected position.

Correspondence files are comma-separated UTF-8 with the header
``board_id,detected_u,detected_v,reprojected_u,reprojected_v``. Pixel
coordinates are absolute, measured from the top-left corner.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from . import kernels
from .errors import DegenerateHull, ParseError

CORRESPONDENCE_HEADER = ("board_id", "detected_u", "detected_v", "reprojected_u", "reprojected_v")
GRID_HEADER = ("cell_row", "cell_col", "count", "mean_error")


class CornerObservation(NamedTuple):
    board_id: str
    detected: tuple
    reprojected: tuple

    @property
    def error(self) -> float:
        return math.hypot(self.detected[0] - self.reprojected[0], self.detected[1] - self.reprojected[1])


@dataclass(frozen=True)
class GridSpec:
    image_width: float
    image_height: float
    cell_size: float = 5.0

    def __post_init__(self):
        if self.cell_size < 1:
            raise ValueError("cell_size must be at least one pixel")
        if not (self.image_width > 0 and self.image_height > 0):
            raise ValueError("image dimensions must be positive")

    @property
    def shape(self):
        # partial cells at the right and bottom edges are kept
        return (math.ceil(self.image_height / self.cell_size), math.ceil(self.image_width / self.cell_size))


@dataclass
class GridStats:
    spec: GridSpec
    counts: np.ndarray
    mean_error: np.ndarray | None = None  # NaN marks empty cells
    out_of_bounds: list = field(default_factory=list)

    @property
    def empty(self) -> np.ndarray:
        return self.counts == 0


def convex_hull(points) -> np.ndarray:
    """Counter-clockwise hull vertices of a 2D point set."""
    pts = np.asarray(points, dtype=float)
    if pts.shape[0] < 3:
        raise DegenerateHull(f"a board needs at least 3 corners, got {pts.shape[0]}")
    try:
        hull = ConvexHull(pts)
    except QhullError as exc:
        raise DegenerateHull("board corners are collinear") from exc
    return np.ascontiguousarray(pts[hull.vertices])


def coverage_histogram(boards, spec: GridSpec) -> GridStats:
    """Count, per cell, the boards whose convex hull covers the cell center."""
    counts = np.zeros(spec.shape, dtype=np.int64)
    for board in boards:
        kernels.hull_coverage(counts, convex_hull(board), float(spec.cell_size))
    return GridStats(spec, counts)


def reprojection_error_grid(obs, spec: GridSpec) -> GridStats:
    """Per-cell mean reprojection error keyed on the detected position.

    Cells are half-open ``[i*s, (i+1)*s)``; a detection exactly on the right
    or bottom image border falls in the last cell. Observations outside the
    image are skipped and their indices collected in ``out_of_bounds``.
    """
    nrows, ncols = spec.shape
    s = spec.cell_size
    rows, cols, errs, skipped = [], [], [], []
    for k, o in enumerate(obs):
        u, v = o.detected
        if not (math.isfinite(u) and math.isfinite(v)) or not (
            0 <= u <= spec.image_width and 0 <= v <= spec.image_height
        ):
            skipped.append(k)
            continue
        rows.append(min(int(v // s), nrows - 1))
        cols.append(min(int(u // s), ncols - 1))
        errs.append(o.error)

    flat = np.asarray(rows, dtype=np.int64) * ncols + np.asarray(cols, dtype=np.int64)
    counts = np.bincount(flat, minlength=nrows * ncols).reshape(nrows, ncols)
    sums = np.bincount(flat, weights=np.asarray(errs, dtype=float), minlength=nrows * ncols).reshape(nrows, ncols)
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = np.where(counts > 0, sums / counts, np.nan)
    return GridStats(spec, counts.astype(np.int64), mean, skipped)


def summarize(stats: GridStats) -> dict:
    """Headline numbers for one grid.

    The corner region is the four blocks of a quarter of the rows by a quarter
    of the columns at the image corners; its coverage is the fraction of those
    cells with a nonzero count.
    """
    counts = stats.counts
    nrows, ncols = counts.shape
    summary = {
        "cells": int(counts.size),
        "observations": int(counts.sum()),
        "out_of_bounds": len(stats.out_of_bounds),
        "empty_fraction": float(np.mean(counts == 0)),
    }
    qr, qc = max(1, math.ceil(nrows / 4)), max(1, math.ceil(ncols / 4))
    mask = np.zeros(counts.shape, dtype=bool)
    mask[:qr, :qc] = mask[:qr, -qc:] = mask[-qr:, :qc] = mask[-qr:, -qc:] = True
    summary["corner_coverage_fraction"] = float(np.mean(counts[mask] > 0))

    if stats.mean_error is not None:
        defined = stats.mean_error[counts > 0]
        if defined.size:
            summary["max_cell_error"] = float(defined.max())
            summary["mean_cell_error"] = float(defined.mean())
            summary["global_mean_error"] = float(np.nansum(stats.mean_error * counts) / counts.sum())
        else:
            summary["max_cell_error"] = None
            summary["mean_cell_error"] = None
            summary["global_mean_error"] = None
    return summary


def read_correspondences(path) -> list[CornerObservation]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = tuple(h.strip() for h in next(reader))
        except StopIteration:
            raise ParseError(f"{path}: empty correspondence file") from None
        if header != CORRESPONDENCE_HEADER:
            raise ParseError(f"{path}: expected header {','.join(CORRESPONDENCE_HEADER)}")
        out = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 5:
                raise ParseError(f"{path}:{lineno}: expected 5 fields, got {len(row)}")
            try:
                du, dv, ru, rv = (float(x) for x in row[1:])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from None
            out.append(CornerObservation(row[0], (du, dv), (ru, rv)))
    return out


def boards_from_observations(obs) -> dict:
    """Detected corners grouped by board, in first-seen order."""
    boards = {}
    for o in obs:
        boards.setdefault(o.board_id, []).append(o.detected)
    return boards


def write_grid(stats: GridStats, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(GRID_HEADER)
    nrows, ncols = stats.counts.shape
    for i in range(nrows):
        for j in range(ncols):
            count = int(stats.counts[i, j])
            if stats.mean_error is None:
                mean = ""
            else:
                mean = repr(float(stats.mean_error[i, j])) if count else ""
            writer.writerow((i, j, count, mean))
