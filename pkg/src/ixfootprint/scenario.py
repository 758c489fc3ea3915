"""Left-turn case study: synthetic trajectories, per-sample reports, CSV and SVG output."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, fields
from importlib import resources
from typing import NamedTuple

from .catalog import resolve_preset
from .errors import ConfigError, DegenerateView, GeometryError
from .footprint import Box3D, box_to_footprint, footprint_uncertainty
from .geometry import CameraIntrinsics, CameraPose

REPORT_TYPES = ("center", "corners")


@dataclass(frozen=True)
class TrajectorySpec:
    entry: tuple = (0.0, 0.0)
    heading: float = 0.0
    straight_in: float = 20.0
    radius: float = 10.0
    sweep: float = math.pi / 2
    straight_out: float = 20.0
    spacing: float = 2.0
    extent: tuple = (4.5, 1.8, 1.5)

    def __post_init__(self):
        if self.radius <= 0 or self.spacing <= 0:
            raise ConfigError("radius and spacing must be positive")
        if self.straight_in < 0 or self.straight_out < 0 or self.sweep < 0:
            raise ConfigError("segment lengths and sweep must be non-negative")

    @property
    def length(self):
        return self.straight_in + self.radius * self.sweep + self.straight_out


class TrajectorySample(NamedTuple):
    s: float
    box: Box3D


def pose_at(spec: TrajectorySpec, s: float):
    """Position and heading after travelling arc length ``s`` along the path."""
    x, y = spec.entry
    psi = spec.heading
    d = min(s, spec.straight_in)
    x, y = x + d * math.cos(psi), y + d * math.sin(psi)
    s -= d
    if s <= 0:
        return x, y, psi
    arc = spec.radius * spec.sweep
    d = min(s, arc)
    # turn center sits on the left of the heading
    cx, cy = x - spec.radius * math.sin(psi), y + spec.radius * math.cos(psi)
    phi = d / spec.radius
    x = cx + spec.radius * math.sin(psi + phi)
    y = cy - spec.radius * math.cos(psi + phi)
    psi += phi
    s -= d
    if s <= 0:
        return x, y, psi
    return x + s * math.cos(psi), y + s * math.sin(psi), psi


def generate_left_turn(spec: TrajectorySpec) -> list[TrajectorySample]:
    total = spec.length
    n = int(math.floor(total / spec.spacing + 1e-9))
    stations = [k * spec.spacing for k in range(n + 1)]
    if total - stations[-1] > 1e-9 * max(1.0, total):
        stations.append(total)
    height = spec.extent[2]
    samples = []
    for s in stations:
        x, y, psi = pose_at(spec, s)
        samples.append(TrajectorySample(s, Box3D((x, y, 0.5 * height), tuple(spec.extent), psi)))
    return samples


@dataclass(frozen=True)
class Camera:
    name: str
    pose: CameraPose
    intrinsics: CameraIntrinsics


@dataclass(frozen=True)
class EllipseRecord:
    s: float
    camera: str
    preset: str
    report: str  # "center" or "corner0".."corner3"
    x: float
    y: float
    visible: bool
    semi_major: float | None = None
    semi_minor: float | None = None
    orientation: float | None = None
    var_x: float | None = None
    var_y: float | None = None
    cov_xy: float | None = None


CSV_COLUMNS = tuple(f.name for f in fields(EllipseRecord))
_FLOAT_COLUMNS = ("s", "x", "y", "semi_major", "semi_minor", "orientation", "var_x", "var_y", "cov_xy")


def _record(s, cam, preset, label, ground, pu=None) -> EllipseRecord:
    if pu is None:
        return EllipseRecord(s, cam.name, preset.name, label, ground.x, ground.y, False)
    e, gc = pu.ellipse, pu.covariance
    return EllipseRecord(
        s, cam.name, preset.name, label, ground.x, ground.y, True,
        e.semi_major, e.semi_minor, e.orientation,
        float(gc[0, 0]), float(gc[1, 1]), float(gc[0, 1]),
    )


def evaluate_trajectory(samples, cameras, presets, report: str = "center",
                        confidence: str = "one_sigma") -> list[EllipseRecord]:
    """One record per (sample, camera, preset[, corner]).

    A sample is visible to a camera when every footprint corner and the
    centroid project in front of it, below the horizon and inside the sensor;
    invisible samples produce records without covariance instead of failing.
    """
    if not cameras:
        raise ConfigError("at least one camera is required")
    if not presets:
        raise ConfigError("at least one preset is required")
    if report not in REPORT_TYPES:
        raise ConfigError(f"report must be one of {REPORT_TYPES}")
    presets = [resolve_preset(p) for p in presets]

    records = []
    for sample in samples:
        quad = box_to_footprint(sample.box)
        for cam in cameras:
            for preset in presets:
                try:
                    fr = footprint_uncertainty(cam.pose, cam.intrinsics, preset, quad, confidence)
                    visible = all(cam.intrinsics.contains(p) for p in fr.corner_pixels)
                    visible = visible and cam.intrinsics.contains(fr.center_pixel)
                except GeometryError:
                    fr, visible = None, False
                if report == "center":
                    centroid = quad.centroid()
                    pu = fr.center if visible else None
                    records.append(_record(sample.s, cam, preset, "center", centroid, pu))
                else:
                    for i, corner in enumerate(quad.corners):
                        pu = fr.per_corner[i] if visible else None
                        records.append(_record(sample.s, cam, preset, f"corner{i}", corner, pu))
    return records


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def emit_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow([_fmt(getattr(rec, col)) for col in CSV_COLUMNS])
    return buf.getvalue()


def read_csv(text: str) -> list[EllipseRecord]:
    reader = csv.DictReader(io.StringIO(text))
    out = []
    for row in reader:
        values = {}
        for col in CSV_COLUMNS:
            raw = row[col]
            if col == "visible":
                values[col] = raw == "1"
            elif col in _FLOAT_COLUMNS:
                values[col] = float(raw) if raw != "" else None
            else:
                values[col] = raw
        out.append(EllipseRecord(**values))
    return out


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def emit_svg(records, view, scale: float = 10.0, trajectory=None, cameras=(), exaggeration: float = 1.0) -> str:
    """World-frame overlay of ellipses, trajectory and camera markers.

    ``view`` is ``(xmin, ymin, xmax, ymax)`` in meters; world +Y points up in
    the image. ``exaggeration`` multiplies the ellipse axes for legibility.
    """
    xmin, ymin, xmax, ymax = (float(v) for v in view)
    if not (xmax > xmin and ymax > ymin and scale > 0):
        raise DegenerateView(f"view {view} at scale {scale} has no area")
    width, height = (xmax - xmin) * scale, (ymax - ymin) * scale

    def px(x, y):
        return (x - xmin) * scale, (ymax - y) * scale

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.2f}" height="{height:.2f}" '
        f'viewBox="0 0 {width:.2f} {height:.2f}">',
        f'<rect x="0" y="0" width="{width:.2f}" height="{height:.2f}" fill="white" stroke="black"/>',
    ]
    # world axes through the origin when it is in view
    if xmin <= 0 <= xmax:
        u, _ = px(0, 0)
        out.append(f'<line x1="{u:.3f}" y1="0" x2="{u:.3f}" y2="{height:.2f}" stroke="#bbbbbb"/>')
    if ymin <= 0 <= ymax:
        _, v = px(0, 0)
        out.append(f'<line x1="0" y1="{v:.3f}" x2="{width:.2f}" y2="{v:.3f}" stroke="#bbbbbb"/>')

    if trajectory:
        pts = " ".join("{:.3f},{:.3f}".format(*px(t.box.center[0], t.box.center[1])) for t in trajectory)
        out.append(f'<polyline points="{pts}" fill="none" stroke="#555555" stroke-dasharray="4 2"/>')

    for cam in cameras:
        u, v = px(cam.pose.x0, cam.pose.y0)
        out.append(f'<circle class="camera" cx="{u:.3f}" cy="{v:.3f}" r="5" fill="black">'
                   f'<title>{cam.name}</title></circle>')

    colors = {}
    for rec in records:
        if not rec.visible:
            continue
        color = colors.setdefault((rec.camera, rec.preset), _PALETTE[len(colors) % len(_PALETTE)])
        u, v = px(rec.x, rec.y)
        rx = rec.semi_major * scale * exaggeration
        ry = rec.semi_minor * scale * exaggeration
        # screen y points down, so world counter-clockwise becomes negative rotation
        angle = -math.degrees(rec.orientation)
        out.append(
            f'<ellipse cx="{u:.3f}" cy="{v:.3f}" rx="{rx:.4f}" ry="{ry:.4f}" '
            f'transform="rotate({angle:.4f} {u:.3f} {v:.3f})" fill="none" stroke="{color}"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- configuration

def camera_from_dict(doc: dict) -> Camera:
    try:
        pose = CameraPose.from_degrees(doc.get("x0", 0.0), doc.get("y0", 0.0), doc["h"],
                                       doc["pan_deg"], doc["pitch_deg"])
        intr = CameraIntrinsics.from_resolution(doc["f"], doc["width"], doc["height"])
    except KeyError as exc:
        raise ConfigError(f"camera entry is missing {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"invalid camera entry: {exc}") from None
    return Camera(doc.get("name", "camera"), pose, intr)


def trajectory_from_dict(doc: dict) -> TrajectorySpec:
    doc = dict(doc)
    if "heading_deg" in doc:
        doc["heading"] = math.radians(doc.pop("heading_deg"))
    if "sweep_deg" in doc:
        doc["sweep"] = math.radians(doc.pop("sweep_deg"))
    allowed = {f.name for f in fields(TrajectorySpec)}
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigError(f"unknown trajectory keys: {', '.join(sorted(unknown))}")
    for key in ("entry", "extent"):
        if key in doc:
            doc[key] = tuple(float(v) for v in doc[key])
    return TrajectorySpec(**doc)


@dataclass(frozen=True)
class ScenarioConfig:
    cameras: tuple
    presets: tuple
    trajectory: TrajectorySpec
    view: tuple | None = None
    scale: float = 10.0
    exaggeration: float = 1.0


def config_from_dict(doc: dict) -> ScenarioConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    cameras = tuple(camera_from_dict(c) for c in doc.get("cameras", ()))
    try:
        presets = tuple(resolve_preset(p) for p in doc.get("presets", ()))
    except (KeyError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    svg = doc.get("svg", {})
    view = tuple(svg["view"]) if "view" in svg else None
    return ScenarioConfig(
        cameras, presets, trajectory_from_dict(doc.get("trajectory", {})),
        view, float(svg.get("scale", 10.0)), float(svg.get("exaggeration", 1.0)),
    )


def load_config(path=None) -> ScenarioConfig:
    """Read a scenario document; without a path the shipped case study is used."""
    try:
        if path is None:
            text = resources.files("ixfootprint").joinpath("data/case_study.json").read_text(encoding="utf-8")
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    return config_from_dict(doc)


def default_view(samples, cameras, margin: float = 5.0):
    xs = [t.box.center[0] for t in samples] + [c.pose.x0 for c in cameras]
    ys = [t.box.center[1] for t in samples] + [c.pose.y0 for c in cameras]
    return (min(xs) - margin, min(ys) - margin, max(xs) + margin, max(ys) + margin)


def run_case_study(config: ScenarioConfig, report: str = "center", confidence: str = "one_sigma"):
    samples = generate_left_turn(config.trajectory)
    records = evaluate_trajectory(samples, config.cameras, config.presets, report, confidence)
    return samples, records
