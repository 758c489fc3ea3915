"""Per-camera error standard deviations and the preset file format.

Preset file (JSON)::

    {
      "preset_version": 1,
      "name": "Basler1",
      "units": {"angle": "mdeg", "length": "m", "pixel": "px"},
      "sigma_f": 0.2768, "sigma_c": 0.1713, "sigma_r": 0.1314,
      "sigma_x0": 0.1061, "sigma_y0": 0.0861, "sigma_h": 0.1936,
      "sigma_alpha": 0.1524, "sigma_theta": 0.1480,
      "sigma_imaging": 0.1, "sigma_resolution": 0.01,
      "ground_sigma0": 0.0, "ground_slope": 0.0,
      "distortion_sigmas": {"k1": 5e-4, "k2": 0.0019, "p1": 3e-5, "p2": 5e-5, "k3": 0.0002}
    }

``units.angle`` is one of ``rad``, ``deg`` or ``mdeg`` (1e-3 degree) and
applies to ``sigma_alpha`` and ``sigma_theta``. Lengths must be ``m`` and
pixel quantities ``px``. Angles are always held in radians once loaded.
"""
from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import NegativeSigma, ParseError, UnitError

PRESET_VERSION = 1

#: Imaging and resolution pixel noise applied to every builtin camera.
IMAGING_SIGMA_PX = 0.1
RESOLUTION_SIGMA_PX = 0.01

ANGLE_UNITS = {"rad": 1.0, "deg": math.pi / 180.0, "mdeg": 1e-3 * math.pi / 180.0}
DISTORTION_KEYS = ("k1", "k2", "p1", "p2", "k3")

SIGMA_FIELDS = (
    "sigma_f", "sigma_c", "sigma_r",
    "sigma_x0", "sigma_y0", "sigma_h", "sigma_alpha", "sigma_theta",
    "sigma_imaging", "sigma_resolution",
    "ground_sigma0", "ground_slope",
)
ANGLE_FIELDS = ("sigma_alpha", "sigma_theta")


@dataclass(frozen=True)
class CameraErrorPreset:
    name: str
    sigma_f: float = 0.0
    sigma_c: float = 0.0
    sigma_r: float = 0.0
    sigma_x0: float = 0.0
    sigma_y0: float = 0.0
    sigma_h: float = 0.0
    sigma_alpha: float = 0.0
    sigma_theta: float = 0.0
    sigma_imaging: float = 0.0
    sigma_resolution: float = 0.0
    ground_sigma0: float = 0.0
    ground_slope: float = 0.0
    distortion_sigmas: dict = field(default_factory=dict)

    def __post_init__(self):
        for key in SIGMA_FIELDS:
            _check_sigma(key, getattr(self, key))
        for key, value in self.distortion_sigmas.items():
            _check_sigma(f"distortion_sigmas.{key}", value)

    def sigmas(self) -> dict:
        return {key: getattr(self, key) for key in SIGMA_FIELDS}

    def dominates(self, other: "CameraErrorPreset") -> bool:
        """True when every propagated sigma is at least ``other``'s."""
        return all(getattr(self, k) >= getattr(other, k) for k in SIGMA_FIELDS)


def _check_sigma(key, value):
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ParseError(f"{key} must be a number, got {value!r}")
    if not math.isfinite(value):
        raise ParseError(f"{key} must be finite, got {value!r}")
    if value < 0:
        raise NegativeSigma(f"{key} is negative ({value})")


# Intrinsic variability: sigma f, c, r (px) and distortion k1, k2, p1, p2, k3.
_INTRINSIC = {
    "Basler1": (0.2768, 0.1713, 0.1314, (5e-4, 0.0019, 3e-5, 5e-5, 0.0002)),
    "Basler2": (0.2085, 0.1486, 0.1465, (0.0004, 0.0011, 2e-5, 3e-5, 0.0009)),
    "BW-Cube1": (0.4411, 0.3031, 0.2437, (0.0004, 0.0005, 7e-5, 8e-5, 0.0005)),
    "BW-Cube2": (0.9546, 0.3075, 0.3656, (0.0001, 0.0001, 1e-5, 3e-5, 0.0003)),
    "BW-Bullet1": (0.5996, 0.4115, 0.3405, (0.001, 0.0014, 6e-5, 1e-5, 0.0009)),
    "BW-Bullet2": (0.4645, 0.416, 0.299, (0.0001, 4e-5, 5e-5, 7e-5, 0.0001)),
}

# Extrinsic variability: sigma X, Y, h (m), alpha, theta (1e-3 deg).
_EXTRINSIC = {
    "Basler1": (0.1061, 0.0861, 0.1936, 0.1524, 0.1480),
    "Basler2": (0.1106, 0.1077, 0.2483, 0.1488, 0.1354),
    "BW-Cube1": (0.4912, 0.1910, 0.8484, 0.8032, 0.7049),
    "BW-Cube2": (0.1396, 0.1103, 0.1876, 0.3311, 0.2784),
    "BW-Bullet1": (0.0802, 0.0632, 0.1744, 0.3543, 0.2558),
    "BW-Bullet2": (0.0658, 0.0588, 0.1546, 0.3123, 0.2239),
}

BUILTIN_NAMES = tuple(_INTRINSIC)


def builtin_presets() -> list[CameraErrorPreset]:
    presets = []
    mdeg = ANGLE_UNITS["mdeg"]
    for name in BUILTIN_NAMES:
        sf, sc, sr, dist = _INTRINSIC[name]
        sx, sy, sh, sa, st = _EXTRINSIC[name]
        presets.append(
            CameraErrorPreset(
                name=name,
                sigma_f=sf, sigma_c=sc, sigma_r=sr,
                sigma_x0=sx, sigma_y0=sy, sigma_h=sh,
                sigma_alpha=sa * mdeg, sigma_theta=st * mdeg,
                sigma_imaging=IMAGING_SIGMA_PX,
                sigma_resolution=RESOLUTION_SIGMA_PX,
                distortion_sigmas=dict(zip(DISTORTION_KEYS, dist)),
            )
        )
    return presets


def get_builtin(name: str) -> CameraErrorPreset:
    for preset in builtin_presets():
        if preset.name.lower() == name.lower():
            return preset
    raise KeyError(f"unknown preset {name!r}; builtins are {', '.join(BUILTIN_NAMES)}")


def scale_preset(p: CameraErrorPreset, factor: float) -> CameraErrorPreset:
    if factor < 0:
        raise NegativeSigma(f"scale factor must be non-negative, got {factor}")
    scaled = {key: getattr(p, key) * factor for key in SIGMA_FIELDS}
    dist = {k: v * factor for k, v in p.distortion_sigmas.items()}
    return dataclasses.replace(p, name=f"{p.name}x{factor:g}", distortion_sigmas=dist, **scaled)


def preset_from_dict(doc: dict) -> CameraErrorPreset:
    if not isinstance(doc, dict):
        raise ParseError("preset document must be a JSON object")
    version = doc.get("preset_version")
    if version != PRESET_VERSION:
        raise ParseError(f"unsupported preset_version {version!r}")
    if not isinstance(doc.get("name"), str):
        raise ParseError("preset needs a string 'name'")

    units = doc.get("units", {})
    if not isinstance(units, dict):
        raise ParseError("'units' must be an object")
    angle_unit = units.get("angle", "rad")
    if angle_unit not in ANGLE_UNITS:
        raise UnitError(f"unknown angle unit {angle_unit!r}")
    if units.get("length", "m") != "m":
        raise UnitError(f"unknown length unit {units['length']!r}")
    if units.get("pixel", "px") != "px":
        raise UnitError(f"unknown pixel unit {units['pixel']!r}")

    unknown = set(doc) - set(SIGMA_FIELDS) - {"preset_version", "name", "units", "distortion_sigmas"}
    if unknown:
        raise ParseError(f"unknown preset fields: {', '.join(sorted(unknown))}")

    values = {}
    for key in SIGMA_FIELDS:
        value = doc.get(key, 0.0)
        _check_sigma(key, value)
        values[key] = float(value) * ANGLE_UNITS[angle_unit] if key in ANGLE_FIELDS else float(value)

    dist = doc.get("distortion_sigmas", {})
    if not isinstance(dist, dict) or set(dist) - set(DISTORTION_KEYS):
        raise ParseError(f"distortion_sigmas must be an object with keys from {DISTORTION_KEYS}")
    return CameraErrorPreset(name=doc["name"], distortion_sigmas=dict(dist), **values)


def preset_to_dict(p: CameraErrorPreset) -> dict:
    doc = {
        "preset_version": PRESET_VERSION,
        "name": p.name,
        "units": {"angle": "rad", "length": "m", "pixel": "px"},
    }
    doc.update(p.sigmas())
    doc["distortion_sigmas"] = dict(p.distortion_sigmas)
    return doc


def load_preset(source) -> CameraErrorPreset:
    """Read a preset file. ``source`` is a path or an open text file."""
    try:
        if hasattr(source, "read"):
            doc = json.load(source)
        else:
            with open(source, encoding="utf-8") as fh:
                doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed preset file: {exc}") from exc
    return preset_from_dict(doc)


def save_preset(p: CameraErrorPreset, path) -> None:
    Path(path).write_text(json.dumps(preset_to_dict(p), indent=2) + "\n", encoding="utf-8")


def resolve_preset(spec) -> CameraErrorPreset:
    """Accept a preset object, a builtin name, a file path or an inline dict."""
    if isinstance(spec, CameraErrorPreset):
        return spec
    if isinstance(spec, dict):
        return preset_from_dict(spec)
    try:
        return get_builtin(str(spec))
    except KeyError:
        if Path(spec).is_file():
            return load_preset(spec)
        raise
