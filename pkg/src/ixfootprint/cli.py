"""Command-line entry point.

Exit codes: 0 success, 1 usage or configuration error, 2 geometric error
(horizon or behind-camera on a required point), 3 I/O error.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import sys

from . import calib_stats
from .catalog import resolve_preset, scale_preset
from .errors import ConfigError, FootprintUQError, GeometryError, ParseError
from .footprint import Box3D, box_to_footprint, footprint_uncertainty, largest_point_report
from .geometry import GroundPoint, ImagePoint, ground_to_image, image_to_ground, ray_scalars
from .propagation import (
    CONFIDENCE_LEVELS,
    build_param_covariance,
    ellipse_from_covariance,
    error_budget,
    monte_carlo_covariance,
    normalized_discrepancy,
    param_covariance_at,
    propagate_covariance,
    ray_distance,
)
from .scenario import default_view, emit_csv, emit_svg, load_config, run_case_study
from .sensitivity import PARAM_NAMES, ParamVector, jacobian_check

EXIT_OK, EXIT_USAGE, EXIT_GEOMETRY, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", default=argparse.SUPPRESS, help="scenario/camera/preset JSON document (default: shipped case study)")
    p.add_argument("--camera", default=argparse.SUPPRESS, help="camera name from the config (default: first camera)")
    p.add_argument("--preset", action="append", default=argparse.SUPPRESS, help="builtin preset name or preset file; repeatable")
    p.add_argument("--confidence", choices=tuple(CONFIDENCE_LEVELS), default=argparse.SUPPRESS)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    p.add_argument("--out", default=argparse.SUPPRESS, help="output path (default: stdout)")
    return p


def build_parser():
    common = _common()
    parser = _Parser(prog="ixfootprint", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def pixel_cmd(name, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("c", type=float, help="column offset from image center, px")
        p.add_argument("r", type=float, help="row offset from image center, px")
        return p

    pixel_cmd("project", "pixel to ground point")
    p = sub.add_parser("unproject", parents=[common], help="ground point to pixel")
    p.add_argument("x", type=float)
    p.add_argument("y", type=float)
    pixel_cmd("jacobian", "analytic and finite-difference Jacobian")
    pixel_cmd("propagate", "point covariance, ellipse and error budget")

    p = sub.add_parser("footprint", parents=[common], help="uncertainty of a box footprint")
    p.add_argument("--center", nargs=2, type=float, required=True, metavar=("X", "Y"))
    p.add_argument("--extent", nargs=3, type=float, default=[4.5, 1.8, 1.5], metavar=("L", "W", "H"))
    p.add_argument("--yaw-deg", type=float, default=0.0)

    p = sub.add_parser("trajectory", parents=[common], help="left-turn case study to CSV/SVG")
    p.add_argument("--report", choices=("center", "corners"), default="center")
    p.add_argument("--svg", help="also write an SVG overlay here")

    p = sub.add_parser("calib-stats", parents=[common], help="grid statistics from a correspondence file")
    p.add_argument("file")
    p.add_argument("--width", type=float, required=True)
    p.add_argument("--height", type=float, required=True)
    p.add_argument("--cell-size", type=float, default=5.0)
    p.add_argument("--coverage-out", help="write the board coverage grid here")
    p.add_argument("--summary-out", help="write the summary JSON here (default: stderr)")

    p = pixel_cmd("mc-validate", "analytic covariance against Monte Carlo")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--scale", type=float, default=1.0, help="multiply every preset sigma")
    p.add_argument("--workers", type=int, default=1)
    return parser


def _opt(args, name, default):
    return getattr(args, name, default)


def _camera(args, config):
    if not config.cameras:
        raise ConfigError("config defines no cameras")
    name = _opt(args, "camera", None)
    if name is None:
        return config.cameras[0]
    for cam in config.cameras:
        if cam.name == name:
            return cam
    raise ConfigError(f"no camera named {name!r}")


def _presets(args, config):
    try:
        if _opt(args, "preset", None):
            return [resolve_preset(p) for p in args.preset]
    except KeyError as exc:
        raise ConfigError(exc.args[0]) from None
    if not config.presets:
        raise ConfigError("no preset given and the config defines none")
    return list(config.presets)


def _mat(m):
    return [[float(v) for v in row] for row in m]


def _ellipse(e):
    return {"center": list(e.center), "semi_major": e.semi_major, "semi_minor": e.semi_minor,
            "orientation": e.orientation, "k": e.k}


def _emit(args, text):
    out = _opt(args, "out", None)
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _json(obj):
    return json.dumps(obj, indent=2) + "\n"


def cmd_project(args, config):
    cam = _camera(args, config)
    p = ImagePoint(args.c, args.r)
    g = image_to_ground(cam.pose, cam.intrinsics, p)
    rs = ray_scalars(cam.pose, cam.intrinsics, p)
    _emit(args, _json({"camera": cam.name, "x": g.x, "y": g.y, "L": rs.length, "D": rs.distance,
                       "in_frame": cam.intrinsics.contains(p)}))


def cmd_unproject(args, config):
    cam = _camera(args, config)
    p = ground_to_image(cam.pose, cam.intrinsics, GroundPoint(args.x, args.y))
    _emit(args, _json({"camera": cam.name, "c": p.c, "r": p.r, "in_frame": cam.intrinsics.contains(p)}))


def cmd_jacobian(args, config):
    cam = _camera(args, config)
    par = ParamVector.from_camera(cam.pose, cam.intrinsics, ImagePoint(args.c, args.r))
    chk = jacobian_check(par)
    _emit(args, _json({"params": list(PARAM_NAMES), "analytic": _mat(chk.analytic), "finite_difference":
                       _mat(chk.numeric), "rel_error": _mat(chk.rel_error), "tol": chk.tol,
                       "flagged": chk.flagged}))


def cmd_propagate(args, config):
    cam = _camera(args, config)
    confidence = _opt(args, "confidence", "one_sigma")
    par = ParamVector.from_camera(cam.pose, cam.intrinsics, ImagePoint(args.c, args.r))
    ground = par.ground()
    results = []
    for preset in _presets(args, config):
        gc = propagate_covariance(par, param_covariance_at(par, preset))
        results.append({
            "preset": preset.name,
            "covariance": _mat(gc),
            "ellipse": _ellipse(ellipse_from_covariance(ground, gc, confidence)),
            "budget": [{"source": row.source, "param": row.param, "var_x": row.var_x, "var_y": row.var_y}
                       for row in error_budget(par, preset)],
        })
    _emit(args, _json({"camera": cam.name, "ground": list(ground), "D": ray_distance(par),
                       "confidence": confidence, "results": results}))


def cmd_footprint(args, config):
    cam = _camera(args, config)
    confidence = _opt(args, "confidence", "one_sigma")
    box = Box3D((args.center[0], args.center[1], 0.5 * args.extent[2]), tuple(args.extent),
                math.radians(args.yaw_deg))
    quad = box_to_footprint(box)
    results = []
    for preset in _presets(args, config):
        rep = footprint_uncertainty(cam.pose, cam.intrinsics, preset, quad, confidence)
        results.append({
            "preset": preset.name,
            "corners": [{"ground": list(pu.ground), "pixel": list(px), "covariance": _mat(pu.covariance),
                         "ellipse": _ellipse(pu.ellipse)} for pu, px in zip(rep.per_corner, rep.corner_pixels)],
            "largest_point": {"corner": rep.largest_index, "semi_major_1sigma": largest_point_report(rep)},
            "center": {"ground": list(rep.center.ground), "pixel": list(rep.center_pixel),
                       "covariance": _mat(rep.center.covariance), "ellipse": _ellipse(rep.center.ellipse)},
        })
    _emit(args, _json({"camera": cam.name, "confidence": confidence, "results": results}))


def cmd_trajectory(args, config):
    if _opt(args, "preset", None):
        config = type(config)(config.cameras, tuple(_presets(args, config)), config.trajectory,
                              config.view, config.scale, config.exaggeration)
    samples, records = run_case_study(config, args.report, _opt(args, "confidence", "one_sigma"))
    _emit(args, emit_csv(records))
    if args.svg:
        view = config.view or default_view(samples, config.cameras)
        svg = emit_svg(records, view, config.scale, samples, config.cameras, config.exaggeration)
        with open(args.svg, "w", encoding="utf-8", newline="") as fh:
            fh.write(svg)


def cmd_calib_stats(args, config):
    spec = calib_stats.GridSpec(args.width, args.height, args.cell_size)
    obs = calib_stats.read_correspondences(args.file)
    grid = calib_stats.reprojection_error_grid(obs, spec)
    boards = calib_stats.boards_from_observations(obs).values()
    coverage = calib_stats.coverage_histogram(boards, spec)
    summary = {"reprojection": calib_stats.summarize(grid), "coverage": calib_stats.summarize(coverage)}

    buf = io.StringIO()
    calib_stats.write_grid(grid, buf)
    _emit(args, buf.getvalue())
    if args.coverage_out:
        with open(args.coverage_out, "w", encoding="utf-8", newline="") as fh:
            calib_stats.write_grid(coverage, fh)
    text = _json(summary)
    if args.summary_out:
        with open(args.summary_out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stderr.write(text)


def cmd_mc_validate(args, config):
    cam = _camera(args, config)
    seed = _opt(args, "seed", 0)
    par = ParamVector.from_camera(cam.pose, cam.intrinsics, ImagePoint(args.c, args.r))
    results = []
    for preset in _presets(args, config):
        if args.scale != 1.0:
            preset = scale_preset(preset, args.scale)
        distance = ray_distance(par) if preset.ground_slope else 0.0
        cov = build_param_covariance(preset, distance)
        analytic = propagate_covariance(par, cov)
        mc = monte_carlo_covariance(par, cov, args.samples, seed, workers=args.workers)
        diff = normalized_discrepancy(analytic, mc.covariance)
        results.append({
            "preset": preset.name,
            "analytic": _mat(analytic),
            "monte_carlo": _mat(mc.covariance),
            "mc_mean": list(mc.mean),
            "max_discrepancy_over_trace": float(diff.max()),
            "rejected": mc.n_rejected,
            "rejection_fraction": mc.rejection_fraction,
        })
    _emit(args, _json({"camera": cam.name, "ground": list(par.ground()), "seed": seed,
                       "samples": args.samples, "results": results}))


COMMANDS = {
    "project": cmd_project,
    "unproject": cmd_unproject,
    "jacobian": cmd_jacobian,
    "propagate": cmd_propagate,
    "footprint": cmd_footprint,
    "trajectory": cmd_trajectory,
    "calib-stats": cmd_calib_stats,
    "mc-validate": cmd_mc_validate,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = load_config(_opt(args, "config", None))
        COMMANDS[args.command](args, config)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"ixfootprint: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GeometryError as exc:
        print(f"ixfootprint: geometric error: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY
    except OSError as exc:
        print(f"ixfootprint: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, ParseError, FootprintUQError, ValueError) as exc:
        print(f"ixfootprint: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
