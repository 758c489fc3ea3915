import math
import os
import subprocess
import sys

import numpy as np
import pytest

from ixfootprint import _pykernels, kernels
from ixfootprint.calib_stats import convex_hull
from ixfootprint.errors import DegenerateHull
from ixfootprint.geometry import HORIZON_EPS, project_params

try:
    from ixfootprint import _ckernels
except ImportError:  # extension not built
    _ckernels = None

needs_ext = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")


def param_rows(rng, n):
    rows = np.empty((n, 8))
    rows[:, 0:2] = rng.uniform(-10, 10, size=(n, 2))
    rows[:, 2] = rng.uniform(3, 15, n)
    rows[:, 3] = rng.uniform(-math.pi, math.pi, n)
    rows[:, 4] = rng.uniform(0.05, 1.5, n)
    rows[:, 5] = rng.uniform(500, 2000, n)
    rows[:, 6] = rng.uniform(-0.5, 0.5, n) * rows[:, 5]
    rows[:, 7] = rng.uniform(-1.5, 0.5, n) * rows[:, 5]  # some rows land above the horizon
    return rows


def test_numpy_kernel_matches_scalar_projection(rng):
    rows = param_rows(rng, 500)
    xy, valid = _pykernels.project_batch(rows, HORIZON_EPS)
    assert 0 < valid.sum() < len(rows)
    for row, (x, y), ok in zip(rows, xy, valid):
        den = math.sin(row[4]) * row[5] + math.cos(row[4]) * row[7]
        assert bool(ok) == (den > HORIZON_EPS)
        if ok:
            g = project_params(*row)
            assert x == pytest.approx(g.x, rel=1e-12, abs=1e-12)
            assert y == pytest.approx(g.y, rel=1e-12, abs=1e-12)
        else:
            assert math.isnan(x) and math.isnan(y)


@needs_ext
def test_backends_agree_on_projection(rng):
    rows = param_rows(rng, 5000)
    xy_c, valid_c = _ckernels.project_batch(rows, HORIZON_EPS)
    xy_p, valid_p = _pykernels.project_batch(rows, HORIZON_EPS)
    np.testing.assert_array_equal(np.asarray(valid_c, dtype=bool), np.asarray(valid_p, dtype=bool))
    np.testing.assert_allclose(np.asarray(xy_c), xy_p, rtol=1e-13, atol=1e-13, equal_nan=True)


def _hull_cases(rng, n):
    for t in range(n):
        kind = t % 4
        if kind == 0:
            pts = rng.uniform(-30, 130, size=(rng.integers(3, 12), 2))
        elif kind == 1:  # vertices on cell edges
            pts = rng.integers(-4, 24, size=(rng.integers(3, 8), 2)) * 5.0
        elif kind == 2:  # vertices on cell centers
            pts = rng.integers(-4, 24, size=(rng.integers(3, 8), 2)) * 5.0 + 2.5
        else:  # slivers
            pts = rng.uniform(0, 100, size=(3, 2))
            pts[2] = 0.5 * (pts[0] + pts[1]) + rng.normal(0, 1e-3, 2)
        try:
            yield convex_hull(pts)
        except DegenerateHull:
            continue


@needs_ext
def test_backends_agree_on_coverage(rng):
    for hull in _hull_cases(rng, 2000):
        a = np.zeros((20, 23), dtype=np.int64)
        b = np.zeros((20, 23), dtype=np.int64)
        _ckernels.hull_coverage(a, hull, 5.0)
        _pykernels.hull_coverage(b, hull, 5.0)
        np.testing.assert_array_equal(a, b)


def test_pure_switch_selects_numpy():
    code = "from ixfootprint import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, IXFOOTPRINT_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


@needs_ext
def test_default_backend_is_compiled():
    if os.environ.get("IXFOOTPRINT_PURE", "") not in ("", "0"):
        pytest.skip("numpy path forced")
    assert kernels.BACKEND == "cython"
