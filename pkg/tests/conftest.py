import math
from pathlib import Path

import numpy as np
import pytest

from ixfootprint.geometry import CameraIntrinsics, CameraPose, ImagePoint
from ixfootprint.sensitivity import ParamVector

FIXTURES = Path(__file__).parent / "fixtures"

# h = 6 m, pitch 30 deg, pan 20 deg, f = 1200 px, pixel (150, 80)
CASE_PAR = ParamVector(0.0, 0.0, 6.0, math.radians(20), math.radians(30), 1200.0, 150.0, 80.0)


def random_par(rng, x0=0.0, y0=0.0):
    """Draw a valid configuration from the ranges used by the Jacobian checks."""
    while True:
        h = rng.uniform(3, 15)
        theta = math.radians(rng.uniform(10, 80))
        alpha = rng.uniform(-math.pi, math.pi)
        f = rng.uniform(500, 2000)
        c = rng.uniform(-0.4, 0.4) * f
        r = rng.uniform(-0.4, 0.4) * f
        if math.sin(theta) * f + math.cos(theta) * r > 1e-3 * f:
            return ParamVector(x0, y0, h, alpha, theta, f, c, r)


def split(par):
    pose = CameraPose(par.x0, par.y0, par.h, par.alpha, par.theta)
    intr = CameraIntrinsics(par.f, 0.5 * par.f, 0.5 * par.f)
    return pose, intr, ImagePoint(par.c, par.r)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
