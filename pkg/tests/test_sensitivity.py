import math

import numpy as np
import pytest

from conftest import CASE_PAR, random_par
from ixfootprint.errors import HorizonRay
from ixfootprint.sensitivity import (
    ParamVector,
    analytic_jacobian,
    finite_difference_jacobian,
    jacobian_check,
)


def test_translation_columns_are_identity(rng):
    for _ in range(20):
        jac = analytic_jacobian(random_par(rng))
        np.testing.assert_array_equal(jac[:, :2], np.eye(2))


def test_zero_pan_structure():
    par = CASE_PAR._replace(alpha=0.0)
    jac = analytic_jacobian(par)
    assert jac[0, 6] == 0.0
    den = math.sin(par.theta) * par.f + math.cos(par.theta) * par.r
    assert jac[1, 2] == pytest.approx(par.c / den, rel=1e-15)


def test_case_geometry_matches_finite_differences():
    chk = jacobian_check(CASE_PAR, tol=1e-6)
    assert chk.ok, chk.flagged
    assert chk.max_rel_error() < 1e-6


def test_fd_translation_columns_exact():
    fd = finite_difference_jacobian(CASE_PAR._replace(x0=1234.5, y0=-77.0))
    np.testing.assert_array_equal(fd[:, :2], np.eye(2))


def test_fd_zero_pan_column():
    fd = finite_difference_jacobian(CASE_PAR._replace(alpha=0.0))
    assert abs(fd[0, 6]) < 1e-8


def test_self_check_is_zero():
    jac = analytic_jacobian(CASE_PAR)
    chk = jacobian_check(CASE_PAR, analytic=jac, numeric=jac)
    assert chk.ok
    assert not chk.rel_error.any()


def test_corrupted_entry_is_flagged():
    jac = analytic_jacobian(CASE_PAR)
    bad = jac.copy()
    bad[1, 4] *= 1.1
    chk = jacobian_check(CASE_PAR, analytic=bad)
    assert [name for name, _ in chk.flagged] == ["Y/theta"]


def test_random_configurations_agree(rng):
    for _ in range(300):
        par = random_par(rng)
        chk = jacobian_check(par, tol=1e-6)
        assert chk.ok, (par, chk.flagged)


def test_height_scaling(rng):
    for _ in range(50):
        par = random_par(rng)
        j1 = analytic_jacobian(par)
        j2 = analytic_jacobian(par._replace(h=2 * par.h))
        np.testing.assert_array_equal(j2[:, :2], j1[:, :2])
        np.testing.assert_allclose(j2[:, 2], j1[:, 2], rtol=1e-12)
        np.testing.assert_allclose(j2[:, 3:], 2 * j1[:, 3:], rtol=1e-12, atol=1e-15)
        g1, g2 = par.ground(), par._replace(h=2 * par.h).ground()
        assert g2.x == pytest.approx(2 * g1.x, rel=1e-12, abs=1e-12)


def test_pixel_partials_plug_in():
    # dX/dc = -sin(a) h / den and dY/dc = cos(a) h / den, with no c dependence
    par = CASE_PAR
    den = math.sin(par.theta) * par.f + math.cos(par.theta) * par.r
    jac = analytic_jacobian(par)
    assert jac[0, 6] == pytest.approx(-math.sin(par.alpha) * par.h / den, rel=1e-15)
    assert jac[1, 6] == pytest.approx(math.cos(par.alpha) * par.h / den, rel=1e-15)
    moved = analytic_jacobian(par._replace(c=-400.0))
    assert moved[0, 6] == jac[0, 6] and moved[1, 6] == jac[1, 6]


def test_horizon_raises():
    par = ParamVector(0, 0, 6, 0, math.radians(30), 1000, 0, -1000 * math.tan(math.radians(30)) - 1)
    with pytest.raises(HorizonRay):
        analytic_jacobian(par)
    with pytest.raises(HorizonRay):
        finite_difference_jacobian(par)


def test_vanishing_entry_is_not_flagged():
    # pan -45 deg with pixel (100, 50) makes dX/df vanish analytically
    par = ParamVector(0, 0, 10, math.radians(-45), math.radians(30), 900, 100, 50)
    jac = analytic_jacobian(par)
    assert abs(jac[0, 5]) < 1e-15
    chk = jacobian_check(par)
    assert chk.ok, chk.flagged
    # a real error in the same entry is still caught
    bad = jac.copy()
    bad[0, 5] = 1e-4
    assert [name for name, _ in jacobian_check(par, analytic=bad).flagged] == ["X/f"]
