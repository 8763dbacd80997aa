import math

import numpy as np
import pytest

import gcsf


def test_circle_collapses_at_the_closed_form_time():
    law = gcsf.power_law(1)
    traj = gcsf.run(law, gcsf.circle_profile(1.0, 64), area_fraction=1e-3)
    assert traj.stop_reason == "area-floor"
    assert traj.omega.omega_lo <= 0.5 + 1e-9
    assert traj.omega.omega_mid == pytest.approx(0.5, rel=1e-6)
    k = traj.curvature(len(traj) - 1).k
    assert np.ptp(k) < 1e-8 * k.max()


def test_ellipse_radii_and_measures():
    sp = gcsf.ellipse_support(2.0, 1.0, 256)
    r_in, r_out = gcsf.radii(sp)
    assert r_in == pytest.approx(1.0, abs=1e-9)
    assert r_out == pytest.approx(2.0, abs=1e-9)
    assert gcsf.area(sp) == pytest.approx(2.0 * math.pi, rel=1e-12)
    pts = gcsf.boundary_points(sp)
    assert pts.shape == (256, 2)
    brute = gcsf.polygon_brute_force(pts)
    assert brute["A"] == pytest.approx(2.0 * math.pi, rel=1e-3)


def test_speed_law_from_python_callables():
    law = gcsf.SpeedLaw("quadratic", lambda k: k, lambda k: 1.0, lambda k: 0.0)
    assert law.phi(3.0) == pytest.approx(9.0)
    report = gcsf.check_hypotheses(gcsf.power_law(2), 0.1, 100.0)
    assert report.all_ok()


def test_law_outside_the_hypotheses_is_rejected():
    with pytest.raises(gcsf.HypothesisError):
        gcsf.run(gcsf.power_law(1 / 3), gcsf.circle_profile(1.0, 32))
    assert issubclass(gcsf.HypothesisError, gcsf.GcsfError)


def test_cli_exit_codes():
    code, out, _ = gcsf.cli(["check-law", "--law", "power:2", "--range", "0.1,100"])
    assert code == 0
    assert "h1_ok: true" in out
    code, _, err = gcsf.cli(["run", "--bogus"])
    assert code == 2
    assert "--curve" in err
