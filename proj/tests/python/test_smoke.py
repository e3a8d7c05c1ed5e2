import json
import math

import numpy as np
import pytest

import cramerlab as cl


def test_gaussian_cramer_is_half_squared_norm():
    model = cl.Model.gaussian(3)
    x = np.array([0.3, -1.2, 0.5])
    r = cl.cramer(model, x)
    assert r["status"] == "Converged"
    assert r["value"] == pytest.approx(0.5 * x @ x, rel=1e-12)
    assert np.allclose(r["argmax_xi"], x)


def test_log_laplace_of_cube_is_separable():
    one = cl.Model.cube(1)
    three = cl.Model.cube(3)
    xi = np.array([2.0, -0.5, 7.0])
    total = sum(cl.log_laplace(one, np.array([v])) for v in xi)
    assert cl.log_laplace(three, xi) == pytest.approx(total, rel=1e-12)


def test_sample_shape_and_determinism():
    model = cl.Model.ball_vol1(4)
    a = cl.sample(model, 100, seed=5)
    b = cl.sample(model, 100, seed=5, workers=3)
    assert a.shape == (100, 4)
    assert np.array_equal(a, b)


def test_depth_of_centre_of_ball_is_one_half():
    r = cl.depth(cl.Model.ball(3), np.zeros(3))
    assert r["phi"] == pytest.approx(0.5, abs=1e-12)
    assert r["method"] == "Exact"


def test_membership():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    assert cl.contains(pts, np.array([0.2, 0.2]))
    assert not cl.contains(pts, np.array([0.8, 0.8]))


def test_gaussian_beta_is_two_over_n():
    r = cl.beta(cl.Model.gaussian(8))
    assert r["exact"]
    assert r["value"] == pytest.approx(2.0 / 8, rel=1e-12)


def test_log_integrals():
    first, second = cl.log_integral_moments(4)
    h = 1 + 1 / 2 + 1 / 3 + 1 / 4
    assert first == pytest.approx(-h / 4, rel=1e-14)
    assert second > 0


def test_exp_half_of_laplace_is_below_two():
    v = cl.exp_half_moment_1d(cl.Law1D.laplace(1.0))
    assert 1.0 <= v <= 2.0 + 1e-6


def test_estimate_measure_in_unit_interval():
    r = cl.estimate_measure(cl.Model.cube(2), 30, trials=8, test_points=256, seed=3)
    assert 0.0 < r["value"] < 1.0
    assert len(r["per_trial"]) == 8


def test_sweep_and_threshold():
    rows = cl.sweep(cl.Model.gaussian(3), [0.8, 1.6, 2.4], trials=8, test_points=256)
    assert [r["rho"] for r in rows] == sorted(r["rho"] for r in rows)
    ests = [r["estimate"] for r in rows]
    assert ests == sorted(ests)
    with pytest.raises(cl.OutOfRangeError):
        cl.locate_threshold([(0.5, 0.1), (1.0, 0.2)], 0.5)
    assert cl.locate_threshold([(0.5, 0.2), (1.0, 0.8)], 0.5) == pytest.approx(0.75)


def test_domain_errors_map_to_value_error():
    with pytest.raises(ValueError):
        cl.Model.cube(0)


def test_run_command_rejects_unknown_keys():
    with pytest.raises(cl.ConfigError):
        cl.run_command("transform", json.dumps({"bogus": 1}))


def test_run_command_transform():
    cfg = {"model": {"kind": "cube", "n": 2}, "points": {"values": [[0.1, 0.2]]}}
    out = cl.run_command("transform", json.dumps(cfg))
    assert out["exit_code"] == 0
    doc = json.loads(out["artifacts"]["transform.json"])
    assert doc["points"][0]["status"] == "Converged"
    assert math.isfinite(doc["points"][0]["value"])
