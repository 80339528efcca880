import numpy as np
import pytest

import reachsynth as rs


def scalar(a, w_half=1.0, v_half=0.0, dt=1.0):
    one = np.ones((1, 1))
    return rs.LtiSystem(a * one, one, one, np.zeros((1, 1)), one, one,
                        rs.Zonotope.box(np.array([w_half])), rs.Zonotope.box(np.array([v_half])), dt)


def test_zonotope_membership_and_hull():
    z = rs.Zonotope(np.zeros(2), np.array([[1.0, 1.0], [0.0, 1.0]]))
    assert z.contains_point(np.array([2.0, 1.0]))
    assert not z.contains_point(np.array([2.0, -1.0]))
    h = z.interval_hull()
    np.testing.assert_allclose(h.lower, [-2.0, -1.0])
    np.testing.assert_allclose(h.upper, [2.0, 1.0])
    assert z.side_length_sum() == pytest.approx(6.0)


def test_terminal_set_of_stable_scalar():
    # x+ = 0.5 x + w, |w| <= 1 settles in [-2, 2]
    r = rs.terminal_reach(scalar(0.5), rs.Zonotope(np.zeros(1)))
    assert r["status"] == "converged"
    assert r["output_hull"].upper[0] == pytest.approx(2.0, abs=1e-3)


def test_identify_recovers_sound_bounds():
    rng = np.random.default_rng(3)
    sys = scalar(0.5, w_half=1.0, v_half=1.0, dt=0.1)
    cases = []
    for _ in range(5):
        u = rng.uniform(-1, 1, (40, 1))
        w = rng.uniform(-0.1, 0.1, (40, 1))
        v = rng.uniform(-0.02, 0.02, (40, 1))
        x0 = rng.uniform(-1, 1, 1)
        _, y = rs.simulate(sys, x0, u, w, v)
        cases.append(rs.TestCase(u, x0, y))
    suite = rs.TestSuite(cases, 0.1)
    r = rs.identify(sys, suite, k_end=5)
    assert r["conformant"]
    assert r["cost"] > 0
    assert rs.check_conformance(r["model"], suite, 5)["pass"]


def test_model_json_round_trip():
    sys = scalar(0.9, dt=0.1)
    back = rs.LtiSystem.from_json(sys.to_json())
    np.testing.assert_allclose(back.A, sys.A)
    assert back.sample_time == pytest.approx(0.1)


def test_joint_models_and_lab():
    assert rs.joint_models() == ["Rc", "Rd", "ROc", "ROd", "RDd", "RODd"]
    suite = rs.simulate_lab("RODd", refs=1, duration=1.0, seed=4)
    model = rs.joint_model("RODd")
    assert suite.cases[0].outputs.shape[1] == model.outputs
    r = rs.identify(model, suite, k_end=20)
    assert np.isfinite(r["cost"])


def test_config_error_is_value_error():
    with pytest.raises(ValueError):
        rs.joint_model("nope")


def test_cli_in_process(tmp_path):
    assert rs.run_cli(["simulate", "--duration", "1", "--refs", "1", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "simulate-report.json").exists()
    assert rs.run_cli(["simulate", "--duration", "-1", "--out", str(tmp_path)]) == 2
