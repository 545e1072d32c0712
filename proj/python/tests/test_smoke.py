import json
import xml.etree.ElementTree as ET

import pytest

import tlfw


def small_scenario():
    return tlfw.generate_scenario(3, 12, 0.002, 0.01)


def test_builtin_has_fifty_nodes():
    s = tlfw.builtin_table1()
    assert len(s["nodes"]) == 50


def test_generate_is_deterministic():
    assert small_scenario() == small_scenario()


def test_builtin_tlfw_is_infeasible():
    with pytest.raises(tlfw.InfeasibleError):
        tlfw.run(mode="tlfw")


def test_bad_mode_is_input_error():
    with pytest.raises(tlfw.InputError):
        tlfw.run(small_scenario(), mode="nope")


def test_errors_share_a_base():
    assert issubclass(tlfw.InputError, tlfw.Error)
    assert issubclass(tlfw.InfeasibleError, tlfw.Error)


def test_run_report_round_trip():
    r = tlfw.run(small_scenario(), clusters=2, restarts=4)
    assert r["format"] == "tlfw-run-report/1"
    assert len(r["cluster_plans"]) == 2
    assert r["joint"]["period"] > 0
    assert r == tlfw.run(small_scenario(), clusters=2, restarts=4)
    v = tlfw.validate(r, dt=5.0)
    assert isinstance(v["pass"], bool)
    assert v["threshold"] == pytest.approx(300.0)
    root = ET.fromstring(tlfw.render_svg(r))
    assert root.tag.endswith("svg")


def test_validate_rejects_garbage():
    with pytest.raises(tlfw.InputError):
        tlfw.validate({"format": "something-else"})


def test_solve_joint_closed_form():
    j = tlfw.solve_joint(
        [dict(cycle_time=1000, charge_time=100, travel_time=10)],
        dict(cycle_time=500, vacation=200, charge_time=200, travel_time=100),
    )
    # T is capped by the cluster cycle; two head cycles fit, one carries the detour.
    assert j["period"] == pytest.approx(1000.0)
    assert j["sub_periods"] == pytest.approx(2.0)
    assert j["vacation"] == pytest.approx(2 * 200 - 110)
    assert j["objective"] == pytest.approx(290 / 1000)
    json.dumps(j)
