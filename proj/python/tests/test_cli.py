import json
import os
import subprocess
import xml.etree.ElementTree as ET

import pytest

import tlfw

CLI = os.environ.get("TLFW_CLI")
pytestmark = pytest.mark.skipif(not CLI, reason="TLFW_CLI not set")


def cli(*args):
    return subprocess.run([CLI, *map(str, args)], capture_output=True, text=True)


@pytest.fixture
def scenario(tmp_path):
    path = tmp_path / "gen.json"
    path.write_text(json.dumps(tlfw.generate_scenario(3, 12, 0.002, 0.01)))
    return path


def test_infeasible_reference_network_exits_2():
    r = cli("run", "--builtin", "table1", "--mode", "tlfw")
    assert r.returncode == 2
    assert "binding nodes" in r.stderr


def test_usage_errors_exit_3(tmp_path):
    assert cli("run").returncode == 3
    assert cli("run", "--builtin", "nope").returncode == 3
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert cli("run", "--scenario", bad).returncode == 3
    assert cli("validate", bad).returncode == 3


def test_reports_identical_apart_from_timestamp(tmp_path, scenario):
    docs = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        r = cli("run", "--scenario", scenario, "--clusters", 2, "--restarts", 4, "--out", out)
        assert r.returncode == 0, r.stderr
        doc = json.loads(out.read_text())
        assert doc.pop("timestamp")
        docs.append(json.dumps(doc, sort_keys=True))
    assert docs[0] == docs[1]


def test_render_draws_every_cluster(tmp_path, scenario):
    out, svg = tmp_path / "r.json", tmp_path / "r.svg"
    assert cli("run", "--scenario", scenario, "--clusters", 2, "--restarts", 4, "--out", out).returncode == 0
    r = cli("render", out, "--svg", svg)
    assert r.returncode == 0
    root = ET.parse(svg).getroot()
    classes = [e.get("class") for e in root.iter()]
    assert classes.count("cluster-tour") == 2
    assert classes.count("head-tour") == 1
    assert cli("render", out).stdout == svg.read_text()


def test_validate_catches_a_weaker_link_model(tmp_path, scenario):
    out = tmp_path / "b.json"
    assert cli("run", "--scenario", scenario, "--mode", "msirsn", "--out", out).returncode == 0
    trace = tmp_path / "t.csv"
    # The shortest stop is about 56 s, so a coarse step stays within the step rule.
    r = cli("validate", out, "--dt", 5, "--trace", trace)
    assert r.returncode == 0, r.stdout
    assert trace.read_text().splitlines()[0] == "time,node_id,energy"
    assert cli("validate", out, "--dt", 2.5).returncode == 0

    doc = json.loads(out.read_text())
    doc["scenario"]["params"]["omega"] = 2.0
    out.write_text(json.dumps(doc))
    r = cli("validate", out, "--dt", 5)
    assert r.returncode == 4
    assert r.stdout.startswith("fail")
