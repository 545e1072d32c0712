"""Charging-schedule planner for rechargeable sensor networks with a mobile base station."""

import json

from . import _tlfw
from ._tlfw import Error, InfeasibleError, InputError

__all__ = [
    "Error",
    "InfeasibleError",
    "InputError",
    "builtin_table1",
    "generate_scenario",
    "render_svg",
    "run",
    "solve_joint",
    "validate",
]


def builtin_table1():
    """The 50-node reference network as a scenario dict."""
    return json.loads(_tlfw.builtin_table1())


def generate_scenario(seed, n, rate_lo=0.1, rate_hi=1.0):
    return json.loads(_tlfw.generate_scenario(seed, n, rate_lo, rate_hi))


def run(scenario=None, *, mode="tlfw", clusters=4, seed=42, restarts=16,
        variant="centroid-snap", seg_max=0.25, prune_k=None, jobs=1,
        simulate=False, dt=0.05, periods=3):
    """Runs the pipeline and returns the report as a dict (no timestamp)."""
    text = "" if scenario is None else json.dumps(scenario)
    k = -1 if prune_k is None else int(prune_k)
    return json.loads(_tlfw.run(text, mode, clusters, seed, restarts, variant, seg_max, k,
                                jobs, simulate, dt, periods))


def validate(report, dt=0.05, periods=3, margin=0.02):
    return json.loads(_tlfw.validate(json.dumps(report), dt, periods, margin))


def render_svg(report):
    return _tlfw.render_svg(json.dumps(report))


def solve_joint(clusters, head):
    """clusters: dicts with cycle_time, charge_time, travel_time (optional max_cycle);
    head: dict with cycle_time, vacation, charge_time, travel_time."""
    return json.loads(_tlfw.solve_joint(clusters, head))
