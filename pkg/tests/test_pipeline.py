import math

import pytest

from capwitness.capacity import binary_entropy
from capwitness.config import RunConfig
from capwitness.pipeline import efficiency_for, run_simulation


def test_efficiency_per_setup():
    assert efficiency_for(RunConfig(channel="ad")).eps_channel == 0.6
    assert efficiency_for(RunConfig(channel="d")).eps_channel == 0.98
    assert efficiency_for(RunConfig(channel="d", eps_channel=0.5)).eps_channel == 0.5


def test_simulation_depolarizing_close_to_theory():
    cfg = RunConfig(channel="d", grid="0.05,0.15", trials=64, seed=3)
    reports = run_simulation(cfg)
    assert [r.param for r in reports] == [0.05, 0.15]
    for r in reports:
        theory = 1 - binary_entropy(2 * r.param)
        assert abs(r.c_d - theory) < 5 * r.c_d_std + 1e-3
        assert r.extra["param_std"] == 0.0
        assert r.extra["mc_excluded"] == 0


def test_simulation_amplitude_damping():
    cfg = RunConfig(channel="ad", grid="0.5", trials=32, seed=1)
    (r,) = run_simulation(cfg)
    e = (1 - math.sqrt(0.5)) / 2
    assert r.c_d == pytest.approx(1 - binary_entropy(e), abs=0.02)
    assert r.axes["z"].errors.eps0 < 0.01
    assert r.extra["param_std"] == pytest.approx(0.017453292519943295)


def test_simulation_seeded():
    cfg = RunConfig(channel="pd", grid="0.3", trials=16, seed=8)
    a, = run_simulation(cfg)
    b, = run_simulation(cfg)
    assert a.c_d == b.c_d and a.c_d_std == b.c_d_std


def test_param_uncertainty():
    from capwitness.pipeline import param_uncertainty
    assert param_uncertainty("ad", 0.5) == pytest.approx(0.017453292519943295)
    assert param_uncertainty("d", 0.1) == 0.0
