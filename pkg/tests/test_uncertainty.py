import math

import numpy as np
import pytest

from capwitness.channels import PauliParams
from capwitness.errors import NumericalError
from capwitness.protocol import PAULI_SETUP, CoincidenceSet, flux_for_total, pauli_mixture_counts
from capwitness.qubit import AXES
from capwitness.reconstruction import deconvolve_joint
from capwitness.uncertainty import (ad_angle_uncertainty, mc_capacity_distribution,
                                    pipeline_from_q, sigma_f_ratio, summarize)


def expected_d(q, total=4e5, fidelity=0.979):
    flux = flux_for_total(total, PAULI_SETUP, 10.0)
    return {a: pauli_mixture_counts(PauliParams.depolarizing(q), fidelity, a, PAULI_SETUP, flux, 10.0)
            for a in AXES}


def test_sigma_f_ratio_values():
    assert sigma_f_ratio(1.0) == pytest.approx(1.0)
    assert sigma_f_ratio(0.5) == pytest.approx(math.sqrt(5))
    assert sigma_f_ratio(0.979) == pytest.approx(1.0145055, abs=1e-6)
    with pytest.raises(NumericalError):
        sigma_f_ratio(0.25)


def test_sigma_f_minimum_at_one():
    grid = np.linspace(0.26, 1.0, 300)
    vals = [sigma_f_ratio(f) for f in grid]
    assert int(np.argmin(vals)) == len(grid) - 1


@pytest.mark.parametrize("fidelity", [0.979, 0.6, 0.4])
def test_sigma_f_empirical(fidelity):
    # Independent Poisson counts at a known expected total.
    rng = np.random.default_rng(3)
    n, trials = 40_000, 10_000
    lam = np.full((trials, 2, 2), n / 4)
    raw = rng.poisson(lam) / n
    dec = deconvolve_joint(rng.poisson(lam), fidelity, total=n)
    ratio = dec[:, 0, 0].std() / raw[:, 0, 0].std()
    assert ratio == pytest.approx(sigma_f_ratio(fidelity), rel=0.05)


def test_joint_normalisation_by_observed_total():
    c = np.array([[10.0, 20.0], [30.0, 40.0]])
    np.testing.assert_allclose(deconvolve_joint(c, 1.0), c / 100)
    np.testing.assert_allclose(deconvolve_joint(c, 1.0, total=200.0), c / 200)


def test_ad_angle_uncertainty():
    assert ad_angle_uncertainty(67.5) == pytest.approx(0.017453292519943295)
    assert ad_angle_uncertainty(45.0) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(ValueError):
        ad_angle_uncertainty(20.0)


def test_summarize():
    s = summarize({"a": np.array([1.0, 2.0, 3.0, 4.0])})["a"]
    assert s.mean == 2.5 and s.n == 4
    assert s.std == pytest.approx(np.std([1, 2, 3, 4], ddof=1))


def test_pipeline_from_q_none_mode_rejects_negative():
    m = np.array([[[1.01, 0.2], [-0.01, 0.8]]])
    with pytest.raises(NumericalError):
        pipeline_from_q(m, "none")
    out = pipeline_from_q(m, "clamp")
    assert out["eps0"][0] == 0.0 and out["eps1"][0] == pytest.approx(0.2)


def test_mc_is_deterministic_and_seed_sensitive():
    exp = expected_d(0.1, total=4e4)
    a = mc_capacity_distribution(exp, 0.979, 64, seed=5)
    b = mc_capacity_distribution(exp, 0.979, 64, seed=5)
    c = mc_capacity_distribution(exp, 0.979, 64, seed=6)
    assert a["C_D"] == b["C_D"]
    assert a["C_D"] != c["C_D"]


def test_mc_requires_min_trials():
    with pytest.raises(ValueError):
        mc_capacity_distribution(expected_d(0.1), 0.979, 4, seed=0)


def test_mc_keeps_samples_on_request():
    r = mc_capacity_distribution(expected_d(0.05), 0.979, 32, seed=1, keep_samples=True)
    assert r.samples["C_D"].shape == (32,)
    assert set(r.stats) >= {"z.Q00", "x.eps0", "y.p0", "C_D"}


def test_mc_excludes_empty_columns():
    sparse = {"z": CoincidenceSet("z", np.array([[0.02, 5.0], [0.01, 5.0]]))}
    with pytest.raises(NumericalError):
        mc_capacity_distribution(sparse, 0.979, 100, seed=0)


def test_mc_mean_close_to_theory():
    q = 0.1
    r = mc_capacity_distribution(expected_d(q), 0.979, 400, seed=2)
    h = -(2 * q) * math.log2(2 * q) - (1 - 2 * q) * math.log2(1 - 2 * q)
    assert abs(r["C_D"].mean - (1 - h)) <= 3 * r["C_D"].std


def test_mc_std_scales_with_counts():
    small = mc_capacity_distribution(expected_d(0.1, total=4e4), 0.979, 2000, seed=9)
    large = mc_capacity_distribution(expected_d(0.1, total=4e6), 0.979, 2000, seed=9)
    for key in ("z.Q00", "x.Q10", "y.eps0"):
        assert small[key].std / large[key].std == pytest.approx(10, rel=0.1)
