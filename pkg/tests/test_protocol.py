import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from capwitness.channels import AmplitudeDampingParams, PauliParams, make_channel
from capwitness.protocol import (AD_SETUP, PAULI_SETUP, CoincidenceSet, EfficiencyModel,
                                 ad_angle_inverse, ad_angle_map, expected_counts, flux_for_total,
                                 joint_probabilities, mixture_counts, pauli_mixture_counts,
                                 poisson_draw, sample_counts, werner_state)
from capwitness.qubit import AXES


def test_werner_state_limits():
    np.testing.assert_allclose(werner_state(1.0).matrix[0, 3], 0.5)
    np.testing.assert_allclose(werner_state(0.25).matrix, np.eye(4) / 4, atol=1e-15)
    assert werner_state(0.25).near_singular
    assert not werner_state(0.979).near_singular


def test_werner_state_warns_when_singular(caplog):
    werner_state(0.2)
    assert "singular" in caplog.text


def test_werner_state_rejects_bad_fidelity():
    with pytest.raises(ValueError):
        werner_state(1.5)


def test_efficiency_values():
    eff = PAULI_SETUP
    assert eff.ancilla == pytest.approx(0.9 * 0.73 * 0.7)
    assert eff.system == pytest.approx(0.9 * 0.98 * 0.73**2 * 0.7)
    assert eff.coincidence == pytest.approx(0.1513128, abs=1e-7)
    assert AD_SETUP.coincidence == pytest.approx(0.1513128 * 0.6 / 0.98, abs=1e-7)
    with pytest.raises(ValueError):
        EfficiencyModel(eps_opt=1.2)


@pytest.mark.parametrize("axis", AXES)
def test_identity_channel_perfect_correlation(axis):
    p = joint_probabilities(make_channel(PauliParams(0, 0, 0)), 1.0, axis)
    assert p.sum() == pytest.approx(1)
    # Ideal probe: outcomes correlated on z/x, anticorrelated on y.
    diag = p[0, 0] + p[1, 1]
    assert diag == pytest.approx(0.0 if axis == "y" else 1.0, abs=1e-12)


def test_werner_noise_reduces_correlation():
    p = joint_probabilities(make_channel(PauliParams(0, 0, 0)), 0.8, "z")
    # Off-diagonal weight 2 (1 - F) / 3.
    assert p[0, 1] + p[1, 0] == pytest.approx(2 * 0.2 / 3)


def test_expected_counts_scale():
    p = np.full((2, 2), 0.25)
    c = expected_counts(p, PAULI_SETUP, 1000.0, 10.0, "x")
    assert c.total == pytest.approx(1000 * 10 * PAULI_SETUP.coincidence)
    assert c.axis == "x"
    with pytest.raises(ValueError):
        expected_counts(p, PAULI_SETUP, 0.0, 10.0)
    assert flux_for_total(c.total, PAULI_SETUP, 10.0) == pytest.approx(1000.0)


def test_coincidence_set_validation():
    with pytest.raises(ValueError):
        CoincidenceSet("z", np.array([[1, -1], [0, 0]]))
    with pytest.raises(ValueError):
        CoincidenceSet("z", np.ones(3))
    c = CoincidenceSet("z", np.ones((2, 2)))
    with pytest.raises(ValueError):
        c.counts[0, 0] = 5


@pytest.mark.parametrize("mean", [0.5, 7.0, 29.0, 31.0, 1e4])
def test_poisson_moments(mean):
    rng = np.random.default_rng(7)
    x = poisson_draw(np.full(200_000, mean), rng)
    assert x.mean() == pytest.approx(mean, rel=0.01, abs=0.01)
    assert x.var() == pytest.approx(mean, rel=0.03, abs=0.02)
    assert np.all(x == np.round(x)) and np.all(x >= 0)


def test_poisson_zero_mean():
    assert np.all(poisson_draw(np.zeros(10), np.random.default_rng(0)) == 0)


def test_sample_counts_deterministic():
    exp = CoincidenceSet("z", np.array([[100.0, 3.0], [2.0, 90.0]]))
    a = sample_counts(exp, 11).counts
    b = sample_counts(exp, np.random.SeedSequence(11)).counts
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, sample_counts(exp, 12).counts)


def test_mixture_counts_validation():
    a = CoincidenceSet("z", np.eye(2))
    b = CoincidenceSet("x", np.eye(2))
    with pytest.raises(ValueError):
        mixture_counts([(0.5, a), (0.5, b)])
    with pytest.raises(ValueError):
        mixture_counts([(0.7, a)])
    with pytest.raises(ValueError):
        mixture_counts([])


@pytest.mark.parametrize("axis", AXES)
def test_pauli_mixture_equals_kraus_channel(axis):
    label = PauliParams(0.05, 0.1, 0.2)
    mix = pauli_mixture_counts(label, 0.9, axis, PAULI_SETUP, 1e4, 10.0)
    p = joint_probabilities(make_channel(label), 0.9, axis)
    kraus = expected_counts(p, PAULI_SETUP, 1e4, 10.0, axis)
    np.testing.assert_allclose(mix.counts, kraus.counts, rtol=1e-12)


def test_ad_angle_map():
    assert ad_angle_map(45.0) == pytest.approx(1.0)
    assert ad_angle_map(90.0) == pytest.approx(0.0, abs=1e-15)
    assert ad_angle_map(67.5) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        ad_angle_map(30.0)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 1))
def test_ad_angle_roundtrip(eta):
    omega = ad_angle_inverse(eta)
    assert 45 - 1e-9 <= omega <= 90 + 1e-9
    assert ad_angle_map(min(max(omega, 45.0), 90.0)) == pytest.approx(eta, abs=1e-12)


def test_ad_joint_probabilities_match_theory():
    eta = 0.4
    p = joint_probabilities(make_channel(AmplitudeDampingParams(eta)), 1.0, "z")
    # Input V (ancilla 1) decays to H with probability eta.
    assert p[0, 1] / (p[0, 1] + p[1, 1]) == pytest.approx(eta)
    assert p[1, 0] == pytest.approx(0.0, abs=1e-15)
    assert math.isclose(p.sum(), 1.0)


def test_expected_counts_proportionality():
    eff = EfficiencyModel(1.0, 1.0, 1.0, 1.0)
    c = expected_counts(np.full((2, 2), 0.25), eff, 4e3, 10.0)
    np.testing.assert_allclose(c.counts, 1e4)
