"""End-to-end simulated experiment: probe -> channel -> counts -> capacities."""
from __future__ import annotations

import numpy as np

from .capacity import CapacityReport, detected_capacity
from .channels import PauliParams, make_channel
from .config import RunConfig
from .protocol import (AD_SETUP, PAULI_SETUP, CoincidenceSet, EfficiencyModel, ad_angle_inverse,
                       expected_counts, flux_for_total, joint_probabilities, pauli_mixture_counts,
                       sample_counts)
from .qubit import AXES
from .reconstruction import deconvolve_Q, identify_errors, sanitize
from .report import channel_label
from .uncertainty import ad_angle_uncertainty, mc_capacity_distribution


def efficiency_for(cfg: RunConfig) -> EfficiencyModel:
    base = AD_SETUP if cfg.channel == "ad" else PAULI_SETUP
    return EfficiencyModel(cfg.eps_opt, cfg.eps_smf, cfg.eps_spad,
                           cfg.eps_channel or base.eps_channel)


def param_uncertainty(kind: str, param: float) -> float:
    """Error bar on the channel parameter. Only the damping setup has one,
    from the waveplate angle; Pauli settings are taken as exact."""
    if kind == "ad":
        return ad_angle_uncertainty(ad_angle_inverse(param))
    return 0.0


def expected_axis_counts(label, fidelity: float, eff: EfficiencyModel, flux: float,
                         t: float) -> dict[str, CoincidenceSet]:
    """Mean counts on every axis. Pauli channels are built as count mixtures
    of the four unitaries, the way they are realised on the bench."""
    out = {}
    for axis in AXES:
        if isinstance(label, PauliParams):
            out[axis] = pauli_mixture_counts(label, fidelity, axis, eff, flux, t)
        else:
            p = joint_probabilities(make_channel(label), fidelity, axis)
            out[axis] = expected_counts(p, eff, flux, t, axis)
    return out


def simulate_point(label, cfg: RunConfig, seed: np.random.SeedSequence) -> CapacityReport:
    """One simulated acquisition plus Monte Carlo error bars around it.

    The "measured" counts are a Poisson draw from the expected counts; the
    error bars come from resampling with those measured counts as means.
    """
    eff = efficiency_for(cfg)
    t = cfg.integration_time
    flux = cfg.flux or flux_for_total(cfg.counts_per_axis, eff, t)
    expected = expected_axis_counts(label, cfg.fidelity, eff, flux, t)
    acq_seed, mc_seed = seed.spawn(2)
    rng = np.random.default_rng(acq_seed)
    measured = {a: sample_counts(expected[a], rng) for a in AXES}
    profiles = {a: identify_errors(sanitize(deconvolve_Q(measured[a], cfg.fidelity), cfg.sanitize))
                for a in AXES}
    report = detected_capacity(profiles)
    mc = mc_capacity_distribution(measured, cfg.fidelity, cfg.trials,
                                  int(mc_seed.generate_state(1)[0]), cfg.sanitize)
    for a in AXES:
        report.axes[a].std = {k: mc[f"{a}.{k}"].std for k in ("eps0", "eps1", "p0", "C")}
    report.c_d_std = mc["C_D"].std
    report.extra["mc_excluded"] = mc.excluded
    return report


def run_simulation(cfg: RunConfig) -> list[CapacityReport]:
    params = cfg.params
    seeds = np.random.SeedSequence(cfg.seed).spawn(len(params))
    reports = []
    for p, s in zip(params, seeds):
        r = simulate_point(channel_label(cfg.channel, p), cfg, s)
        r.param = p
        r.extra["param_std"] = param_uncertainty(cfg.channel, p)
        reports.append(r)
    return reports
