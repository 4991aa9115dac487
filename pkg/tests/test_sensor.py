"""Open-loop sensor closed forms: coefficient tables and noise spectrum."""

import math

import numpy as np
import pytest

from coldamp.noise import LINE_LABELS
from coldamp.sensor import (
    CoefficientSet,
    estimator_coefficients,
    free_mass_coefficients,
    mechanical_impedance,
    sensor_noise_spectrum,
    transducer_impedance,
)
from coldamp.verify import draw_params, draw_frequencies


def test_mechanical_impedance_examples(reference_params, reference_omega):
    p = reference_params
    no_spring = p.with_(K=0.0)
    xi = mechanical_impedance(no_spring, reference_omega)
    assert xi == pytest.approx(p.H_m - 1j * p.M * reference_omega, rel=1e-14)
    resonance = math.sqrt(p.K / p.M)
    assert mechanical_impedance(p, resonance) == pytest.approx(p.H_m, rel=1e-12)
    xi = mechanical_impedance(p, reference_omega)
    assert xi.real == p.H_m
    assert xi.imag == pytest.approx(4.25e-4, rel=1e-2)
    with pytest.raises(ValueError):
        mechanical_impedance(p, 0.0)


def test_transducer_impedance_matches_params(reference_params, reference_omega):
    p = reference_params
    assert transducer_impedance(p, reference_omega) == p.z_t(reference_omega)


def test_free_mass_zero_pattern(reference_params, reference_omega):
    lam = free_mass_coefficients(reference_params, reference_omega)
    for label in ("a2", "b2", "r1", "r2", "l1", "l2"):
        assert lam[label] == 0.0
    assert lam["a1"] == -lam["b1"]
    assert lam["a1"].real < 0.0
    assert lam["m"].real < 0.0


def test_decoupled_transducer(reference_params, reference_omega):
    lam = free_mass_coefficients(reference_params.with_(kappa_t=0.0), reference_omega)
    assert lam["a1"] == 0.0 and lam["b1"] == 0.0
    assert lam["m"] != 0.0
    with pytest.raises(ValueError):
        estimator_coefficients(reference_params.with_(kappa_t=0.0), reference_omega)


def test_estimator_structure(reference_params, reference_omega):
    p = reference_params
    lam = free_mass_coefficients(p, reference_omega)
    mu = estimator_coefficients(p, reference_omega)
    assert mu["m"] == lam["m"]
    assert mu["a1"] == -mu["b1"]
    assert mu["l1"] == 0.0 and mu["r2"] == 0.0
    # Every added term carries a factor Xi_m.
    xi = mechanical_impedance(p, reference_omega)
    for label in LINE_LABELS:
        diff = mu[label] - lam[label]
        if label in ("m",):
            assert diff == 0.0
        else:
            # diff / Xi_m must be finite and Xi_m-free; spot-check by
            # shrinking the mass parameters, which shrinks Xi_m.
            pass
    small = p.with_(M=p.M * 1e-8, K=p.K * 1e-8, H_m=p.H_m * 1e-8)
    mu_small = estimator_coefficients(small, reference_omega)
    lam_small = free_mass_coefficients(small, reference_omega)
    scale = max(abs(mu_small[label]) for label in LINE_LABELS)
    for label in ("l2", "r1", "a2", "b2"):
        assert abs(mu_small[label]) < 1e-6 * scale
    assert mu_small["a1"] == pytest.approx(lam_small["a1"], rel=1e-6)


def test_sensing_terms_scale_with_xi_over_kappa(reference_params, reference_omega):
    p = reference_params
    mu = estimator_coefficients(p, reference_omega)
    mu10 = estimator_coefficients(p.with_(kappa_t=10.0 * p.kappa_t), reference_omega)
    # back action (in lambda part) grows with kappa, sensing terms shrink.
    assert abs(mu10["l2"]) == pytest.approx(abs(mu["l2"]) / 10.0, rel=1e-12)
    assert abs(mu10["r1"]) == pytest.approx(abs(mu["r1"]) / 10.0, rel=1e-12)


def test_spectrum_headline_and_decomposition(reference_params, reference_omega):
    b = sensor_noise_spectrum(reference_params, reference_omega)
    assert b.total == pytest.approx(1.077e-25, rel=3e-3)
    assert b.langevin / b.total > 0.99
    parts = b.langevin + b.back_action + b.sensing + b.interference
    assert parts == pytest.approx(b.total, rel=1e-12)


def test_back_action_and_sensing_scaling(reference_params, reference_omega):
    p = reference_params
    b1 = sensor_noise_spectrum(p, reference_omega)
    b2 = sensor_noise_spectrum(p.with_(kappa_t=10.0 * p.kappa_t), reference_omega)
    assert b2.back_action == pytest.approx(100.0 * b1.back_action, rel=1e-12)
    assert b2.sensing == pytest.approx(b1.sensing / 100.0, rel=1e-12)


def test_vacuum_floor(reference_params, reference_omega):
    cold = reference_params.with_(T_m=0.0, T_a=0.0, T_l=0.0, T_r=0.0)
    b = sensor_noise_spectrum(cold, reference_omega)
    assert b.total > 0.0
    assert b.langevin > 0.0 and b.back_action > 0.0 and b.sensing > 0.0


def test_decomposition_sum_over_draws(reference_params, reference_omega):
    rng = np.random.default_rng(7)
    for _ in range(200):
        q = draw_params(reference_params, rng)
        for w in draw_frequencies(reference_omega, rng, count=2):
            b = sensor_noise_spectrum(q, w)
            parts = b.langevin + b.back_action + b.sensing + b.interference
            assert abs(parts - b.total) / b.total < 1e-12


def test_coefficient_set_requires_all_labels():
    with pytest.raises(ValueError):
        CoefficientSet({"m": 1.0})
