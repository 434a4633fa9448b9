"""Tests for interference statistics and the estimators built on them."""

import math

import numpy as np
import pytest

from pbsim.errors import (LowInformationError, RankDeficiencyWarning,
                          ValidationError)
from pbsim.phase_est import (CountTable, OutcomeDistribution,
                             SuperpositionCoeffs, estimate_coefficients,
                             estimate_phase, gauge_fixed, interference_probs,
                             load_count_table, sample_outcomes,
                             save_count_table, superposition_probs)
from pbsim.phase_states import phase_state, phase_value


def eigen_pair_dist(s, phi_j, phi_k):
    return interference_probs(phase_state(s, phi_j), phase_state(s, phi_k))


@pytest.mark.parametrize("s,delta", [(2, 0.4), (3, -1.1), (5, 2.3)])
def test_low_order_closed_forms(s, delta):
    phi_j = 0.3
    d = eigen_pair_dist(s, phi_j, phi_j - delta)
    norm = (s + 1.0) ** 2
    assert d.prob(0, 0) == pytest.approx(1 / norm, abs=1e-12)
    assert d.prob(1, 0) == pytest.approx((1 + math.cos(delta)) / norm, abs=1e-12)
    assert d.prob(0, 1) == pytest.approx((1 - math.cos(delta)) / norm, abs=1e-12)
    assert d.prob(1, 1) == pytest.approx(2 * math.sin(delta) ** 2 / norm,
                                         abs=1e-12)
    assert d.prob(2, 0) == pytest.approx(
        (math.cos(delta) + 1 / math.sqrt(2)) ** 2 / norm, abs=1e-12)
    assert d.prob(0, 2) == pytest.approx(
        (math.cos(delta) - 1 / math.sqrt(2)) ** 2 / norm, abs=1e-12)


@pytest.mark.parametrize("s", [1, 2, 4])
def test_distribution_is_normalized(s):
    d = eigen_pair_dist(s, 0.7, -0.2)
    assert d.probs.sum() == pytest.approx(1.0, abs=1e-12)
    assert d.probs.shape == (2 * s + 1, 2 * s + 1)
    assert d.probs.min() >= -1e-14


def test_superposition_closed_forms_s1():
    r, theta = 0.6, 0.9
    coeffs = SuperpositionCoeffs(
        1, np.array([r, math.sqrt(1 - r * r) * np.exp(1j * theta)]))
    d = superposition_probs(0.0, coeffs)
    want00 = abs(r + math.sqrt(1 - r * r) * np.exp(1j * theta)) ** 2 / 4
    assert d.prob(0, 0) == pytest.approx(want00, abs=1e-12)
    assert d.prob(0, 1) == pytest.approx((1 - r * r) / 2, abs=1e-12)


def test_distribution_validation():
    with pytest.raises(ValidationError):
        OutcomeDistribution(2, np.zeros((4, 5)))
    bad = np.zeros((5, 5))
    bad[0, 0] = 0.5
    with pytest.raises(ValidationError):
        OutcomeDistribution(2, bad)
    neg = np.full((3, 3), 1 / 9.0)
    neg[0, 0] = -1e-3
    neg[1, 1] += 1e-3
    with pytest.raises(ValidationError):
        OutcomeDistribution(1, neg)


def test_count_table_validation():
    with pytest.raises(ValidationError):
        CountTable(np.zeros((4, 4)), trials=0.0)
    c = np.zeros((3, 3))
    c[1, 0] = 3.0
    with pytest.raises(ValidationError):
        CountTable(c, trials=10.0)


def test_sampling_is_deterministic_and_consistent():
    d = eigen_pair_dist(2, 0.5, -0.3)
    t1 = sample_outcomes(d, 5000, seed=77)
    t2 = sample_outcomes(d, 5000, seed=77)
    assert np.array_equal(t1.counts, t2.counts)
    assert t1.counts.sum() == 5000
    big = sample_outcomes(d, 1_000_000, seed=3)
    freq = big.frequencies()
    for n1 in range(3):
        for n2 in range(3):
            p = d.prob(n1, n2)
            sigma = math.sqrt(max(p * (1 - p), 1e-12) / 1_000_000)
            assert abs(freq[n1, n2] - p) < 4.5 * sigma + 1e-9


def test_phase_single_setting_candidates():
    s, phi_j, phi_k = 2, 0.2, -0.9
    table = CountTable.from_exact(eigen_pair_dist(s, phi_j, phi_k))
    est = estimate_phase(table, phi_j, s)
    assert len(est.candidates) == 2
    assert min(abs(c - phi_k) for c in est.candidates) < 1e-12


def test_phase_needs_single_photon_counts():
    counts = np.zeros((5, 5))
    counts[0, 0] = 10.0
    counts[2, 2] = 5.0
    table = CountTable(counts, trials=15.0)
    with pytest.raises(LowInformationError):
        estimate_phase(table, 0.0, 2)


@pytest.mark.parametrize("phi_k", [-2.5, -0.7, 0.0, 1.3, 3.0])
def test_phase_two_setting_exact(phi_k):
    s, phi_j = 3, 0.4
    main = CountTable.from_exact(eigen_pair_dist(s, phi_j, phi_k))
    aux_phi = phi_j + math.pi / 2
    aux = CountTable.from_exact(eigen_pair_dist(s, aux_phi, phi_k))
    est = estimate_phase(main, phi_j, s, aux=(aux_phi, aux))
    assert est.phi_k == pytest.approx(phi_k, abs=1e-12)
    assert est.candidates == (est.phi_k,)


def test_phase_two_setting_sampled():
    s, phi_j, phi_k = 2, 0.0, 0.8
    d_main = eigen_pair_dist(s, phi_j, phi_k)
    aux_phi = phi_j + math.pi / 2
    d_aux = eigen_pair_dist(s, aux_phi, phi_k)
    est = estimate_phase(sample_outcomes(d_main, 100_000, seed=5), phi_j, s,
                         aux=(aux_phi, sample_outcomes(d_aux, 100_000, seed=6)))
    assert abs(est.phi_k - phi_k) < 5 * est.stderr + 1e-3
    assert est.stderr < 0.02


def test_phase_rejects_degenerate_aux():
    s, phi_j = 2, 0.1
    t = CountTable.from_exact(eigen_pair_dist(s, phi_j, 0.5))
    with pytest.raises(ValidationError):
        estimate_phase(t, phi_j, s, aux=(phi_j + math.pi, t))


def exact_tables(coeffs, settings, phi0=0.0):
    return [(p, CountTable.from_exact(superposition_probs(p, coeffs, phi0)))
            for p in settings]


def test_coefficients_s1_exact_inversion():
    r, theta = 0.35, -1.2
    c = np.array([r, math.sqrt(1 - r * r) * np.exp(1j * theta)])
    truth = SuperpositionCoeffs(1, c)
    settings = [phase_value(1, 0), phase_value(1, 1), math.pi / 2]
    got = estimate_coefficients(exact_tables(truth, settings), 1)
    assert np.abs(got.c - truth.c).max() < 1e-10


def test_coefficients_s1_on_axis_note():
    truth = SuperpositionCoeffs(
        1, np.array([0.5, math.sqrt(0.75) * np.exp(0.4j)]))
    settings = [phase_value(1, 0), phase_value(1, 1)]
    got = estimate_coefficients(exact_tables(truth, settings), 1)
    assert "sign" in got.note


def test_coefficients_s2_least_squares():
    rng = np.random.default_rng(12)
    c = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    truth = gauge_fixed(c, 2)
    settings = [phase_value(2, m) for m in range(3)]
    got = estimate_coefficients(exact_tables(truth, settings), 2,
                                rng_seed=99, starts=6)
    assert np.abs(got.c - truth.c).max() < 1e-6


def test_coefficients_validation():
    truth = SuperpositionCoeffs(1, np.array([0.6, 0.8]))
    with pytest.raises(ValidationError):
        estimate_coefficients([], 1)
    # missing the second eigenphase setting
    partial = exact_tables(truth, [phase_value(1, 0)])
    with pytest.raises(ValidationError):
        estimate_coefficients(partial, 1)
    # table built for a different order
    tables = exact_tables(truth, [phase_value(1, 0), phase_value(1, 1)])
    with pytest.raises(ValidationError):
        estimate_coefficients(tables, 2)


def test_coefficients_rank_warning():
    truth = SuperpositionCoeffs(
        2, np.array([0.8, 0.4, 0.4 + 0.2j]) / math.sqrt(0.8 ** 2 + 0.16 + 0.2))
    tables = [(p, sample_outcomes(superposition_probs(p, truth), 1, seed=i))
              for i, p in enumerate(phase_value(2, m) for m in range(3))]
    with pytest.warns(RankDeficiencyWarning):
        estimate_coefficients(tables, 2, starts=1, max_iter=50)


def test_gauge_fixed_properties():
    c = np.array([-0.3 - 0.4j, 0.5j, 0.7])
    g = gauge_fixed(c, 2)
    assert np.linalg.norm(g.c) == pytest.approx(1.0, abs=1e-12)
    assert g.c[0].imag == pytest.approx(0.0, abs=1e-12)
    assert g.c[0].real >= 0.0
    # global phase is quotiented out
    g2 = gauge_fixed(c * np.exp(0.7j), 2)
    assert np.abs(g.c - g2.c).max() < 1e-12
    # zero leading coefficient falls through to the next pivot
    g3 = gauge_fixed(np.array([0.0, 1j]), 1)
    assert g3.c[1] == pytest.approx(1.0, abs=1e-12)


def test_count_table_round_trip(tmp_path):
    d = eigen_pair_dist(2, 0.3, -0.8)
    sampled = sample_outcomes(d, 400, seed=21)
    path = tmp_path / "counts.csv"
    save_count_table(path, sampled, phi_j=0.3, s=2)
    phi_j, s, loaded = load_count_table(path)
    assert phi_j == 0.3 and s == 2
    assert np.array_equal(loaded.counts, sampled.counts)
    assert loaded.trials == sampled.trials
    assert loaded.rng_seed == 21

    exact = CountTable.from_exact(d)
    path2 = tmp_path / "exact.csv"
    save_count_table(path2, exact, phi_j=0.3, s=2)
    _, _, loaded2 = load_count_table(path2)
    assert loaded2.rng_seed is None
    assert loaded2.trials == 1.0
    assert np.abs(loaded2.counts - exact.counts).max() < 1e-15
