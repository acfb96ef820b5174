"""Closed-form photocounting moments and their structural identities."""

from __future__ import annotations

import math

import pytest
from hypothesis import given, settings

from conftest import interferometer_params, midpoint_grid, phases
from sqzmzi import (
    InterferometerParams,
    PhotonStats,
    db_to_squeeze_factor,
    photon_means,
    photon_second_moments,
    photon_stats,
    sumdiff_stats,
    transfer_gain,
    weighted_variance,
)
from sqzmzi.photostats import (
    photon_mean_slopes,
    sumdiff_mean_slopes,
    weighted_variance_terms,
)

R1_10DB = db_to_squeeze_factor(10.0)


def test_transfer_gain_reference_points():
    assert transfer_gain(InterferometerParams()) == 1.0
    # mu = 0.99, eta = 0.8, e^{2 r2} = 10
    params = InterferometerParams(mu=0.99, eta=0.8, r2=0.5 * math.log(10.0))
    assert math.isclose(transfer_gain(params), 2.8142494558940583, rel_tol=1e-12)


def test_photon_means_track_the_fringe():
    ideal = InterferometerParams(n_photons=1e4)
    n1, n2 = photon_means(ideal, 0.0)
    assert n1 == 0.0 and math.isclose(n2, 1e4, rel_tol=1e-12)
    n1, n2 = photon_means(ideal, math.pi / 3.0)
    assert math.isclose(n1, 2500.0, rel_tol=1e-12)  # sin^2(pi/6) = 1/4
    assert math.isclose(n2, 7500.0, rel_tol=1e-12)
    n1, n2 = photon_means(ideal, math.pi / 2.0)
    assert math.isclose(n1, n2, rel_tol=1e-12)


def test_photon_means_scale_with_transfer_gain():
    params = InterferometerParams(mu=0.8, eta=0.5, r2=0.6, n_photons=1e4)
    g2 = transfer_gain(params) ** 2
    n1, n2 = photon_means(params, 1.2)
    assert math.isclose(n1 + n2, g2 * 1e4, rel_tol=1e-12)


def test_variance_reference_value(solid_params):
    # 10 dB squeezing, lossless, A = 1, phi = pi/2:
    # Var N1 = N sin^2(pi/4) (0.1 cos^2(pi/4) + 1 sin^2(pi/4)) = 1e6 * 0.5 * 0.55
    var1, var2, cov = photon_second_moments(solid_params, math.pi / 2.0)
    assert math.isclose(var1, 2.75e5, rel_tol=1e-9)
    assert math.isclose(var2, 2.75e5, rel_tol=1e-9)
    # Cov = N (A - e^{-2 r1})/4 = 1e6 * 0.9/4
    assert math.isclose(cov, 2.25e5, rel_tol=1e-9)


def test_variances_vanish_at_the_dark_fringe(solid_params):
    var1, var2, cov = photon_second_moments(solid_params, 0.0)
    assert var1 == 0.0
    assert cov == 0.0
    # the bright port still fluctuates: Var N2 = G^4 N (A + eps^2) at phi = 0
    assert math.isclose(var2, 1e6, rel_tol=1e-9)


def test_cross_covariance_vanishes_for_coherent_balance():
    # A = e^{-2 r1} happens exactly for vacuum input and coherent light
    params = InterferometerParams(n_photons=1e5)
    for phi in midpoint_grid(9):
        _, _, cov = photon_second_moments(params, phi)
        assert cov == 0.0


def test_sumdiff_reference_points(solid_params):
    mean_p, mean_m, var_p, var_m, cov_pm = sumdiff_stats(solid_params, math.pi / 2.0)
    assert math.isclose(mean_p, 1e6, rel_tol=1e-12)
    assert abs(mean_m) < 1e-9
    assert math.isclose(var_p, 1e6, rel_tol=1e-9)
    assert math.isclose(var_m, 1e5, rel_tol=1e-9)  # e^{-2 r1} N
    assert abs(cov_pm) < 1e-9


def test_sum_mean_is_phase_independent(solid_params):
    reference = sumdiff_stats(solid_params, 0.123)[0]
    for phi in midpoint_grid(11):
        assert math.isclose(sumdiff_stats(solid_params, phi)[0], reference, rel_tol=1e-12)


def test_difference_variance_flat_for_coherent_ideal_case():
    params = InterferometerParams(n_photons=1e4)  # r1 = 0, A = 1, lossless
    for phi in midpoint_grid(9):
        assert math.isclose(sumdiff_stats(params, phi)[3], 1e4, rel_tol=1e-12)


def test_weighted_variance_at_the_optimal_weight(solid_params):
    # k = cos(phi) kills the A-dependent term, leaving (e^{-2 r1} + eps^2) sin^2
    for phi in midpoint_grid(9):
        expected = 1e6 * 0.1 * math.sin(phi) ** 2
        assert math.isclose(weighted_variance(solid_params, phi, phi), expected, rel_tol=1e-9)


def test_weighted_variance_reference_value(solid_params):
    # phi = pi/2, phi_apr = pi/2 + 0.1: coefficient 0.1 + sin^2(0.1)
    value = weighted_variance(solid_params, math.pi / 2.0, math.pi / 2.0 + 0.1)
    assert math.isclose(value, 1e6 * 0.10996671107937919, rel_tol=1e-9)


def test_weighted_variance_terms_sum_to_the_compact_form(solid_params):
    for phi, phi_apr in [(0.7, 0.9), (2.2, 2.0), (4.0, 4.4)]:
        total = weighted_variance(solid_params, phi, phi_apr)
        terms = weighted_variance_terms(solid_params, phi, phi_apr)
        assert math.isclose(sum(terms), total, rel_tol=1e-10)


def test_weighted_variance_zero_at_dark_fringe_with_matched_weight(solid_params):
    assert weighted_variance(solid_params, 0.0, 0.0) == 0.0


def test_mean_slopes_match_finite_differences(dashed_params):
    h = 1e-6
    # central differences carry O(h^2 N) truncation noise, hence the absolute floor
    floor = 1e-6 * transfer_gain(dashed_params) ** 2 * dashed_params.n_photons
    for phi in midpoint_grid(7):
        slope1, slope2 = photon_mean_slopes(dashed_params, phi)
        fd1 = (photon_means(dashed_params, phi + h)[0] - photon_means(dashed_params, phi - h)[0]) / (2 * h)
        fd2 = (photon_means(dashed_params, phi + h)[1] - photon_means(dashed_params, phi - h)[1]) / (2 * h)
        assert math.isclose(slope1, fd1, rel_tol=1e-6, abs_tol=floor)
        assert math.isclose(slope2, fd2, rel_tol=1e-6, abs_tol=floor)
        assert sumdiff_mean_slopes(dashed_params, phi)[0] == 0.0
        assert math.isclose(sumdiff_mean_slopes(dashed_params, phi)[1], slope1 - slope2, rel_tol=1e-12)


def test_moments_scale_linearly_with_photon_number():
    lo = InterferometerParams.with_technical_noise(3.0, r1=0.7, mu=0.9, eta=0.8, n_photons=1e4)
    hi = InterferometerParams.with_technical_noise(3.0, r1=0.7, mu=0.9, eta=0.8, n_photons=2e4)
    phi = 1.3
    for a, b in zip(photon_stats(lo, phi).as_dict().values(), photon_stats(hi, phi).as_dict().values()):
        if a != 0.0:
            assert math.isclose(b / a, 2.0, rel_tol=1e-9)


@settings(max_examples=200)
@given(interferometer_params(), phases)
def test_structural_identities(params, phi):
    stats = photon_stats(params, phi)
    scale = max(stats.var_n1, stats.var_n2, 1.0)
    assert abs(stats.var_nplus + stats.var_nminus - 2.0 * (stats.var_n1 + stats.var_n2)) <= 1e-10 * scale
    assert abs(stats.cov_npm - (stats.var_n1 - stats.var_n2)) <= 1e-10 * scale
    assert stats.cov_n1n2**2 <= stats.var_n1 * stats.var_n2 * (1.0 + 1e-10) + 1e-10 * scale
    assert abs(stats.mean_nplus - (stats.mean_n1 + stats.mean_n2)) <= 1e-10 * max(stats.mean_nplus, 1.0)


@settings(max_examples=100)
@given(interferometer_params(), phases, phases)
def test_sum_mean_constant_property(params, phi_a, phi_b):
    a = sumdiff_stats(params, phi_a)[0]
    b = sumdiff_stats(params, phi_b)[0]
    assert math.isclose(a, b, rel_tol=1e-12)


def test_photon_stats_rejects_inconsistent_moments(solid_params):
    good = photon_stats(solid_params, 1.0).as_dict()
    broken = dict(good, var_nplus=good["var_nplus"] * 1.5)
    with pytest.raises(ValueError, match="var_nplus"):
        PhotonStats(**broken)
    broken = dict(good, cov_n1n2=math.sqrt(good["var_n1"] * good["var_n2"]) * 2.0)
    with pytest.raises(ValueError, match="Cauchy-Schwarz"):
        PhotonStats(**broken)
    broken = dict(good, mean_nplus=good["mean_nplus"] * 2.0)
    with pytest.raises(ValueError, match="mean_nplus"):
        PhotonStats(**broken)


def test_photon_stats_as_dict_field_order(solid_params):
    stats = photon_stats(solid_params, 0.4)
    assert list(stats.as_dict()) == [
        "mean_n1", "mean_n2", "var_n1", "var_n2", "cov_n1n2",
        "mean_nplus", "mean_nminus", "var_nplus", "var_nminus", "cov_npm",
    ]
