import numpy as np
import pytest

from hsim import (
    DiameterFieldSample,
    SizeEffectParams,
    SpecError,
    apparent_g_factor,
    fit_size_effect,
    fitted_params,
    offset_field,
    offset_slope,
    params_for_cavity,
    permittivity_from_slope,
    predicted_b_fh,
)

import oracles


def test_params_for_cavity_sets_wavelength():
    p = params_for_cavity(14.09)
    assert p.larmor_wavelength_mm == pytest.approx(299.792458 / 14.09)
    assert p.saturation_magnetization_mt == 178.0
    assert p.relative_permittivity == 30.0
    assert p.zero_diameter_offset_mt == 14.0


def test_params_overrides():
    p = params_for_cavity(10.65, relative_permittivity=15.0, zero_diameter_offset_mt=0.0)
    assert p.relative_permittivity == 15.0
    assert p.zero_diameter_offset_mt == 0.0


def test_offset_slope_matches_longhand_formula():
    p = params_for_cavity(14.09)
    want = oracles.offset_slope_reference(p.larmor_wavelength_mm, 178.0, 30.0)
    assert offset_slope(p) == pytest.approx(want, rel=1e-12)


def test_published_slope_regime():
    # 21.3 mm wavelength with the default material constants
    p = SizeEffectParams(larmor_wavelength_mm=21.3)
    assert offset_slope(p) == pytest.approx(6.2, rel=0.05)


def test_offset_field_quadratic_in_diameter():
    p = params_for_cavity(14.09)
    k = offset_slope(p)
    assert offset_field(0.0, p) == pytest.approx(14.0)
    assert offset_field(2.0, p) == pytest.approx(14.0 - 4.0 * k)
    # differences eliminate the intercept
    d32 = offset_field(3.0, p) - offset_field(2.0, p)
    assert d32 == pytest.approx(-5.0 * k)


def test_predicted_b_fh_increases_with_diameter():
    diameters = np.linspace(0.2, 3.0, 40)
    b = [predicted_b_fh(d, 14.09, 28.0) for d in diameters]
    assert np.all(np.diff(b) > 0)


def test_predicted_b_fh_zero_diameter():
    b0 = predicted_b_fh(1e-12, 14.09, 28.0)
    assert b0 == pytest.approx(14.09 / 28.0 - 0.014, abs=1e-9)


def test_permittivity_round_trips_through_slope():
    p = params_for_cavity(14.09, relative_permittivity=22.5)
    eps = permittivity_from_slope(offset_slope(p), p.larmor_wavelength_mm)
    assert eps == pytest.approx(22.5, rel=1e-12)


def test_permittivity_from_published_slope():
    assert permittivity_from_slope(6.2, 21.3) == pytest.approx(31.0, abs=0.1)


def test_apparent_g_factor():
    assert apparent_g_factor(28.0) == pytest.approx(2.0)
    assert apparent_g_factor(26.0) == pytest.approx(1.857, abs=1e-3)
    with pytest.raises(SpecError):
        apparent_g_factor(0.0)


def test_sample_validation():
    with pytest.raises(SpecError):
        DiameterFieldSample(diameter_mm=0.0, b_fh_tesla=0.5)
    with pytest.raises(SpecError):
        DiameterFieldSample(diameter_mm=1.0, b_fh_tesla=0.5, sigma_tesla=0.0)


def make_samples(p, freq=14.09, sigma=None, jitter=None, n=8, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    for d in np.linspace(0.5, 2.5, n):
        b = predicted_b_fh(d, freq, 28.0, p)
        if jitter:
            b += rng.normal(0.0, jitter)
        out.append(DiameterFieldSample(d, b, sigma))
    return out


def test_fit_recovers_exact_parameters():
    p = params_for_cavity(14.09)
    fit = fit_size_effect(make_samples(p), 14.09)
    assert fit.slope_mt_per_mm2 == pytest.approx(offset_slope(p), rel=1e-9)
    assert fit.zero_diameter_offset_mt == pytest.approx(14.0, abs=1e-9)
    assert fit.permittivity == pytest.approx(30.0, rel=1e-9)
    assert fit.n_samples == 8


def test_fit_weighted_uncertainties_scale():
    p = params_for_cavity(14.09)
    noisy = make_samples(p, sigma=0.003, jitter=0.003, seed=4)
    fit = fit_size_effect(noisy, 14.09)
    assert fit.zero_diameter_offset_mt == pytest.approx(14.0, abs=3 * fit.zero_diameter_offset_sigma)
    # tripling every sigma triples the reported uncertainties
    tripled = [DiameterFieldSample(s.diameter_mm, s.b_fh_tesla, 0.009) for s in noisy]
    fit3 = fit_size_effect(tripled, 14.09)
    assert fit3.zero_diameter_offset_sigma == pytest.approx(3 * fit.zero_diameter_offset_sigma, rel=1e-9)
    assert fit3.zero_diameter_offset_mt == pytest.approx(fit.zero_diameter_offset_mt, rel=1e-12)


def test_fit_unweighted_scales_by_residuals():
    p = params_for_cavity(14.09)
    fit = fit_size_effect(make_samples(p, jitter=0.002, seed=11), 14.09)
    assert fit.slope_sigma > 0
    assert fit.zero_diameter_offset_sigma > 0


def test_fit_needs_enough_distinct_samples():
    p = params_for_cavity(14.09)
    s = make_samples(p, n=8)
    with pytest.raises(SpecError):
        fit_size_effect(s[:2], 14.09)
    same = [DiameterFieldSample(1.0, 0.5), DiameterFieldSample(1.0, 0.51),
            DiameterFieldSample(1.0, 0.52)]
    with pytest.raises(SpecError):
        fit_size_effect(same, 14.09)


def test_fitted_params_round_trip():
    p = params_for_cavity(14.09, relative_permittivity=26.0, zero_diameter_offset_mt=10.0)
    fit = fit_size_effect(make_samples(p), 14.09)
    q = fitted_params(fit)
    assert q.relative_permittivity == pytest.approx(26.0, rel=1e-9)
    assert q.zero_diameter_offset_mt == pytest.approx(10.0, abs=1e-9)
    assert q.larmor_wavelength_mm == pytest.approx(p.larmor_wavelength_mm)
    # the reconstructed parameters reproduce the synthetic line
    for d in (0.7, 1.9):
        assert predicted_b_fh(d, 14.09, 28.0, q) == pytest.approx(
            predicted_b_fh(d, 14.09, 28.0, p), abs=1e-12
        )


def test_params_invariants():
    with pytest.raises(SpecError):
        SizeEffectParams(larmor_wavelength_mm=0.0)
    with pytest.raises(SpecError):
        SizeEffectParams(larmor_wavelength_mm=20.0, relative_permittivity=0.5)
    with pytest.raises(SpecError):
        params_for_cavity(-1.0)
