"""Sphere-size dependence of the hybridization field.

The effective field offset of a sphere of diameter ``phi`` follows a
quadratic law ``b(phi) = b0 - k * phi**2`` whose coefficient combines
the saturation magnetization, the relative permittivity of the sphere
and the free-space wavelength at the working frequency:

    k = 2 * pi**2 * M0 * (5 + eps_r) / (45 * lambda**2)   [mT / mm**2]

The full-hybridization field then grows with diameter as
``B(phi) = f / gyro - b(phi) / 1000``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SpecError

SPEED_OF_LIGHT_MM_GHZ = 299.792458

DEFAULT_MAGNETIZATION_MT = 178.0
DEFAULT_PERMITTIVITY = 30.0
DEFAULT_ZERO_DIAMETER_OFFSET_MT = 14.0


@dataclass(frozen=True)
class SizeEffectParams:
    """Material and geometry constants of the quadratic offset law."""

    larmor_wavelength_mm: float
    saturation_magnetization_mt: float = DEFAULT_MAGNETIZATION_MT
    relative_permittivity: float = DEFAULT_PERMITTIVITY
    zero_diameter_offset_mt: float = DEFAULT_ZERO_DIAMETER_OFFSET_MT

    def __post_init__(self):
        if self.larmor_wavelength_mm <= 0:
            raise SpecError("wavelength must be positive")
        if self.saturation_magnetization_mt <= 0:
            raise SpecError("magnetization must be positive")
        if self.relative_permittivity <= 1:
            raise SpecError("relative permittivity must exceed 1")


def params_for_cavity(frequency_ghz: float, **overrides) -> SizeEffectParams:
    """Constants with the wavelength taken at a cavity frequency, GHz."""
    if frequency_ghz <= 0:
        raise SpecError("cavity frequency must be positive")
    return SizeEffectParams(
        larmor_wavelength_mm=SPEED_OF_LIGHT_MM_GHZ / frequency_ghz, **overrides
    )


def offset_slope(params: SizeEffectParams) -> float:
    """Quadratic coefficient k of the offset law, mT per mm**2."""
    return (
        2.0
        * np.pi**2
        * params.saturation_magnetization_mt
        * (5.0 + params.relative_permittivity)
        / (45.0 * params.larmor_wavelength_mm**2)
    )


def offset_field(diameter_mm: float, params: SizeEffectParams) -> float:
    """Effective field offset of a sphere of the given diameter, mT."""
    if diameter_mm < 0:
        raise SpecError("diameter must be >= 0")
    return params.zero_diameter_offset_mt - offset_slope(params) * diameter_mm**2


def predicted_b_fh(
    diameter_mm: float,
    cavity_frequency_ghz: float,
    gyromagnetic_ghz_per_t: float = 28.0,
    params: SizeEffectParams | None = None,
) -> float:
    """Predicted full-hybridization field for one sphere, T."""
    if gyromagnetic_ghz_per_t <= 0:
        raise SpecError("gyromagnetic ratio must be positive")
    if params is None:
        params = params_for_cavity(cavity_frequency_ghz)
    b_mt = offset_field(diameter_mm, params)
    return cavity_frequency_ghz / gyromagnetic_ghz_per_t - b_mt / 1e3


def permittivity_from_slope(
    slope_mt_per_mm2: float,
    larmor_wavelength_mm: float,
    saturation_magnetization_mt: float = DEFAULT_MAGNETIZATION_MT,
) -> float:
    """Invert the slope formula for the relative permittivity."""
    return (
        45.0
        * larmor_wavelength_mm**2
        * slope_mt_per_mm2
        / (2.0 * np.pi**2 * saturation_magnetization_mt)
        - 5.0
    )


def apparent_g_factor(gyromagnetic_slope_ghz_per_t: float) -> float:
    """Convert a fitted Larmor slope in GHz/T to g-factor units.

    The free-electron value 28 GHz/T corresponds to g = 2.
    """
    if gyromagnetic_slope_ghz_per_t <= 0:
        raise SpecError("slope must be positive")
    return 2.0 * gyromagnetic_slope_ghz_per_t / 28.0


@dataclass(frozen=True)
class DiameterFieldSample:
    """One measured (diameter, full-hybridization field) point."""

    diameter_mm: float
    b_fh_tesla: float
    sigma_tesla: float | None = None

    def __post_init__(self):
        if self.diameter_mm <= 0:
            raise SpecError("sample diameter must be positive")
        if self.sigma_tesla is not None and self.sigma_tesla <= 0:
            raise SpecError("sample uncertainty must be positive")


@dataclass(frozen=True)
class SizeEffectFit:
    """Weighted quadratic-law fit over a set of sphere diameters."""

    slope_mt_per_mm2: float
    slope_sigma: float
    zero_diameter_offset_mt: float
    zero_diameter_offset_sigma: float
    permittivity: float
    permittivity_sigma: float
    cavity_frequency_ghz: float
    gyromagnetic_ghz_per_t: float
    larmor_wavelength_mm: float
    n_samples: int


def fit_size_effect(
    samples,
    cavity_frequency_ghz: float,
    gyromagnetic_ghz_per_t: float = 28.0,
    saturation_magnetization_mt: float = DEFAULT_MAGNETIZATION_MT,
    larmor_wavelength_mm: float | None = None,
) -> SizeEffectFit:
    """Least-squares fit of ``B_fh`` against diameter squared.

    Straight-line regression in ``(phi**2, B_fh)`` space, weighted by
    ``1/sigma**2`` when every sample carries an uncertainty.  With no
    uncertainties the parameter covariance is scaled by the residual
    variance.  Needs at least three samples over two distinct diameters.
    """
    samples = list(samples)
    if larmor_wavelength_mm is None:
        if cavity_frequency_ghz <= 0:
            raise SpecError("cavity frequency must be positive")
        larmor_wavelength_mm = SPEED_OF_LIGHT_MM_GHZ / cavity_frequency_ghz

    phi2 = np.array([s.diameter_mm**2 for s in samples], dtype=float)
    y = np.array([s.b_fh_tesla for s in samples], dtype=float)
    sigmas = [s.sigma_tesla for s in samples]
    weighted = all(s is not None for s in sigmas)
    n = phi2.size
    if n < 3:
        raise SpecError("need at least three samples")
    if np.unique(phi2).size < 2:
        raise SpecError("need at least two distinct diameters")

    w = 1.0 / np.array([s**2 for s in sigmas]) if weighted else np.ones(n)
    design = np.column_stack([np.ones(n), phi2])
    normal = design.T @ (w[:, None] * design)
    rhs = design.T @ (w * y)
    try:
        coeff = np.linalg.solve(normal, rhs)
        cov = np.linalg.inv(normal)
    except np.linalg.LinAlgError:
        raise SpecError("degenerate diameter set, cannot fit") from None
    if not weighted:
        resid = y - design @ coeff
        cov = cov * float(resid @ resid) / (n - 2)

    intercept, slope_t = coeff
    slope_mt = slope_t * 1e3
    slope_sigma = float(np.sqrt(cov[1, 1])) * 1e3
    b0_mt = (cavity_frequency_ghz / gyromagnetic_ghz_per_t - intercept) * 1e3
    b0_sigma = float(np.sqrt(cov[0, 0])) * 1e3
    eps = permittivity_from_slope(
        slope_mt, larmor_wavelength_mm, saturation_magnetization_mt
    )
    deps_dslope = (
        45.0 * larmor_wavelength_mm**2 / (2.0 * np.pi**2 * saturation_magnetization_mt)
    )
    return SizeEffectFit(
        slope_mt_per_mm2=float(slope_mt),
        slope_sigma=slope_sigma,
        zero_diameter_offset_mt=float(b0_mt),
        zero_diameter_offset_sigma=b0_sigma,
        permittivity=float(eps),
        permittivity_sigma=float(deps_dslope * slope_sigma),
        cavity_frequency_ghz=float(cavity_frequency_ghz),
        gyromagnetic_ghz_per_t=float(gyromagnetic_ghz_per_t),
        larmor_wavelength_mm=float(larmor_wavelength_mm),
        n_samples=n,
    )


def fitted_params(fit: SizeEffectFit) -> SizeEffectParams:
    """Offset-law constants implied by a fit, for prediction round-trips."""
    return SizeEffectParams(
        larmor_wavelength_mm=fit.larmor_wavelength_mm,
        relative_permittivity=fit.permittivity,
        zero_diameter_offset_mt=fit.zero_diameter_offset_mt,
    )
