"""Eigenmode analysis: hybrid branches, splittings, dark modes, bandwidth."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import NumericError, SpecError
from .model import HybridHamiltonian, HybridSystem, assemble_hamiltonian
from .spectra import refine_peak, _solve_columns, _port_linewidth

# Eigenmodes with photon fraction inside this window count as mixed
# photon-magnon branches when extracting a splitting.
MIXED_FRACTION_WINDOW = (0.1, 0.9)

DARK_FRACTION_THRESHOLD = 0.05


@dataclass(frozen=True, eq=False)
class EigenMode:
    """One complex eigenmode of the dynamical matrix.

    ``frequency_ghz`` is the real part of the eigenvalue, ``linewidth_mhz``
    is ``-2 Im(eigenvalue)`` converted to MHz, ``vector`` is the unit
    eigenvector and ``photon_fraction`` the summed squared magnitude of its
    photon components.
    """

    frequency_ghz: float
    linewidth_mhz: float
    vector: np.ndarray = field(repr=False)
    photon_fraction: float


def eigenmodes(hamiltonian: HybridHamiltonian) -> tuple[EigenMode, ...]:
    """Eigenmodes sorted by frequency (ties broken by linewidth).

    Raises NumericError if the dense eigensolver fails to converge.
    """
    try:
        values, vectors = np.linalg.eig(hamiltonian.entries)
    except np.linalg.LinAlgError as exc:
        raise NumericError(
            f"eigensolver failed for the {hamiltonian.dim}-mode matrix "
            f"at field {hamiltonian.field_tesla} T: {exc}"
        ) from None
    order = np.lexsort((values.imag, values.real))
    values = values[order]
    vectors = vectors[:, order]
    n_ph = hamiltonian.n_photon
    modes = []
    for k in range(values.size):
        v = vectors[:, k].copy()
        v.setflags(write=False)
        modes.append(
            EigenMode(
                frequency_ghz=float(values[k].real),
                linewidth_mhz=float(-2.0 * values[k].imag * 1e3),
                vector=v,
                photon_fraction=float(np.sum(np.abs(v[:n_ph]) ** 2)),
            )
        )
    return tuple(modes)


def full_hybridization_field(
    system: HybridSystem, photon: str, magnon: str
) -> float:
    """Field at which the magnon Larmor frequency meets the photon mode, T."""
    pm = system.photon_mode(photon)
    mm = system.magnon_mode(magnon)
    gyro = system.effective_gyromagnetic(mm)
    return pm.frequency_ghz / gyro - mm.field_offset_mt / 1e3


def rabi_splitting(
    system: HybridSystem,
    photon: str,
    magnon: str,
    field_tesla: float | None = None,
) -> float:
    """Frequency gap of the outermost mixed branches at full hybridization, MHz.

    Eigenmodes whose photon fraction falls outside MIXED_FRACTION_WINDOW
    (dark modes, spectator photon branches) are excluded, so a dark mode
    sitting between the two bright branches does not shrink the result.
    """
    if field_tesla is None:
        field_tesla = full_hybridization_field(system, photon, magnon)
    modes = eigenmodes(assemble_hamiltonian(system, field_tesla))
    lo, hi = MIXED_FRACTION_WINDOW
    mixed = [m for m in modes if lo <= m.photon_fraction <= hi]
    if len(mixed) < 2:
        raise NumericError(
            f"found {len(mixed)} mixed branches at {field_tesla} T, need at least two "
            f"(photon fraction window {MIXED_FRACTION_WINDOW})"
        )
    return (mixed[-1].frequency_ghz - mixed[0].frequency_ghz) * 1e3


def scaling_prediction(g_single_mhz: float, count: int) -> float:
    """Splitting of ``count`` identical spheres from the single-sphere coupling.

    The collective bright mode couples as ``g*sqrt(count)``, so the predicted
    splitting is ``2*g_single*sqrt(count)`` in MHz.
    """
    if count < 1:
        raise SpecError("count must be >= 1")
    if g_single_mhz < 0:
        raise SpecError("coupling must be >= 0")
    return 2.0 * g_single_mhz * np.sqrt(count)


@dataclass(frozen=True)
class SplittingComparison:
    """Scaling-law prediction against a measured splitting."""

    predicted_mhz: float
    measured_mhz: float

    @property
    def ratio(self) -> float:
        return self.predicted_mhz / self.measured_mhz

    @property
    def discrepancy_percent(self) -> float:
        return (self.ratio - 1.0) * 100.0


def compare_splitting(predicted_mhz: float, measured_mhz: float) -> SplittingComparison:
    if measured_mhz <= 0:
        raise SpecError("measured splitting must be positive")
    return SplittingComparison(predicted_mhz=predicted_mhz, measured_mhz=measured_mhz)


@dataclass(frozen=True, eq=False)
class DarkModeReport:
    """Eigenmodes at one field with a darkness flag per mode."""

    field_tesla: float
    threshold: float
    modes: tuple[EigenMode, ...]
    dark_flags: tuple[bool, ...]

    @property
    def dark_modes(self) -> tuple[EigenMode, ...]:
        return tuple(m for m, flag in zip(self.modes, self.dark_flags) if flag)


def dark_mode_report(
    hamiltonian: HybridHamiltonian,
    threshold: float = DARK_FRACTION_THRESHOLD,
) -> DarkModeReport:
    """Flag eigenmodes whose photon fraction is below ``threshold``."""
    if not 0 < threshold < 1:
        raise SpecError("threshold must lie strictly between 0 and 1")
    modes = eigenmodes(hamiltonian)
    flags = tuple(m.photon_fraction < threshold for m in modes)
    return DarkModeReport(
        field_tesla=float(hamiltonian.field_tesla),
        threshold=threshold,
        modes=modes,
        dark_flags=flags,
    )


@dataclass(frozen=True, eq=False)
class BranchSet:
    """Eigenvalue branches tracked across a field sweep.

    Arrays have shape (n_field, n_branch); branch ids are assigned by
    frequency order at the first field point.
    """

    field_values: np.ndarray
    frequencies_ghz: np.ndarray
    linewidths_mhz: np.ndarray
    photon_fractions: np.ndarray

    @property
    def n_branches(self) -> int:
        return self.frequencies_ghz.shape[1]


def track_branches(system: HybridSystem, field_values) -> BranchSet:
    """Follow eigenvalue branches along a field sweep by continuity.

    Consecutive field points are matched with a globally optimal assignment
    on eigenvalue distance; eigenvector overlap serves as the tie-breaker,
    so uncoupled branches cross cleanly instead of swapping identities.
    """
    field_values = np.asarray(field_values, dtype=float)
    if field_values.ndim != 1 or field_values.size == 0:
        raise SpecError("field_values must be a non-empty 1-d array")
    dim = system.dim
    n = field_values.size
    freqs = np.empty((n, dim))
    widths = np.empty((n, dim))
    fracs = np.empty((n, dim))

    prev_vals = None
    prev_vecs = None
    for i, b in enumerate(field_values):
        H = assemble_hamiltonian(system, b)
        try:
            values, vectors = np.linalg.eig(H.entries)
        except np.linalg.LinAlgError as exc:
            raise NumericError(f"eigensolver failed at field {b} T: {exc}") from None
        if prev_vals is None:
            order = np.lexsort((values.imag, values.real))
        else:
            dist = np.abs(values[None, :] - prev_vals[:, None])
            overlap = np.abs(prev_vecs.conj().T @ vectors)
            tie_scale = 1e-6 * max(1.0, float(np.max(np.abs(values))))
            cost = dist + tie_scale * (1.0 - overlap)
            _, order = linear_sum_assignment(cost)
        values = values[order]
        vectors = vectors[:, order]
        prev_vals = values
        prev_vecs = vectors
        freqs[i] = values.real
        widths[i] = -2.0 * values.imag * 1e3
        fracs[i] = np.sum(np.abs(vectors[: system.n_photon, :]) ** 2, axis=0)

    for arr in (freqs, widths, fracs):
        arr.setflags(write=False)
    fv = field_values.copy()
    fv.setflags(write=False)
    return BranchSet(
        field_values=fv,
        frequencies_ghz=freqs,
        linewidths_mhz=widths,
        photon_fractions=fracs,
    )


@dataclass(frozen=True, eq=False)
class TransductionResult:
    """Outcome of a tuning-range scan of the lowest hybrid branch."""

    bandwidth_mhz: float
    field_window: tuple[float, float]
    field_values: np.ndarray
    tuned_frequencies_ghz: np.ndarray
    efficiencies: np.ndarray
    peak_efficiency: float


def transduction_bandwidth(
    system: HybridSystem,
    drive: str,
    readout: str,
    field_values,
) -> TransductionResult:
    """Tunable bandwidth of the lowest hybrid branch at half peak efficiency.

    For each field the lowest-frequency eigenmode is the operating point;
    its conversion efficiency is the peak drive-to-readout transmission in a
    narrow probe window around that branch.  The bandwidth is the frequency
    span covered by the operating point while the efficiency stays within
    3 dB of its maximum over the scanned field range.
    """
    field_values = np.asarray(field_values, dtype=float)
    if field_values.ndim != 1 or field_values.size < 2:
        raise SpecError("field_values must contain at least two points")
    d = system.index_of(drive)
    r = system.index_of(readout)
    if system.is_photon(drive):
        raise SpecError(f"drive mode {drive!r} must be a magnon mode")
    if not system.is_photon(readout):
        raise SpecError(f"readout mode {readout!r} must be a photon mode")
    gam_max = float(np.max(system.linewidths_ghz))
    if gam_max <= 0:
        raise SpecError("transduction needs at least one lossy mode")
    pref = np.sqrt(_port_linewidth(system, d) * _port_linewidth(system, r))

    n = field_values.size
    tuned = np.empty(n)
    eff = np.empty(n)
    for i, b in enumerate(field_values):
        H = assemble_hamiltonian(system, b)
        try:
            values = np.linalg.eigvals(H.entries)
        except np.linalg.LinAlgError as exc:
            raise NumericError(f"eigensolver failed at field {b} T: {exc}") from None
        reals = np.sort(values.real)
        low = reals[0]
        tuned[i] = low
        # Probe window: wide enough to capture the resonance, narrow enough
        # to exclude the next distinct branch.
        half = 25.0 * gam_max
        others = reals[reals > low + 10.0 * gam_max]
        if others.size:
            half = max(min(half, 0.45 * (others[0] - low)), 5.0 * gam_max)
        probes = np.linspace(low - half, low + half, 241)
        x = _solve_columns(H, probes, d)
        trace = pref * probes**2 / 2.0 * np.abs(x[:, r]) ** 2
        j = int(np.argmax(trace))
        _, height = refine_peak(probes, trace, j)
        eff[i] = height

    peak = float(eff.max())
    if peak <= 0:
        raise NumericError("no transduction between the requested ports")
    sel = eff >= peak / 2.0
    span = float(tuned[sel].max() - tuned[sel].min()) * 1e3
    window = (float(field_values[sel].min()), float(field_values[sel].max()))
    for arr in (tuned, eff):
        arr.setflags(write=False)
    fv = field_values.copy()
    fv.setflags(write=False)
    return TransductionResult(
        bandwidth_mhz=span,
        field_window=window,
        field_values=fv,
        tuned_frequencies_ghz=tuned,
        efficiencies=eff,
        peak_efficiency=peak,
    )
