"""Frequency-domain response: K matrix, transmission and field sweeps."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks

from .errors import NumericError, SpecError
from .model import HybridHamiltonian, HybridSystem, assemble_hamiltonian

# Power floor (relative to map maximum) applied when converting to dB.
DB_FLOOR_REL = 1e-12

# Default relative prominence used when locating spectral peaks.
PEAK_REL_PROMINENCE = 1e-4


@dataclass(frozen=True, eq=False)
class SweepGrid:
    """Rectangular field/probe grid. Both axes must be strictly increasing."""

    field_values: np.ndarray
    probe_frequencies: np.ndarray

    def __post_init__(self):
        fv = np.asarray(self.field_values, dtype=float)
        pf = np.asarray(self.probe_frequencies, dtype=float)
        for name, arr in (("field_values", fv), ("probe_frequencies", pf)):
            if arr.ndim != 1 or arr.size == 0:
                raise SpecError(f"{name} must be a non-empty 1-d array")
            if not np.all(np.isfinite(arr)):
                raise SpecError(f"{name} must be finite")
            if arr.size > 1 and not np.all(np.diff(arr) > 0):
                raise SpecError(f"{name} must be strictly increasing")
        fv.setflags(write=False)
        pf.setflags(write=False)
        object.__setattr__(self, "field_values", fv)
        object.__setattr__(self, "probe_frequencies", pf)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.field_values.size, self.probe_frequencies.size)


@dataclass(frozen=True, eq=False)
class SpectrumMap:
    """Power on a sweep grid, either raw linear power or dB relative to max."""

    grid: SweepGrid
    power: np.ndarray
    normalization: str = "raw"

    def __post_init__(self):
        p = np.asarray(self.power, dtype=float)
        if p.shape != self.grid.shape:
            raise SpecError(
                f"power shape {p.shape} does not match grid shape {self.grid.shape}"
            )
        if self.normalization not in ("raw", "db"):
            raise SpecError(f"unknown normalization {self.normalization!r}")
        if self.normalization == "raw" and (not np.all(np.isfinite(p)) or np.any(p < 0)):
            raise SpecError("raw power values must be finite and >= 0")
        p.setflags(write=False)
        object.__setattr__(self, "power", p)

    def to_db(self) -> SpectrumMap:
        """dB relative to the map maximum, floored at DB_FLOOR_REL of the max."""
        if self.normalization == "db":
            return self
        peak = self.power.max()
        if peak <= 0:
            raise NumericError("cannot normalize an all-zero map to dB")
        db = 10.0 * np.log10(np.maximum(self.power, peak * DB_FLOOR_REL) / peak)
        return SpectrumMap(grid=self.grid, power=db, normalization="db")

    def linear_power(self) -> np.ndarray:
        """Linear power values regardless of stored normalization."""
        if self.normalization == "raw":
            return self.power
        return 10.0 ** (self.power / 10.0)


def k_matrix(hamiltonian: HybridHamiltonian, probe_ghz: float) -> np.ndarray:
    """Response matrix ``probe*I - H`` at one probe frequency, GHz units."""
    return probe_ghz * np.eye(hamiltonian.dim, dtype=complex) - hamiltonian.entries


def _solve_columns(hamiltonian, probes, drive_index):
    """Solve K(w) x = e_drive for every probe frequency at once.

    Returns an array of shape (n_probe, dim).  Uses dense LU with partial
    pivoting on the stacked matrices.
    """
    probes = np.asarray(probes, dtype=float)
    dim = hamiltonian.dim
    eye = np.eye(dim, dtype=complex)
    K = probes[:, None, None] * eye - hamiltonian.entries
    rhs = np.zeros((dim, 1), dtype=complex)
    rhs[drive_index, 0] = 1.0
    try:
        x = np.linalg.solve(K, rhs[None, :, :])
    except np.linalg.LinAlgError:
        raise NumericError(
            f"singular response matrix at field {hamiltonian.field_tesla} T"
        ) from None
    return x[:, :, 0]


def _port_linewidth(system: HybridSystem, index: int) -> float:
    return float(system.linewidths_ghz[index])


def transmission(
    system: HybridSystem,
    field_tesla: float,
    probe_ghz: float,
    drive: str,
    readout: str,
) -> float:
    """Transmitted power between two ports at one (field, probe) point.

    Returns ``sqrt(gamma_drive*gamma_readout) * probe^2 / 2 * |(K^-1 e_d)_r|^2``
    in arbitrary power units.  The symmetric linewidth prefactor makes the
    value invariant under swapping drive and readout, which also follows
    from the complex symmetry of K, and reduces to ``gamma_x * w^2 / 2``
    when both ports are the same mode.
    """
    H = assemble_hamiltonian(system, field_tesla)
    d = system.index_of(drive)
    r = system.index_of(readout)
    x = _solve_columns(H, np.array([probe_ghz]), d)[0]
    pref = np.sqrt(_port_linewidth(system, d) * _port_linewidth(system, r))
    return float(pref * probe_ghz**2 / 2.0 * np.abs(x[r]) ** 2)


def total_transmission(
    system: HybridSystem, field_tesla: float, probe_ghz: float
) -> float:
    """Antenna-weighted sum of the per-port responses.

    Every photon mode with nonzero readout weight forms one channel,
    driven and read through itself; the channels add as
    ``sum_x eta_x * s_x``.
    """
    weights = system.readout_weights()
    if not np.any(weights > 0):
        raise SpecError("all readout weights are zero, no readout channel")
    H = assemble_hamiltonian(system, field_tesla)
    total = 0.0
    for k in system.photon_indices:
        if weights[k] == 0:
            continue
        x = _solve_columns(H, np.array([probe_ghz]), k)[0]
        gam = _port_linewidth(system, k)
        total += weights[k] * gam * probe_ghz**2 / 2.0 * np.abs(x[k]) ** 2
    return float(total)


def sweep(
    system: HybridSystem,
    grid: SweepGrid,
    drive: str,
    readout: str | None = None,
    use_total: bool = False,
) -> SpectrumMap:
    """Evaluate transmission over a full field/probe grid.

    With ``use_total`` the map is the antenna-weighted channel sum and the
    drive/readout arguments are ignored.  Pointwise evaluation, no
    interpolation: refining the grid changes no value at shared points.
    Row-major order, fields outer.
    """
    if use_total:
        weights = system.readout_weights()
        if not np.any(weights > 0):
            raise SpecError("all readout weights are zero, no readout channel")
        channels = [k for k in system.photon_indices if weights[k] > 0]
    elif readout is None:
        raise SpecError("readout mode required unless use_total is set")

    probes = grid.probe_frequencies
    w2 = probes**2 / 2.0
    power = np.empty(grid.shape)
    for i, b in enumerate(grid.field_values):
        H = assemble_hamiltonian(system, b)
        try:
            if use_total:
                row = np.zeros(probes.size)
                for k in channels:
                    x = _solve_columns(H, probes, k)
                    gam = _port_linewidth(system, k)
                    row += weights[k] * gam * w2 * np.abs(x[:, k]) ** 2
            else:
                d = system.index_of(drive)
                r = system.index_of(readout)
                x = _solve_columns(H, probes, d)
                pref = np.sqrt(_port_linewidth(system, d) * _port_linewidth(system, r))
                row = pref * w2 * np.abs(x[:, r]) ** 2
        except NumericError as exc:
            raise NumericError(f"{exc} (field index {i})") from None
        if not np.all(np.isfinite(row)):
            raise NumericError(f"non-finite transmission at field {b} T")
        power[i] = row
    return SpectrumMap(grid=grid, power=power, normalization="raw")


def refine_peak(x: np.ndarray, y: np.ndarray, index: int) -> tuple[float, float]:
    """Sub-sample peak position and height by a 3-point parabola."""
    if index <= 0 or index >= len(x) - 1:
        return float(x[index]), float(y[index])
    y0, y1, y2 = y[index - 1], y[index], y[index + 1]
    denom = y0 - 2.0 * y1 + y2
    if denom == 0:
        return float(x[index]), float(y[index])
    shift = 0.5 * (y0 - y2) / denom
    height = y1 - 0.25 * (y0 - y2) * shift
    return float(x[index] + shift * (x[index] - x[index - 1])), float(height)


def spectral_peaks(
    frequencies: np.ndarray,
    power: np.ndarray,
    rel_prominence: float = PEAK_REL_PROMINENCE,
    refine: bool = True,
) -> tuple[np.ndarray, np.ndarray]:
    """Locate local maxima of a power trace.

    Returns (positions, heights) sorted by position.  Prominence threshold
    is relative to the trace maximum; endpoints are never peaks.
    """
    power = np.asarray(power, dtype=float)
    top = power.max()
    if top <= 0:
        return np.array([]), np.array([])
    idx, _ = find_peaks(power, prominence=top * rel_prominence)
    if not refine:
        return frequencies[idx], power[idx]
    pos = np.empty(idx.size)
    height = np.empty(idx.size)
    for k, j in enumerate(idx):
        pos[k], height[k] = refine_peak(frequencies, power, j)
    return pos, height
