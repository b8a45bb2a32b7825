"""Time-domain evolution and ringdown spectra.

Serves as an independent check on the frequency-domain machinery: a state
evolved under the dynamical matrix and Fourier-transformed must ring at
the eigenmode frequencies.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SpecError
from .model import HybridHamiltonian

MIN_SPECTRUM_SAMPLES = 256

# Upper limit on the integration step relative to the fastest rotation
# left in the chosen frame.
STEP_MARGIN = 20.0


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Mode amplitudes on a uniform time grid, in a rotating frame.

    ``amplitudes`` has shape (n_times, n_modes); the stored amplitudes
    rotate at the mode frequency minus ``reference_ghz``.
    """

    times_ns: np.ndarray
    amplitudes: np.ndarray = field(repr=False)
    reference_ghz: float
    mode_labels: tuple[str, ...]

    def mode_index(self, mode) -> int:
        if isinstance(mode, (int, np.integer)):
            return int(mode)
        try:
            return self.mode_labels.index(mode)
        except ValueError:
            raise SpecError(f"unknown mode label {mode!r}") from None

    def energies(self) -> np.ndarray:
        """Squared amplitude of each mode at each time, shape (n_times, n_modes)."""
        return np.abs(self.amplitudes) ** 2

    def total_energy(self) -> np.ndarray:
        """Sum of mode energies at each time."""
        return self.energies().sum(axis=1)


def evolve(
    hamiltonian: HybridHamiltonian,
    initial_amplitudes,
    t_span_ns: float,
    step_ns: float,
    reference_ghz: float | None = None,
) -> Trajectory:
    """Integrate ``dW/dt = -2*pi*i*(H - ref*I) W`` with fixed-step RK4.

    Parameters
    ----------
    initial_amplitudes : array-like, complex, length ``hamiltonian.dim``
    t_span_ns, step_ns : float
        Total time and step, ns.  The step must satisfy
        ``step <= 1 / (20 * max detuning from the reference)`` or the call
        is rejected with a suggested value.
    reference_ghz : float, optional
        Rotating-frame frequency; defaults to the mean of the diagonal
        real parts, which keeps residual rotations slow.
    """
    w0 = np.asarray(initial_amplitudes, dtype=complex)
    if w0.shape != (hamiltonian.dim,):
        raise SpecError(
            f"initial amplitudes must have length {hamiltonian.dim}, got shape {w0.shape}"
        )
    if not np.all(np.isfinite(w0)):
        raise SpecError("initial amplitudes must be finite")
    if step_ns <= 0 or t_span_ns < step_ns:
        raise SpecError("need 0 < step_ns <= t_span_ns")

    diag_real = np.real(np.diag(hamiltonian.entries))
    if reference_ghz is None:
        reference_ghz = float(diag_real.mean())
    max_detuning = float(np.max(np.abs(diag_real - reference_ghz)))
    if max_detuning > 0 and step_ns > 1.0 / (STEP_MARGIN * max_detuning):
        raise SpecError(
            f"step {step_ns} ns too large for detunings up to {max_detuning} GHz; "
            f"use step <= {1.0 / (STEP_MARGIN * max_detuning):.6g} ns"
        )

    dim = hamiltonian.dim
    generator = -2j * np.pi * (
        hamiltonian.entries - reference_ghz * np.eye(dim, dtype=complex)
    )
    n_steps = int(round(t_span_ns / step_ns))
    amplitudes = np.empty((n_steps + 1, dim), dtype=complex)
    amplitudes[0] = w0
    w = w0.copy()
    h = step_ns
    for k in range(n_steps):
        k1 = generator @ w
        k2 = generator @ (w + 0.5 * h * k1)
        k3 = generator @ (w + 0.5 * h * k2)
        k4 = generator @ (w + h * k3)
        w = w + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        amplitudes[k + 1] = w

    times = np.arange(n_steps + 1) * h
    times.setflags(write=False)
    amplitudes.setflags(write=False)
    return Trajectory(
        times_ns=times,
        amplitudes=amplitudes,
        reference_ghz=float(reference_ghz),
        mode_labels=hamiltonian.labels,
    )


def ringdown_spectrum(trajectory: Trajectory, readout_mode) -> tuple[np.ndarray, np.ndarray]:
    """Power spectrum of one mode's ringdown, on laboratory-frame frequencies.

    Returns ``(frequencies_ghz, power)`` sorted by frequency.  A component
    oscillating as ``exp(-2*pi*i*(f - ref)*t)`` shows up at ``f``, so peaks
    land on the eigenmode frequencies of the generating matrix.
    """
    idx = trajectory.mode_index(readout_mode)
    a = trajectory.amplitudes[:, idx]
    n = a.size
    if n < MIN_SPECTRUM_SAMPLES:
        raise SpecError(
            f"need at least {MIN_SPECTRUM_SAMPLES} samples for a spectrum, got {n}"
        )
    dt = float(trajectory.times_ns[1] - trajectory.times_ns[0])
    # ifft uses the exp(+2*pi*i*k*n/N) kernel, matching the sign of our
    # evolution, so bin k collects the component at ref + k-th frequency.
    spectrum = np.fft.ifft(a) * n
    freqs = np.fft.fftfreq(n, d=dt) + trajectory.reference_ghz
    power = np.abs(spectrum) ** 2 / n
    order = np.argsort(freqs)
    return freqs[order], power[order]
