import numpy as np
import pytest

from hsim import (
    CouplingSpec,
    MagnonModeSpec,
    PhotonModeSpec,
    SpecError,
    SystemSpec,
    assemble_hamiltonian,
    build_system,
    eigenmodes,
    evolve,
    ringdown_spectrum,
    spectral_peaks,
)

import oracles

B_RES = 0.380357142857142857


def lone_mode(gamma=2.0):
    return build_system(
        SystemSpec(
            photon_modes=(PhotonModeSpec("c", 10.65, gamma, 1.0),),
            magnon_modes=(),
            couplings=(),
        )
    )


def resonant_pair(gamma=2.0, g=90.0):
    return build_system(
        SystemSpec(
            photon_modes=(PhotonModeSpec("c", 10.65, gamma, 1.0),),
            magnon_modes=(MagnonModeSpec("m", 0.0, gamma),),
            couplings=(CouplingSpec("c", "m", g),),
        )
    )


def test_single_mode_decay_envelope():
    """|a(t)| = exp(-pi*gamma*t) with gamma in GHz and t in ns."""
    H = assemble_hamiltonian(lone_mode(), 0.0)
    traj = evolve(H, [1.0], t_span_ns=400.0, step_ns=0.05)
    expected = np.exp(-np.pi * 2e-3 * traj.times_ns)
    np.testing.assert_allclose(np.abs(traj.amplitudes[:, 0]), expected, rtol=1e-8)


def test_half_energy_time():
    gamma = 2e-3
    H = assemble_hamiltonian(lone_mode(), 0.0)
    traj = evolve(H, [1.0], t_span_ns=120.0, step_ns=0.05)
    energy = traj.energies()[:, 0]
    t_half = np.log(2.0) / (2.0 * np.pi * gamma)
    j = int(np.argmin(np.abs(energy - 0.5)))
    assert traj.times_ns[j] == pytest.approx(t_half, abs=0.05)


def test_rabi_flop_against_rotating_frame_oracle():
    sys = resonant_pair()
    H = assemble_hamiltonian(sys, B_RES)
    traj = evolve(H, [0.0, 1.0], t_span_ns=25.0, step_ns=0.01)
    a_c, a_m = oracles.rabi_amplitudes(10.65, 2e-3, 0.09, traj.times_ns,
                                       reference=traj.reference_ghz)
    np.testing.assert_allclose(traj.amplitudes[:, 0], a_c, atol=1e-7)
    np.testing.assert_allclose(traj.amplitudes[:, 1], a_m, atol=1e-7)


def test_energy_swaps_at_rabi_period():
    sys = resonant_pair()
    H = assemble_hamiltonian(sys, B_RES)
    period = 1.0 / (2.0 * 0.09)
    traj = evolve(H, [0.0, 1.0], t_span_ns=2.0 * period, step_ns=period / 500.0)
    energy = traj.energies()
    cavity = energy[:, 0]
    # cavity is empty at 0, full at half period, empty again at the period
    half = int(round(0.5 * period / (traj.times_ns[1] - traj.times_ns[0])))
    assert cavity[0] == 0.0
    assert cavity[half] == pytest.approx(np.exp(-2 * np.pi * 2e-3 * traj.times_ns[half]), rel=1e-4)
    assert cavity[2 * half] < 1e-4


def test_total_energy_never_increases():
    sys = resonant_pair()
    H = assemble_hamiltonian(sys, B_RES)
    traj = evolve(H, [0.3 + 0.1j, 0.8], t_span_ns=50.0, step_ns=0.02)
    total = traj.total_energy()
    assert np.all(np.diff(total) <= 1e-12)


def test_lossless_system_conserves_energy():
    sys = resonant_pair(gamma=0.0)
    H = assemble_hamiltonian(sys, B_RES)
    traj = evolve(H, [0.0, 1.0], t_span_ns=30.0, step_ns=0.02)
    total = traj.total_energy()
    np.testing.assert_allclose(total, 1.0, rtol=1e-9)


def test_convergence_on_step_halving():
    """Fourth order integrator: halving the step shrinks the error ~16x."""
    sys = resonant_pair()
    H = assemble_hamiltonian(sys, B_RES)
    ref = 10.65
    errs = []
    for step in (0.1, 0.05, 0.025):
        traj = evolve(H, [0.0, 1.0], t_span_ns=10.0, step_ns=step, reference_ghz=ref)
        a_c, a_m = oracles.rabi_amplitudes(10.65, 2e-3, 0.09, traj.times_ns, reference=ref)
        errs.append(np.max(np.abs(traj.amplitudes[:, 1] - a_m)))
    assert errs[1] < errs[0] / 12.0
    assert errs[2] < 1e-6


def test_step_rejected_when_detuning_too_fast():
    sys = resonant_pair()
    H = assemble_hamiltonian(sys, 0.30)  # magnon detuned by ~2.2 GHz
    with pytest.raises(SpecError, match="step"):
        evolve(H, [0.0, 1.0], t_span_ns=10.0, step_ns=0.5)


def test_bad_initial_amplitudes():
    H = assemble_hamiltonian(resonant_pair(), B_RES)
    with pytest.raises(SpecError):
        evolve(H, [1.0], t_span_ns=1.0, step_ns=0.01)
    with pytest.raises(SpecError):
        evolve(H, [np.nan, 0.0], t_span_ns=1.0, step_ns=0.01)
    with pytest.raises(SpecError):
        evolve(H, [0.0, 1.0], t_span_ns=1.0, step_ns=0.0)


def test_trajectory_labels_and_lookup():
    H = assemble_hamiltonian(resonant_pair(), B_RES)
    traj = evolve(H, [1.0, 0.0], t_span_ns=1.0, step_ns=0.01)
    assert traj.mode_labels == ("c", "m")
    assert traj.mode_index("m") == 1
    with pytest.raises(SpecError):
        traj.mode_index("q")


def test_ringdown_spectrum_peaks_on_eigenfrequencies():
    sys = resonant_pair()
    H = assemble_hamiltonian(sys, B_RES)
    traj = evolve(H, [0.0, 1.0], t_span_ns=400.0, step_ns=0.02)
    freqs, power = ringdown_spectrum(traj, "c")
    assert np.all(np.diff(freqs) > 0)
    bin_width = freqs[1] - freqs[0]
    expected = sorted(m.frequency_ghz for m in eigenmodes(H))
    # two dominant bins, one per hybrid mode
    top = np.argsort(power)[-2:]
    got = sorted(freqs[top])
    for want, have in zip(expected, got):
        assert abs(want - have) <= bin_width


def test_ringdown_needs_enough_samples():
    H = assemble_hamiltonian(resonant_pair(), B_RES)
    traj = evolve(H, [0.0, 1.0], t_span_ns=1.0, step_ns=0.01)
    with pytest.raises(SpecError, match="samples"):
        ringdown_spectrum(traj, "c")


def test_ringdown_frame_independence():
    """Spectral peak positions do not depend on the rotating frame."""
    sys = resonant_pair()
    H = assemble_hamiltonian(sys, B_RES)
    found = []
    for ref in (10.65, 10.3):
        traj = evolve(H, [0.0, 1.0], t_span_ns=300.0, step_ns=0.02, reference_ghz=ref)
        freqs, power = ringdown_spectrum(traj, "c")
        pos, _ = spectral_peaks(freqs, power, rel_prominence=1e-3)
        found.append(np.sort(pos))
    assert found[0].size == found[1].size == 2
    assert found[0] == pytest.approx(found[1], abs=0.005)
