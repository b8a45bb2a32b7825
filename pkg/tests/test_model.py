import numpy as np
import pytest

from hsim import (
    CouplingSpec,
    HybridSystem,
    MagnonModeSpec,
    PhotonModeSpec,
    SpecError,
    SystemSpec,
    assemble_hamiltonian,
    build_system,
    magnon_frequency,
)


def photon(label="c", freq=10.65, gamma=1.0, weight=1.0):
    return PhotonModeSpec(label, freq, gamma, weight)


def magnon(label="m", offset=0.0, gamma=2.0, **kw):
    return MagnonModeSpec(label, offset, gamma, **kw)


def simple_spec(g=90.0):
    return SystemSpec(
        photon_modes=(photon(),),
        magnon_modes=(magnon(),),
        couplings=(CouplingSpec("c", "m", g),),
    )


def test_build_system_basic_shape():
    sys = build_system(simple_spec())
    assert isinstance(sys, HybridSystem)
    assert sys.labels == ("c", "m")
    assert sys.dim == 2
    assert sys.n_photon == 1 and sys.n_magnon == 1
    assert list(sys.photon_indices) == [0]
    assert list(sys.magnon_indices) == [1]
    assert sys.index_of("m") == 1
    assert sys.is_photon("c") and not sys.is_photon("m")


def test_units_are_converted_to_ghz():
    sys = build_system(simple_spec())
    assert sys.coupling_ghz[0, 1] == pytest.approx(0.090)
    assert sys.linewidths_ghz[0] == pytest.approx(0.001)
    assert sys.linewidths_ghz[1] == pytest.approx(0.002)


def test_magnon_frequency_affine_in_field():
    m = magnon(offset=14.285714285714286)
    assert magnon_frequency(m, 0.0, 28.0) == pytest.approx(0.4)
    assert magnon_frequency(m, 0.38, 28.0) == pytest.approx(28.0 * 0.38 + 0.4)


def test_gyromagnetic_override_beats_system_value():
    spec = SystemSpec(
        photon_modes=(photon(),),
        magnon_modes=(magnon(gyromagnetic_override_ghz_per_t=26.0),),
        couplings=(CouplingSpec("c", "m", 90.0),),
    )
    sys = build_system(spec)
    H = assemble_hamiltonian(sys, 0.5)
    assert H.entries[1, 1].real == pytest.approx(13.0)


def test_assemble_matches_hand_built_matrix():
    sys = build_system(simple_spec())
    B = 0.380357142857
    H = assemble_hamiltonian(sys, B)
    expected = np.array(
        [
            [10.65 - 0.0005j, 0.09],
            [0.09, 28.0 * B - 0.001j],
        ]
    )
    np.testing.assert_allclose(H.entries, expected, rtol=0, atol=1e-12)
    assert H.field_tesla == B
    assert H.labels == ("c", "m")


def test_hamiltonian_is_symmetric_not_hermitian():
    spec = SystemSpec(
        photon_modes=(photon(), photon("d", 10.9, 1.0, 0.0)),
        magnon_modes=(magnon(), magnon("n")),
        couplings=(
            CouplingSpec("c", "m", 90.0),
            CouplingSpec("d", "m", 90.0),
            CouplingSpec("m", "n", 25.0),
        ),
    )
    H = assemble_hamiltonian(build_system(spec), 0.38).entries
    np.testing.assert_allclose(H, H.T)
    assert np.any(H != H.conj().T)


def test_hamiltonian_entries_read_only():
    H = assemble_hamiltonian(build_system(simple_spec()), 0.38)
    with pytest.raises(ValueError):
        H.entries[0, 0] = 0


@pytest.mark.parametrize(
    "couplings",
    [
        (CouplingSpec("c", "c", 10.0),),
        (CouplingSpec("c", "q", 10.0),),
        (CouplingSpec("c", "m", 90.0), CouplingSpec("m", "c", 90.0)),
        (CouplingSpec("c", "m", -1.0),),
    ],
)
def test_bad_couplings_rejected(couplings):
    spec = SystemSpec(
        photon_modes=(photon(),),
        magnon_modes=(magnon(),),
        couplings=couplings,
    )
    with pytest.raises(SpecError):
        build_system(spec)


def test_photon_photon_coupling_rejected():
    spec = SystemSpec(
        photon_modes=(photon(), photon("d", 10.9)),
        magnon_modes=(magnon(),),
        couplings=(CouplingSpec("c", "d", 50.0),),
    )
    with pytest.raises(SpecError, match="photon-photon"):
        build_system(spec)


def test_duplicate_label_rejected():
    spec = SystemSpec(
        photon_modes=(photon(),),
        magnon_modes=(magnon("c"),),
        couplings=(),
    )
    with pytest.raises(SpecError, match="duplicate"):
        build_system(spec)


def test_needs_a_photon_mode():
    spec = SystemSpec(photon_modes=(), magnon_modes=(magnon(),), couplings=())
    with pytest.raises(SpecError):
        build_system(spec)


def test_negative_linewidth_rejected():
    spec = SystemSpec(
        photon_modes=(photon(gamma=-1.0),),
        magnon_modes=(magnon(),),
        couplings=(),
    )
    with pytest.raises(SpecError):
        build_system(spec)


def test_nonfinite_field_rejected():
    sys = build_system(simple_spec())
    with pytest.raises(SpecError):
        assemble_hamiltonian(sys, float("nan"))


def test_default_port_skips_weightless_modes():
    spec = SystemSpec(
        photon_modes=(photon("d", 10.9, 1.0, 0.0), photon("c", 10.65, 1.0, 0.7)),
        magnon_modes=(magnon(),),
        couplings=(CouplingSpec("c", "m", 90.0),),
    )
    assert build_system(spec).default_port() == "c"


def test_readout_weights_vector():
    spec = SystemSpec(
        photon_modes=(photon(), photon("d", 10.9, 1.0, 0.25)),
        magnon_modes=(magnon(),),
        couplings=(CouplingSpec("c", "m", 90.0),),
    )
    np.testing.assert_allclose(build_system(spec).readout_weights(), [1.0, 0.25])
