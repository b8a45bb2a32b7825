"""Core data model for coupled photon-magnon resonator systems.

Conventions used throughout the package:

* all frequencies are ordinary (cycles per time) frequencies,
* mode frequencies and matrix entries are in GHz,
* linewidths (FWHM) and coupling strengths are declared in MHz,
* static fields in tesla, field offsets in millitesla,
* time in nanoseconds.

The dynamical matrix is complex symmetric: each mode contributes
``freq - i*gamma/2`` on the diagonal and each coupling a real entry
``g`` at the two symmetric off-diagonal positions, so two resonant
modes coupled with strength g split by 2g.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SpecError

DEFAULT_GYROMAGNETIC_GHZ_PER_T = 28.0

_LABEL_CHARS = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_")


@dataclass(frozen=True)
class PhotonModeSpec:
    """One electromagnetic resonator mode.

    Parameters
    ----------
    label : str
        Unique mode name, alphanumeric plus underscore.
    frequency_ghz : float
        Resonance frequency, GHz, must be positive.
    linewidth_mhz : float
        Full width at half maximum, MHz, must be non-negative.
    readout_weight : float
        Dimensionless antenna weight used by the summed readout, >= 0.
    """

    label: str
    frequency_ghz: float
    linewidth_mhz: float
    readout_weight: float


@dataclass(frozen=True)
class MagnonModeSpec:
    """One magnetostatic mode whose frequency is set by the applied field.

    The mode frequency is ``gyro * (B + field_offset)`` with the offset
    expressed in mT and the field in T.  ``gyromagnetic_override_ghz_per_t``
    replaces the system-wide ratio for this mode only, which models samples
    showing an anomalous apparent gyromagnetic slope.
    """

    label: str
    field_offset_mt: float
    linewidth_mhz: float
    diameter_mm: float | None = None
    gyromagnetic_override_ghz_per_t: float | None = None


@dataclass(frozen=True)
class CouplingSpec:
    """Symmetric coupling of strength ``g_mhz`` between modes ``a`` and ``b``."""

    a: str
    b: str
    g_mhz: float


@dataclass(frozen=True)
class SystemSpec:
    """Declarative description of a hybrid system, as written in spec files."""

    photon_modes: tuple[PhotonModeSpec, ...]
    magnon_modes: tuple[MagnonModeSpec, ...] = ()
    couplings: tuple[CouplingSpec, ...] = ()
    gyromagnetic_ghz_per_t: float = DEFAULT_GYROMAGNETIC_GHZ_PER_T

    def __post_init__(self):
        object.__setattr__(self, "photon_modes", tuple(self.photon_modes))
        object.__setattr__(self, "magnon_modes", tuple(self.magnon_modes))
        object.__setattr__(self, "couplings", tuple(self.couplings))


@dataclass(frozen=True, eq=False)
class HybridSystem:
    """Validated system with index bookkeeping, produced by :func:`build_system`.

    Photon modes occupy indices ``0 .. n_photon-1`` in declaration order,
    magnon modes follow, also in declaration order.
    """

    spec: SystemSpec
    labels: tuple[str, ...]
    n_photon: int
    n_magnon: int
    coupling_ghz: np.ndarray = field(repr=False)
    linewidths_ghz: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.n_photon + self.n_magnon

    @property
    def photon_indices(self) -> range:
        return range(self.n_photon)

    @property
    def magnon_indices(self) -> range:
        return range(self.n_photon, self.dim)

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise SpecError(f"unknown mode label {label!r}") from None

    def is_photon(self, label: str) -> bool:
        return self.index_of(label) < self.n_photon

    def photon_mode(self, label: str) -> PhotonModeSpec:
        for mode in self.spec.photon_modes:
            if mode.label == label:
                return mode
        raise SpecError(f"unknown photon mode label {label!r}")

    def magnon_mode(self, label: str) -> MagnonModeSpec:
        for mode in self.spec.magnon_modes:
            if mode.label == label:
                return mode
        raise SpecError(f"unknown magnon mode label {label!r}")

    def effective_gyromagnetic(self, mode: MagnonModeSpec) -> float:
        if mode.gyromagnetic_override_ghz_per_t is not None:
            return mode.gyromagnetic_override_ghz_per_t
        return self.spec.gyromagnetic_ghz_per_t

    def readout_weights(self) -> np.ndarray:
        return np.array([m.readout_weight for m in self.spec.photon_modes])

    def default_port(self) -> str:
        """First photon mode carrying readout weight, else the first photon."""
        for m in self.spec.photon_modes:
            if m.readout_weight > 0:
                return m.label
        return self.spec.photon_modes[0].label


@dataclass(frozen=True, eq=False)
class HybridHamiltonian:
    """Assembled complex symmetric dynamical matrix at a fixed field."""

    entries: np.ndarray = field(repr=False)
    labels: tuple[str, ...]
    n_photon: int
    field_tesla: float

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise SpecError(f"unknown mode label {label!r}") from None


def _check_label(label: str) -> None:
    if not label or not set(label) <= _LABEL_CHARS:
        raise SpecError(
            f"invalid mode label {label!r}: use letters, digits and underscore"
        )


def build_system(spec: SystemSpec) -> HybridSystem:
    """Validate a :class:`SystemSpec` and precompute lookup arrays.

    Raises
    ------
    SpecError
        On duplicate labels, photon-photon couplings, couplings that
        reference unknown labels, self couplings, duplicate coupling pairs,
        negative linewidths or couplings, or non-positive frequencies.
    """
    if not spec.photon_modes:
        raise SpecError("system needs at least one photon mode")

    labels: list[str] = []
    for mode in list(spec.photon_modes) + list(spec.magnon_modes):
        _check_label(mode.label)
        if mode.label in labels:
            raise SpecError(f"duplicate mode label {mode.label!r}")
        labels.append(mode.label)
        if mode.linewidth_mhz < 0:
            raise SpecError(f"mode {mode.label!r}: linewidth must be >= 0 MHz")

    for mode in spec.photon_modes:
        if mode.frequency_ghz <= 0:
            raise SpecError(f"photon mode {mode.label!r}: frequency must be positive")
        if mode.readout_weight < 0:
            raise SpecError(f"photon mode {mode.label!r}: readout weight must be >= 0")
    for mode in spec.magnon_modes:
        if mode.diameter_mm is not None and mode.diameter_mm <= 0:
            raise SpecError(f"magnon mode {mode.label!r}: diameter must be positive")
        if (
            mode.gyromagnetic_override_ghz_per_t is not None
            and mode.gyromagnetic_override_ghz_per_t <= 0
        ):
            raise SpecError(
                f"magnon mode {mode.label!r}: gyromagnetic override must be positive"
            )
    if spec.gyromagnetic_ghz_per_t <= 0:
        raise SpecError("gyromagnetic ratio must be positive")

    n_photon = len(spec.photon_modes)
    index = {label: k for k, label in enumerate(labels)}
    photon_labels = set(labels[:n_photon])

    dim = len(labels)
    coupling = np.zeros((dim, dim))
    seen_pairs: set[frozenset[str]] = set()
    for c in spec.couplings:
        for end in (c.a, c.b):
            if end not in index:
                raise SpecError(f"coupling {c.a!r}-{c.b!r} references unknown label {end!r}")
        if c.a == c.b:
            raise SpecError(f"coupling {c.a!r}-{c.b!r} connects a mode to itself")
        if c.a in photon_labels and c.b in photon_labels:
            raise SpecError(
                f"coupling {c.a!r}-{c.b!r}: photon-photon couplings are not allowed"
            )
        pair = frozenset((c.a, c.b))
        if pair in seen_pairs:
            raise SpecError(f"duplicate coupling between {c.a!r} and {c.b!r}")
        seen_pairs.add(pair)
        if c.g_mhz < 0:
            raise SpecError(f"coupling {c.a!r}-{c.b!r}: strength must be >= 0 MHz")
        i, j = index[c.a], index[c.b]
        coupling[i, j] = coupling[j, i] = c.g_mhz / 1e3

    linewidths = np.array(
        [m.linewidth_mhz / 1e3 for m in spec.photon_modes]
        + [m.linewidth_mhz / 1e3 for m in spec.magnon_modes]
    )
    coupling.setflags(write=False)
    linewidths.setflags(write=False)
    return HybridSystem(
        spec=spec,
        labels=tuple(labels),
        n_photon=n_photon,
        n_magnon=len(spec.magnon_modes),
        coupling_ghz=coupling,
        linewidths_ghz=linewidths,
    )


def magnon_frequency(
    mode: MagnonModeSpec, field_tesla: float, gyromagnetic_ghz_per_t: float
) -> float:
    """Larmor frequency of a magnon mode, GHz.

    Affine in the applied field: ``gyro * (B + offset)`` with the mode's
    offset converted from mT to T.  The caller passes the effective
    gyromagnetic ratio (system-wide value or per-mode override).
    """
    return gyromagnetic_ghz_per_t * (field_tesla + mode.field_offset_mt / 1e3)


def assemble_hamiltonian(system: HybridSystem, field_tesla: float) -> HybridHamiltonian:
    """Build the complex symmetric dynamical matrix at one field value.

    Diagonal entries are ``freq - i*gamma/2`` in GHz, off-diagonal entries
    are the real coupling strengths in GHz.  The returned matrix is
    read-only.
    """
    if not np.isfinite(field_tesla):
        raise SpecError(f"field must be finite, got {field_tesla!r}")
    dim = system.dim
    entries = np.array(system.coupling_ghz, dtype=complex)
    diag = np.empty(dim, dtype=complex)
    for k, mode in enumerate(system.spec.photon_modes):
        diag[k] = mode.frequency_ghz
    for k, mode in enumerate(system.spec.magnon_modes):
        diag[system.n_photon + k] = magnon_frequency(
            mode, field_tesla, system.effective_gyromagnetic(mode)
        )
    diag -= 0.5j * system.linewidths_ghz
    entries[np.diag_indices(dim)] = diag
    entries.setflags(write=False)
    return HybridHamiltonian(
        entries=entries,
        labels=system.labels,
        n_photon=system.n_photon,
        field_tesla=float(field_tesla),
    )
