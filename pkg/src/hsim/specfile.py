"""Reading and writing the textual system description format.

A document has four sections.  Every non-comment line inside a section is
a sequence of whitespace-separated ``key=value`` tokens describing one
record:

    [photon_modes]
    label=c frequency_ghz=10.65 linewidth_mhz=1.0 readout_weight=1.0

    [magnon_modes]
    label=m field_offset_mt=0.0 linewidth_mhz=2.0

    [couplings]
    a=c b=m g_mhz=90.0

    [constants]
    gyromagnetic_ghz_per_t=28.0

Parsing is strict: unknown sections or keys are rejected with the line
number.  The two bookkeeping sections written by the calibration report
(``fit_diagnostics`` and ``parameter_changes``) are recognized and
skipped so a fit result document loads back as a plain system spec.
"""

from __future__ import annotations

import importlib.resources
from pathlib import Path

from .errors import SpecFileError
from .model import (
    DEFAULT_GYROMAGNETIC_GHZ_PER_T,
    CouplingSpec,
    MagnonModeSpec,
    PhotonModeSpec,
    SystemSpec,
)

_PHOTON_KEYS = {"label", "frequency_ghz", "linewidth_mhz", "readout_weight"}
_MAGNON_REQUIRED = {"label", "field_offset_mt", "linewidth_mhz"}
_MAGNON_OPTIONAL = {"diameter_mm", "gyromagnetic_override_ghz_per_t"}
_COUPLING_KEYS = {"a", "b", "g_mhz"}
_CONSTANT_KEYS = {"gyromagnetic_ghz_per_t"}
_SECTIONS = {"photon_modes", "magnon_modes", "couplings", "constants"}
_IGNORED_SECTIONS = {"fit_diagnostics", "parameter_changes"}


def _parse_tokens(line: str, lineno: int) -> dict[str, str]:
    record: dict[str, str] = {}
    for token in line.split():
        key, sep, value = token.partition("=")
        if not sep or not key:
            raise SpecFileError(f"expected key=value token, got {token!r}", lineno)
        if key in record:
            raise SpecFileError(f"key {key!r} repeated in one record", lineno)
        record[key] = value
    return record


def _float_value(record: dict[str, str], key: str, lineno: int) -> float:
    raw = record[key]
    try:
        value = float(raw)
    except ValueError:
        raise SpecFileError(f"value for {key!r} is not a number: {raw!r}", lineno) from None
    return value


def _check_keys(record, required, optional, section, lineno):
    for key in record:
        if key not in required and key not in optional:
            raise SpecFileError(f"unknown key {key!r} in [{section}]", lineno)
    for key in required:
        if key not in record:
            raise SpecFileError(f"missing key {key!r} in [{section}] record", lineno)


def parse_spec(text: str) -> SystemSpec:
    """Parse a spec document from a string.  See module docstring for grammar."""
    photons: list[PhotonModeSpec] = []
    magnons: list[MagnonModeSpec] = []
    couplings: list[CouplingSpec] = []
    gyro = DEFAULT_GYROMAGNETIC_GHZ_PER_T
    section = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise SpecFileError(f"malformed section header {line!r}", lineno)
            name = line[1:-1].strip()
            if name not in _SECTIONS | _IGNORED_SECTIONS:
                raise SpecFileError(f"unknown section [{name}]", lineno)
            section = name
            continue
        if section is None:
            raise SpecFileError("record appears before any section header", lineno)
        if section in _IGNORED_SECTIONS:
            continue

        record = _parse_tokens(line, lineno)
        if section == "photon_modes":
            _check_keys(record, _PHOTON_KEYS, set(), section, lineno)
            photons.append(
                PhotonModeSpec(
                    label=record["label"],
                    frequency_ghz=_float_value(record, "frequency_ghz", lineno),
                    linewidth_mhz=_float_value(record, "linewidth_mhz", lineno),
                    readout_weight=_float_value(record, "readout_weight", lineno),
                )
            )
        elif section == "magnon_modes":
            _check_keys(record, _MAGNON_REQUIRED, _MAGNON_OPTIONAL, section, lineno)
            magnons.append(
                MagnonModeSpec(
                    label=record["label"],
                    field_offset_mt=_float_value(record, "field_offset_mt", lineno),
                    linewidth_mhz=_float_value(record, "linewidth_mhz", lineno),
                    diameter_mm=(
                        _float_value(record, "diameter_mm", lineno)
                        if "diameter_mm" in record
                        else None
                    ),
                    gyromagnetic_override_ghz_per_t=(
                        _float_value(record, "gyromagnetic_override_ghz_per_t", lineno)
                        if "gyromagnetic_override_ghz_per_t" in record
                        else None
                    ),
                )
            )
        elif section == "couplings":
            _check_keys(record, _COUPLING_KEYS, set(), section, lineno)
            couplings.append(
                CouplingSpec(
                    a=record["a"],
                    b=record["b"],
                    g_mhz=_float_value(record, "g_mhz", lineno),
                )
            )
        else:
            _check_keys(record, set(), _CONSTANT_KEYS, section, lineno)
            if "gyromagnetic_ghz_per_t" in record:
                gyro = _float_value(record, "gyromagnetic_ghz_per_t", lineno)

    return SystemSpec(
        photon_modes=tuple(photons),
        magnon_modes=tuple(magnons),
        couplings=tuple(couplings),
        gyromagnetic_ghz_per_t=gyro,
    )


def load_spec(path) -> SystemSpec:
    """Load a spec document from a file path."""
    return parse_spec(Path(path).read_text())


def export_spec(spec: SystemSpec) -> str:
    """Render a :class:`SystemSpec` back to document text.

    ``parse_spec(export_spec(s))`` reproduces ``s`` field for field; float
    values are written with ``repr`` so they round-trip exactly.
    """
    lines = ["[photon_modes]"]
    for m in spec.photon_modes:
        lines.append(
            f"label={m.label} frequency_ghz={m.frequency_ghz!r} "
            f"linewidth_mhz={m.linewidth_mhz!r} readout_weight={m.readout_weight!r}"
        )
    lines += ["", "[magnon_modes]"]
    for m in spec.magnon_modes:
        entry = (
            f"label={m.label} field_offset_mt={m.field_offset_mt!r} "
            f"linewidth_mhz={m.linewidth_mhz!r}"
        )
        if m.diameter_mm is not None:
            entry += f" diameter_mm={m.diameter_mm!r}"
        if m.gyromagnetic_override_ghz_per_t is not None:
            entry += f" gyromagnetic_override_ghz_per_t={m.gyromagnetic_override_ghz_per_t!r}"
        lines.append(entry)
    lines += ["", "[couplings]"]
    for c in spec.couplings:
        lines.append(f"a={c.a} b={c.b} g_mhz={c.g_mhz!r}")
    lines += [
        "",
        "[constants]",
        f"gyromagnetic_ghz_per_t={spec.gyromagnetic_ghz_per_t!r}",
        "",
    ]
    return "\n".join(lines)


def save_spec(spec: SystemSpec, path) -> None:
    Path(path).write_text(export_spec(spec))


def bundled_spec_names() -> tuple[str, ...]:
    """Names of the scenario files shipped with the package."""
    root = importlib.resources.files("hsim.data")
    return tuple(
        sorted(p.name[: -len(".spec")] for p in root.iterdir() if p.name.endswith(".spec"))
    )


def bundled_spec_path(name: str) -> Path:
    """Filesystem path of a bundled scenario, by bare name or file name."""
    if not name.endswith(".spec"):
        name = name + ".spec"
    path = importlib.resources.files("hsim.data") / name
    if not path.is_file():
        raise SpecFileError(f"no bundled spec named {name!r}")
    return Path(str(path))


def resolve_spec_path(arg: str) -> Path:
    """Resolve a CLI --spec argument: explicit path first, bundled name second."""
    p = Path(arg)
    if p.is_file():
        return p
    try:
        return bundled_spec_path(arg)
    except SpecFileError:
        raise SpecFileError(f"spec file not found: {arg}") from None
