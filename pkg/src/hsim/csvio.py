"""Delimited input and output.

All numbers are written with nine significant digits, so a file read
back reproduces the original values to well below every tolerance used
elsewhere in the package.  Map files store power in decibels relative
to the map maximum.
"""

from __future__ import annotations

import numpy as np

from .errors import SpecError
from .size_effects import DiameterFieldSample
from .spectra import DB_FLOOR_REL, SpectrumMap, SweepGrid

MAP_HEADER = "b_tesla,freq_ghz,power_db"
BRANCH_HEADER = "b_tesla,branch_id,freq_ghz,linewidth_mhz,photon_fraction"
TRAJECTORY_HEADER = "t_ns,mode_label,re,im"
DIAMETER_FIELDS = ("diameter_mm", "b_fh_tesla", "sigma_tesla")


def _fmt(value: float) -> str:
    return "%.9g" % value


def write_map_csv(path, spectrum: SpectrumMap) -> None:
    """Write one row per (field, probe) sample, power in dB rel max."""
    db = spectrum.to_db()
    grid = db.grid
    lines = [MAP_HEADER]
    for i, b in enumerate(grid.field_values):
        for j, f in enumerate(grid.probe_frequencies):
            lines.append(f"{_fmt(b)},{_fmt(f)},{_fmt(db.power[i, j])}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_map_csv(path) -> SpectrumMap:
    """Read a map file back into a decibel-normalized spectrum."""
    with open(path) as fh:
        raw = fh.read().splitlines()
    rows = []
    header_seen = False
    for ln, line in enumerate(raw, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if not header_seen:
            if line != MAP_HEADER:
                raise SpecError(f"line {ln}: expected header {MAP_HEADER!r}")
            header_seen = True
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise SpecError(f"line {ln}: expected 3 fields, got {len(parts)}")
        try:
            rows.append(tuple(float(p) for p in parts))
        except ValueError:
            raise SpecError(f"line {ln}: malformed number") from None
    if not header_seen:
        raise SpecError("empty map file")
    if not rows:
        raise SpecError("map file has no data rows")

    fields = np.unique([r[0] for r in rows])
    probes = np.unique([r[1] for r in rows])
    if fields.size * probes.size != len(rows):
        raise SpecError("map file is not a complete rectangular grid")
    power = np.full((fields.size, probes.size), np.nan)
    fi = {v: i for i, v in enumerate(fields)}
    pj = {v: j for j, v in enumerate(probes)}
    for b, f, p in rows:
        i, j = fi[b], pj[f]
        if not np.isnan(power[i, j]):
            raise SpecError(f"duplicate sample at b={b!r}, freq={f!r}")
        power[i, j] = p
    grid = SweepGrid(field_values=fields, probe_frequencies=probes)
    return SpectrumMap(grid=grid, power=power, normalization="db")


def write_branches_csv(path, branches) -> None:
    lines = [BRANCH_HEADER]
    n_field, n_branch = branches.frequencies_ghz.shape
    for i in range(n_field):
        b = branches.field_values[i]
        for k in range(n_branch):
            lines.append(
                ",".join(
                    (
                        _fmt(b),
                        str(k),
                        _fmt(branches.frequencies_ghz[i, k]),
                        _fmt(branches.linewidths_mhz[i, k]),
                        _fmt(branches.photon_fractions[i, k]),
                    )
                )
            )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_trajectory_csv(path, trajectory) -> None:
    lines = [TRAJECTORY_HEADER]
    for j, label in enumerate(trajectory.mode_labels):
        for i, t in enumerate(trajectory.times_ns):
            amp = trajectory.amplitudes[i, j]
            lines.append(f"{_fmt(t)},{label},{_fmt(amp.real)},{_fmt(amp.imag)}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_diameter_csv(path):
    """Read (diameter, field) samples, with an optional sigma column."""
    with open(path) as fh:
        raw = fh.read().splitlines()
    samples = []
    n_cols = None
    for ln, line in enumerate(raw, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if n_cols is None:
            if len(parts) in (2, 3) and parts == list(DIAMETER_FIELDS[: len(parts)]):
                n_cols = len(parts)
                continue
            raise SpecError(
                f"line {ln}: expected header starting {DIAMETER_FIELDS[0]!r}"
            )
        if len(parts) != n_cols:
            raise SpecError(f"line {ln}: expected {n_cols} fields, got {len(parts)}")
        try:
            values = [float(p) for p in parts]
        except ValueError:
            raise SpecError(f"line {ln}: malformed number") from None
        sigma = values[2] if n_cols == 3 else None
        samples.append(
            DiameterFieldSample(
                diameter_mm=values[0], b_fh_tesla=values[1], sigma_tesla=sigma
            )
        )
    if n_cols is None:
        raise SpecError("empty diameter file")
    if not samples:
        raise SpecError("diameter file has no data rows")
    return samples


def write_spectrum_csv(path, frequencies, power) -> None:
    """Single-slice spectrum, power in dB rel max."""
    power = np.asarray(power, dtype=float)
    top = float(power.max())
    if top <= 0:
        raise SpecError("spectrum has no positive power")
    db = 10.0 * np.log10(np.maximum(power / top, DB_FLOOR_REL))
    lines = ["freq_ghz,power_db"]
    for f, p in zip(frequencies, db):
        lines.append(f"{_fmt(f)},{_fmt(p)}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
