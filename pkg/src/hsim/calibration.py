"""Fit model parameters to a measured transmission map.

Parameters are addressed by dotted paths into a system description:

    couplings.<a>-<b>                    coupling strength, MHz
    photon.<label>.frequency_ghz         bare photon frequency
    photon.<label>.linewidth_mhz
    photon.<label>.readout_weight
    magnon.<label>.field_offset_mt
    magnon.<label>.linewidth_mhz
    constants.gyromagnetic_ghz_per_t

Two mismatch measures are available.  The "db" space compares decibel
maps relative to their own maxima point by point; the "peaks" space
aligns extracted resonance positions slice by slice, which tolerates
amplitude miscalibration and unmodeled spurious lines in the data.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy import optimize

from .errors import NumericError, SpecError
from .model import HybridSystem, SystemSpec, build_system
from .specfile import export_spec
from .spectra import (
    DB_FLOOR_REL,
    PEAK_REL_PROMINENCE,
    SpectrumMap,
    spectral_peaks,
    sweep,
)

# Objectives at or below this are treated as an exact match and stop the
# restart loop early.
CONVERGED_OBJECTIVE = 1e-14

# Per-restart budget and simplex tolerances.
MAX_EVALUATIONS_PER_RESTART = 2000
RELATIVE_SIMPLEX_TOLERANCE = 1e-9

_PHOTON_FIELDS = ("frequency_ghz", "linewidth_mhz", "readout_weight")
_MAGNON_FIELDS = ("field_offset_mt", "linewidth_mhz")


def _split_path(path: str):
    parts = path.split(".")
    if len(parts) < 2 or not all(parts):
        raise SpecError(f"malformed parameter path {path!r}")
    return parts


def get_parameter(spec: SystemSpec, path: str) -> float:
    parts = _split_path(path)
    kind = parts[0]
    if kind == "couplings":
        if len(parts) != 2 or "-" not in parts[1]:
            raise SpecError(f"malformed coupling path {path!r}")
        a, _, b = parts[1].partition("-")
        for c in spec.couplings:
            if {c.a, c.b} == {a, b}:
                return c.g_mhz
        raise SpecError(f"no coupling between {a!r} and {b!r}")
    if kind in ("photon", "magnon"):
        if len(parts) != 3:
            raise SpecError(f"malformed parameter path {path!r}")
        label, attr = parts[1], parts[2]
        allowed = _PHOTON_FIELDS if kind == "photon" else _MAGNON_FIELDS
        if attr not in allowed:
            raise SpecError(f"unknown {kind} attribute {attr!r}")
        modes = spec.photon_modes if kind == "photon" else spec.magnon_modes
        for mode in modes:
            if mode.label == label:
                return getattr(mode, attr)
        raise SpecError(f"no {kind} mode labelled {label!r}")
    if kind == "constants":
        if parts[1] != "gyromagnetic_ghz_per_t" or len(parts) != 2:
            raise SpecError(f"unknown constant path {path!r}")
        return spec.gyromagnetic_ghz_per_t
    raise SpecError(f"unknown parameter path {path!r}")


def set_parameter(spec: SystemSpec, path: str, value: float) -> SystemSpec:
    """Return a copy of the spec with one addressed value replaced."""
    value = float(value)
    parts = _split_path(path)
    kind = parts[0]
    get_parameter(spec, path)
    if kind == "couplings":
        a, _, b = parts[1].partition("-")
        new = tuple(
            replace(c, g_mhz=value) if {c.a, c.b} == {a, b} else c
            for c in spec.couplings
        )
        return replace(spec, couplings=new)
    if kind == "photon":
        label, attr = parts[1], parts[2]
        new = tuple(
            replace(m, **{attr: value}) if m.label == label else m
            for m in spec.photon_modes
        )
        return replace(spec, photon_modes=new)
    if kind == "magnon":
        label, attr = parts[1], parts[2]
        new = tuple(
            replace(m, **{attr: value}) if m.label == label else m
            for m in spec.magnon_modes
        )
        return replace(spec, magnon_modes=new)
    return replace(spec, gyromagnetic_ghz_per_t=value)


def apply_parameters(spec: SystemSpec, paths, values) -> SystemSpec:
    for path, value in zip(paths, values):
        spec = set_parameter(spec, path, value)
    return spec


@dataclass(frozen=True)
class FitParameter:
    """One free parameter with its search interval."""

    path: str
    lower: float
    upper: float

    def __post_init__(self):
        if not np.isfinite(self.lower) or not np.isfinite(self.upper):
            raise SpecError(f"non-finite bounds for {self.path!r}")
        if self.lower >= self.upper:
            raise SpecError(f"empty bound interval for {self.path!r}")


@dataclass(frozen=True)
class FitProblem:
    """A dataset, a starting model and the parameters allowed to move."""

    base_spec: SystemSpec
    data: SpectrumMap
    parameters: tuple
    drive: str
    readout: str | None = None
    use_total: bool = False
    space: str = "db"
    rel_prominence: float = PEAK_REL_PROMINENCE
    unmatched_weight: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "parameters", tuple(self.parameters))
        if not self.parameters:
            raise SpecError("fit needs at least one free parameter")
        if self.space not in ("db", "peaks"):
            raise SpecError(f"unknown objective space {self.space!r}")
        seen = set()
        for p in self.parameters:
            if p.path in seen:
                raise SpecError(f"parameter {p.path!r} listed twice")
            seen.add(p.path)
            value = get_parameter(self.base_spec, p.path)
            if not p.lower <= value <= p.upper:
                raise SpecError(
                    f"start value {value:g} of {p.path!r} lies outside "
                    f"[{p.lower:g}, {p.upper:g}]"
                )


def _db_rel_max(power: np.ndarray) -> np.ndarray:
    top = float(power.max())
    if top <= 0:
        raise NumericError("map has no positive power, cannot normalize")
    return 10.0 * np.log10(np.maximum(power / top, DB_FLOOR_REL))


def _slice_peaks(probes: np.ndarray, power: np.ndarray, rel_prominence: float):
    rows = []
    for i in range(power.shape[0]):
        positions, _ = spectral_peaks(probes, power[i], rel_prominence=rel_prominence)
        rows.append(positions)
    return rows


def _align_cost(data_pos: np.ndarray, model_pos: np.ndarray, penalty: float) -> float:
    """Monotone alignment cost between two sorted peak lists.

    Matched pairs contribute their squared frequency distance, every
    unmatched peak on either side contributes ``penalty``.
    """
    n, m = data_pos.size, model_pos.size
    if n == 0 and m == 0:
        return 0.0
    cost = np.empty((n + 1, m + 1))
    cost[0, :] = penalty * np.arange(m + 1)
    cost[:, 0] = penalty * np.arange(n + 1)
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            match = cost[i - 1, j - 1] + (data_pos[i - 1] - model_pos[j - 1]) ** 2
            cost[i, j] = min(match, cost[i - 1, j] + penalty, cost[i, j - 1] + penalty)
    return float(cost[n, m])


def objective(
    data: SpectrumMap,
    candidate: SystemSpec,
    drive: str,
    readout: str | None = None,
    use_total: bool = False,
    space: str = "db",
    rel_prominence: float = PEAK_REL_PROMINENCE,
    unmatched_weight: float = 1.0,
) -> float:
    """Mismatch between a dataset and a candidate description, >= 0.

    The model is evaluated on the dataset's own grid, so the two maps are
    always commensurate.
    """
    if space not in ("db", "peaks"):
        raise SpecError(f"unknown objective space {space!r}")
    if readout is None and not use_total:
        readout = drive
    system = build_system(candidate)
    model = sweep(system, data.grid, drive=drive, readout=readout, use_total=use_total)
    data_power = data.linear_power()
    if space == "db":
        delta = _db_rel_max(model.power) - _db_rel_max(data_power)
        return float(np.mean(delta**2))

    probes = data.grid.probe_frequencies
    span = float(probes[-1] - probes[0])
    penalty = unmatched_weight * span**2
    data_rows = _slice_peaks(probes, data_power, rel_prominence)
    model_rows = _slice_peaks(probes, model.power, rel_prominence)
    costs = [_align_cost(d, m, penalty) for d, m in zip(data_rows, model_rows)]
    return float(np.mean(costs))


def objective_for_spec(problem: FitProblem, spec: SystemSpec) -> float:
    return objective(
        problem.data,
        spec,
        drive=problem.drive,
        readout=problem.readout,
        use_total=problem.use_total,
        space=problem.space,
        rel_prominence=problem.rel_prominence,
        unmatched_weight=problem.unmatched_weight,
    )


def _fold(x: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    """Reflect unbounded coordinates back into the bound box."""
    width = upper - lower
    t = np.mod(x - lower, 2.0 * width)
    return lower + np.where(t <= width, t, 2.0 * width - t)


@dataclass(frozen=True)
class FitResult:
    """Outcome of a parameter search."""

    fitted_spec: SystemSpec
    objective: float
    iterations: int
    converged: bool
    values: dict
    initial_values: dict
    restarts: int

    @property
    def changes(self) -> dict:
        return {
            path: self.values[path] - self.initial_values[path]
            for path in self.values
        }


def fit_parameters(
    problem: FitProblem,
    start=None,
    max_restarts: int = 5,
    seed: int | None = 0,
    max_evaluations: int = MAX_EVALUATIONS_PER_RESTART,
) -> FitResult:
    """Bounded simplex search with jittered restarts.

    Coordinates are folded into the bound box by reflection, so the
    simplex itself runs unconstrained and the objective keeps its scale.
    Each restart jitters the start point by a tenth of each interval and
    is budgeted ``max_evaluations`` objective calls; the loop stops early
    once the objective is numerically zero.  ``converged`` is false only
    when no restart met the simplex tolerance.
    """
    paths = [p.path for p in problem.parameters]
    lower = np.array([p.lower for p in problem.parameters], dtype=float)
    upper = np.array([p.upper for p in problem.parameters], dtype=float)
    initial = np.array(
        [get_parameter(problem.base_spec, path) for path in paths], dtype=float
    )
    if start is None:
        start = initial
    else:
        start = np.asarray(start, dtype=float)
        if start.shape != lower.shape:
            raise SpecError("start vector length does not match parameters")
        start = np.clip(start, lower, upper)
    if max_restarts < 1:
        raise SpecError("max_restarts must be >= 1")
    rng = np.random.default_rng(seed)

    evaluations = 0

    def folded_objective(x):
        nonlocal evaluations
        evaluations += 1
        spec = apply_parameters(problem.base_spec, paths, _fold(x, lower, upper))
        return objective_for_spec(problem, spec)

    scale = max(1.0, float(np.max(np.abs(lower))), float(np.max(np.abs(upper))))
    options = {
        "xatol": RELATIVE_SIMPLEX_TOLERANCE * scale,
        "fatol": 1e-18,
        "maxfev": max_evaluations,
    }

    best_x = None
    best_f = np.inf
    any_success = False
    restarts = 0
    for attempt in range(max_restarts):
        restarts = attempt + 1
        if attempt == 0:
            x0 = start
        else:
            x0 = start + rng.uniform(-0.1, 0.1, size=start.size) * (upper - lower)
        result = optimize.minimize(
            folded_objective, x0, method="Nelder-Mead", options=options
        )
        any_success = any_success or bool(result.success)
        if result.fun < best_f:
            best_f = float(result.fun)
            best_x = _fold(result.x, lower, upper)
        if best_f <= CONVERGED_OBJECTIVE:
            break

    if best_x is None or not np.isfinite(best_f):
        raise NumericError("parameter search failed to produce a candidate")
    values = dict(zip(paths, (float(v) for v in best_x)))
    fitted = apply_parameters(problem.base_spec, paths, best_x)
    return FitResult(
        fitted_spec=fitted,
        objective=best_f,
        iterations=evaluations,
        converged=bool(any_success or best_f <= CONVERGED_OBJECTIVE),
        values=values,
        initial_values=dict(zip(paths, (float(v) for v in initial))),
        restarts=restarts,
    )


def synthesize_dataset(
    spec,
    grid,
    noise_sigma_fraction: float = 0.0,
    seed: int | None = None,
    drive: str | None = None,
    readout: str | None = None,
    use_total: bool = False,
) -> SpectrumMap:
    """Simulated map with additive Gaussian noise in linear power.

    The noise standard deviation is ``noise_sigma_fraction`` of the clean
    map maximum; power is clamped at zero afterwards so the result stays
    physical.  Identical seeds reproduce identical maps.
    """
    if noise_sigma_fraction < 0:
        raise SpecError("noise fraction must be >= 0")
    system = spec if isinstance(spec, HybridSystem) else build_system(spec)
    if drive is None:
        drive = system.default_port()
    if readout is None and not use_total:
        readout = drive
    clean = sweep(system, grid, drive=drive, readout=readout, use_total=use_total)
    if noise_sigma_fraction == 0.0:
        return clean
    rng = np.random.default_rng(seed)
    sigma = noise_sigma_fraction * float(clean.power.max())
    noisy = clean.power + rng.normal(0.0, sigma, size=clean.power.shape)
    return SpectrumMap(grid=grid, power=np.maximum(noisy, 0.0))


def export_fit_result(result: FitResult) -> str:
    """Render a fit outcome as a spec document plus diagnostics sections.

    The diagnostics sections are ignored by the document parser, so the
    exported text loads straight back as the fitted system description.
    """
    lines = [export_spec(result.fitted_spec).rstrip("\n"), ""]
    lines.append("[fit_diagnostics]")
    lines.append(
        f"objective={result.objective!r} iterations={result.iterations} "
        f"restarts={result.restarts} converged={str(result.converged).lower()}"
    )
    lines.append("")
    lines.append("[parameter_changes]")
    for path in result.values:
        lines.append(
            f"{path} initial={result.initial_values[path]!r} "
            f"fitted={result.values[path]!r} change={result.changes[path]!r}"
        )
    lines.append("")
    return "\n".join(lines)


def format_fit_result(result: FitResult) -> str:
    """Short human-readable summary of a fit outcome."""
    lines = ["fitted parameters:"]
    for path, value in result.values.items():
        base = result.initial_values[path]
        if base != 0:
            suffix = f"  (start {base:.6g}, {100.0 * (value / base - 1.0):+.3f}%)"
        else:
            suffix = f"  (start {base:.6g})"
        lines.append(f"  {path} = {value:.9g}{suffix}")
    lines.append(f"objective: {result.objective:.6g}")
    lines.append(
        f"evaluations: {result.iterations}  restarts: {result.restarts}  "
        f"converged: {result.converged}"
    )
    return "\n".join(lines)
