"""Coupled photon-magnon system simulation and calibration."""

from .csvio import (
    read_diameter_csv,
    read_map_csv,
    write_branches_csv,
    write_map_csv,
    write_spectrum_csv,
    write_trajectory_csv,
)
from .calibration import (
    FitParameter,
    FitProblem,
    FitResult,
    apply_parameters,
    export_fit_result,
    fit_parameters,
    format_fit_result,
    get_parameter,
    objective,
    objective_for_spec,
    set_parameter,
    synthesize_dataset,
)
from .errors import NumericError, SpecError, SpecFileError
from .model import (
    CouplingSpec,
    HybridHamiltonian,
    HybridSystem,
    MagnonModeSpec,
    PhotonModeSpec,
    SystemSpec,
    assemble_hamiltonian,
    build_system,
    magnon_frequency,
)
from .modes import (
    BranchSet,
    DarkModeReport,
    EigenMode,
    SplittingComparison,
    TransductionResult,
    compare_splitting,
    dark_mode_report,
    eigenmodes,
    full_hybridization_field,
    rabi_splitting,
    scaling_prediction,
    track_branches,
    transduction_bandwidth,
)
from .size_effects import (
    DiameterFieldSample,
    SizeEffectFit,
    SizeEffectParams,
    apparent_g_factor,
    fit_size_effect,
    fitted_params,
    offset_field,
    offset_slope,
    params_for_cavity,
    permittivity_from_slope,
    predicted_b_fh,
)
from .specfile import (
    bundled_spec_names,
    bundled_spec_path,
    export_spec,
    load_spec,
    parse_spec,
    resolve_spec_path,
    save_spec,
)
from .spectra import (
    SpectrumMap,
    SweepGrid,
    k_matrix,
    refine_peak,
    spectral_peaks,
    sweep,
    total_transmission,
    transmission,
)
from .timedomain import Trajectory, evolve, ringdown_spectrum

__version__ = "0.1.0"

__all__ = [
    "BranchSet",
    "CouplingSpec",
    "DarkModeReport",
    "DiameterFieldSample",
    "EigenMode",
    "FitParameter",
    "FitProblem",
    "FitResult",
    "HybridHamiltonian",
    "HybridSystem",
    "MagnonModeSpec",
    "NumericError",
    "PhotonModeSpec",
    "SizeEffectFit",
    "SizeEffectParams",
    "SpecError",
    "SpecFileError",
    "SpectrumMap",
    "SplittingComparison",
    "SweepGrid",
    "SystemSpec",
    "Trajectory",
    "TransductionResult",
    "apparent_g_factor",
    "apply_parameters",
    "assemble_hamiltonian",
    "build_system",
    "bundled_spec_names",
    "bundled_spec_path",
    "compare_splitting",
    "dark_mode_report",
    "eigenmodes",
    "evolve",
    "export_fit_result",
    "export_spec",
    "fit_parameters",
    "fit_size_effect",
    "fitted_params",
    "format_fit_result",
    "k_matrix",
    "full_hybridization_field",
    "get_parameter",
    "load_spec",
    "magnon_frequency",
    "objective",
    "objective_for_spec",
    "offset_field",
    "offset_slope",
    "params_for_cavity",
    "parse_spec",
    "permittivity_from_slope",
    "predicted_b_fh",
    "rabi_splitting",
    "read_diameter_csv",
    "read_map_csv",
    "resolve_spec_path",
    "ringdown_spectrum",
    "save_spec",
    "scaling_prediction",
    "set_parameter",
    "refine_peak",
    "spectral_peaks",
    "sweep",
    "synthesize_dataset",
    "total_transmission",
    "track_branches",
    "transduction_bandwidth",
    "transmission",
    "write_branches_csv",
    "write_map_csv",
    "write_spectrum_csv",
    "write_trajectory_csv",
]
