"""Single-photon triggered excitation transfer to a three-level emitter.

Numerical integration of the cavity and waveguide scenario dynamics,
closed-form transfer efficiencies with their matching conditions, and
bandwidth-sweep tooling for reproducing the efficiency-vs-bandwidth curves.
"""

from .analytics import (
    ConditionCheck,
    EfficiencyReport,
    LimitingFactor,
    cavity_efficiency,
    check_conditions,
    efficiency,
    matched_params,
    solve_matching,
    waveguide_efficiency,
)
from .applications import (
    CavityBranch,
    ConverterCheckReport,
    ConverterSetup,
    MemoryCheckReport,
    MemoryEfficiencyReport,
    MemorySetup,
    WaveguideBranch,
    converter_check,
    memory_check,
    memory_efficiency,
)
from .dynamics import (
    CavityState,
    TimeGrid,
    Trajectory,
    TransferOutcome,
    adiabatic_thresholds,
    default_grid,
    generator_matrix,
    propagate_exact,
    rk4_step,
    simulate_cavity,
    simulate_waveguide,
    waveguide_adiabatic_threshold,
    waveguide_amplitude_analytic,
)
from .errors import (
    InfeasibleMatchingError,
    InvalidGridError,
    InvalidInputError,
    InvalidParametersError,
    InvalidSetupError,
    NumericFailureError,
    QTransferError,
    UndefinedEfficiencyError,
)
from .params import (
    CavityParams,
    DerivedRates,
    WaveguideParams,
    derive_cavity_rates,
    derive_waveguide_rates,
    free_space_params,
)
from .pulses import PulseEnvelope
from .sweep import SweepConfig, SweepRow, SweepTable, load_sweep_config, run_sweep

__version__ = "0.1.0"

__all__ = [
    "CavityBranch",
    "CavityParams",
    "CavityState",
    "ConditionCheck",
    "ConverterCheckReport",
    "ConverterSetup",
    "DerivedRates",
    "EfficiencyReport",
    "InfeasibleMatchingError",
    "InvalidGridError",
    "InvalidInputError",
    "InvalidParametersError",
    "InvalidSetupError",
    "LimitingFactor",
    "MemoryCheckReport",
    "MemoryEfficiencyReport",
    "MemorySetup",
    "NumericFailureError",
    "PulseEnvelope",
    "QTransferError",
    "SweepConfig",
    "SweepRow",
    "SweepTable",
    "TimeGrid",
    "Trajectory",
    "TransferOutcome",
    "UndefinedEfficiencyError",
    "WaveguideBranch",
    "WaveguideParams",
    "adiabatic_thresholds",
    "cavity_efficiency",
    "check_conditions",
    "converter_check",
    "default_grid",
    "derive_cavity_rates",
    "derive_waveguide_rates",
    "efficiency",
    "free_space_params",
    "generator_matrix",
    "load_sweep_config",
    "matched_params",
    "memory_check",
    "memory_efficiency",
    "propagate_exact",
    "rk4_step",
    "run_sweep",
    "simulate_cavity",
    "simulate_waveguide",
    "solve_matching",
    "waveguide_adiabatic_threshold",
    "waveguide_amplitude_analytic",
]
