"""Time-varying capacitors as one-port and lossless two-port devices."""

from .energy import (
    CAPACITOR_STORAGE,
    ELECTRICAL_SUPPLY,
    PASSIVITY_SUPPLY,
    EnergyReport,
    check_dissipation_inequality,
    cycle_energy,
    energy_balance,
    estimate_available_storage,
)
from .extract import (
    ExtractionProblem,
    build_energy_form,
    harvesting_capacitance,
    harvesting_profile,
    lissajous,
    synthesize_extraction_current,
)
from .oneport import (
    OnePortModel,
    PortTrajectory,
    current_from_voltage,
    gauge_residual,
    simulate_current_driven,
    solve_voltage_ode,
)
from .paradox import ParadoxScenario, closed_form_limit, run_paradox
from .signals import (
    CapacitanceProfile,
    Constant,
    DomainError,
    Fourier,
    ModelError,
    PiecewiseLinear,
    Polynomial,
    Sampled,
    Step,
    Waveform,
)
from .twoport import (
    MechanicalCapModel,
    TwoPortModel,
    simulate_state_modulated,
    simulate_two_port,
    simulate_voltage_driven,
)

__version__ = "0.1.0"
