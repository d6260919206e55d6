"""Single-photon heat conduction between two resistors in a superconducting cavity."""

from .circuit import build_impedance, build_network, semiclassical_power, trans_impedance_element
from .errors import ConfigError, ConvergenceError, SingularSystemError, SolverError
from .model import (
    CONSTANTS,
    CavityParams,
    ResistorParams,
    SystemParams,
    bose_occupancy,
    characteristic_impedance,
    coupling_rate,
    derive,
    effective_resistance,
    internal_loss_rate,
    mode_frequency,
)
from .quantum import (
    BathSpec,
    cavity_state,
    effective_temperature,
    electron_phonon_power,
    net_power_to_resistor,
    quantum_power,
    solve_equilibrium_t2,
    stationary_distribution,
    transition_rates,
    two_level_power,
    two_level_power_for,
)

__version__ = "0.1.0"
