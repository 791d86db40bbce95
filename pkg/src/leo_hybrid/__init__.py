"""Energy-efficient hybrid precoding for massive-MIMO LEO satellite downlinks.

The transmitter has a nonlinear (third-order) PA behind every antenna and
an analog network that mixes high- and low-resolution phase shifters.
"""

from .channel import (
    ArrayGeometry,
    UserChannelStats,
    channel_power,
    draw_user_stats,
    noise_power,
    steering_matrix,
    upa_response,
)
from .digital_opt import DinkelbachPrecoder, EEProblem, SolverConfig, dinkelbach_solve
from .hybrid import PhaseSet, TrpsDecomposer, TrpsNetwork, decompose
from .npa import NpaDomainError, NpaModel, pa_power
from .power import Architecture, ArchitectureSpec, ComponentPowers, transmitter_power
from .rate import energy_efficiency, ergodic_rate_mc, rate_upper_bound, sum_rate_bound
from .scenario import Scenario, load_scenario

__all__ = [
    "Architecture",
    "ArchitectureSpec",
    "ArrayGeometry",
    "ComponentPowers",
    "DinkelbachPrecoder",
    "EEProblem",
    "NpaDomainError",
    "NpaModel",
    "PhaseSet",
    "Scenario",
    "SolverConfig",
    "TrpsDecomposer",
    "TrpsNetwork",
    "UserChannelStats",
    "channel_power",
    "decompose",
    "dinkelbach_solve",
    "draw_user_stats",
    "energy_efficiency",
    "ergodic_rate_mc",
    "load_scenario",
    "noise_power",
    "pa_power",
    "rate_upper_bound",
    "steering_matrix",
    "sum_rate_bound",
    "transmitter_power",
    "upa_response",
]

__version__ = "0.1.0"
