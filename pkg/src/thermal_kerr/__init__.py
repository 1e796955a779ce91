"""Postselected weak amplification of a thermal pointer via single-photon cross-Kerr coupling."""

from .closed_form import (
    eliminated_levels,
    final_distribution,
    mean_photon_final,
    postselect_probability,
    thermal_distribution,
    wigner_closed,
    wigner_origin,
)
from .coherent_oracle import mc_postselect
from .fock_oracle import dark_port_amplitude, oracle_postselect, wigner_series
from .model import (
    DegeneratePostselectionError,
    InteractionConfig,
    InvalidParameterError,
    MonteCarloConfig,
    NumberDistribution,
    NumericRangeError,
    PostselectionOutcome,
    ThermalPointer,
    Truncation,
    z_from_boltzmann_ratio,
)

__version__ = "0.1.0"
