"""Thermodynamics of a GAD and a phase-flip channel under coherent order control."""

from .channels import (
    KrausChannel,
    SeparableMixture,
    apply,
    apply_separable,
    compose,
    gad_channel,
    pf_channel,
    validate_cptp,
)
from .errors import SwitchThermoError
from .qmat import DensityMatrix, partial_trace, tensor, trace_distance
from .switch import (
    CASE1_ASSIGNMENT,
    CASE2_ASSIGNMENT,
    X_BASIS,
    Z_BASIS,
    apply_switch,
    case1_config,
    case2_config,
    closed_form_case1,
    closed_form_case2,
    measure_controller,
)
from .thermo import ThermalBath, avg_work, free_energy, renyi_entropy_bits, tau, vn_entropy_bits

__version__ = "0.1.0"

__all__ = [
    "CASE1_ASSIGNMENT",
    "CASE2_ASSIGNMENT",
    "DensityMatrix",
    "KrausChannel",
    "SeparableMixture",
    "SwitchThermoError",
    "ThermalBath",
    "X_BASIS",
    "Z_BASIS",
    "apply",
    "apply_separable",
    "apply_switch",
    "avg_work",
    "case1_config",
    "case2_config",
    "closed_form_case1",
    "closed_form_case2",
    "compose",
    "free_energy",
    "gad_channel",
    "measure_controller",
    "partial_trace",
    "pf_channel",
    "renyi_entropy_bits",
    "tau",
    "tensor",
    "trace_distance",
    "validate_cptp",
    "vn_entropy_bits",
]
