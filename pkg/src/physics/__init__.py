# Sensor physics: parameters, susceptibilities, closed-form spectra, optimization and the oracle
from .model import (
    AtomicParams,
    CavityParams,
    MechanicalParams,
    MismatchSpec,
    SensorParams,
    SqueezingParams,
    ValidityReport,
    coupling_from_power,
    drive_amplitude,
    power_for_coupling,
    si_scale_factor,
    steady_state_amplitude,
    thermal_number,
    validate,
)
from .response import RatioForm
from .spectra import SpectrumBreakdown, ThermalMode

__all__ = [
    "AtomicParams",
    "CavityParams",
    "MechanicalParams",
    "MismatchSpec",
    "RatioForm",
    "SensorParams",
    "SpectrumBreakdown",
    "SqueezingParams",
    "ThermalMode",
    "ValidityReport",
    "coupling_from_power",
    "drive_amplitude",
    "power_for_coupling",
    "si_scale_factor",
    "steady_state_amplitude",
    "thermal_number",
    "validate",
]
