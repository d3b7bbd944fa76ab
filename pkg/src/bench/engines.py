"""
Concrete spectrum engines: the closed forms and the brute-force linear-system oracle.
"""

from __future__ import annotations

import logging
import math
from typing import TYPE_CHECKING

from src.core.exceptions import EngineMismatchError
from src.physics.model import MismatchSpec, SensorParams, SqueezingParams
from src.physics.oracle import estimator_spectrum, stability
from src.physics.spectra import (
    cqnc_breakdown,
    spectrum_exact,
    spectrum_zero_detuning,
    standard_breakdown,
)

from .base_engine import BaseEngine, EngineCapability, EngineResult, EvaluationOptions, PointStatus

if TYPE_CHECKING:
    from src.core.utils import FloatArray

logger = logging.getLogger(__name__)

MATCHING_RTOL = 1e-12


class ExactEngine(BaseEngine):
    @property
    def capabilities(self) -> EngineCapability:
        return EngineCapability(
            name="exact",
            description="Closed form for any detuning and mismatch, exact cavity filter",
            supports_detuning=True,
            supports_mismatch=True,
            needs_atoms=False,
        )

    def evaluate(
        self,
        omega: FloatArray,
        params: SensorParams,
        squeezing: SqueezingParams,
        options: EvaluationOptions,
    ) -> EngineResult:
        return EngineResult(
            spectrum_exact(omega, params, squeezing, options.thermal_mode, options.ratio_form)
        )


class ZeroDetuningEngine(BaseEngine):
    @property
    def capabilities(self) -> EngineCapability:
        return EngineCapability(
            name="zero_detuning",
            description="Resonant drive in the kappa >> omega limit, with mismatch",
            supports_detuning=False,
            supports_mismatch=True,
            needs_atoms=False,
        )

    def evaluate(
        self,
        omega: FloatArray,
        params: SensorParams,
        squeezing: SqueezingParams,
        options: EvaluationOptions,
    ) -> EngineResult:
        breakdown = spectrum_zero_detuning(
            omega, params, squeezing, options.thermal_mode, options.ratio_form, advise=False
        )
        return EngineResult(breakdown)


class CqncEngine(BaseEngine):
    """Perfect cancellation; rejects any mismatch, configured or explicit."""

    @property
    def capabilities(self) -> EngineCapability:
        return EngineCapability(
            name="cqnc",
            description="Perfect backaction cancellation, kappa >> omega",
            supports_detuning=True,
            supports_mismatch=False,
            needs_atoms=True,
        )

    def check_compatible(self, params: SensorParams, mismatch: MismatchSpec) -> None:
        super().check_compatible(params, mismatch)
        mech = params.mechanical
        pairs = {
            "G vs g": (params.G, params.g),
            "Gamma vs gamma_m": (params.Gamma, mech.gamma_m),
            "omega_s vs omega_m": (params.omega_s, mech.omega_m),
        }
        for name, (atomic, mechanical) in pairs.items():
            if not math.isclose(atomic, mechanical, rel_tol=MATCHING_RTOL):
                raise EngineMismatchError(
                    self.capabilities.name, f"matching violated ({name}: {atomic} != {mechanical})"
                )

    def evaluate(
        self,
        omega: FloatArray,
        params: SensorParams,
        squeezing: SqueezingParams,
        options: EvaluationOptions,
    ) -> EngineResult:
        return EngineResult(cqnc_breakdown(omega, params, squeezing, options.thermal_mode))


class StandardEngine(BaseEngine):
    """Single resonant cavity without atoms; the atomic fields are ignored."""

    @property
    def capabilities(self) -> EngineCapability:
        return EngineCapability(
            name="standard",
            description="Conventional optomechanical readout with optional squeezing",
            supports_detuning=False,
            supports_mismatch=True,
            needs_atoms=False,
        )

    def evaluate(
        self,
        omega: FloatArray,
        params: SensorParams,
        squeezing: SqueezingParams,
        options: EvaluationOptions,
    ) -> EngineResult:
        return EngineResult(standard_breakdown(omega, params, squeezing, options.thermal_mode))


class OracleEngine(BaseEngine):
    """
    Brute-force solve of the six linearized equations.

    Points of an unstable system are still evaluated but flagged.
    """

    @property
    def capabilities(self) -> EngineCapability:
        return EngineCapability(
            name="oracle",
            description="Frequency-domain linear solve of the full Langevin system",
            supports_detuning=True,
            supports_mismatch=True,
            needs_atoms=False,
        )

    def evaluate(
        self,
        omega: FloatArray,
        params: SensorParams,
        squeezing: SqueezingParams,
        options: EvaluationOptions,
    ) -> EngineResult:
        spectrum = estimator_spectrum(omega, params, squeezing, options.thermal_mode)
        report = stability(params)
        if not report.stable:
            return EngineResult(
                spectrum.to_breakdown(),
                status=PointStatus.FLAGGED,
                message=f"unstable drift matrix (max Re lambda = {report.max_real_part:.3e})",
            )
        return EngineResult(spectrum.to_breakdown())
