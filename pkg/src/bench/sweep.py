"""
Sweep runner: expands a run configuration into per-curve evaluation tasks, evaluates them on a
thread pool and assembles the results in axis order.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from src import __version__
from src.core.exceptions import EngineMismatchError, NumericalError, ParameterError
from src.core.utils import FloatArray, angular_to_hz
from src.physics.model import (
    MismatchSpec,
    SensorParams,
    SqueezingParams,
    ValidityReport,
    power_for_coupling,
    validate,
)
from src.physics.optimal import g2_sql_optimum
from src.physics.spectra import (
    COMPONENTS,
    SpectrumBreakdown,
    cqnc_floor,
    sql,
    sql_squeezed,
    ultimate_limit,
)

from .base_engine import BaseEngine, EngineResult, EvaluationOptions, PointStatus
from .loader import RunConfig
from .registry import engine_registry
from .schema import AxisKind, CurveSpec, Overlay, Spacing, SweepSpec
from .table import ResultTable

logger = logging.getLogger(__name__)

CHUNK_SIZE = 256

AXIS_COLUMNS: Dict[AxisKind, str] = {
    AxisKind.FREQUENCY: "omega_over_omega_m",
    AxisKind.POWER_RATIO: "g_over_g0_squared",
    AxisKind.COUPLING_MISMATCH: "coupling_mismatch",
    AxisKind.DECAY_MISMATCH: "decay_mismatch",
    AxisKind.SQUEEZING_N: "squeezing_n",
}


@dataclass
class CurvePlan:
    """Everything needed to evaluate one curve at any axis value."""

    curve: CurveSpec
    engine: BaseEngine
    base: SensorParams  # unresolved, curve overrides applied
    mismatch: MismatchSpec
    n_sq: float
    spec: SweepSpec

    def point(
        self, kind: AxisKind, value: Optional[float]
    ) -> Tuple[SensorParams, SqueezingParams, MismatchSpec]:
        """Resolved parameters, squeezing and mismatch at one axis value (None for the base point)."""
        params, mismatch, n_sq = self.base, self.mismatch, self.n_sq
        if value is not None:
            if kind == AxisKind.POWER_RATIO:
                params = params.with_coupling(params.cavity.g0 * math.sqrt(value))
            elif kind == AxisKind.COUPLING_MISMATCH and self.curve.atoms:
                mismatch = mismatch.model_copy(update={"coupling_mismatch": value})
            elif kind == AxisKind.DECAY_MISMATCH:
                mismatch = mismatch.model_copy(update={"decay_mismatch": value})
            elif kind == AxisKind.SQUEEZING_N:
                n_sq = value
        resolved = params.resolved(mismatch)
        y = resolved.cavity.detuning_c / resolved.cavity.kappa
        return resolved, self.spec.squeezing.to_params(y, n_sq), mismatch

    def check(self, kind: AxisKind, value: Optional[float]) -> None:
        params, _, mismatch = self.point(kind, value)
        self.engine.check_compatible(params, mismatch)


@dataclass
class CurveResult:
    label: str
    engine: str
    breakdown: SpectrumBreakdown
    params: SensorParams
    squeezing: SqueezingParams
    validity: ValidityReport
    flagged: List[Dict[str, Any]] = field(default_factory=list)


@dataclass
class SweepResult:
    spec: SweepSpec
    axis: FloatArray
    curves: Dict[str, CurveResult]
    overlays: Dict[str, FloatArray]
    metadata: Dict[str, Any]

    @property
    def axis_name(self) -> str:
        return AXIS_COLUMNS[self.spec.axis.kind]

    def columns(self) -> Dict[str, FloatArray]:
        """Axis, then the six components of every curve, then the overlays."""
        columns: Dict[str, FloatArray] = {self.axis_name: self.axis}
        for label, curve in self.curves.items():
            prefix = f"{label}." if self.spec.is_multi_curve else ""
            for component in COMPONENTS:
                columns[f"{prefix}{component}"] = getattr(curve.breakdown, component)
        columns.update(self.overlays)
        return columns

    def to_table(self) -> ResultTable:
        return ResultTable(columns=self.columns(), metadata=self.metadata)


@dataclass(frozen=True)
class _Task:
    label: str
    start: int
    values: FloatArray  # axis values covered by the task


def plan_curves(run: RunConfig) -> List[CurvePlan]:
    """
    Build a plan per curve and check engine compatibility at the base point.

    Raises:
        EngineNotFoundError: If a curve names an unknown engine
        EngineMismatchError: If an engine cannot evaluate its curve
    """
    spec = run.spec
    plans = []
    for curve in spec.effective_curves():
        engine = engine_registry.get_engine(curve.engine or spec.engine)
        params = run.sensor
        if curve.detuning_ratio is not None:
            cavity = params.cavity
            params = params.model_copy(
                update={
                    "cavity": cavity.model_copy(
                        update={
                            "detuning_c": curve.detuning_ratio * cavity.kappa,
                            "detuning_is_bare": False,
                        }
                    )
                }
            )
        coupling_mismatch = (
            curve.coupling_mismatch
            if curve.coupling_mismatch is not None
            else spec.mismatch.coupling_mismatch
        )
        decay_mismatch = (
            curve.decay_mismatch if curve.decay_mismatch is not None else spec.mismatch.decay_mismatch
        )
        if not curve.atoms:
            params = params.without_atoms()
            coupling_mismatch = 0.0
        plan = CurvePlan(
            curve=curve,
            engine=engine,
            base=params,
            mismatch=MismatchSpec(coupling_mismatch=coupling_mismatch, decay_mismatch=decay_mismatch),
            n_sq=curve.n_sq if curve.n_sq is not None else spec.squeezing.n_sq,
            spec=spec,
        )
        kind = spec.axis.kind
        if kind in (AxisKind.COUPLING_MISMATCH, AxisKind.DECAY_MISMATCH):
            if not engine.capabilities.supports_mismatch:
                raise EngineMismatchError(
                    engine.capabilities.name, f"cannot sweep {kind.value}; it assumes perfect matching"
                )
        plan.check(kind, None)
        plans.append(plan)
    return plans


def probe_frequency(run: RunConfig) -> float:
    mech = run.sensor.mechanical
    probe = run.spec.probe
    return probe.omega_ratio * mech.omega_m + probe.gamma_offset * mech.gamma_m


def axis_values(run: RunConfig) -> FloatArray:
    """
    Axis values of the sweep.

    A centred power axis spans `decades` decades of (g/g0)^2 around the coupling that minimizes
    the single-cavity spectrum at the probe frequency for the sweep-level squeezing.
    """
    axis = run.spec.axis
    if axis.centered_on_optimum:
        cavity = run.sensor.cavity
        if cavity.g0 <= 0:
            raise ParameterError("g0", "a power axis needs g0 > 0")
        squeezing = run.squeezing
        g2 = g2_sql_optimum(
            probe_frequency(run), run.sensor.mechanical, cavity.kappa, squeezing.n_sq, squeezing.re_m
        )[0]
        center = g2 / cavity.g0**2
        half = 0.5 * axis.decades
        return center * np.logspace(-half, half, axis.count)
    assert axis.min is not None and axis.max is not None
    if axis.spacing == Spacing.LOG:
        return np.geomspace(axis.min, axis.max, axis.count)
    return np.linspace(axis.min, axis.max, axis.count)


def _tasks(label: str, kind: AxisKind, values: FloatArray) -> List[_Task]:
    step = CHUNK_SIZE if kind == AxisKind.FREQUENCY else 1
    return [_Task(label, start, values[start : start + step]) for start in range(0, len(values), step)]


def _evaluate(
    plan: CurvePlan, kind: AxisKind, task: _Task, omega_probe: float, options: EvaluationOptions
) -> List[EngineResult]:
    """Evaluate one task; numerical failures are retried point by point and flagged."""
    try:
        if kind == AxisKind.FREQUENCY:
            params, squeezing, _ = plan.point(kind, None)
            omega = task.values * params.mechanical.omega_m
        else:
            (value,) = task.values
            params, squeezing, mismatch = plan.point(kind, float(value))
            plan.engine.check_compatible(params, mismatch)
            omega = np.array([omega_probe])
        return [plan.engine.evaluate(omega, params, squeezing, options)]
    except NumericalError as e:
        if len(task.values) == 1:
            logger.warning(f"Curve '{task.label}': point {task.start} flagged: {e}")
            return [EngineResult.failed(1, str(e))]
        return [
            result
            for offset in range(len(task.values))
            for result in _evaluate(
                plan,
                kind,
                _Task(task.label, task.start + offset, task.values[offset : offset + 1]),
                omega_probe,
                options,
            )
        ]


def _assemble(
    size: int, tasks: List[_Task], results: List[List[EngineResult]]
) -> Tuple[SpectrumBreakdown, List[Dict[str, Any]]]:
    arrays = {name: np.empty(size) for name in COMPONENTS}
    flagged: List[Dict[str, Any]] = []
    for task, task_results in zip(tasks, results):
        position = task.start
        for result in task_results:
            n = len(result.breakdown.total)
            for name in COMPONENTS:
                arrays[name][position : position + n] = getattr(result.breakdown, name)
            if result.status == PointStatus.FLAGGED:
                flagged.extend(
                    {"index": index, "reason": result.message} for index in range(position, position + n)
                )
            position += n
    return SpectrumBreakdown(**arrays), flagged


def _overlays(run: RunConfig, values: FloatArray, omega_probe: float) -> Dict[str, FloatArray]:
    spec = run.spec
    mech = run.sensor.mechanical
    kind = spec.axis.kind
    omega = values * mech.omega_m if kind == AxisKind.FREQUENCY else np.full(len(values), omega_probe)
    y = run.sensor.detuning / run.sensor.cavity.kappa

    overlays: Dict[str, FloatArray] = {}
    for overlay in spec.overlays:
        if overlay == Overlay.SQL:
            overlays[overlay.value] = sql(omega, mech)
        elif overlay == Overlay.ULTIMATE:
            overlays[overlay.value] = ultimate_limit(omega, mech)
        elif overlay == Overlay.CQNC_FLOOR:
            overlays[overlay.value] = cqnc_floor(omega, mech)
        elif kind == AxisKind.SQUEEZING_N:
            overlays[overlay.value] = np.array(
                [
                    sql_squeezed(w, mech, n, spec.squeezing.to_params(y, n).re_m)[0]
                    for w, n in zip(omega, values)
                ]
            )
        else:
            squeezing = spec.squeezing.to_params(y)
            overlays[overlay.value] = sql_squeezed(omega, mech, squeezing.n_sq, squeezing.re_m)
    return overlays


def _laser_powers(run: RunConfig, values: FloatArray) -> Optional[List[float]]:
    params = run.sensor
    if run.spec.axis.kind != AxisKind.POWER_RATIO or params.cavity.g0 <= 0:
        return None
    lock = None
    if params.atomic.coupling_G is None:
        lock = 1.0 + run.spec.mismatch.coupling_mismatch
    g0 = params.cavity.g0
    return [power_for_coupling(params, g0 * math.sqrt(x), lock) for x in values]


def run_sweep(run: RunConfig, workers: int = 1) -> SweepResult:
    """
    Evaluate every curve of a sweep.

    Tasks are fixed chunks of the axis evaluated on a thread pool and reassembled in axis
    order, so the output does not depend on the number of workers.

    Args:
        run: Validated run configuration
        workers: Thread-pool size

    Returns:
        SweepResult with per-curve breakdowns, overlays and reproducibility metadata

    Raises:
        EngineMismatchError: If an engine cannot evaluate its curve
        ParameterError: If a point lies outside an engine's domain
    """
    spec = run.spec
    kind = spec.axis.kind
    values = axis_values(run)
    omega_probe = probe_frequency(run)
    options = EvaluationOptions(thermal_mode=spec.thermal_mode, ratio_form=spec.ratio_form)
    plans = plan_curves(run)
    logger.info(
        f"Running sweep '{spec.name}': {len(plans)} curve(s) x {len(values)} points, workers={workers}"
    )

    jobs = [(plan, task) for plan in plans for task in _tasks(plan.curve.label, kind, values)]
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        outputs = list(
            pool.map(lambda job: _evaluate(job[0], kind, job[1], omega_probe, options), jobs)
        )

    curves: Dict[str, CurveResult] = {}
    curve_meta = []
    for plan in plans:
        label = plan.curve.label
        selected = [(task, out) for (p, task), out in zip(jobs, outputs) if p is plan]
        breakdown, flagged = _assemble(
            len(values), [task for task, _ in selected], [out for _, out in selected]
        )
        params, squeezing, _ = plan.point(kind, None)
        report = validate(params, squeezing)
        curves[label] = CurveResult(
            label=label,
            engine=plan.engine.capabilities.name,
            breakdown=breakdown,
            params=params,
            squeezing=squeezing,
            validity=report,
            flagged=flagged,
        )
        if flagged:
            logger.warning(f"Curve '{label}': {len(flagged)} point(s) flagged")
        curve_meta.append(
            {
                "label": label,
                "engine": plan.engine.capabilities.name,
                "atoms": plan.curve.atoms,
                "mismatch": plan.mismatch.model_dump(mode="json"),
                "params": params.model_dump(mode="json"),
                "squeezing": squeezing.model_dump(mode="json"),
                "validity": report.to_dict(),
                "flagged": flagged,
            }
        )

    metadata: Dict[str, Any] = {
        "schema_version": spec.schema_version,
        "name": spec.name,
        "description": spec.description,
        "code_version": __version__,
        "axis": {
            "kind": kind.value,
            "column": AXIS_COLUMNS[kind],
            "count": len(values),
            "probe_omega": None if kind == AxisKind.FREQUENCY else omega_probe,
            "probe_hz": None if kind == AxisKind.FREQUENCY else angular_to_hz(omega_probe),
        },
        "spec": spec.model_dump(mode="json"),
        "curves": curve_meta,
    }
    powers = _laser_powers(run, values)
    if powers is not None:
        metadata["axis"]["laser_power_w"] = powers

    logger.info(f"Sweep '{spec.name}' finished")
    return SweepResult(
        spec=spec,
        axis=values,
        curves=curves,
        overlays=_overlays(run, values, omega_probe),
        metadata=metadata,
    )
