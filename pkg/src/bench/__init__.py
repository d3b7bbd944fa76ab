# Sweep bench: configuration schema, engines, sweep runner, emitters and comparison
from .base_engine import BaseEngine, EngineCapability, EngineResult, EvaluationOptions, PointStatus
from .compare import ColumnDeviation, CompareReport, compare
from .emit import OutputFormat, emit, load_result, render
from .loader import RunConfig, build_run_config, list_presets, load_config, load_preset
from .registry import EngineRegistry, engine_registry
from .schema import AxisKind, Overlay, Spacing, SweepSpec
from .sweep import CurveResult, SweepResult, run_sweep
from .table import ResultTable

__all__ = [
    "AxisKind",
    "BaseEngine",
    "ColumnDeviation",
    "CompareReport",
    "CurveResult",
    "EngineCapability",
    "EngineRegistry",
    "EngineResult",
    "EvaluationOptions",
    "Overlay",
    "OutputFormat",
    "PointStatus",
    "ResultTable",
    "RunConfig",
    "Spacing",
    "SweepResult",
    "SweepSpec",
    "build_run_config",
    "compare",
    "emit",
    "engine_registry",
    "list_presets",
    "load_config",
    "load_preset",
    "load_result",
    "render",
    "run_sweep",
]
