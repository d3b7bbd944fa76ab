"""
Loading of sweep files and figure presets into validated run configurations.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import yaml
from pydantic import ValidationError

from src.core.config import apply_overrides, deep_merge, load_yaml
from src.core.config import load_config as load_preset_documents
from src.core.exceptions import ConfigurationError
from src.physics.model import SensorParams, SqueezingParams

from .schema import SweepSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    """A validated sweep with its sensor and squeezing parameters in angular units."""

    spec: SweepSpec
    sensor: SensorParams
    squeezing: SqueezingParams
    source: Optional[str] = None


def _dotted(loc: Sequence[Union[str, int]]) -> str:
    return ".".join(str(part) for part in loc)


def _line_of(path: Path, loc: Sequence[Union[str, int]]) -> Optional[int]:
    """1-based line of the deepest YAML node that exists along loc."""
    try:
        node = yaml.compose(path.read_text())
    except (OSError, yaml.YAMLError):
        return None
    line = None
    for part in loc:
        if isinstance(node, yaml.MappingNode):
            match = [value for key, value in node.value if key.value == str(part)]
            if not match:
                break
            node = match[0]
        elif isinstance(node, yaml.SequenceNode) and isinstance(part, int) and part < len(node.value):
            node = node.value[part]
        else:
            break
        line = node.start_mark.line + 1
    return line


def validate_document(data: Dict[str, Any], source: Optional[Union[str, Path]] = None) -> SweepSpec:
    """
    Validate a raw mapping against the sweep schema.

    Args:
        data: Parsed YAML mapping, overrides already applied
        source: File the mapping came from, used to locate the failing line

    Returns:
        SweepSpec

    Raises:
        ConfigurationError: Naming the dotted field path and the failed check
    """
    try:
        return SweepSpec.model_validate(data)
    except ValidationError as e:
        error = e.errors()[0]
        loc = error["loc"]
        field = _dotted(loc) or None
        line = _line_of(Path(source), loc) if source is not None and Path(source).exists() else None
        extra = f" (and {e.error_count() - 1} more)" if e.error_count() > 1 else ""
        raise ConfigurationError(
            f"{error['msg']}{extra}", field=field, line=line, source=str(source) if source else None
        ) from e


def build_run_config(spec: SweepSpec, source: Optional[str] = None) -> RunConfig:
    try:
        sensor = spec.sensor.to_params()
        squeezing = spec.squeezing.to_params()
    except ValidationError as e:
        error = e.errors()[0]
        raise ConfigurationError(error["msg"], field=_dotted(error["loc"]), source=source) from e
    return RunConfig(spec=spec, sensor=sensor, squeezing=squeezing, source=source)


def load_config(path: Union[str, Path], overrides: Optional[List[str]] = None) -> RunConfig:
    """
    Load a sweep file.

    Args:
        path: YAML sweep document
        overrides: Dotted-path overrides applied before validation

    Returns:
        RunConfig with the validated spec and angular-unit parameters

    Raises:
        ConfigurationError: On YAML, schema or invariant errors
    """
    path = Path(path)
    data = apply_overrides(load_yaml(path), overrides or [])
    spec = validate_document(data, path)
    logger.info(f"Loaded sweep '{spec.name}' from {path}")
    return build_run_config(spec, str(path))


def load_preset(
    name: str,
    overrides: Optional[List[str]] = None,
    config_dir: Optional[Union[str, Path]] = None,
) -> RunConfig:
    """
    Expand a figure preset: the shared base document merged with the preset's own keys.

    Raises:
        ConfigurationError: If the preset does not exist or does not validate
    """
    documents = load_preset_documents(config_dir)
    presets = documents["presets"]
    if name not in presets:
        raise ConfigurationError(f"unknown preset '{name}'; available: {sorted(presets)}")

    data = deep_merge(documents["base"], presets[name])
    data["name"] = name
    data = apply_overrides(data, overrides or [])
    spec = validate_document(data)
    logger.info(f"Expanded preset '{name}'")
    return build_run_config(spec, f"preset:{name}")


def list_presets(config_dir: Optional[Union[str, Path]] = None) -> List[Tuple[str, str]]:
    """(name, description) for every preset, in file order."""
    presets = load_preset_documents(config_dir)["presets"]
    return [(name, str(body.get("description", ""))) for name, body in presets.items()]
