"""
YAML configuration loading for sweep files and figure presets.
"""

import copy
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml

from .exceptions import ConfigurationError

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_DIR = Path(__file__).parent.parent.parent / "config"
PRESETS_FILE = "presets.yaml"


def load_yaml(path: Union[str, Path]) -> Dict[str, Any]:
    """
    Read a YAML mapping from disk.

    Args:
        path: Path to the YAML file

    Returns:
        Parsed mapping

    Raises:
        ConfigurationError: If the file is missing, malformed or not a mapping
    """
    path = Path(path)
    if not path.exists():
        raise ConfigurationError("configuration file does not exist", source=str(path))

    try:
        with open(path, "r") as f:
            data = yaml.safe_load(f)
    except yaml.MarkedYAMLError as e:
        line = e.problem_mark.line + 1 if e.problem_mark is not None else None
        raise ConfigurationError(f"YAML syntax error: {e.problem}", line=line, source=str(path))
    except yaml.YAMLError as e:
        raise ConfigurationError(f"YAML syntax error: {e}", source=str(path))

    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigurationError("top level must be a mapping", source=str(path))
    return data


def load_config(config_path: Optional[Union[str, Path]] = None) -> Dict[str, Any]:
    """
    Load the preset documents from the config directory.

    Args:
        config_path: Optional path to the config directory

    Returns:
        Mapping with a 'base' document and a 'presets' mapping of partial documents
    """
    if config_path is None:
        config_path = DEFAULT_CONFIG_DIR
    config_path = Path(config_path)

    presets_file = config_path / PRESETS_FILE
    data = load_yaml(presets_file)
    if "base" not in data or "presets" not in data:
        raise ConfigurationError("expected 'base' and 'presets' sections", source=str(presets_file))

    logger.debug(f"Loaded {len(data['presets'])} presets from {presets_file}")
    return data


def deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """
    Recursively merge two mappings, with values from override taking precedence.

    Lists are replaced, not concatenated.
    """
    result = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(result.get(key), dict):
            result[key] = deep_merge(result[key], value)
        else:
            result[key] = copy.deepcopy(value)
    return result


def parse_override(text: str) -> tuple[List[str], Any]:
    """
    Parse a 'dotted.path=value' override.

    The value is read as a YAML scalar, so numbers, booleans and null keep their types.
    """
    if "=" not in text:
        raise ConfigurationError(f"override '{text}' must look like dotted.path=value")
    key, raw_value = text.split("=", 1)
    parts = [part for part in key.strip().split(".") if part]
    if not parts:
        raise ConfigurationError(f"override '{text}' has an empty path")
    try:
        value = yaml.safe_load(raw_value) if raw_value.strip() else None
    except yaml.YAMLError as e:
        raise ConfigurationError(f"override value is not valid YAML: {e}", field=key.strip())
    return parts, value


def apply_overrides(data: Dict[str, Any], overrides: List[str]) -> Dict[str, Any]:
    """
    Apply dotted-path overrides to a raw configuration mapping.

    Args:
        data: Raw mapping (not modified)
        overrides: Strings of the form 'a.b.c=value'

    Returns:
        New mapping with the overrides applied
    """
    result = copy.deepcopy(data)
    for text in overrides:
        parts, value = parse_override(text)
        node = result
        for part in parts[:-1]:
            child = node.get(part)
            if child is None:
                child = {}
                node[part] = child
            elif not isinstance(child, dict):
                raise ConfigurationError(
                    f"cannot descend into scalar while applying '{text}'", field=".".join(parts)
                )
            node = child
        node[parts[-1]] = value
        logger.debug(f"Override applied: {'.'.join(parts)} = {value!r}")
    return result
