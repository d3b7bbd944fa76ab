import json
import math
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel


def json_serializer(obj: Any) -> Any:
    """Custom JSON serializer for numpy scalars/arrays, enums, paths and pydantic models."""
    if isinstance(obj, np.ndarray):
        return [sanitize_for_json(v) for v in obj.tolist()]
    elif isinstance(obj, (np.floating,)):
        return sanitize_for_json(float(obj))
    elif isinstance(obj, (np.integer,)):
        return int(obj)
    elif isinstance(obj, (np.bool_,)):
        return bool(obj)
    elif isinstance(obj, complex):
        return {"real": obj.real, "imag": obj.imag}
    elif isinstance(obj, Enum):
        return obj.value
    elif isinstance(obj, Path):
        return str(obj)
    elif isinstance(obj, BaseModel):
        return obj.model_dump(mode="json")
    else:
        raise TypeError(f"Object of type {type(obj)} is not JSON serializable")


def sanitize_for_json(value: Any) -> Any:
    """Replace non-finite floats with None, recursing into lists and dicts."""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {k: sanitize_for_json(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [sanitize_for_json(v) for v in value]
    return value


def dumps_deterministic(document: Any) -> str:
    """Serialize a document the same way every time: fixed indentation, no NaN literals."""
    normalized = json.loads(json.dumps(document, default=json_serializer, allow_nan=True))
    return json.dumps(sanitize_for_json(normalized), indent=2, allow_nan=False) + "\n"
