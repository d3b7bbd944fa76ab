# Core utilities and shared components
from .config import apply_overrides, deep_merge, load_config, load_yaml
from .exceptions import *

__all__ = ["load_config", "load_yaml", "deep_merge", "apply_overrides"]
