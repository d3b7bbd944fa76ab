import importlib
import inspect
import logging
from typing import Any, Dict, List, Type

from src.core.exceptions import EngineNotFoundError

from .base_engine import BaseEngine, EngineCapability

logger = logging.getLogger(__name__)

ENGINE_MODULES = ["src.bench.engines"]


class EngineRegistry:
    """
    Central registry for spectrum engines.
    Discovers the built-in engines on first use and resolves names from configuration files.
    """

    def __init__(self) -> None:
        self._engines: Dict[str, BaseEngine] = {}
        self._discovered = False

    def _discover_engines(self) -> None:
        """Register every concrete BaseEngine subclass found in the engine modules."""
        for module_name in ENGINE_MODULES:
            module = importlib.import_module(module_name)
            for name, obj in inspect.getmembers(module, inspect.isclass):
                if issubclass(obj, BaseEngine) and obj is not BaseEngine and not inspect.isabstract(obj):
                    if obj().capabilities.name not in self._engines:
                        self.register_engine_class(obj)
                        logger.debug(f"Discovered engine: {name} in {module_name}")
        self._discovered = True

    def _ensure_discovered(self) -> None:
        if not self._discovered:
            self._discover_engines()

    def register_engine(self, engine: BaseEngine) -> None:
        """Register an engine instance."""
        engine_name = engine.capabilities.name
        if engine_name in self._engines:
            logger.warning(f"Engine {engine_name} already registered, replacing...")
        self._engines[engine_name] = engine
        logger.debug(f"Registered engine: {engine_name}")

    def register_engine_class(self, engine_class: Type[BaseEngine]) -> None:
        self.register_engine(engine_class())

    def get_engine(self, name: str) -> BaseEngine:
        """
        Get an engine by name.

        Raises:
            EngineNotFoundError: If no engine is registered under that name
        """
        self._ensure_discovered()
        engine = self._engines.get(name)
        if engine is None:
            raise EngineNotFoundError(name)
        return engine

    def get_all_engines(self) -> Dict[str, BaseEngine]:
        self._ensure_discovered()
        return dict(sorted(self._engines.items()))

    def get_capabilities(self) -> Dict[str, EngineCapability]:
        return {name: engine.capabilities for name, engine in self.get_all_engines().items()}

    def list_engines(self) -> List[Dict[str, Any]]:
        """List all engines with their information."""
        return [
            {
                "name": capabilities.name,
                "description": capabilities.description,
                "supports_detuning": capabilities.supports_detuning,
                "supports_mismatch": capabilities.supports_mismatch,
                "needs_atoms": capabilities.needs_atoms,
            }
            for capabilities in self.get_capabilities().values()
        ]

    def __len__(self) -> int:
        self._ensure_discovered()
        return len(self._engines)

    def __contains__(self, name: str) -> bool:
        self._ensure_discovered()
        return name in self._engines

    def __getitem__(self, name: str) -> BaseEngine:
        return self.get_engine(name)


# Global registry instance
engine_registry = EngineRegistry()
