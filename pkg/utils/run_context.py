"""
Process-wide cache for expensive run constants.

The best Gagliardo-Nirenberg constant and the limit ground states are
computed once per key and shared by the CLI, the verification graph and
multi-start workers.
"""

import logging
import threading
from typing import Any, Callable, Dict, Hashable, Optional, Tuple

from fields.grid import Grid
from landscape.gn import GNOptimizer, gn_optimizer

logger = logging.getLogger(__name__)


class RunContext:
    """
    Write-once cache with singleton pattern and thread-safety.

    Values are computed under a re-entrant lock, so a factory may itself
    read other cached values (the limit ground state needs C_{N,p}).
    """

    _instance: Optional["RunContext"] = None
    _instance_lock = threading.Lock()

    def __new__(cls) -> "RunContext":
        if cls._instance is None:
            with cls._instance_lock:
                if cls._instance is None:
                    cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self):
        # Only initialize once
        if not hasattr(self, "_initialized"):
            self._cache: Dict[Tuple[str, Hashable], Any] = {}
            self._initialization_lock = threading.RLock()
            self._initialized = True

    def get_or_compute(self, namespace: str, key: Hashable, factory: Callable[[], Any]) -> Any:
        """
        Return the cached value for (namespace, key), computing it on first use.

        Args:
            namespace: Kind of value, e.g. "gn_constant"
            key: Hashable identity of the inputs
            factory: Zero-argument callable producing the value

        Returns:
            The cached value
        """
        full_key = (namespace, key)
        if full_key not in self._cache:
            with self._initialization_lock:
                # Double-check pattern to avoid duplicate work
                if full_key not in self._cache:
                    logger.info("🔄 computing %s for %s", namespace, key)
                    self._cache[full_key] = factory()
                    logger.info("✅ cached %s", namespace)
        return self._cache[full_key]

    def gn_optimizer(self, dim: int, p: float, grid: Grid) -> GNOptimizer:
        """Weinstein maximizer and C_{N,p} on this grid."""
        return self.get_or_compute(
            "gn_optimizer", (dim, float(p), grid), lambda: gn_optimizer(dim, p, grid)
        )

    def gn_constant(self, dim: int, p: float, grid: Grid) -> float:
        return self.gn_optimizer(dim, p, grid).constant

    def is_cached(self, namespace: str, key: Hashable) -> bool:
        return (namespace, key) in self._cache

    def clear(self) -> None:
        with self._initialization_lock:
            self._cache.clear()


# Global instance for easy access
_run_context: Optional[RunContext] = None


def get_run_context() -> RunContext:
    """Get the global run context instance."""
    global _run_context
    if _run_context is None:
        _run_context = RunContext()
    return _run_context
