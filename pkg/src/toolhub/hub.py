"""ToolHub: the runtime facade.

Wires the registry, caller, finder, agent backends and composer together and
exposes the two protocol operations (find_tool / call_tool) plus the local
``run()`` entry point mirrored by the wire server.
"""

from __future__ import annotations

import threading
from typing import Any

from .agentic import BackendRegistry, agentic_find
from .caller import CacheConfig, ToolCaller
from .composer import Composer, CompositePlan
from .finder import Embedder, Finder, ToolMatch
from .protocol import ToolCall, ToolResult, ToolSpec
from .registry import Registry


class ToolHub:
    def __init__(
        self,
        registry: Registry | None = None,
        cache: CacheConfig | None = None,
        embedder: Embedder | None = None,
        timeout_seconds: float = 60.0,
        agentic_backend_id: str | None = None,
    ):
        self.registry = registry or Registry()
        self.caller = ToolCaller(self.registry, cache=cache, timeout_seconds=timeout_seconds)
        self.backends = BackendRegistry()
        self.composer = Composer(self.registry, self.caller, self.backends)
        self.agentic_backend_id = agentic_backend_id
        self._embedder = embedder
        self._finder: Finder | None = None
        self._finder_version = -1
        self._finder_lock = threading.Lock()

    # -- finder snapshot ----------------------------------------------------

    @property
    def finder(self) -> Finder:
        """Current index snapshot; rebuilt (atomically swapped) when the
        registry has changed since the last build."""
        with self._finder_lock:
            if self._finder is None or self._finder_version != self.registry.version:
                agentic_search = None
                if self.agentic_backend_id is not None:
                    backend_id = self.agentic_backend_id

                    def agentic_search(query, candidates, _backend=backend_id):
                        matches, _dropped = agentic_find(query, candidates, self.backends, _backend)
                        return matches

                self._finder = Finder(
                    self.registry.list_tools(),
                    embedder=self._embedder,
                    agentic_search=agentic_search,
                )
                self._finder_version = self.registry.version
            return self._finder

    # -- protocol operations -------------------------------------------------

    def find_tool(self, query: str, strategy: str = "keyword", limit: int = 10) -> list[ToolMatch]:
        return self.finder.find_tool(query, strategy=strategy, limit=limit)

    def call_tool(self, call: ToolCall) -> ToolResult:
        return self.caller.call_tool(call)

    def run(self, call_schema: str) -> str:
        return self.caller.run(call_schema)

    def list_tools(self, tag: str | None = None, origin: str | None = None) -> list[ToolSpec]:
        return self.registry.list_tools(tag=tag, origin=origin)

    # -- convenience ----------------------------------------------------------

    def register_local(self, spec: ToolSpec, handler: Any) -> str:
        return self.registry.register_local(spec, handler)

    def register_remote(self, endpoint: str):
        return self.registry.register_remote(endpoint)

    def compose(self, plan: CompositePlan) -> str:
        return self.composer.compose(plan)
