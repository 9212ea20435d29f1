"""Tool caller: parse, validate, lazily load, cache, dispatch, time.

Handlers are loaded on first call (with the spec's settings injected when the
handler is a class), cached with a TTL and an LRU capacity bound, and invoked
only after argument validation succeeds.
"""

from __future__ import annotations

import inspect
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from concurrent.futures import TimeoutError as FutureTimeout
from dataclasses import dataclass, field
from typing import Any

from .errors import (
    EXECUTION_FAILED,
    TIMEOUT,
    TOOL_NOT_FOUND,
    ToolError,
)
from .protocol import (
    ToolCall,
    ToolResult,
    conforms_to_return_schema,
    error_result,
    ok_result,
    parse_tool_call,
    validate_arguments,
)
from .registry import Registry


@dataclass
class CacheConfig:
    ttl_seconds: float = 600.0
    max_loaded: int = 128

    def __post_init__(self) -> None:
        if self.ttl_seconds <= 0 or self.max_loaded <= 0:
            raise ValueError("ttl_seconds and max_loaded must be positive")


@dataclass
class LoadedTool:
    instance: Any
    loaded_at: float
    last_used: float
    in_flight: int = 0


@dataclass
class CallerStats:
    load_counts: dict[str, int] = field(default_factory=dict)
    load_count_global: int = 0


class ToolCaller:
    def __init__(
        self,
        registry: Registry,
        cache: CacheConfig | None = None,
        timeout_seconds: float = 60.0,
        max_workers: int = 32,
    ):
        self.registry = registry
        self.cache = cache or CacheConfig()
        self.timeout_seconds = timeout_seconds
        self.stats = CallerStats()
        self._loaded: dict[str, LoadedTool] = {}
        self._lock = threading.Lock()
        self._load_locks: dict[str, threading.Lock] = {}
        self._exec_gates: dict[str, threading.Lock] = {}
        self._pool = ThreadPoolExecutor(max_workers=max_workers, thread_name_prefix="tool-exec")

    # -- cache management -----------------------------------------------------

    def _load_lock(self, name: str) -> threading.Lock:
        with self._lock:
            return self._load_locks.setdefault(name, threading.Lock())

    def _get_instance(self, call_name: str) -> Any:
        now = time.monotonic()
        with self._lock:
            loaded = self._loaded.get(call_name)
            if loaded is not None:
                loaded.last_used = now
                loaded.in_flight += 1
                return loaded.instance

        # Single-flight: concurrent first calls produce exactly one load.
        with self._load_lock(call_name):
            with self._lock:
                loaded = self._loaded.get(call_name)
                if loaded is not None:
                    loaded.last_used = now
                    loaded.in_flight += 1
                    return loaded.instance
            handler = self.registry.resolve_handler(call_name)
            entry = self.registry.get(call_name)
            instance = self._instantiate(handler, dict(entry.spec.settings) if entry else {})
            with self._lock:
                self.stats.load_counts[call_name] = self.stats.load_counts.get(call_name, 0) + 1
                self.stats.load_count_global += 1
                self._loaded[call_name] = LoadedTool(
                    instance=instance, loaded_at=now, last_used=now, in_flight=1
                )
                self._enforce_capacity()
            return instance

    @staticmethod
    def _instantiate(handler: Any, settings: dict[str, Any]) -> Any:
        if inspect.isclass(handler):
            try:
                return handler(settings=settings)
            except TypeError:
                return handler()
        return handler

    def _release(self, name: str) -> None:
        with self._lock:
            loaded = self._loaded.get(name)
            if loaded is not None and loaded.in_flight > 0:
                loaded.in_flight -= 1

    def _enforce_capacity(self) -> None:
        # Caller holds self._lock. Evict LRU entries that are not in flight.
        while len(self._loaded) > self.cache.max_loaded:
            idle = [(n, t) for n, t in self._loaded.items() if t.in_flight == 0]
            if not idle:
                return
            victim = min(idle, key=lambda item: item[1].last_used)[0]
            del self._loaded[victim]

    def evict_expired(self, now: float | None = None) -> list[str]:
        """Release instances idle past the TTL; never interrupts in-flight calls."""
        now = time.monotonic() if now is None else now
        evicted = []
        with self._lock:
            for name in list(self._loaded):
                loaded = self._loaded[name]
                if loaded.in_flight == 0 and now - loaded.last_used > self.cache.ttl_seconds:
                    del self._loaded[name]
                    evicted.append(name)
        return evicted

    # -- execution --------------------------------------------------------------

    def call_tool(self, call: ToolCall, timeout_seconds: float | None = None) -> ToolResult:
        start = time.perf_counter()

        def elapsed() -> float:
            return (time.perf_counter() - start) * 1000.0

        entry = self.registry.get(call.name)
        if entry is None:
            return error_result(
                ToolError(TOOL_NOT_FOUND, f"no tool named {call.name!r}"), elapsed()
            )
        try:
            args = validate_arguments(call, entry.spec)
        except ToolError as exc:
            return error_result(exc, elapsed())

        try:
            instance = self._get_instance(call.name)
        except ToolError as exc:
            return error_result(exc, elapsed())
        except Exception as exc:  # handler constructor failed
            return error_result(
                ToolError(EXECUTION_FAILED, f"loading {call.name!r} failed: {exc}"), elapsed()
            )

        timeout = self.timeout_seconds if timeout_seconds is None else timeout_seconds
        gate = self._execution_gate(call.name, instance)
        try:
            future = self._pool.submit(self._invoke, instance, args, gate)
            try:
                payload = future.result(timeout=timeout)
            except FutureTimeout:
                future.cancel()
                return error_result(
                    ToolError(TIMEOUT, f"{call.name!r} exceeded {timeout}s deadline"), elapsed()
                )
        except ToolError as exc:
            return error_result(exc, elapsed())
        except Exception as exc:
            if isinstance(exc.__cause__, ToolError):
                return error_result(exc.__cause__, elapsed())
            return error_result(
                ToolError(EXECUTION_FAILED, f"{call.name!r} raised: {exc}"), elapsed()
            )
        finally:
            self._release(call.name)

        if isinstance(payload, ToolResult):
            # Proxy handlers return a full remote result; pass it through.
            return ToolResult(
                payload.status, payload.payload, payload.error, duration_ms=elapsed()
            )

        okay, path = conforms_to_return_schema(payload, entry.spec.return_schema)
        if not okay:
            return error_result(
                ToolError(
                    EXECUTION_FAILED,
                    f"{call.name!r} returned a payload that violates its return schema at {path}",
                    detail={"path": path},
                ),
                elapsed(),
            )
        return ok_result(payload, elapsed())

    def _execution_gate(self, name: str, instance: Any) -> threading.Lock | None:
        if getattr(instance, "reentrant", True):
            return None
        with self._lock:
            return self._exec_gates.setdefault(name, threading.Lock())

    @staticmethod
    def _invoke(instance: Any, args: dict[str, Any], gate: threading.Lock | None) -> Any:
        runner = instance.run if hasattr(instance, "run") else instance
        if gate is not None:
            with gate:
                return runner(args)
        return runner(args)

    def run(self, call_schema: str) -> str:
        """The single local entry point: serialized call in, serialized result out.

        Total: returns a well-formed serialized ToolResult for every input.
        """
        start = time.perf_counter()
        try:
            call = parse_tool_call(call_schema)
        except ToolError as exc:
            return error_result(exc, (time.perf_counter() - start) * 1000.0).serialize()
        return self.call_tool(call).serialize()
