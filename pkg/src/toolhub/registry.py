"""Tool registry: local registration, remote import, manifest persistence."""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable

from .errors import REMOTE_UNAVAILABLE, SPEC_INVALID, ToolError, spec_invalid
from .programs import ProgramHandler
from .protocol import ToolSpec, spec_from_dict

ORIGINS = ("local", "remote", "composed", "generated")


@dataclass(frozen=True)
class ToolEntry:
    spec: ToolSpec
    origin: str
    handler_ref: str
    endpoint: str | None = None
    registered_at: float = field(default_factory=time.time)


@dataclass(frozen=True)
class ManifestError:
    """One skipped spec during manifest loading or remote import."""

    source: str
    error: ToolError


class Registry:
    """Name-unique tool table. Reads are lock-free on the snapshot dict;
    registrations are serialized through a single writer lock."""

    def __init__(self) -> None:
        self._entries: dict[str, ToolEntry] = {}
        self._handlers: dict[str, Any] = {}
        self._lock = threading.RLock()
        self._version = 0

    @property
    def version(self) -> int:
        """Bumped on every mutation; lets index snapshots detect staleness."""
        return self._version

    # -- lookup -------------------------------------------------------------

    def __contains__(self, name: str) -> bool:
        return name in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, name: str) -> ToolEntry | None:
        return self._entries.get(name)

    def resolve_handler(self, name: str) -> Any:
        entry = self._entries.get(name)
        if entry is None:
            raise ToolError("ToolNotFound", f"no tool named {name!r}")
        handler = self._handlers.get(entry.handler_ref)
        if handler is None:
            raise ToolError(
                "ExecutionFailed", f"handler {entry.handler_ref!r} for tool {name!r} does not resolve"
            )
        return handler

    def list_tools(self, tag: str | None = None, origin: str | None = None) -> list[ToolSpec]:
        specs = []
        for name in sorted(self._entries):
            entry = self._entries[name]
            if tag is not None and tag not in entry.spec.tags:
                continue
            if origin is not None and entry.origin != origin:
                continue
            specs.append(entry.spec)
        return specs

    # -- registration -------------------------------------------------------

    def register_local(self, spec: ToolSpec, handler: Any, origin: str = "local") -> str:
        if origin not in ORIGINS:
            raise ValueError(f"unknown origin: {origin!r}")
        with self._lock:
            if spec.name in self._entries:
                raise spec_invalid(
                    f"a tool named {spec.name!r} is already registered", detail=spec.name
                )
            self._handlers[spec.name] = handler
            self._entries[spec.name] = ToolEntry(spec=spec, origin=origin, handler_ref=spec.name)
            self._version += 1
        return spec.name

    def unregister(self, name: str) -> None:
        with self._lock:
            entry = self._entries.pop(name, None)
            if entry is not None:
                self._handlers.pop(entry.handler_ref, None)
                self._version += 1

    def register_remote(
        self, endpoint: str, connect: Callable[[str], Any] | None = None
    ) -> tuple[list[str], list[ManifestError]]:
        """Import every tool listed by a remote server, proxying calls to it.

        Name collisions with existing tools are skipped and reported; the
        remote tool list is snapshotted once (re-run to refresh).
        """
        if connect is None:
            from .wire.client import connect as connect  # late import, avoids cycle

        try:
            client = connect(endpoint)
            remote_specs = client.list_tools()
        except ToolError:
            raise
        except Exception as exc:
            raise ToolError(REMOTE_UNAVAILABLE, f"cannot reach {endpoint}: {exc}") from exc

        from .wire.client import proxy_handler

        registered: list[str] = []
        errors: list[ManifestError] = []
        for raw in remote_specs:
            try:
                spec = spec_from_dict(raw) if isinstance(raw, dict) else raw
            except ToolError as exc:
                errors.append(ManifestError(source=f"{endpoint}:{raw}", error=exc))
                continue
            with self._lock:
                if spec.name in self._entries:
                    errors.append(
                        ManifestError(
                            source=endpoint,
                            error=spec_invalid(
                                f"remote tool {spec.name!r} collides with an existing tool; skipped",
                                detail=spec.name,
                            ),
                        )
                    )
                    continue
                self._handlers[spec.name] = proxy_handler(client, spec.name)
                self._entries[spec.name] = ToolEntry(
                    spec=spec, origin="remote", handler_ref=spec.name, endpoint=endpoint
                )
                self._version += 1
            registered.append(spec.name)
        return registered, errors

    def refresh_remote(self, endpoint: str, connect: Callable[[str], Any] | None = None):
        """Drop and re-import every entry previously loaded from ``endpoint``."""
        with self._lock:
            stale = [n for n, e in self._entries.items() if e.endpoint == endpoint]
            for name in stale:
                self.unregister(name)
        return self.register_remote(endpoint, connect=connect)

    # -- manifest persistence -------------------------------------------------

    def load_manifest(
        self,
        path: str | Path,
        builtin_handlers: dict[str, Any] | None = None,
    ) -> tuple[list[str], list[ManifestError]]:
        """Populate the registry from a manifest directory.

        Layout: ``manifest.json`` listing ``{"file": ..., "handler": ...}``
        entries next to one-spec-per-file JSON documents. Malformed specs are
        collected and reported, not fail-fast.
        """
        base = Path(path)
        manifest_file = base / "manifest.json"
        manifest = json.loads(manifest_file.read_text("utf-8"))
        loaded: list[str] = []
        errors: list[ManifestError] = []
        for item in manifest.get("tools", []):
            source = item.get("file", "<inline>")
            try:
                if "file" in item:
                    raw = json.loads((base / item["file"]).read_text("utf-8"))
                else:
                    raw = item["spec"]
                spec = spec_from_dict(raw)
                if item.get("settings"):
                    merged = dict(spec.settings)
                    merged.update(item["settings"])
                    spec = ToolSpec(
                        name=spec.name,
                        description=spec.description,
                        parameters=spec.parameters,
                        return_schema=spec.return_schema,
                        tags=spec.tags,
                        settings=merged,
                    )
                handler = self._load_handler(item.get("handler"), base, builtin_handlers or {})
                origin = item.get("origin", "local")
                self.register_local(spec, handler, origin=origin)
                loaded.append(spec.name)
            except ToolError as exc:
                errors.append(ManifestError(source=str(source), error=exc))
            except (OSError, json.JSONDecodeError, KeyError) as exc:
                errors.append(
                    ManifestError(source=str(source), error=spec_invalid(f"unreadable spec: {exc}"))
                )
        return loaded, errors

    @staticmethod
    def _load_handler(descriptor: Any, base: Path, builtins: dict[str, Any]) -> Any:
        if descriptor is None:
            raise spec_invalid("manifest entry has no handler descriptor")
        kind = descriptor.get("type")
        if kind == "builtin":
            name = descriptor.get("name")
            if name not in builtins:
                raise spec_invalid(f"unknown builtin handler {name!r}")
            return builtins[name]
        if kind == "program":
            if "file" in descriptor:
                program = json.loads((base / descriptor["file"]).read_text("utf-8"))
            else:
                program = descriptor.get("program")
            return ProgramHandler(program)
        raise spec_invalid(f"unknown handler descriptor type {kind!r}")

    def save_manifest(self, path: str | Path, origins: Iterable[str] = ("local", "generated")) -> int:
        """Write one spec file per tool plus manifest.json. Only tools whose
        handlers are serializable programs or named builtins round-trip."""
        base = Path(path)
        base.mkdir(parents=True, exist_ok=True)
        items = []
        for name in sorted(self._entries):
            entry = self._entries[name]
            if entry.origin not in origins:
                continue
            handler = self._handlers.get(entry.handler_ref)
            if isinstance(handler, ProgramHandler):
                descriptor: dict[str, Any] = {"type": "program", "program": handler.program}
            else:
                descriptor = {"type": "builtin", "name": entry.handler_ref}
            spec_file = f"{name}.json"
            (base / spec_file).write_text(
                json.dumps(entry.spec.to_dict(), indent=2, sort_keys=True) + "\n", "utf-8"
            )
            items.append({"file": spec_file, "handler": descriptor, "origin": entry.origin})
        (base / "manifest.json").write_text(
            json.dumps({"tools": items}, indent=2, sort_keys=True) + "\n", "utf-8"
        )
        return len(items)
