from __future__ import annotations

import json

import pytest

from toolhub.demo import BUILTIN_HANDLERS, demo_spec_dir, install_demo_pack
from toolhub.errors import ToolError
from toolhub.programs import ProgramHandler
from toolhub.registry import Registry

from .conftest import make_spec


class NoopHandler:
    def run(self, args):
        return {}


def test_register_and_lookup():
    registry = Registry()
    registry.register_local(make_spec("a_tool", "does a"), NoopHandler())
    assert "a_tool" in registry
    assert len(registry) == 1
    assert registry.get("a_tool").origin == "local"
    assert isinstance(registry.resolve_handler("a_tool"), NoopHandler)


def test_duplicate_name_rejected():
    registry = Registry()
    registry.register_local(make_spec("a_tool", "does a"), NoopHandler())
    with pytest.raises(ToolError) as exc:
        registry.register_local(make_spec("a_tool", "does a again"), NoopHandler())
    assert exc.value.code == "SpecInvalid"


def test_unregister_then_reregister():
    registry = Registry()
    registry.register_local(make_spec("a_tool", "does a"), NoopHandler())
    registry.unregister("a_tool")
    assert "a_tool" not in registry
    registry.register_local(make_spec("a_tool", "does a"), NoopHandler())


def test_version_bumps_on_mutation():
    registry = Registry()
    v0 = registry.version
    registry.register_local(make_spec("a_tool", "does a"), NoopHandler())
    v1 = registry.version
    registry.unregister("a_tool")
    v2 = registry.version
    assert v0 < v1 < v2


def test_resolve_handler_unknown_tool():
    registry = Registry()
    with pytest.raises(ToolError) as exc:
        registry.resolve_handler("ghost")
    assert exc.value.code == "ToolNotFound"


def test_list_tools_sorted_and_filtered(demo_hub):
    names = [s.name for s in demo_hub.list_tools()]
    assert names == sorted(names)
    db = demo_hub.list_tools(tag="database")
    assert db and all("database" in s.tags for s in db)
    assert demo_hub.list_tools(origin="remote") == []


def test_demo_manifest_count_matches_registry():
    registry = Registry()
    count = install_demo_pack(registry)
    with open(demo_spec_dir() + "/manifest.json") as fh:
        manifest = json.load(fh)
    assert count == len(manifest["tools"]) == len(registry)
    assert count >= 20


def test_manifest_loading_collects_errors(tmp_path):
    good = {"name": "good_tool", "description": "fine", "parameters": [], "return_schema": None}
    bad = {"name": "Bad Name", "description": "broken"}
    (tmp_path / "good_tool.json").write_text(json.dumps(good))
    (tmp_path / "bad.json").write_text(json.dumps(bad))
    (tmp_path / "manifest.json").write_text(
        json.dumps(
            {
                "tools": [
                    {"file": "good_tool.json", "handler": {"type": "builtin", "name": "noop"}},
                    {"file": "bad.json", "handler": {"type": "builtin", "name": "noop"}},
                    {"file": "missing.json", "handler": {"type": "builtin", "name": "noop"}},
                ]
            }
        )
    )
    registry = Registry()
    loaded, errors = registry.load_manifest(tmp_path, builtin_handlers={"noop": NoopHandler})
    assert loaded == ["good_tool"]
    assert len(errors) == 2
    assert {e.source for e in errors} == {"bad.json", "missing.json"}


def test_save_then_load_roundtrip(tmp_path):
    registry = Registry()
    spec = make_spec("prog_tool", "program-backed tool")
    registry.register_local(spec, ProgramHandler({"returns": {"ok": True}}))
    count = registry.save_manifest(tmp_path)
    assert count == 1

    reloaded = Registry()
    loaded, errors = reloaded.load_manifest(tmp_path)
    assert loaded == ["prog_tool"] and not errors
    assert reloaded.get("prog_tool").spec == spec


def test_register_remote_snapshot_and_collisions():
    class FakeClient:
        def __init__(self):
            self.specs = [
                make_spec("remote_a", "a").to_dict(),
                make_spec("collide", "remote version").to_dict(),
            ]

        def list_tools(self):
            return self.specs

        def call_tool(self, name, args):
            raise AssertionError("not called here")

    client = FakeClient()
    registry = Registry()
    registry.register_local(make_spec("collide", "local version"), NoopHandler())
    registered, errors = registry.register_remote("fake:1", connect=lambda e: client)
    assert registered == ["remote_a"]
    assert len(errors) == 1 and "collide" in errors[0].error.message
    assert registry.get("collide").origin == "local"  # local wins
    assert registry.get("remote_a").origin == "remote"
    assert registry.get("remote_a").endpoint == "fake:1"

    # snapshot semantics: additions on the remote require a refresh
    client.specs.append(make_spec("remote_b", "b").to_dict())
    assert "remote_b" not in registry
    registry.refresh_remote("fake:1", connect=lambda e: client)
    assert "remote_b" in registry


def test_demo_builtin_handlers_cover_manifest():
    with open(demo_spec_dir() + "/manifest.json") as fh:
        manifest = json.load(fh)
    referenced = {item["handler"]["name"] for item in manifest["tools"]}
    assert referenced - set(BUILTIN_HANDLERS) == {"summarizer"}
