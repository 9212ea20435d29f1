"""Argument templates shared by the composer and generated tool programs.

A template value is substituted as follows: the exact string ``"$var"``
becomes the bound value of ``var``; ``"$var.field.sub"`` extracts a path from
a structured value; lists and objects are templated recursively; everything
else passes through verbatim.
"""

from __future__ import annotations

import re
from typing import Any, Mapping

from .errors import spec_invalid

VAR_RE = re.compile(r"^\$([A-Za-z_][A-Za-z0-9_]*)((?:\.[A-Za-z_][A-Za-z0-9_]*)*)$")


def extract_path(value: Any, path: str) -> Any:
    """Follow a ``.field.sub`` path through nested dicts."""
    current = value
    for part in [p for p in path.split(".") if p]:
        if not isinstance(current, dict) or part not in current:
            raise spec_invalid(f"path {path!r} not found in payload")
        current = current[part]
    return current


def template_variables(template: Any) -> set[str]:
    """All ``$var`` names referenced anywhere in a template."""
    names: set[str] = set()
    if isinstance(template, str):
        m = VAR_RE.match(template)
        if m:
            names.add(m.group(1))
    elif isinstance(template, list):
        for item in template:
            names |= template_variables(item)
    elif isinstance(template, dict):
        for item in template.values():
            names |= template_variables(item)
    return names


def render_template(template: Any, variables: Mapping[str, Any]) -> Any:
    if isinstance(template, str):
        m = VAR_RE.match(template)
        if m:
            name, path = m.group(1), m.group(2)
            if name not in variables:
                raise spec_invalid(f"unbound variable ${name}")
            value = variables[name]
            return extract_path(value, path) if path else value
        return template
    if isinstance(template, list):
        return [render_template(item, variables) for item in template]
    if isinstance(template, dict):
        return {key: render_template(value, variables) for key, value in template.items()}
    return template
