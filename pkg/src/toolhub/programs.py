"""Declarative handler programs.

Generated tools ship their implementation as a small JSON program instead of
native code: ``{"returns": {...}}`` maps validated arguments into the output
payload via templates. Programs are inspectable, serializable and safe to
execute.
"""

from __future__ import annotations

from typing import Any, Mapping

from .errors import spec_invalid
from .templating import render_template, template_variables


class ProgramHandler:
    """Executable wrapper around a ``{"returns": ...}`` transform program."""

    def __init__(self, program: Mapping[str, Any]):
        validate_program(program)
        self.program = dict(program)

    def run(self, arguments: Mapping[str, Any]) -> Any:
        return render_template(self.program["returns"], dict(arguments))


def validate_program(program: Any) -> None:
    if not isinstance(program, Mapping):
        raise spec_invalid("handler program must be a JSON object")
    if "returns" not in program:
        raise spec_invalid("handler program must declare 'returns'")
    unknown = set(program) - {"returns"}
    if unknown:
        raise spec_invalid(f"unknown handler program keys: {sorted(unknown)}")


def program_variables(program: Mapping[str, Any]) -> set[str]:
    return template_variables(program.get("returns"))
