"""Handlers for the bundled demo tools.

Every handler is pure and deterministic given its fixture file, so the demo
pack doubles as the corpus for search, calling, composition, and transparency
tests. Fixture lookups are keyed case-insensitively.
"""

from __future__ import annotations

import ast
import json
import re
from functools import lru_cache
from importlib import resources
from typing import Any

from ..errors import EXECUTION_FAILED, ToolError
from ..finder.embedding import HashingEmbedder


@lru_cache(maxsize=None)
def load_fixture(name: str) -> Any:
    text = resources.files("toolhub.demo").joinpath(f"fixtures/{name}").read_text("utf-8")
    return json.loads(text)


class DemoTool:
    reentrant = True

    def __init__(self, settings: dict[str, Any] | None = None):
        self.settings = settings or {}


def _lookup(fixture: str, key: str, what: str) -> Any:
    table = load_fixture(fixture)
    value = table.get(key.lower())
    if value is None:
        raise ToolError(
            EXECUTION_FAILED,
            f"no {what} on record for {key!r}",
            detail={"key": key, "known": sorted(table)},
        )
    return value


class Echo(DemoTool):
    def run(self, args: dict[str, Any]) -> dict[str, Any]:
        return {"text": args["text"]}


class StringStats(DemoTool):
    def run(self, args: dict[str, Any]) -> dict[str, Any]:
        text = args["text"]
        return {"length": len(text), "words": len(text.split())}


class RangeCheck(DemoTool):
    def run(self, args: dict[str, Any]) -> dict[str, Any]:
        return {"in_range": args["low"] <= args["value"] <= args["high"]}


_ALLOWED_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.FloorDiv, ast.Mod, ast.Pow)


class ArithmeticEval(DemoTool):
    """Evaluates +, -, *, /, //, %, ** over numeric literals. Nothing else."""

    def run(self, args: dict[str, Any]) -> dict[str, Any]:
        expression = args["expression"]
        try:
            tree = ast.parse(expression, mode="eval")
            value = self._eval(tree.body)
        except ToolError:
            raise
        except (SyntaxError, ZeroDivisionError, OverflowError, ValueError) as exc:
            raise ToolError(
                EXECUTION_FAILED, f"cannot evaluate {expression!r}: {exc}"
            ) from exc
        return {"value": float(value)}

    def _eval(self, node: ast.AST) -> float:
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            if isinstance(node.value, bool):
                raise ToolError(EXECUTION_FAILED, "booleans are not numbers here")
            return node.value
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.UAdd, ast.USub)):
            value = self._eval(node.operand)
            return value if isinstance(node.op, ast.UAdd) else -value
        if isinstance(node, ast.BinOp) and isinstance(node.op, _ALLOWED_BINOPS):
            left, right = self._eval(node.left), self._eval(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            if isinstance(node.op, ast.Div):
                return left / right
            if isinstance(node.op, ast.FloorDiv):
                return left // right
            if isinstance(node.op, ast.Mod):
                return left % right
            return left**right
        raise ToolError(
            EXECUTION_FAILED, f"unsupported expression element {type(node).__name__}"
        )


class UnitConverter(DemoTool):
    def run(self, args: dict[str, Any]) -> dict[str, Any]:
        value = args["value"]
        src = args["from_unit"].lower()
        dst = args["to_unit"].lower()
        if src in ("c", "f", "k") and dst in ("c", "f", "k"):
            return {"value": self._temperature(value, src, dst), "unit": dst}
        tables = load_fixture("units.json")
        for factors in tables.values():
            if src in factors and dst in factors:
                return {"value": value * factors[src] / factors[dst], "unit": dst}
        raise ToolError(
            EXECUTION_FAILED,
            f"cannot convert {src!r} to {dst!r}: unknown units or mixed dimensions",
        )

    @staticmethod
    def _temperature(value: float, src: str, dst: str) -> float:
        kelvin = {"c": value + 273.15, "f": (value - 32) * 5 / 9 + 273.15, "k": value}[src]
        return {"c": kelvin - 273.15, "f": (kelvin - 273.15) * 9 / 5 + 32, "k": kelvin}[dst]


class SequenceGcContent(DemoTool):
    def run(self, args: dict[str, Any]) -> dict[str, Any]:
        sequence = args["sequence"].upper()
        if not sequence or any(base not in "ACGT" for base in sequence):
            raise ToolError(
                EXECUTION_FAILED, "sequence must be a non-empty string over A, C, G, T"
            )
        gc = sum(1 for base in sequence if base in "GC")
        return {"gc_fraction": gc / len(sequence), "length": len(sequence)}


_ATOMIC_WEIGHTS = {
    "H": 1.008, "C": 12.011, "N": 14.007, "O": 15.999, "S": 32.06,
    "P": 30.974, "F": 18.998, "Cl": 35.45, "Br": 79.904, "I": 126.904,
    "Na": 22.99, "K": 39.098, "Ca": 40.078,
}
_FORMULA_RE = re.compile(r"([A-Z][a-z]?)([0-9]*)")


class MolecularWeight(DemoTool):
    def run(self, args: dict[str, Any]) -> dict[str, Any]:
        formula = args["formula"]
        total = 0.0
        consumed = 0
        for m in _FORMULA_RE.finditer(formula):
            if not m.group(0):
                continue
            element, count = m.group(1), int(m.group(2) or 1)
            if element not in _ATOMIC_WEIGHTS:
                raise ToolError(EXECUTION_FAILED, f"unknown element {element!r}")
            total += _ATOMIC_WEIGHTS[element] * count
            consumed += len(m.group(0))
        if consumed != len(formula) or total == 0.0:
            raise ToolError(EXECUTION_FAILED, f"cannot parse formula {formula!r}")
        return {"weight": round(total, 3)}


class TextEmbedding(DemoTool):
    def __init__(self, settings: dict[str, Any] | None = None):
        super().__init__(settings)
        self._embedder = HashingEmbedder(int(self.settings.get("dimension", 64)))

    def run(self, args: dict[str, Any]) -> dict[str, Any]:
        vector = self._embedder(args["text"])
        return {"vector": [float(x) for x in vector], "dimension": self._embedder.dimension}


class MockLiteratureSearch(DemoTool):
    def run(self, args: dict[str, Any]) -> dict[str, Any]:
        corpus = load_fixture("literature.json")
        terms = [t for t in re.findall(r"[a-z0-9]+", args["query"].lower())]
        limit = args.get("limit", 5)
        hits = []
        for article in corpus:
            haystack = " ".join(
                [article["title"], article["abstract"], " ".join(article["keywords"])]
            ).lower()
            if all(term in haystack for term in terms):
                hits.append(article)
        hits.sort(key=lambda a: a["id"])
        return {"articles": hits[:limit]}


class MockTargetProfile(DemoTool):
    def run(self, args: dict[str, Any]) -> dict[str, Any]:
        return dict(_lookup("targets.json", args["target"], "target profile"))


class MockAdmetLookup(DemoTool):
    def run(self, args: dict[str, Any]) -> dict[str, Any]:
        return dict(_lookup("admet.json", args["compound_id"], "property profile"))


class MockSimilaritySearch(DemoTool):
    def run(self, args: dict[str, Any]) -> dict[str, Any]:
        neighbors = _lookup("neighbors.json", args["compound_id"], "neighbor list")
        return {"neighbors": neighbors[: args.get("limit", 5)]}


class MockDrugPathways(DemoTool):
    def run(self, args: dict[str, Any]) -> dict[str, Any]:
        return {"pathways": list(_lookup("pathways.json", args["drug"], "pathway list"))}


class MockGeneDetails(DemoTool):
    def run(self, args: dict[str, Any]) -> dict[str, Any]:
        return dict(_lookup("genes.json", args["gene"], "gene record"))


class MockCompoundProperties(DemoTool):
    def run(self, args: dict[str, Any]) -> dict[str, Any]:
        return dict(_lookup("compounds.json", args["compound_id"], "compound record"))


class MockTrialLookup(DemoTool):
    def run(self, args: dict[str, Any]) -> dict[str, Any]:
        return {"trials": list(_lookup("trials.json", args["condition"], "trial list"))}


class MockAdverseEvents(DemoTool):
    def run(self, args: dict[str, Any]) -> dict[str, Any]:
        return {"events": list(_lookup("adverse_events.json", args["drug"], "event list"))}


class MockDiseaseTargets(DemoTool):
    def run(self, args: dict[str, Any]) -> dict[str, Any]:
        return {"targets": list(_lookup("diseases.json", args["disease"], "target list"))}


class AssembleReport(DemoTool):
    """Joins workflow stage outputs into one flat report object."""

    def run(self, args: dict[str, Any]) -> dict[str, Any]:
        return {
            "target": args["profile"].get("target"),
            "protein_class": args["profile"].get("protein_class"),
            "neighbor_ids": [n["compound_id"] for n in args["neighbors"]],
            "admet": args["admet"],
            "expert_verdict": args["verdict"],
            "expert_note": args["note"],
        }
