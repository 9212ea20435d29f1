from .discover import ToolPackage, discover_tool, evaluate_candidate
from .optimizer import (
    OptimizationOutcome,
    Proposal,
    TestBatch,
    analyze_description,
    execute_batch,
    generate_test_cases,
    optimize_argument_descriptions,
    optimize_tool,
    rubric_evaluate,
    strip_redundant_sentences,
)
from .quality import (
    DISCOVER_DIMENSIONS,
    DISCOVER_WEIGHTS,
    OPTIMIZER_DIMENSIONS,
    QualityReport,
    make_report,
    normalize_sentences,
    shared_sentences,
)

__all__ = [
    "DISCOVER_DIMENSIONS",
    "DISCOVER_WEIGHTS",
    "OPTIMIZER_DIMENSIONS",
    "OptimizationOutcome",
    "Proposal",
    "QualityReport",
    "TestBatch",
    "ToolPackage",
    "analyze_description",
    "discover_tool",
    "evaluate_candidate",
    "execute_batch",
    "generate_test_cases",
    "make_report",
    "normalize_sentences",
    "optimize_argument_descriptions",
    "optimize_tool",
    "rubric_evaluate",
    "shared_sentences",
    "strip_redundant_sentences",
]
