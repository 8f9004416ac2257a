"""Harness for LLM tool manipulation: prompting, execution-based evaluation,
alignment-data generation and benchmark complexity scoring."""

from .core import (
    ActionProgram,
    ApiCall,
    ApiFunction,
    DemonstrationExample,
    ErrorCategory,
    EvalOutcome,
    ParseError,
    TestCase,
    ToolSpec,
    api_multiset,
    extract_curl_line,
    load_tool_spec,
    parse_action_program,
)

__version__ = "0.1.0"

__all__ = [
    "ActionProgram",
    "ApiCall",
    "ApiFunction",
    "DemonstrationExample",
    "ErrorCategory",
    "EvalOutcome",
    "ParseError",
    "TestCase",
    "ToolSpec",
    "api_multiset",
    "extract_curl_line",
    "load_tool_spec",
    "parse_action_program",
]
