"""Domain types and parsing of generated action programs.

A generated action is a small line-oriented program::

    API.set_location("Palo Alto")
    date = Date("2023-08-15")
    API.set_departure_date(date)
    API.search()

Each line is a call (``receiver.name(args)`` or ``name(args)``), an
assignment binding a local name to a constructor literal, a ``#`` comment,
or blank. Anything else makes the program non-executable.
"""

from __future__ import annotations

import ast
import json
import warnings
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Union

MAX_CONSTRUCTOR_DEPTH = 2


class SpecError(ValueError):
    """A ToolSpec document violates its schema or invariants."""


@dataclass(frozen=True)
class Constructor:
    """Value-object literal such as ``Loc("San Francisco")``."""

    name: str
    args: tuple[Any, ...] = ()

    def render(self) -> str:
        return f"{self.name}({', '.join(render_literal(a) for a in self.args)})"


@dataclass(frozen=True)
class Symbol:
    """Bare identifier accepted where a parameter declares a value domain.

    VirtualHome-style actions name objects without quotes: ``Find(novel)``.
    """

    name: str

    def render(self) -> str:
        return self.name


Literal = Union[str, int, float, bool, Constructor, Symbol]


def render_literal(value: Literal) -> str:
    if isinstance(value, (Constructor, Symbol)):
        return value.render()
    if isinstance(value, bool):
        return "True" if value else "False"
    if isinstance(value, str):
        text = repr(value)
        if text.startswith("'") and '"' not in value:
            text = '"' + text[1:-1].replace("\\'", "'") + '"'
        return text
    return repr(value)


def canonical_literal(value: Literal) -> tuple:
    """Hashable comparison key for an argument literal.

    Strings compare exactly (case-sensitive); numbers compare numerically,
    so ``5`` and ``5.0`` are equal while ``True`` stays distinct from ``1``.
    """
    if isinstance(value, bool):
        return ("bool", value)
    if isinstance(value, (int, float)):
        return ("num", value)
    if isinstance(value, str):
        return ("str", value)
    if isinstance(value, Symbol):
        return ("sym", value.name)
    if isinstance(value, Constructor):
        return ("ctor", value.name, tuple(canonical_literal(a) for a in value.args))
    raise TypeError(f"not an argument literal: {value!r}")


def literal_text(value: Literal) -> str:
    """Plain text of a literal for value-domain checks (``novel``, ``buy``, ``3``)."""
    if isinstance(value, Symbol):
        return value.name
    if isinstance(value, str):
        return value
    return render_literal(value)


# -- domain types -----------------------------------------------------------


class ParamKind(str, Enum):
    REQUIRED = "required"
    OPTIONAL = "optional"


@dataclass(frozen=True)
class Param:
    name: str
    kind: ParamKind = ParamKind.REQUIRED
    value_domain: tuple[Literal, ...] | None = None


@dataclass(frozen=True)
class ApiFunction:
    name: str
    params: tuple[Param, ...] = ()
    doc_text: str = ""

    def __post_init__(self) -> None:
        names = [p.name for p in self.params]
        if len(names) != len(set(names)):
            raise SpecError(f"duplicate parameter names in {self.name}")

    @property
    def min_arity(self) -> int:
        return sum(1 for p in self.params if p.kind is ParamKind.REQUIRED)

    @property
    def max_arity(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class ApiCall:
    function_name: str
    args: tuple[Literal, ...] = ()
    receiver: str | None = None

    def render(self, with_receiver: bool = True) -> str:
        head = f"{self.receiver}.{self.function_name}" if with_receiver and self.receiver else self.function_name
        return f"{head}({', '.join(render_literal(a) for a in self.args)})"

    def key(self) -> tuple:
        return (self.function_name, tuple(canonical_literal(a) for a in self.args))


@dataclass(frozen=True)
class ActionProgram:
    """Parsed call sequence plus the text it came from.

    Equality ignores ``raw_text``: two programs are equal when their calls are.
    Programs of REST tools carry a curl command in ``raw_text`` and no calls.
    """

    calls: tuple[ApiCall, ...]
    raw_text: str = field(default="", compare=False)

    def render(self) -> str:
        return "\n".join(c.render() for c in self.calls)

    @property
    def is_raw(self) -> bool:
        return not self.calls


class ParseError(Exception):
    def __init__(self, line: int, reason: str, text: str = "") -> None:
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason
        self.text = text


class CompareMode(str, Enum):
    EXECUTE_AND_COMPARE = "execute_and_compare"
    VERBATIM = "verbatim"


class Mode(str, Enum):
    SINGLE_STEP = "single_step"
    MULTI_STEP = "multi_step"


@dataclass(frozen=True)
class DemonstrationExample:
    goal_text: str
    program: ActionProgram

    @property
    def api_multiset(self) -> Counter:
        return api_multiset(self.program)


@dataclass(frozen=True)
class TestCase:
    __test__ = False  # not a pytest class

    id: str
    goal_text: str
    gold_programs: tuple[ActionProgram, ...]
    oracle_response: str | None = None
    compare_mode: CompareMode = CompareMode.EXECUTE_AND_COMPARE

    def __post_init__(self) -> None:
        if not self.gold_programs:
            raise SpecError(f"test {self.id}: gold_programs must be non-empty")
        if self.compare_mode is CompareMode.VERBATIM and len(self.gold_programs) != 1:
            raise SpecError(f"test {self.id}: verbatim mode requires exactly one gold program")

    @property
    def api_multiset(self) -> Counter:
        return api_multiset(self.gold_programs[0])


@dataclass(frozen=True)
class GenConfig:
    max_new_tokens: int = 128
    stop_sequences: tuple[str, ...] = ("Task:",)
    num_retrieved_docs: int | str = "all"
    num_demos: int = 3
    max_steps: int = 25
    context_budget: int = 2048
    chars_per_token: float = 4.0

    def __post_init__(self) -> None:
        if self.max_steps < 1:
            raise SpecError("max_steps must be >= 1")
        if self.max_new_tokens <= 0:
            raise SpecError("max_new_tokens must be > 0")
        if self.num_retrieved_docs != "all" and (
            not isinstance(self.num_retrieved_docs, int) or self.num_retrieved_docs < 0
        ):
            raise SpecError("num_retrieved_docs must be 'all' or a non-negative int")
        if self.num_demos < 0:
            raise SpecError("num_demos must be >= 0")


# env bindings whose evaluator supports stepping
STEPPABLE_ENVS = frozenset({"counter"})
# env bindings whose programs are raw curl commands rather than call lists
RAW_PROGRAM_ENVS = frozenset({"rest"})


@dataclass(frozen=True)
class ToolSpec:
    tool_id: str
    api_functions: tuple[ApiFunction, ...]
    demos: tuple[DemonstrationExample, ...] = ()
    tests: tuple[TestCase, ...] = ()
    mode: Mode = Mode.SINGLE_STEP
    env_binding: str = ""
    gen_config: GenConfig = GenConfig()

    def __post_init__(self) -> None:
        names = [f.name for f in self.api_functions]
        if len(names) != len(set(names)):
            raise SpecError(f"{self.tool_id}: duplicate API function names")
        if self.mode is Mode.MULTI_STEP and self.env_binding not in STEPPABLE_ENVS:
            raise SpecError(f"{self.tool_id}: env {self.env_binding!r} does not support stepping")
        known = set(names)
        programs = [d.program for d in self.demos] + [p for t in self.tests for p in t.gold_programs]
        for program in programs:
            for call in program.calls:
                if call.function_name not in known:
                    raise SpecError(
                        f"{self.tool_id}: ground truth uses unknown function {call.function_name!r}"
                    )
        test_ids = [t.id for t in self.tests]
        if len(test_ids) != len(set(test_ids)):
            raise SpecError(f"{self.tool_id}: duplicate test ids")

    def function(self, name: str) -> ApiFunction | None:
        for f in self.api_functions:
            if f.name == name:
                return f
        return None

    @property
    def uses_raw_programs(self) -> bool:
        return self.env_binding in RAW_PROGRAM_ENVS


class ErrorCategory(str, Enum):
    NONE = "none"
    NON_EXECUTABLE = "non_executable"
    WRONG_API = "wrong_api"
    WRONG_ARGUMENTS = "wrong_arguments"


@dataclass
class EvalOutcome:
    """Result of evaluating one test case.

    ``infrastructure_error`` is set when the backend failed; such outcomes
    are excluded from model scoring.
    """

    test_id: str
    executable: bool = False
    success: bool = False
    score: float | None = None
    metrics: dict[str, float] = field(default_factory=dict)
    category: ErrorCategory = ErrorCategory.NON_EXECUTABLE
    detail: str = ""
    infrastructure_error: str | None = None
    generation: str | None = None

    def to_json(self) -> dict:
        return {
            "test_id": self.test_id,
            "executable": self.executable,
            "success": self.success,
            "score": self.score,
            "metrics": self.metrics,
            "category": self.category.value,
            "detail": self.detail,
            "infrastructure_error": self.infrastructure_error,
            "generation": self.generation,
        }

    @classmethod
    def from_json(cls, obj: dict) -> EvalOutcome:
        return cls(
            test_id=obj["test_id"],
            executable=bool(obj.get("executable", False)),
            success=bool(obj.get("success", False)),
            score=obj.get("score"),
            metrics=dict(obj.get("metrics") or {}),
            category=ErrorCategory(obj.get("category", "non_executable")),
            detail=obj.get("detail", ""),
            infrastructure_error=obj.get("infrastructure_error"),
            generation=obj.get("generation"),
        )


# -- parsing ----------------------------------------------------------------


class _LineParser:
    def __init__(self, spec: ToolSpec | None) -> None:
        self.spec = spec
        self.bindings: dict[str, Literal] = {}

    def literal(self, node: ast.expr, lineno: int, depth: int, domain: tuple | None) -> Literal:
        if isinstance(node, ast.Constant) and isinstance(node.value, (str, int, float, bool)):
            return node.value
        if (
            isinstance(node, ast.UnaryOp)
            and isinstance(node.op, (ast.USub, ast.UAdd))
            and isinstance(node.operand, ast.Constant)
            and type(node.operand.value) in (int, float)
        ):
            return -node.operand.value if isinstance(node.op, ast.USub) else node.operand.value
        if isinstance(node, ast.Name):
            if node.id in self.bindings:
                return self.bindings[node.id]
            if domain is not None:
                return Symbol(node.id)
            raise ParseError(lineno, f"unbound name {node.id!r}")
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
            if depth >= MAX_CONSTRUCTOR_DEPTH:
                raise ParseError(lineno, "constructor nesting too deep")
            if node.keywords:
                raise ParseError(lineno, "keyword arguments are not supported")
            args = tuple(self.literal(a, lineno, depth + 1, None) for a in node.args)
            return Constructor(node.func.id, args)
        raise ParseError(lineno, f"unsupported argument expression: {ast.dump(node)[:60]}")

    def call(self, node: ast.Call, lineno: int) -> ApiCall:
        func = node.func
        if isinstance(func, ast.Attribute) and isinstance(func.value, ast.Name):
            receiver, name = func.value.id, func.attr
        elif isinstance(func, ast.Name):
            receiver, name = None, func.id
        else:
            raise ParseError(lineno, "call target must be name or receiver.name")
        if node.keywords:
            raise ParseError(lineno, "keyword arguments are not supported")
        if any(isinstance(a, ast.Starred) for a in node.args):
            raise ParseError(lineno, "starred arguments are not supported")
        fn = self.spec.function(name) if self.spec is not None else None
        args = []
        for i, arg in enumerate(node.args):
            domain = None
            if fn is not None and i < len(fn.params):
                domain = fn.params[i].value_domain
            args.append(self.literal(arg, lineno, 0, domain))
        return ApiCall(name, tuple(args), receiver)

    def line(self, text: str, lineno: int) -> ApiCall | None:
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                module = ast.parse(text, mode="exec")
        except (SyntaxError, ValueError) as exc:
            raise ParseError(lineno, f"not a call: {exc.__class__.__name__}", text) from None
        if len(module.body) != 1:
            raise ParseError(lineno, "expected exactly one statement", text)
        stmt = module.body[0]
        if isinstance(stmt, ast.Expr) and isinstance(stmt.value, ast.Call):
            return self.call(stmt.value, lineno)
        if (
            isinstance(stmt, ast.Assign)
            and len(stmt.targets) == 1
            and isinstance(stmt.targets[0], ast.Name)
        ):
            value = stmt.value
            if isinstance(value, ast.Call) and not isinstance(value.func, ast.Name):
                raise ParseError(lineno, "only constructor literals may be assigned", text)
            self.bindings[stmt.targets[0].id] = self.literal(value, lineno, 0, None)
            return None
        raise ParseError(lineno, "expected a call or an assignment", text)


def parse_action_program(text: str, spec: ToolSpec | None = None) -> ActionProgram:
    """Parse post-processed model output into an :class:`ActionProgram`.

    ``spec`` lets bare identifiers stand for objects in parameters with a
    value domain. Raises :class:`ParseError` for anything non-executable.
    """
    parser = _LineParser(spec)
    calls: list[ApiCall] = []
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            call = parser.line(line, lineno)
        except ParseError as exc:
            exc.text = exc.text or line
            raise
        except (RecursionError, MemoryError):
            raise ParseError(lineno, "expression too complex", line) from None
        if call is not None:
            calls.append(call)
    if not calls:
        raise ParseError(0, "no API calls found")
    return ActionProgram(tuple(calls), text)


def extract_curl_line(text: str) -> str | None:
    for line in text.splitlines():
        stripped = line.strip()
        if stripped.split(None, 1)[:1] == ["curl"]:
            return stripped
    return None


def rest_api_option(curl_line: str) -> str:
    """Name a curl request by method, path and query keys (its "API option")."""
    from .envs.rest import parse_curl  # local import; rest depends on core

    try:
        req = parse_curl(curl_line)
    except ValueError:
        return curl_line
    keys = ",".join(sorted({k for k, _ in req.query}))
    return f"{req.method} {req.host}{req.path}?{keys}"


def api_multiset(program: ActionProgram) -> Counter:
    if program.is_raw:
        return Counter({rest_api_option(program.raw_text): 1}) if program.raw_text.strip() else Counter()
    return Counter(c.function_name for c in program.calls)


def step_strings(program: ActionProgram) -> list[str]:
    """Canonical ``Name(arg1, arg2)`` step strings, receiver dropped."""
    return [c.render(with_receiver=False) for c in program.calls]


# -- JSON -------------------------------------------------------------------


def literal_to_json(value: Literal) -> Any:
    if isinstance(value, Constructor):
        return {"ctor": value.name, "args": [literal_to_json(a) for a in value.args]}
    if isinstance(value, Symbol):
        return {"symbol": value.name}
    return value


def literal_from_json(obj: Any) -> Literal:
    if isinstance(obj, dict):
        if "ctor" in obj:
            return Constructor(obj["ctor"], tuple(literal_from_json(a) for a in obj.get("args", [])))
        if "symbol" in obj:
            return Symbol(obj["symbol"])
        raise SpecError(f"bad literal object: {obj!r}")
    if isinstance(obj, (str, int, float, bool)):
        return obj
    raise SpecError(f"bad literal: {obj!r}")


def program_to_json(program: ActionProgram) -> dict:
    return {
        "raw_text": program.raw_text,
        "calls": [
            {
                "receiver": c.receiver,
                "function_name": c.function_name,
                "args": [literal_to_json(a) for a in c.args],
            }
            for c in program.calls
        ],
    }


def _program_from_json(obj: Any, spec_stub: ToolSpec | None, raw: bool) -> ActionProgram:
    text = obj if isinstance(obj, str) else obj.get("raw_text", "")
    if raw:
        return ActionProgram((), text.strip())
    try:
        program = parse_action_program(text, spec_stub)
    except ParseError as exc:
        raise SpecError(f"ground-truth program does not parse ({exc}): {text!r}") from None
    if isinstance(obj, dict) and obj.get("calls"):
        stored = tuple(
            ApiCall(c["function_name"], tuple(literal_from_json(a) for a in c.get("args", [])), c.get("receiver"))
            for c in obj["calls"]
        )
        if stored != program.calls:
            raise SpecError(f"stored calls disagree with raw_text: {text!r}")
    return program


def _function_from_json(obj: dict) -> ApiFunction:
    params = []
    for p in obj.get("params", []):
        domain = p.get("value_domain")
        params.append(
            Param(
                p["name"],
                ParamKind(p.get("kind", "required")),
                None if domain is None else tuple(literal_from_json(v) for v in domain),
            )
        )
    return ApiFunction(obj["name"], tuple(params), obj.get("doc_text", ""))


def _gen_config_from_json(obj: dict) -> GenConfig:
    obj = dict(obj)
    if "stop_sequences" in obj:
        obj["stop_sequences"] = tuple(obj["stop_sequences"])
    allowed = GenConfig.__dataclass_fields__.keys()
    unknown = set(obj) - set(allowed)
    if unknown:
        raise SpecError(f"unknown gen_config fields: {sorted(unknown)}")
    return GenConfig(**obj)


def tool_spec_from_json(doc: dict) -> ToolSpec:
    try:
        functions = tuple(_function_from_json(f) for f in doc["api_functions"])
        env_binding = doc.get("env_binding", "")
        raw = env_binding in RAW_PROGRAM_ENVS
        stub = ToolSpec(doc["tool_id"], functions, env_binding=env_binding)
        demos = tuple(
            DemonstrationExample(d["goal_text"], _program_from_json(d["program"], stub, raw))
            for d in doc.get("demos", [])
        )
        tests = tuple(
            TestCase(
                id=str(t["id"]),
                goal_text=t["goal_text"],
                gold_programs=tuple(_program_from_json(p, stub, raw) for p in t["gold_programs"]),
                oracle_response=t.get("oracle_response"),
                compare_mode=CompareMode(t.get("compare_mode", "execute_and_compare")),
            )
            for t in doc.get("tests", [])
        )
        return ToolSpec(
            tool_id=doc["tool_id"],
            api_functions=functions,
            demos=demos,
            tests=tests,
            mode=Mode(doc.get("mode", "single_step")),
            env_binding=env_binding,
            gen_config=_gen_config_from_json(doc.get("gen_config", {})),
        )
    except KeyError as exc:
        raise SpecError(f"missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(str(exc)) from None


def tool_spec_to_json(spec: ToolSpec) -> dict:
    gc = spec.gen_config
    return {
        "tool_id": spec.tool_id,
        "mode": spec.mode.value,
        "env_binding": spec.env_binding,
        "gen_config": {
            "max_new_tokens": gc.max_new_tokens,
            "stop_sequences": list(gc.stop_sequences),
            "num_retrieved_docs": gc.num_retrieved_docs,
            "num_demos": gc.num_demos,
            "max_steps": gc.max_steps,
            "context_budget": gc.context_budget,
            "chars_per_token": gc.chars_per_token,
        },
        "api_functions": [
            {
                "name": f.name,
                "params": [
                    {
                        "name": p.name,
                        "kind": p.kind.value,
                        "value_domain": None
                        if p.value_domain is None
                        else [literal_to_json(v) for v in p.value_domain],
                    }
                    for p in f.params
                ],
                "doc_text": f.doc_text,
            }
            for f in spec.api_functions
        ],
        "demos": [{"goal_text": d.goal_text, "program": program_to_json(d.program)} for d in spec.demos],
        "tests": [
            {
                "id": t.id,
                "goal_text": t.goal_text,
                "gold_programs": [program_to_json(p) for p in t.gold_programs],
                "oracle_response": t.oracle_response,
                "compare_mode": t.compare_mode.value,
            }
            for t in spec.tests
        ],
    }


def load_tool_spec(path: str | Path) -> ToolSpec:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SpecError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return tool_spec_from_json(doc)


def multiset_size(ms: Iterable | Counter) -> int:
    if isinstance(ms, Counter):
        return sum(ms.values())
    return sum(1 for _ in ms)
