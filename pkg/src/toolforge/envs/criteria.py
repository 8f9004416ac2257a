"""Builder-style search tools judged on the criteria a program sets.

Home search: ``set_location`` and ``set_buy_or_rent`` first, criterion
setters next, ``search()`` last. Trip booking: a booking type selects which
calls are required or optional, and declared pairs must appear in order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ..core import ActionProgram, ApiFunction, ErrorCategory, EvalOutcome, TestCase, literal_text
from ..metrics import f1
from .base import check_call

CriteriaSet = frozenset  # of (setter name, canonical argument tuple)


def criteria_set(program: ActionProgram, exclude: Sequence[str] = ()) -> CriteriaSet:
    """Setter calls as a set; a later call to the same setter overwrites."""
    latest: dict[str, tuple] = {}
    for call in program.calls:
        if call.function_name in exclude:
            continue
        latest[call.function_name] = call.key()[1]
    return frozenset(latest.items())


@dataclass(frozen=True)
class HomeSearchConfig:
    prefix: tuple[str, ...] = ("set_location", "set_buy_or_rent")
    search: str = "search"
    prefix_ordered: bool = False


@dataclass(frozen=True)
class BookingRules:
    required: frozenset[str]
    optional: frozenset[str] = frozenset()
    # (a, b): a's first call precedes b's; b == "*" means every other call
    order: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class TripBookingConfig:
    booking_types: Mapping[str, BookingRules] = field(default_factory=dict)
    booking_type_function: str = "select_booking_type"
    search: str = "search"


def _check_functions(program: ActionProgram, functions: Sequence[ApiFunction]) -> str | None:
    by_name = {f.name: f for f in functions}
    for call in program.calls:
        problem = check_call(call, by_name.get(call.function_name))
        if problem:
            return problem
    return None


def _search_last(program: ActionProgram, search: str) -> str | None:
    names = [c.function_name for c in program.calls]
    if not names or names[-1] != search:
        return f"program must end with {search}()"
    if names.count(search) != 1:
        return f"{search}() must be called exactly once"
    return None


def _score(program: ActionProgram, test: TestCase, exclude: Sequence[str]) -> tuple[float, bool]:
    pred = criteria_set(program, exclude)
    golds = [criteria_set(g, exclude) for g in test.gold_programs]
    return max(f1(pred, g) for g in golds), any(pred == g for g in golds)


def _outcome(test: TestCase, problem: str | None, program: ActionProgram, exclude: Sequence[str]) -> EvalOutcome:
    if problem:
        return EvalOutcome(test.id, executable=False, success=False, score=0.0,
                           metrics={"executability": 0.0, "f1": 0.0}, detail=problem)
    score, exact = _score(program, test, exclude)
    return EvalOutcome(
        test.id,
        executable=True,
        success=exact,
        score=score,
        metrics={"executability": 1.0, "f1": score},
        category=ErrorCategory.NONE if exact else ErrorCategory.WRONG_ARGUMENTS,
    )


def home_search_violation(
    program: ActionProgram, functions: Sequence[ApiFunction], config: HomeSearchConfig = HomeSearchConfig()
) -> str | None:
    problem = _check_functions(program, functions) or _search_last(program, config.search)
    if problem:
        return problem
    names = [c.function_name for c in program.calls]
    k = len(config.prefix)
    head = names[:k]
    if len(names) < k + 1:
        return "program too short"
    if config.prefix_ordered:
        if tuple(head) != config.prefix:
            return f"program must start with {', '.join(config.prefix)}"
    elif sorted(head) != sorted(config.prefix):
        return f"program must start with {' and '.join(config.prefix)}"
    middle = names[k:-1]
    misplaced = [n for n in middle if n in config.prefix]
    if misplaced:
        return f"{misplaced[0]} must come before the criteria"
    return None


def execute_home_search(
    program: ActionProgram,
    test: TestCase,
    functions: Sequence[ApiFunction],
    config: HomeSearchConfig = HomeSearchConfig(),
) -> EvalOutcome:
    problem = home_search_violation(program, functions, config)
    return _outcome(test, problem, program, (config.search,))


def _booking_type(program: ActionProgram, config: TripBookingConfig) -> str | None:
    for call in program.calls:
        if call.function_name == config.booking_type_function and call.args:
            return literal_text(call.args[0])
    return None


def trip_booking_violation(
    program: ActionProgram, functions: Sequence[ApiFunction], config: TripBookingConfig
) -> str | None:
    problem = _check_functions(program, functions) or _search_last(program, config.search)
    if problem:
        return problem
    kind = _booking_type(program, config)
    if kind is None:
        return f"missing {config.booking_type_function}()"
    rules = config.booking_types.get(kind)
    if rules is None:
        return f"unknown booking type {kind!r}"
    names = [c.function_name for c in program.calls]
    missing = sorted(rules.required - set(names))
    if missing:
        return f"missing required call(s): {', '.join(missing)}"
    first = {}
    for i, name in enumerate(names):
        first.setdefault(name, i)
    for before, after in rules.order:
        if before not in first:
            continue
        if after == "*":
            if first[before] != 0:
                return f"{before} must be the first call"
        elif after in first and first[before] > first[after]:
            return f"{before} must come before {after}"
    return None


def execute_trip_booking(
    program: ActionProgram, test: TestCase, functions: Sequence[ApiFunction], config: TripBookingConfig
) -> EvalOutcome:
    problem = trip_booking_violation(program, functions, config)
    return _outcome(test, problem, program, (config.search,))
