from __future__ import annotations

from typing import Sequence

from ..core import ActionProgram, ApiFunction, ErrorCategory, EvalOutcome, TestCase, step_strings
from ..metrics import lcs_normalized
from .base import check_call


def virtualhome_violation(program: ActionProgram, vocab: Sequence[ApiFunction]) -> str | None:
    by_name = {f.name: f for f in vocab}
    for call in program.calls:
        problem = check_call(call, by_name.get(call.function_name))
        if problem:
            return problem
    return None


def execute_virtualhome(program: ActionProgram, test: TestCase, vocab: Sequence[ApiFunction]) -> EvalOutcome:
    """Executability plus best normalized LCS against any gold solution.

    Steps compare as ``Name(arg1, arg2)`` strings; ``Agent.`` receivers are
    ignored. Non-executable programs still get an LCS score, as the two
    metrics are reported side by side.
    """
    problem = virtualhome_violation(program, vocab)
    score = lcs_normalized(step_strings(program), [step_strings(g) for g in test.gold_programs])
    executable = problem is None
    success = executable and score == 1.0
    return EvalOutcome(
        test.id,
        executable=executable,
        success=success,
        score=score,
        metrics={"executability": 1.0 if executable else 0.0, "lcs": score},
        category=ErrorCategory.NONE if success else ErrorCategory.NON_EXECUTABLE,
        detail=problem or "",
    )
