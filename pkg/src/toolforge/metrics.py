"""Scoring: F1, normalized LCS, error taxonomy, API-selection complexity,
reversed-F1, Spearman correlation and report aggregation."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

from .core import (
    ActionProgram,
    DemonstrationExample,
    ErrorCategory,
    EvalOutcome,
    TestCase,
    api_multiset,
)

STRICT = "strict"
UNUSED_ONLY = "unused_only"
VARIANTS = (STRICT, UNUSED_ONLY)


class EmptySolutions(ValueError):
    pass


class InvalidDSize(ValueError):
    pass


class EmptyTests(ValueError):
    pass


class EmptyExamples(ValueError):
    pass


class LengthMismatch(ValueError):
    pass


class TooFew(ValueError):
    pass


# -- set / sequence similarity ----------------------------------------------


def f1(pred: Iterable[Hashable], gold: Iterable[Hashable]) -> float:
    """Set F1: 2|pred ∩ gold| / (|pred| + |gold|); 1.0 when both are empty."""
    p, g = set(pred), set(gold)
    if not p and not g:
        return 1.0
    return 2 * len(p & g) / (len(p) + len(g))


def multiset_f1(pred: Mapping[Hashable, int], gold: Mapping[Hashable, int]) -> float:
    """F1 counting repeated elements with multiplicity."""
    p, g = Counter(pred), Counter(gold)
    size = sum(p.values()) + sum(g.values())
    if size == 0:
        return 1.0
    return 2 * sum((p & g).values()) / size


def lcs_length(a: Sequence, b: Sequence) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def lcs_normalized(pred: Sequence, solutions: Sequence[Sequence]) -> float:
    """Best LCS over the solutions, each normalized by the longer sequence."""
    if not solutions:
        raise EmptySolutions("at least one solution is required")
    best = 0.0
    for sol in solutions:
        longest = max(len(pred), len(sol))
        score = 1.0 if longest == 0 else lcs_length(pred, sol) / longest
        best = max(best, score)
    return best


# -- error taxonomy ---------------------------------------------------------


def categorize(
    executable: bool,
    pred: ActionProgram | None,
    golds: Sequence[ActionProgram],
    success: bool,
) -> ErrorCategory:
    """First triggered of: non-executable, wrong API, wrong arguments.

    ``pred`` is None when the output did not parse. A successful outcome is
    always NONE; an unsuccessful one is never NONE.
    """
    if success:
        return ErrorCategory.NONE
    if not executable or pred is None:
        return ErrorCategory.NON_EXECUTABLE
    pred_apis = api_multiset(pred)
    matching = [g for g in golds if api_multiset(g) == pred_apis]
    if not matching:
        return ErrorCategory.WRONG_API
    return ErrorCategory.WRONG_ARGUMENTS


# -- API-selection complexity -----------------------------------------------


def _multiset(item) -> Counter:
    if isinstance(item, TestCase):
        return item.api_multiset
    if isinstance(item, DemonstrationExample):
        return item.api_multiset
    if isinstance(item, ActionProgram):
        return api_multiset(item)
    return Counter(item)


def _edit_counts(t: Counter, e: Counter, variant: str) -> tuple[int, int]:
    """(calls subject to the keep/drop coin flip, calls to insert)."""
    inserted = sum((t - e).values())
    if variant == STRICT:
        flipped = sum(e.values())
    elif variant == UNUSED_ONLY:
        flipped = sum((e - t).values())
    else:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    return flipped, inserted


def _check_d_size(d_size: int) -> None:
    if isinstance(d_size, bool) or not isinstance(d_size, int) or d_size < 1:
        raise InvalidDSize(f"|D| must be a positive integer, got {d_size!r}")


def likelihood(t, e, d_size: int, variant: str = STRICT) -> Fraction:
    """Exact probability of deriving test ``t`` from example ``e``.

    Every call of ``e`` survives a fair coin flip and each uncovered call of
    ``t`` is drawn from ``d_size`` functions. Repeated calls count separately;
    order is ignored. ``unused_only`` flips only the calls ``t`` doesn't need.
    """
    _check_d_size(d_size)
    flipped, inserted = _edit_counts(_multiset(t), _multiset(e), variant)
    return Fraction(1, 2) ** flipped * Fraction(1, d_size) ** inserted


def pair_distance(t, e, d_size: int, variant: str = STRICT, log_base: float = math.e) -> float:
    """log(1 / likelihood); computed as a sum of logs so it never underflows."""
    _check_d_size(d_size)
    if log_base <= 0 or log_base == 1:
        raise ValueError("log_base must be positive and != 1")
    flipped, inserted = _edit_counts(_multiset(t), _multiset(e), variant)
    return (flipped * math.log(2) + inserted * math.log(d_size)) / math.log(log_base)


@dataclass
class ComplexityReport:
    per_test: list[tuple[str, int, float]]
    task_score: float
    d_size: int
    log_base: float
    variant: str
    rf1_score: float | None = None
    rf1_per_test: list[tuple[str, int, float]] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {
            "S": self.task_score,
            "config": {"d_size": self.d_size, "log_base": self.log_base, "variant": self.variant},
            "per_test": [{"test_id": t, "example": e, "distance": d} for t, e, d in self.per_test],
        }
        if self.rf1_score is not None:
            out["S_rF1"] = self.rf1_score
            out["rf1_per_test"] = [
                {"test_id": t, "example": e, "distance": d} for t, e, d in self.rf1_per_test
            ]
        return out


def _test_id(t, i: int) -> str:
    return t.id if isinstance(t, TestCase) else str(i)


def _min_over_examples(tests, examples, distance) -> list[tuple[str, int, float]]:
    if not tests:
        raise EmptyTests("no tests")
    if not examples:
        raise EmptyExamples("no examples")
    ex_sets = [_multiset(e) for e in examples]
    rows = []
    for i, t in enumerate(tests):
        ts = _multiset(t)
        best_j, best_d = 0, math.inf
        for j, es in enumerate(ex_sets):
            d = distance(ts, es)
            if d < best_d:  # strict: ties keep the lowest index
                best_j, best_d = j, d
        rows.append((_test_id(t, i), best_j, best_d))
    return rows


def complexity_score(
    tests: Sequence,
    examples: Sequence,
    d_size: int,
    variant: str = STRICT,
    log_base: float = math.e,
    with_rf1: bool = False,
) -> ComplexityReport:
    """Mean over tests of the distance to the closest example."""
    _check_d_size(d_size)
    rows = _min_over_examples(
        tests, examples, lambda t, e: pair_distance(t, e, d_size, variant, log_base)
    )
    report = ComplexityReport(rows, sum(d for _, _, d in rows) / len(rows), d_size, log_base, variant)
    if with_rf1:
        report.rf1_per_test = _min_over_examples(tests, examples, rf1_distance)
        report.rf1_score = sum(d for _, _, d in report.rf1_per_test) / len(report.rf1_per_test)
    return report


def rf1_distance(t, e) -> float:
    return (1 - multiset_f1(_multiset(t), _multiset(e))) * 100


def rf1_score(tests: Sequence, examples: Sequence) -> float:
    rows = _min_over_examples(tests, examples, rf1_distance)
    return sum(d for _, _, d in rows) / len(rows)


# -- rank correlation -------------------------------------------------------


def average_ranks(values: Sequence[float]) -> list[float]:
    """1-based ranks; tied values share the mean of their positions."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        mean_rank = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = mean_rank
        i = j + 1
    return ranks


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    n = len(xs)
    mx, my = math.fsum(xs) / n, math.fsum(ys) / n
    dx = [x - mx for x in xs]
    dy = [y - my for y in ys]
    denom = math.sqrt(math.fsum(a * a for a in dx) * math.fsum(b * b for b in dy))
    if denom == 0:
        return math.nan
    r = math.fsum(a * b for a, b in zip(dx, dy)) / denom
    return max(-1.0, min(1.0, r))


def spearman(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Spearman's rho with average ranks for ties; NaN if either side is constant."""
    if len(xs) != len(ys):
        raise LengthMismatch(f"{len(xs)} != {len(ys)}")
    if len(xs) < 2:
        raise TooFew("need at least two observations")
    return pearson(average_ranks(xs), average_ranks(ys))


# -- aggregation ------------------------------------------------------------

FAILURE_CATEGORIES = (ErrorCategory.NON_EXECUTABLE, ErrorCategory.WRONG_API, ErrorCategory.WRONG_ARGUMENTS)


@dataclass
class Report:
    total: int
    scored: int
    successes: int
    infrastructure_failures: int
    success_rate: float
    category_shares: dict[str, float]
    mean_executability: float | None = None
    mean_score: float | None = None
    rows: list[EvalOutcome] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "scored": self.scored,
            "successes": self.successes,
            "infrastructure_failures": self.infrastructure_failures,
            "success_rate": self.success_rate,
            "category_shares": self.category_shares,
            "mean_executability": self.mean_executability,
            "mean_score": self.mean_score,
            "per_test": [o.to_json() for o in self.rows],
        }


def aggregate(outcomes: Sequence[EvalOutcome]) -> Report:
    """Success rate and failure breakdown over outcomes.

    Infrastructure failures are counted but excluded from every rate.
    ``mean_executability``/``mean_score`` are filled when outcomes report them.
    """
    scored = [o for o in outcomes if o.infrastructure_error is None]
    n = len(scored)
    successes = sum(1 for o in scored if o.success)
    shares = {c.value: 0.0 for c in (ErrorCategory.NONE, *FAILURE_CATEGORIES)}
    if n:
        counts = Counter(o.category.value for o in scored)
        shares = {k: counts.get(k, 0) / n for k in shares}
    execs = [o.metrics["executability"] for o in scored if "executability" in o.metrics]
    scores = [o.score for o in scored if o.score is not None]
    return Report(
        total=len(outcomes),
        scored=n,
        successes=successes,
        infrastructure_failures=len(outcomes) - n,
        success_rate=successes / n if n else 0.0,
        category_shares=shares,
        mean_executability=math.fsum(execs) / len(execs) if execs else None,
        mean_score=math.fsum(scores) / len(scores) if scores else None,
        rows=list(outcomes),
    )
