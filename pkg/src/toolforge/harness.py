"""Evaluate a ToolSpec's test cases against a completion backend."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Mapping, Sequence

from .actiongen import (
    ENV_EXIT,
    NON_EXECUTABLE_STEP,
    ActionGenerator,
    CompletionClient,
    InfrastructureError,
    replay_entry,
)
from .core import ActionProgram, ErrorCategory, EvalOutcome, Mode, SpecError, TestCase, ToolSpec
from .envs import (
    CounterEnv,
    EnvConfig,
    execute_home_search,
    execute_rest,
    execute_trip_booking,
    execute_virtualhome,
)
from .envs.criteria import HomeSearchConfig
from .metrics import categorize

log = logging.getLogger(__name__)


def default_env_config(spec: ToolSpec) -> EnvConfig:
    if spec.env_binding == "home_search":
        return EnvConfig("home_search", HomeSearchConfig())
    if spec.env_binding in ("virtualhome", "counter"):
        return EnvConfig(spec.env_binding)
    raise SpecError(f"{spec.tool_id}: env {spec.env_binding!r} needs an env config file")


def execute(program: ActionProgram, test: TestCase, spec: ToolSpec, env: EnvConfig) -> EvalOutcome:
    """Run one parsed single-step program in the tool's environment."""
    if env.kind == "home_search":
        return execute_home_search(program, test, spec.api_functions, env.settings)
    if env.kind == "trip_booking":
        return execute_trip_booking(program, test, spec.api_functions, env.settings)
    if env.kind == "virtualhome":
        return execute_virtualhome(program, test, spec.api_functions)
    if env.kind == "rest":
        return execute_rest(program.raw_text, test, env.settings)
    raise SpecError(f"env {env.kind!r} cannot execute single-step programs")


def make_episode_env(env: EnvConfig):
    if env.kind == "counter":
        return CounterEnv()
    raise SpecError(f"env {env.kind!r} does not support stepping")


class Evaluator:
    def __init__(
        self,
        spec: ToolSpec,
        client: CompletionClient,
        env: EnvConfig | None = None,
        **generator_options,
    ) -> None:
        self.spec = spec
        self.env = env or default_env_config(spec)
        if self.env.kind != spec.env_binding:
            raise SpecError(f"env config kind {self.env.kind!r} does not match binding {spec.env_binding!r}")
        if self.env.kind == "rest":
            subs = dict(self.env.settings.substitutions)
            subs.update(generator_options.pop("substitutions", None) or {})
            generator_options["substitutions"] = subs
        self.generator = ActionGenerator(spec, client, **generator_options)

    def evaluate(self, test: TestCase) -> EvalOutcome:
        try:
            if self.spec.mode is Mode.MULTI_STEP:
                return self._multi(test)
            return self._single(test)
        except InfrastructureError as exc:
            log.error("test %s: %s", test.id, exc)
            return EvalOutcome(test.id, infrastructure_error=f"{exc.__class__.__name__}: {exc}")

    def _single(self, test: TestCase) -> EvalOutcome:
        result = self.generator.single(test.goal_text)
        if result.program is None:
            return EvalOutcome(
                test.id,
                score=0.0 if self.env.kind == "virtualhome" else None,
                metrics={"executability": 0.0},
                category=ErrorCategory.NON_EXECUTABLE,
                detail=str(result.error),
                generation=result.post,
            )
        outcome = execute(result.program, test, self.spec, self.env)
        outcome.category = categorize(outcome.executable, result.program, test.gold_programs, outcome.success)
        outcome.generation = result.post
        return outcome

    def _multi(self, test: TestCase) -> EvalOutcome:
        env = make_episode_env(self.env)
        initial = env.reset(test)
        traj = self.generator.multi(test.goal_text, env, initial)
        executable = traj.exit_reason != NON_EXECUTABLE_STEP
        reward = traj.reward
        success = traj.exit_reason == ENV_EXIT and reward is not None and reward > 0
        pred = traj.program()
        return EvalOutcome(
            test.id,
            executable=executable,
            success=success,
            score=reward,
            metrics={"executability": 1.0 if executable else 0.0, "steps": float(len(traj.steps))},
            category=categorize(executable, pred, test.gold_programs, success),
            detail=traj.exit_reason,
            generation="\n".join(s.post for s in traj.steps),
        )

    def run(self, tests: Sequence[TestCase] | None = None, parallelism: int = 1) -> list[EvalOutcome]:
        """Outcomes in test order, whatever the degree of parallelism."""
        tests = list(self.spec.tests if tests is None else tests)
        if parallelism < 1:
            raise ValueError("parallelism must be >= 1")
        if parallelism == 1:
            return [self.evaluate(t) for t in tests]
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            return list(pool.map(self.evaluate, tests))


def run_suite(
    spec: ToolSpec,
    client: CompletionClient,
    env: EnvConfig | None = None,
    parallelism: int = 1,
    **generator_options,
) -> list[EvalOutcome]:
    return Evaluator(spec, client, env, **generator_options).run(parallelism=parallelism)


def build_replay(
    spec: ToolSpec,
    completions: Mapping[str, str],
    env: EnvConfig | None = None,
    **generator_options,
) -> list[dict]:
    """Exact-match replay entries answering each single-step test's prompt.

    ``completions`` maps test id to the text the scripted model returns.
    """
    evaluator = Evaluator(spec, _NullClient(), env, **generator_options)
    entries = []
    for test in spec.tests:
        if test.id in completions:
            _, prompt = evaluator.generator.build_prompt(test.goal_text)
            entries.append(replay_entry(prompt, completions[test.id]))
    return entries


class _NullClient:
    def complete(self, request):  # pragma: no cover - never called
        raise InfrastructureError("no backend")
