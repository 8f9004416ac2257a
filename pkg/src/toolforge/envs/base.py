from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

from ..core import ActionProgram, ApiCall, ApiFunction, TestCase, literal_text


class SteppedAfterTerminal(RuntimeError):
    pass


@dataclass(frozen=True)
class Observation:
    text: str
    terminal: bool = False
    reward: float | None = None


class Environment(Protocol):
    """Stateful multi-step environment; one instance per episode."""

    terminal: bool

    def reset(self, test: TestCase) -> Observation: ...

    def step(self, segment: ActionProgram) -> Observation: ...


def env_step(env: Environment, segment: ActionProgram) -> Observation:
    if env.terminal:
        raise SteppedAfterTerminal("episode already ended")
    return env.step(segment)


def check_call(call: ApiCall, fn: ApiFunction | None) -> str | None:
    """Why ``call`` cannot run against ``fn``, or None when it can."""
    if fn is None:
        return f"unknown function {call.function_name!r}"
    n = len(call.args)
    if not fn.min_arity <= n <= fn.max_arity:
        return f"{fn.name} takes {fn.min_arity}..{fn.max_arity} arguments, got {n}"
    for param, arg in zip(fn.params, call.args):
        if param.value_domain is not None:
            allowed = {literal_text(v) for v in param.value_domain}
            if literal_text(arg) not in allowed:
                return f"{fn.name}: {literal_text(arg)!r} is not a valid {param.name}"
    return None


class CounterEnv:
    """Toy environment: ``inc()``/``dec()`` move a counter, ``finish()`` ends.

    Unknown calls produce an error notice and the episode continues.
    """

    def __init__(self) -> None:
        self.count = 0
        self.terminal = False

    def reset(self, test: TestCase | None = None) -> Observation:
        self.count = 0
        self.terminal = False
        return Observation(f"count={self.count}")

    def step(self, segment: ActionProgram) -> Observation:
        errors = []
        for call in segment.calls:
            if call.args:
                errors.append(f"{call.function_name} takes no arguments")
            elif call.function_name == "inc":
                self.count += 1
            elif call.function_name == "dec":
                self.count -= 1
            elif call.function_name == "finish":
                self.terminal = True
                return Observation(f"finished with count={self.count}", terminal=True, reward=1.0)
            else:
                errors.append(f"unknown action {call.function_name!r}")
        text = f"count={self.count}"
        if errors:
            text = "error: " + "; ".join(errors) + "\n" + text
        return Observation(text)
