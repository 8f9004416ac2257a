"""Action generation: retrieve docs and demos, prompt, complete, post-process.

Backends are objects with ``complete(request) -> str``. Two ship here: an
HTTP client for OpenAI-style ``/completions`` endpoints and a scripted
replay client for offline, deterministic runs.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Protocol, Sequence

import httpx

from .core import (
    ActionProgram,
    DemonstrationExample,
    Mode,
    ParseError,
    ToolSpec,
    extract_curl_line,
    parse_action_program,
)
from .envs.base import Environment, Observation, env_step
from .promptgen import DEFAULT_TEMPLATE, PromptBundle, render_prompt, wrap_chat
from .retrieval import demo_index, doc_index, rank_all

log = logging.getLogger(__name__)

API_KEY_ENV = "TOOLFORGE_API_KEY"
OBSERVATION_STOP = "Observation:"


class InfrastructureError(RuntimeError):
    """The harness, not the model, failed; the test case is not scored."""


class BackendUnavailable(InfrastructureError):
    pass


class ReplayMiss(InfrastructureError):
    pass


class PromptTooLong(InfrastructureError):
    pass


@dataclass(frozen=True)
class CompletionRequest:
    prompt: str
    max_new_tokens: int
    stop_sequences: tuple[str, ...] = ()
    model: str = ""
    temperature: float = 0.0

    def __post_init__(self) -> None:
        if self.temperature != 0:
            raise ValueError("sampling is disabled: temperature must be 0")
        if self.max_new_tokens <= 0:
            raise ValueError("max_new_tokens must be > 0")


class CompletionClient(Protocol):
    def complete(self, request: CompletionRequest) -> str: ...


def complete(client: CompletionClient, request: CompletionRequest) -> str:
    return client.complete(request)


class HttpCompletionClient:
    """POSTs ``{model, prompt, max_tokens, temperature, stop}`` to an endpoint.

    Connection errors, 429 and 5xx are retried with exponential backoff;
    after ``max_attempts`` the call raises :class:`BackendUnavailable`.
    Safe to share between threads.
    """

    def __init__(
        self,
        endpoint: str,
        model: str = "",
        api_key: str | None = None,
        timeout: float = 60.0,
        max_attempts: int = 3,
        backoff: float = 1.0,
        max_backoff: float = 8.0,
        transport: httpx.BaseTransport | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        self.endpoint = endpoint
        self.model = model
        self.max_attempts = max_attempts
        self.backoff = backoff
        self.max_backoff = max_backoff
        self._sleep = sleep
        key = api_key if api_key is not None else os.environ.get(API_KEY_ENV, "")
        headers = {"Authorization": f"Bearer {key}"} if key else {}
        self._http = httpx.Client(timeout=timeout, headers=headers, transport=transport)

    def close(self) -> None:
        self._http.close()

    def complete(self, request: CompletionRequest) -> str:
        body = {
            "model": request.model or self.model,
            "prompt": request.prompt,
            "max_tokens": request.max_new_tokens,
            "temperature": request.temperature,
            "stop": list(request.stop_sequences),
        }
        last = "no attempt made"
        for attempt in range(self.max_attempts):
            if attempt:
                self._sleep(min(self.max_backoff, self.backoff * 2 ** (attempt - 1)))
            try:
                resp = self._http.post(self.endpoint, json=body)
            except httpx.TransportError as exc:
                last = f"{exc.__class__.__name__}: {exc}"
                log.warning("completion attempt %d/%d failed: %s", attempt + 1, self.max_attempts, last)
                continue
            if resp.status_code == 429 or resp.status_code >= 500:
                last = f"HTTP {resp.status_code}"
                log.warning("completion attempt %d/%d failed: %s", attempt + 1, self.max_attempts, last)
                continue
            if resp.status_code >= 400:
                raise BackendUnavailable(f"HTTP {resp.status_code}: {resp.text[:200]}")
            try:
                return resp.json()["choices"][0]["text"]
            except (ValueError, KeyError, IndexError, TypeError):
                raise BackendUnavailable(f"malformed completion response: {resp.text[:200]}") from None
        raise BackendUnavailable(f"gave up after {self.max_attempts} attempts ({last})")


def prompt_sha256(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


class ScriptedClient:
    """Replays canned completions.

    ``exact`` entries match on the prompt's SHA-256; ``ordinal`` entries match
    the n-th request (0-based) made to this client. Ordinal replay is only
    deterministic when requests are issued sequentially.
    """

    def __init__(self, entries: Iterable[Mapping] = ()) -> None:
        self.by_hash: dict[str, str] = {}
        self.by_index: dict[int, str] = {}
        for e in entries:
            match = e.get("match", "exact")
            if match == "exact":
                self.by_hash[e["prompt_sha256"]] = e["completion"]
            elif match == "ordinal":
                self.by_index[int(e["index"])] = e["completion"]
            else:
                raise ValueError(f"unknown replay match mode {match!r}")
        self._lock = threading.Lock()
        self._count = 0

    @classmethod
    def from_jsonl(cls, path: str | Path) -> ScriptedClient:
        entries = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    entries.append(json.loads(line))
                except json.JSONDecodeError as exc:
                    raise ValueError(f"{path}:{lineno}: {exc.msg}") from None
        return cls(entries)

    def complete(self, request: CompletionRequest) -> str:
        with self._lock:
            index = self._count
            self._count += 1
        digest = prompt_sha256(request.prompt)
        if digest in self.by_hash:
            return self.by_hash[digest]
        if index in self.by_index:
            return self.by_index[index]
        raise ReplayMiss(f"no replay entry for request #{index} (prompt sha256 {digest[:12]}…)")


def replay_entry(prompt: str, completion: str) -> dict:
    return {"match": "exact", "prompt_sha256": prompt_sha256(prompt), "completion": completion}


class RecordingClient:
    """Wraps a client and remembers every (prompt, completion) pair."""

    def __init__(self, inner: CompletionClient) -> None:
        self.inner = inner
        self.records: list[tuple[str, str]] = []
        self._lock = threading.Lock()

    def complete(self, request: CompletionRequest) -> str:
        out = self.inner.complete(request)
        with self._lock:
            self.records.append((request.prompt, out))
        return out


def postprocess(raw: str, stop_sequences: Sequence[str] = (), substitutions: Mapping[str, str] | None = None) -> str:
    """Cut at the earliest stop sequence, fill placeholders, trim the tail."""
    cut = len(raw)
    for stop in stop_sequences:
        if stop:
            pos = raw.find(stop)
            if pos != -1:
                cut = min(cut, pos)
    text = raw[:cut]
    for placeholder, value in (substitutions or {}).items():
        text = text.replace(placeholder, value)
    return text.rstrip()


def char_length(chars_per_token: float = 4.0) -> Callable[[str], int]:
    def length(text: str) -> int:
        return math.ceil(len(text) / chars_per_token)

    return length


@dataclass
class GenerationResult:
    raw: str
    post: str
    program: ActionProgram | None
    error: ParseError | None
    prompt_bundle: PromptBundle
    prompt: str


@dataclass
class Step:
    raw: str
    post: str
    program: ActionProgram | None
    error: ParseError | None = None
    observation: Observation | None = None


ENV_EXIT = "env_exit"
MAX_STEPS = "max_steps"
NON_EXECUTABLE_STEP = "non_executable_step"


@dataclass
class Trajectory:
    steps: list[Step] = field(default_factory=list)
    exit_reason: str = MAX_STEPS

    @property
    def reward(self) -> float | None:
        if self.steps and self.steps[-1].observation is not None:
            return self.steps[-1].observation.reward
        return None

    def program(self) -> ActionProgram | None:
        """All executed calls in order; None if any step failed to parse."""
        if any(s.program is None for s in self.steps):
            return None
        calls = tuple(c for s in self.steps for c in s.program.calls)
        return ActionProgram(calls, "\n".join(s.post for s in self.steps)) if calls else None


class ActionGenerator:
    """Retrieval-augmented generator bound to one ToolSpec and one client.

    Indices are built once; instances are safe to share across threads.
    """

    def __init__(
        self,
        spec: ToolSpec,
        client: CompletionClient,
        *,
        model: str = "",
        template: str = DEFAULT_TEMPLATE,
        chat: bool = False,
        substitutions: Mapping[str, str] | None = None,
        length_fn: Callable[[str], int] | None = None,
    ) -> None:
        self.spec = spec
        self.client = client
        self.model = model
        self.template = template
        self.chat = chat
        self.substitutions = dict(substitutions or {})
        self.length_fn = length_fn or char_length(spec.gen_config.chars_per_token)
        self._docs = doc_index(spec.api_functions)
        self._demos = demo_index(spec.demos)

    # -- context selection --------------------------------------------------

    def ranked_docs(self, goal: str) -> list:
        cfg = self.spec.gen_config
        by_name = {f.name: f for f in self.spec.api_functions}
        order = rank_all(self._docs, goal)
        if cfg.num_retrieved_docs != "all":
            order = order[: cfg.num_retrieved_docs]
        return [by_name[name] for name in order]

    def ranked_demos(self, goal: str) -> list[DemonstrationExample]:
        n = self.spec.gen_config.num_demos
        if n == 0:
            return []
        return [self.spec.demos[int(i)] for i in rank_all(self._demos, goal)[:n]]

    def build_prompt(self, goal: str, history: Sequence[tuple[str | None, str]] = ()) -> tuple[PromptBundle, str]:
        """Render the prompt, dropping the weakest docs, then demos, to fit."""
        docs = self.ranked_docs(goal)
        demos = self.ranked_demos(goal)
        budget = self.spec.gen_config.context_budget
        while True:
            bundle = render_prompt(goal, docs, list(reversed(demos)), history, self.template)
            text = wrap_chat(bundle) if self.chat else bundle.rendered_text
            if self.length_fn(text) <= budget:
                return bundle, text
            if docs:
                docs.pop()
            elif demos:
                demos.pop()
            else:
                raise PromptTooLong(f"prompt needs {self.length_fn(text)} tokens, budget is {budget}")

    # -- generation ---------------------------------------------------------

    def _request(self, prompt: str, extra_stops: Sequence[str] = ()) -> tuple[str, tuple[str, ...]]:
        cfg = self.spec.gen_config
        stops = tuple(dict.fromkeys((*cfg.stop_sequences, *extra_stops)))
        req = CompletionRequest(prompt, cfg.max_new_tokens, stops, self.model)
        return complete(self.client, req), stops

    def parse(self, text: str) -> ActionProgram:
        if self.spec.uses_raw_programs:
            line = extract_curl_line(text)
            if line is None:
                raise ParseError(0, "no line starting with curl")
            return ActionProgram((), line)
        return parse_action_program(text, self.spec)

    def single(self, goal: str) -> GenerationResult:
        bundle, prompt = self.build_prompt(goal)
        raw, stops = self._request(prompt)
        post = postprocess(raw, stops, self.substitutions)
        try:
            program, error = self.parse(post), None
        except ParseError as exc:
            program, error = None, exc
        return GenerationResult(raw, post, program, error, bundle, prompt)

    def multi(self, goal: str, env: Environment, initial: Observation | None = None) -> Trajectory:
        max_steps = self.spec.gen_config.max_steps
        history: list[tuple[str | None, str]] = []
        if initial is not None:
            history.append((None, initial.text))
        traj = Trajectory()
        while len(traj.steps) < max_steps:
            _, prompt = self.build_prompt(goal, history)
            raw, stops = self._request(prompt, (OBSERVATION_STOP,))
            post = postprocess(raw, stops, self.substitutions)
            try:
                segment = self.parse(post)
            except ParseError as exc:
                traj.steps.append(Step(raw, post, None, exc))
                traj.exit_reason = NON_EXECUTABLE_STEP
                return traj
            obs = env_step(env, segment)
            traj.steps.append(Step(raw, post, segment, None, obs))
            if obs.terminal:
                traj.exit_reason = ENV_EXIT
                return traj
            history.append((post, obs.text))
        traj.exit_reason = MAX_STEPS
        return traj


def generate_single(goal: str, spec: ToolSpec, client: CompletionClient, **options) -> GenerationResult:
    if spec.mode is not Mode.SINGLE_STEP:
        raise ValueError(f"{spec.tool_id} is not a single-step tool")
    return ActionGenerator(spec, client, **options).single(goal)


def generate_multi(
    goal: str,
    spec: ToolSpec,
    env: Environment,
    client: CompletionClient,
    initial: Observation | None = None,
    **options,
) -> Trajectory:
    if spec.mode is not Mode.MULTI_STEP:
        raise ValueError(f"{spec.tool_id} is not a multi-step tool")
    return ActionGenerator(spec, client, **options).multi(goal, env, initial)
