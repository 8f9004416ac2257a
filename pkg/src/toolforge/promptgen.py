"""System-prompt assembly: guidelines, API docs, demonstrations, goal."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .core import ApiFunction, DemonstrationExample

GUIDELINES = (
    "You translate a task into calls to the API functions documented below.\n"
    "Rules:\n"
    "- Output only API calls, one per line, no explanations.\n"
    "- Use only the documented functions and argument formats.\n"
    "- Stop after the last call of the current task.\n"
)

DEFAULT_TEMPLATE = "{GUIDELINES}{DOCS}{DEMOS}{GOAL}"

# Lines starting with these open a new prompt section.
SECTION_MARKERS = ("Task:", "Action:", "Observation:")
CHAT_TAGS = ("<human>:", "<bot>:")

_PLACEHOLDER = re.compile(r"\{(GUIDELINES|DOCS|DEMOS|GOAL)\}")


class AlreadyWrapped(ValueError):
    pass


class PromptTemplateError(ValueError):
    pass


def escape_text(text: str) -> str:
    """Keep user text from forging section boundaries or chat tags.

    A line beginning with a section marker gets a leading backslash; chat
    tags anywhere get their colon escaped.
    """
    for tag in CHAT_TAGS:
        text = text.replace(tag, tag[:-1] + "\\:")
    lines = []
    for line in text.split("\n"):
        if line.lstrip().startswith(SECTION_MARKERS):
            line = "\\" + line
        lines.append(line)
    return "\n".join(lines)


@dataclass(frozen=True)
class PromptBundle:
    guidelines: str
    api_docs: str
    demos: tuple[str, ...]
    goal: str
    generation_cue: str
    rendered_text: str

    @property
    def demo_count(self) -> int:
        return len(self.demos)

    @property
    def sections(self) -> tuple[str, ...]:
        return (self.guidelines, self.api_docs, *self.demos, self.goal, self.generation_cue)


def render_demo(goal_text: str, program_text: str) -> str:
    return f"Task: {escape_text(goal_text)}\nAction:\n{program_text.strip()}\n\n"


def render_cue(history: Sequence[tuple[str | None, str]] = ()) -> str:
    """Generation cue, optionally replaying earlier (action, observation) steps.

    An entry with action ``None`` is the environment's initial observation.
    """
    parts = []
    for action, observation in history:
        if action is not None:
            parts.append(f"Action:\n{action.strip()}\n")
        parts.append(f"Observation:\n{escape_text(observation.strip())}\n")
    parts.append("Action:\n")
    return "".join(parts)


def fill_template(template: str, values: dict[str, str]) -> str:
    return _PLACEHOLDER.sub(lambda m: values[m.group(1)], template)


def load_template(path: str | Path) -> str:
    text = Path(path).read_text(encoding="utf-8")
    if "{GOAL}" not in text:
        raise PromptTemplateError(f"{path}: template must contain {{GOAL}}")
    return text


def render_prompt(
    goal: str,
    docs: Sequence[ApiFunction],
    demos: Sequence[DemonstrationExample],
    history: Sequence[tuple[str | None, str]] = (),
    template: str = DEFAULT_TEMPLATE,
) -> PromptBundle:
    """Render the prompt for one request.

    ``demos`` must already be ordered least to most similar so the closest
    example sits right before the goal.
    """
    api_docs = ""
    if docs:
        api_docs = "API documentation:\n" + "\n".join(d.doc_text.strip() for d in docs) + "\n\n"
    demo_blocks = tuple(render_demo(d.goal_text, d.program.raw_text or d.program.render()) for d in demos)
    goal_block = f"Task: {escape_text(goal)}\n"
    cue = render_cue(history)
    rendered = fill_template(
        template,
        {
            "GUIDELINES": GUIDELINES + "\n",
            "DOCS": api_docs,
            "DEMOS": "".join(demo_blocks),
            "GOAL": goal_block + cue,
        },
    )
    return PromptBundle(GUIDELINES + "\n", api_docs, demo_blocks, goal_block, cue, rendered)


def wrap_chat(prompt: PromptBundle | str) -> str:
    """Add ``<human>:``/``<bot>:`` turns for chat-tuned models."""
    if isinstance(prompt, PromptBundle):
        text, cue = prompt.rendered_text, prompt.generation_cue
    else:
        text, cue = prompt, ""
        if any(tag in text for tag in CHAT_TAGS):
            raise AlreadyWrapped("prompt already carries chat tags")
        if text.endswith("Action:\n"):
            cue = "Action:\n"
    if text.startswith(CHAT_TAGS[0]):
        raise AlreadyWrapped("prompt already carries chat tags")
    if cue and text.endswith(cue):
        instruction = text[: len(text) - len(cue)]
    else:
        instruction, cue = text, ""
    return f"<human>: {instruction.rstrip()}\n<bot>: {cue}"
