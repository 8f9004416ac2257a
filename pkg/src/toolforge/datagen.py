"""Template-driven alignment data and all-shot sample packing."""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Iterable, Mapping, Sequence

PLACEHOLDER = re.compile(r"\{([A-Za-z_][A-Za-z0-9_]*)\}")
# filled later by post-processing, never by a value record
RESERVED = frozenset({"API_KEY"})


class TemplateError(ValueError):
    pass


class MissingPlaceholderValue(TemplateError):
    pass


class PairExceedsBudget(ValueError):
    pass


def placeholders(text: str) -> set[str]:
    return {m for m in PLACEHOLDER.findall(text) if m not in RESERVED}


def _as_goal(value: Any) -> str:
    return value if isinstance(value, str) else json.dumps(value)


def _as_code(value: Any) -> str:
    # JSON literals double as Python literals for str/int/float
    if isinstance(value, bool):
        return "True" if value else "False"
    return json.dumps(value, ensure_ascii=False)


@dataclass(frozen=True)
class Template:
    """Goal/action pair with placeholders filled from one value record.

    With ``code_literals`` the action gets strings as quoted literals
    (``set_location("Palo Alto")``); otherwise values are pasted as text,
    which suits curl URLs and free-form actions.
    """

    goal_template: str
    action_template: str
    value_records: tuple[Mapping[str, Any], ...] = ({},)
    code_literals: bool = True

    def __post_init__(self) -> None:
        if not self.value_records:
            raise TemplateError("a template needs at least one value record")
        needed = self.placeholders
        for i, record in enumerate(self.value_records):
            missing = needed - set(record)
            if missing:
                raise MissingPlaceholderValue(f"value record {i} lacks {sorted(missing)}")

    @property
    def placeholders(self) -> set[str]:
        return placeholders(self.goal_template) | placeholders(self.action_template)

    def fill(self, record: Mapping[str, Any]) -> tuple[str, str]:
        def sub(text: str, fmt: Callable[[Any], str]) -> str:
            def repl(m: re.Match) -> str:
                name = m.group(1)
                if name in RESERVED:
                    return m.group(0)
                if name not in record:
                    raise MissingPlaceholderValue(name)
                return fmt(record[name])

            return PLACEHOLDER.sub(repl, text)

        action_fmt = _as_code if self.code_literals else _as_goal
        return sub(self.goal_template, _as_goal), sub(self.action_template, action_fmt)

    @classmethod
    def from_json(cls, obj: Mapping) -> Template:
        try:
            records = obj.get("value_records", [{}])
            return cls(
                goal_template=obj["goal_template"],
                action_template=obj["action_template"],
                value_records=tuple(dict(r) for r in records),
                code_literals=bool(obj.get("code_literals", not obj["action_template"].lstrip().startswith("curl"))),
            )
        except KeyError as exc:
            raise TemplateError(f"missing field {exc.args[0]!r}") from None

    def to_json(self) -> dict:
        return {
            "goal_template": self.goal_template,
            "action_template": self.action_template,
            "value_records": [dict(r) for r in self.value_records],
            "code_literals": self.code_literals,
        }


def expand_template(tmpl: Template, rng_seed: int | str) -> tuple[str, str]:
    """Fill both sides of ``tmpl`` from one seeded, uniformly chosen record."""
    record = random.Random(rng_seed).choice(tmpl.value_records)
    return tmpl.fill(record)


@dataclass(frozen=True)
class TaskConfig:
    task_id: str
    templates: tuple[Template, ...]
    repeat: int
    docs_header: str = ""

    def __post_init__(self) -> None:
        if self.repeat < 1:
            raise TemplateError(f"{self.task_id}: repeat must be >= 1")

    @property
    def expected_samples(self) -> int:
        return len(self.templates) * self.repeat


@dataclass(frozen=True)
class DataSample:
    task_id: str
    goal: str
    action: str

    def to_json(self) -> dict:
        return {"task": self.task_id, "goal": self.goal, "action": self.action}


def build_dataset(task_configs: Sequence[TaskConfig], seed: int) -> list[DataSample]:
    """templates × repeat samples per task, shuffled together.

    Each sample's record choice is seeded from (seed, task, template, repeat)
    so output is reproducible and independent of task order.
    """
    samples: list[DataSample] = []
    for cfg in task_configs:
        for t_idx, tmpl in enumerate(cfg.templates):
            for r in range(cfg.repeat):
                goal, action = expand_template(tmpl, f"{seed}:{cfg.task_id}:{t_idx}:{r}")
                samples.append(DataSample(cfg.task_id, goal, action))
    random.Random(seed).shuffle(samples)
    return samples


@dataclass(frozen=True)
class AlignmentSample:
    task_id: str
    text: str
    loss_spans: tuple[tuple[int, int], ...]

    def to_json(self) -> dict:
        return {"task": self.task_id, "text": self.text, "loss_spans": [list(s) for s in self.loss_spans]}


def format_pair(goal: str, action: str) -> tuple[str, int, int]:
    """Pair text and the offsets of the action inside it."""
    head = f"Task: {goal}\nAction:\n"
    return f"{head}{action}\n", len(head), len(head) + len(action)


def pack_all_shot(
    samples: Sequence[DataSample],
    budget: int,
    length_fn: Callable[[str], int] = len,
    docs_header: str = "",
) -> list[AlignmentSample]:
    """Greedily pack one task's pairs into samples of at most ``budget``.

    Every action region carries loss; pairs follow each other with no
    separator, and ``docs_header`` opens each packed sample.
    """
    if budget <= length_fn(docs_header):
        raise ValueError("budget must exceed the docs header length")
    tasks = {s.task_id for s in samples}
    if len(tasks) > 1:
        raise ValueError(f"samples mix tasks: {sorted(tasks)}")
    packed: list[AlignmentSample] = []
    text, spans = docs_header, []
    for s in samples:
        pair, start, end = format_pair(s.goal, s.action)
        if length_fn(text + pair) > budget:
            if not spans:
                raise PairExceedsBudget(f"pair does not fit in {budget}: {s.goal[:60]!r}")
            packed.append(AlignmentSample(s.task_id, text, tuple(spans)))
            text, spans = docs_header, []
            if length_fn(text + pair) > budget:
                raise PairExceedsBudget(f"pair does not fit in {budget}: {s.goal[:60]!r}")
        spans.append((len(text) + start, len(text) + end))
        text += pair
    if spans:
        packed.append(AlignmentSample(samples[0].task_id, text, tuple(spans)))
    return packed


def load_task_config(path: str | Path, repeat: int | None = None, task_id: str | None = None) -> TaskConfig:
    """Read a templates file.

    Either a JSON list of template records, or an object with ``task``,
    ``repeat``, ``templates`` and optionally ``docs_header``. Arguments
    override file values.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise TemplateError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if isinstance(doc, list):
        doc = {"templates": doc}
    if not isinstance(doc, dict) or not isinstance(doc.get("templates"), list):
        raise TemplateError(f"{path}: expected a list of templates")
    templates = []
    for i, obj in enumerate(doc["templates"]):
        try:
            templates.append(Template.from_json(obj))
        except TemplateError as exc:
            raise exc.__class__(f"{path}: templates[{i}]: {exc}") from None
    rep = repeat if repeat is not None else doc.get("repeat", 1)
    return TaskConfig(task_id or doc.get("task", path.stem), tuple(templates), int(rep), doc.get("docs_header", ""))


def write_jsonl(path: str | Path, rows: Iterable[Mapping]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False, sort_keys=True) + "\n")
