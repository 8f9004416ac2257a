"""Command-line entry point: ``toolforge {eval,gen-data,complexity,report}``.

stdout carries one JSON summary per command; diagnostics go to stderr.
Exit codes: 0 ok, 2 configuration error, 3 backend unavailable.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from .actiongen import HttpCompletionClient, ScriptedClient
from .core import ActionProgram, EvalOutcome, ParseError, SpecError, ToolSpec, load_tool_spec, parse_action_program
from .datagen import TemplateError, build_dataset, load_task_config, pack_all_shot, write_jsonl
from .envs import load_env_config
from .harness import Evaluator, default_env_config
from .metrics import STRICT, VARIANTS, aggregate, complexity_score
from .promptgen import PromptTemplateError, load_template

log = logging.getLogger("toolforge")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BACKEND = 3


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    spec: str | None = None
    env_config: str | None = None
    backend: str | None = None
    model: str = ""
    out: str = "out"
    parallelism: int = 1
    seed: int = 0
    num_demos: int | None = None
    num_docs: int | str | None = None
    prompt_template: str | None = None
    chat: bool = False
    variant: str = STRICT
    log_base: float = math.e
    extra: dict[str, Any] = field(default_factory=dict)

    def validate(self) -> None:
        if self.parallelism < 1:
            raise ConfigError("parallelism must be >= 1")
        if self.variant not in VARIANTS:
            raise ConfigError(f"variant must be one of {VARIANTS}")


def _load_run_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        try:
            doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {args.config}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{args.config}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
        known = {f.name for f in dataclasses.fields(RunConfig)}
        for key, value in doc.items():
            if key in known:
                setattr(cfg, key, value)
            else:
                cfg.extra[key] = value
    # flags override file values
    for name in ("spec", "env_config", "backend", "model", "out", "parallelism", "seed",
                 "num_demos", "num_docs", "prompt_template", "variant", "log_base"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    if getattr(args, "chat", False):
        cfg.chat = True
    if isinstance(cfg.log_base, str):
        cfg.log_base = _parse_log_base(cfg.log_base)
    cfg.validate()
    return cfg


def _parse_log_base(text: str) -> float:
    if text == "e":
        return math.e
    try:
        base = float(text)
    except ValueError:
        raise ConfigError(f"bad log base {text!r}") from None
    if base <= 0 or base == 1:
        raise ConfigError("log base must be positive and != 1")
    return base


def _num_docs(value: str | int | None) -> int | str | None:
    if value is None or value == "all" or isinstance(value, int):
        return value
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"--num-docs must be 'all' or an integer, got {value!r}") from None


def _load_spec(cfg: RunConfig) -> ToolSpec:
    if not cfg.spec:
        raise ConfigError("no --spec given")
    path = Path(cfg.spec)
    if not path.is_file():
        raise ConfigError(f"spec file not found: {path}")
    spec = load_tool_spec(path)
    overrides = {}
    if cfg.num_demos is not None:
        overrides["num_demos"] = int(cfg.num_demos)
    if cfg.num_docs is not None:
        overrides["num_retrieved_docs"] = _num_docs(cfg.num_docs)
    if overrides:
        spec = dataclasses.replace(spec, gen_config=dataclasses.replace(spec.gen_config, **overrides))
    return spec


def _env_config_path(cfg: RunConfig) -> Path | None:
    if cfg.env_config:
        path = Path(cfg.env_config)
        if not path.is_file():
            raise ConfigError(f"env config not found: {path}")
        return path
    sibling = Path(cfg.spec).with_suffix(".env.json")
    return sibling if sibling.is_file() else None


def _make_client(cfg: RunConfig):
    if not cfg.backend:
        raise ConfigError("no --backend given (scripted:FILE or http:URL)")
    kind, _, target = cfg.backend.partition(":")
    if kind == "scripted":
        if not Path(target).is_file():
            raise ConfigError(f"replay file not found: {target}")
        try:
            return ScriptedClient.from_jsonl(target)
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"bad replay file: {exc}") from None
    if kind == "http":
        if not target:
            raise ConfigError("http backend needs a URL")
        return HttpCompletionClient(target, model=cfg.model)
    raise ConfigError(f"unknown backend {cfg.backend!r}")


def _emit(obj: dict) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")
    sys.stdout.flush()


def cmd_eval(args: argparse.Namespace) -> int:
    cfg = _load_run_config(args)
    spec = _load_spec(cfg)
    env_path = _env_config_path(cfg)
    env = load_env_config(env_path) if env_path else default_env_config(spec)
    client = _make_client(cfg)
    options: dict[str, Any] = {"model": cfg.model, "chat": cfg.chat}
    if cfg.prompt_template:
        try:
            options["template"] = load_template(cfg.prompt_template)
        except OSError as exc:
            raise ConfigError(f"cannot read prompt template: {exc}") from None
    outcomes = Evaluator(spec, client, env, **options).run(parallelism=cfg.parallelism)
    report = aggregate(outcomes)

    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    doc = report.to_json()
    doc["tool_id"] = spec.tool_id
    doc["seed"] = cfg.seed
    (out / "report.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    write_jsonl(out / "outcomes.jsonl", (o.to_json() for o in outcomes))

    summary = {k: v for k, v in doc.items() if k != "per_test"}
    _emit(summary)
    if report.infrastructure_failures:
        log.error("%d test(s) hit backend failures", report.infrastructure_failures)
        return EXIT_BACKEND
    return EXIT_OK


def cmd_gendata(args: argparse.Namespace) -> int:
    configs = [load_task_config(p, repeat=args.repeat) for p in args.templates]
    ids = [c.task_id for c in configs]
    if len(ids) != len(set(ids)):
        raise ConfigError(f"duplicate task ids: {ids}")
    samples = build_dataset(configs, args.seed)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    packed_counts: dict[str, int] = {}
    if args.budget is not None:
        rows = []
        for cfg in configs:
            own = [s for s in samples if s.task_id == cfg.task_id]
            packed = pack_all_shot(own, args.budget, docs_header=cfg.docs_header)
            packed_counts[cfg.task_id] = len(packed)
            rows.extend(p.to_json() for p in packed)
        write_jsonl(out, rows)
        if args.pairs_out:
            write_jsonl(args.pairs_out, (s.to_json() for s in samples))
    else:
        write_jsonl(out, (s.to_json() for s in samples))
    for cfg in configs:
        n = sum(1 for s in samples if s.task_id == cfg.task_id)
        log.info("%s: %d samples", cfg.task_id, n)
        row = {"task": cfg.task_id, "templates": len(cfg.templates), "repeat": cfg.repeat, "samples": n}
        if cfg.task_id in packed_counts:
            row["packed"] = packed_counts[cfg.task_id]
        _emit(row)
    return EXIT_OK


def _example_pool(path: str, spec: ToolSpec) -> list[ActionProgram]:
    """Programs from another ToolSpec's demos or a JSONL of {"action": ...}."""
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"examples file not found: {p}")
    if p.suffix == ".jsonl":
        pool = []
        for lineno, line in enumerate(p.read_text(encoding="utf-8").splitlines(), start=1):
            if not line.strip():
                continue
            try:
                text = json.loads(line)["action"]
                pool.append(ActionProgram((), text.strip()) if spec.uses_raw_programs
                            else parse_action_program(text, spec))
            except (json.JSONDecodeError, KeyError, ParseError) as exc:
                raise ConfigError(f"{p}:{lineno}: {exc}") from None
        return pool
    return [d.program for d in load_tool_spec(p).demos]


def cmd_complexity(args: argparse.Namespace) -> int:
    cfg = _load_run_config(args)
    spec = _load_spec(cfg)
    examples = _example_pool(args.examples, spec) if args.examples else [d.program for d in spec.demos]
    d_size = args.d_size or len(spec.api_functions)
    report = complexity_score(list(spec.tests), examples, d_size, cfg.variant, cfg.log_base, with_rf1=args.rf1)
    doc = report.to_json()
    doc["tool_id"] = spec.tool_id
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    summary = {"tool_id": spec.tool_id, "S": report.task_score, **doc["config"]}
    if report.rf1_score is not None:
        summary["S_rF1"] = report.rf1_score
    _emit(summary)
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    outcomes: list[EvalOutcome] = []
    for path in args.outcomes:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"outcomes file not found: {p}")
        for lineno, line in enumerate(p.read_text(encoding="utf-8").splitlines(), start=1):
            if line.strip():
                try:
                    outcomes.append(EvalOutcome.from_json(json.loads(line)))
                except (json.JSONDecodeError, KeyError, ValueError) as exc:
                    raise ConfigError(f"{p}:{lineno}: {exc}") from None
    doc = aggregate(outcomes).to_json()
    if args.out:
        Path(args.out).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    _emit({k: v for k, v in doc.items() if k != "per_test"})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="toolforge", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="RunConfig JSON; flags override its values")
        p.add_argument("--spec", help="ToolSpec JSON file")

    p = sub.add_parser("eval", help="evaluate a tool's test cases")
    common(p)
    p.add_argument("--env-config", help="environment config JSON (default: <spec>.env.json)")
    p.add_argument("--backend", help="scripted:REPLAY.jsonl or http:URL")
    p.add_argument("--model")
    p.add_argument("--out", help="output directory (default: out)")
    p.add_argument("--parallelism", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--num-demos", type=int)
    p.add_argument("--num-docs", help="'all' or a count")
    p.add_argument("--prompt-template")
    p.add_argument("--chat", action="store_true", help="wrap prompts with <human>:/<bot>: tags")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gen-data", help="generate alignment data from templates")
    p.add_argument("--templates", nargs="+", required=True, help="one templates file per task")
    p.add_argument("--repeat", type=int, help="override each file's repeat count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output JSONL")
    p.add_argument("--budget", type=int, help="pack all-shot samples up to this many characters")
    p.add_argument("--pairs-out", help="also write plain goal/action pairs (with --budget)")
    p.set_defaults(func=cmd_gendata)

    p = sub.add_parser("complexity", help="API-selection complexity of a test set")
    common(p)
    p.add_argument("--examples", help="example pool: ToolSpec JSON or JSONL of {action}")
    p.add_argument("--variant", choices=VARIANTS)
    p.add_argument("--log-base", help="'e' (default) or a number")
    p.add_argument("--d-size", type=int, help="override |D| (default: number of API functions)")
    p.add_argument("--rf1", action="store_true", help="also compute the reversed-F1 score")
    p.add_argument("--out", help="write the full report JSON here")
    p.set_defaults(func=cmd_complexity)

    p = sub.add_parser("report", help="re-aggregate saved outcome files")
    p.add_argument("outcomes", nargs="+")
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (ConfigError, SpecError, TemplateError, PromptTemplateError) as exc:
        print(f"toolforge: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ValueError) as exc:
        print(f"toolforge: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
