"""Command-line entry point: ``dualmem {gen,run,eval,coverage,replay}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from ..domain import ActorKind, Mode, QueryInstance, SessionConfig, TaskKind
from ..errors import ArgumentError, PlanningError
from ..orchestrate import run_session, symbolic_agents
from ..queryparse import render_plan
from .coverage import coverage_table, format_coverage
from .evaluate import evaluate
from .generate import Difficulty, synthesize
from .records import load_dataset, read_traces, save_dataset

log = logging.getLogger("dualmem")


def parse_actor(text: str) -> tuple[ActorKind, float]:
    """``oracle``, ``failing``, ``llm`` or ``noisy=P`` with P in [0, 1]."""
    name, _, rate = text.partition("=")
    try:
        kind = ActorKind(name.strip().lower())
    except ValueError:
        raise argparse.ArgumentTypeError(f"unknown actor {name!r}") from None
    if kind is ActorKind.NOISY:
        try:
            p = float(rate) if rate else 0.5
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad error rate {rate!r}") from None
        if not 0 <= p <= 1:
            raise argparse.ArgumentTypeError("error rate must lie in [0, 1]")
        return kind, p
    if rate:
        raise argparse.ArgumentTypeError(f"actor {name} takes no parameter")
    return kind, 0.0


def parse_caps(text: str) -> list[int]:
    """``3..7`` or ``1,2,5``."""
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(c) for c in text.split(",") if c.strip()]


def _session_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.FULL.value)
    p.add_argument("--actor", type=parse_actor, default=(ActorKind.ORACLE, 0.0), help="oracle | noisy=P | llm | failing")
    p.add_argument("--turns", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--feedback", choices=["all", "latest"], default="all")


def _llm_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--store", type=Path, help="transcript store directory")
    p.add_argument(
        "--transport",
        choices=["live", "record", "replay", "symbolic"],
        default=None,
        help="how LLM requests are answered (default: replay when --store is given, else live)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dualmem", description="Actor/verifier planning loop with constraint and feedback memory.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="synthesize a dataset")
    gen.add_argument("--task", required=True)
    gen.add_argument("--count", type=int, default=50)
    gen.add_argument("--size", type=int, default=3, help="cities, participants or friends")
    gen.add_argument("--horizon", type=int, default=None, help="trip days or work-day hours")
    gen.add_argument("--unique", action="store_true", help="tighten until the solution is unique")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", type=Path, required=True, help="output JSONL file")

    run = sub.add_parser("run", help="run one instance and print its trace")
    run.add_argument("--dataset", type=Path)
    run.add_argument("--id", help="instance id within --dataset (default: first)")
    run.add_argument("--task", help="task kind for --query")
    run.add_argument("--query", type=Path, help="file holding a query text")
    _session_args(run)
    _llm_args(run)

    ev = sub.add_parser("eval", help="evaluate a dataset and write a report")
    ev.add_argument("--dataset", type=Path, required=True)
    ev.add_argument("--task", help="only instances of this task kind")
    ev.add_argument("--runs", type=int, default=1)
    ev.add_argument("--workers", type=int, default=1)
    ev.add_argument("--out", type=Path)
    _session_args(ev)
    _llm_args(ev)

    cov = sub.add_parser("coverage", help="success coverage by iteration cap from a trace log")
    cov.add_argument("traces", type=Path, help="traces.jsonl, or a directory containing it")
    cov.add_argument("--caps", type=parse_caps, default=None, help="e.g. 3..7 (default: 1..max turns)")

    rep = sub.add_parser("replay", help="evaluate with LLM agents answered from a transcript store")
    rep.add_argument("--dataset", type=Path, required=True)
    rep.add_argument("--store", type=Path, required=True)
    rep.add_argument("--record", action="store_true", help="fill the store from the symbolic backend instead of reading it")
    rep.add_argument("--runs", type=int, default=1)
    rep.add_argument("--out", type=Path)
    rep.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.FULL.value)
    rep.add_argument("--turns", type=int, default=5)
    rep.add_argument("--seed", type=int, default=0)
    return parser


def _config(args, actor=None) -> SessionConfig:
    kind, rate = actor or args.actor
    return SessionConfig(
        max_turns=args.turns, mode=Mode(args.mode), actor_kind=kind, error_rate=rate, seed=args.seed, feedback=getattr(args, "feedback", "all")
    )


def _transport(mode: str | None, store: Path | None):
    from ..llmio import HttpTransport, LlmSettings, RecordingTransport, ReplayStore, ReplayTransport, SymbolicChatBackend

    mode = mode or ("replay" if store else "live")
    if mode in ("record", "replay") and store is None:
        raise ArgumentError(f"--transport {mode} needs --store")
    if mode == "replay":
        return ReplayTransport(ReplayStore(store))
    if mode == "symbolic":
        inner = SymbolicChatBackend()
        return RecordingTransport(inner, ReplayStore(store)) if store else inner
    settings = LlmSettings.from_env()
    if not settings.endpoint:
        raise ArgumentError("live LLM calls need DUALMEM_LLM_ENDPOINT to be set")
    live = HttpTransport(settings.endpoint, settings.api_key)
    return RecordingTransport(live, ReplayStore(store)) if mode == "record" else live


def _factory(config: SessionConfig, transport=None):
    if config.actor_kind is not ActorKind.LLM:
        return lambda inst, cfg: symbolic_agents(inst.task_kind, cfg)
    from ..llmio import LlmSettings, llm_agents

    settings = LlmSettings.from_env()
    return lambda inst, cfg: llm_agents(inst.task_kind, transport, settings, cfg.temperatures, inst.few_shot)


def _print_trace(trace, out=None) -> None:
    out = out or sys.stdout
    print(f"instance {trace.instance_id}  seed {trace.seed}", file=out)
    if trace.error:
        print(f"  aborted: {trace.error}", file=out)
    for t in trace.turns:
        print(f"turn {t.turn} (memory holds {t.qmem_size} failure(s))", file=out)
        if t.plan is not None:
            for line in render_plan(t.plan).splitlines():
                print(f"  | {line}", file=out)
        if t.error:
            print(f"  error: {t.error}", file=out)
        elif t.verdict is not None:
            print(f"  score {t.verdict.score}{'  accepted' if t.verdict.accepted else ''}", file=out)
            for v in t.verdict.violations:
                print(f"  - {v.reason}", file=out)
    em = "n/a" if trace.exact_match is None else ("yes" if trace.exact_match else "no")
    print(f"accepted: {'yes' if trace.accepted else 'no'}  turns: {trace.turns_used}  exact match: {em}", file=out)


def _select(instances, task):
    if task:
        kind = TaskKind.parse(task)
        instances = [i for i in instances if i.task_kind is kind]
    if not instances:
        raise ArgumentError("no instances selected")
    return instances


def _cmd_gen(args) -> int:
    items = synthesize(args.task, args.count, Difficulty(args.size, args.horizon, args.unique), args.seed)
    save_dataset(items, args.out)
    print(f"wrote {len(items)} instances to {args.out}")
    return 0


def _cmd_run(args) -> int:
    if args.query:
        if not args.task:
            raise ArgumentError("--query needs --task")
        inst = QueryInstance("query", args.task, args.query.read_text(encoding="utf-8"))
    elif args.dataset:
        instances = load_dataset(args.dataset)
        inst = next((i for i in instances if i.id == args.id), None) if args.id else instances[0]
        if inst is None:
            raise ArgumentError(f"no instance with id {args.id!r}")
    else:
        raise ArgumentError("give --dataset or --query")
    config = _config(args)
    transport = _transport(args.transport, args.store) if config.actor_kind is ActorKind.LLM else None
    trace = run_session(inst, config, _factory(config, transport)(inst, config))
    _print_trace(trace)
    return 0 if trace.accepted else 1


def _emit(report, out: Path | None) -> None:
    sys.stdout.write(report.to_csv())
    if out:
        report.write(out)
        print(f"report and traces written to {out}", file=sys.stderr)


def _cmd_eval(args) -> int:
    dataset = _select(load_dataset(args.dataset), args.task)
    config = _config(args)
    transport = _transport(args.transport, args.store) if config.actor_kind is ActorKind.LLM else None
    report = evaluate(dataset, config, args.runs, _factory(config, transport), workers=args.workers)
    _emit(report, args.out)
    return 0


def _cmd_coverage(args) -> int:
    path = args.traces / "traces.jsonl" if args.traces.is_dir() else args.traces
    records = read_traces(path)
    caps = args.caps or list(range(1, max(int(r["turns_used"]) for r in records) + 1))
    print(format_coverage(coverage_table(records, caps)))
    return 0


def _cmd_replay(args) -> int:
    dataset = load_dataset(args.dataset)
    config = SessionConfig(max_turns=args.turns, mode=Mode(args.mode), actor_kind=ActorKind.LLM, seed=args.seed)
    transport = _transport("symbolic" if args.record else "replay", args.store)
    report = evaluate(dataset, config, args.runs, _factory(config, transport))
    _emit(report, args.out)
    return 0


COMMANDS = {"gen": _cmd_gen, "run": _cmd_run, "eval": _cmd_eval, "coverage": _cmd_coverage, "replay": _cmd_replay}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (PlanningError, OSError) as exc:
        print(f"dualmem: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
