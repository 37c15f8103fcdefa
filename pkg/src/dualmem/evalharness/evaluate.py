"""Batch evaluation: runs x instances sessions folded into a report."""

from __future__ import annotations

import csv
import hashlib
import io
import statistics
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence

from ..domain import QueryInstance, SessionConfig, SessionTrace, TaskKind
from ..errors import EvalConfigError
from ..orchestrate import AgentBundle, run_session, symbolic_agents
from .records import trace_to_dict, write_traces

AgentsFactory = Callable[[QueryInstance, SessionConfig], AgentBundle]


def derive_seed(base: int, run: int, instance_id: str) -> int:
    digest = hashlib.sha256(f"{base}:{run}:{instance_id}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def default_agents(instance: QueryInstance, config: SessionConfig) -> AgentBundle:
    return symbolic_agents(instance.task_kind, config)


@dataclass(frozen=True)
class TaskSummary:
    task: str
    instances: int
    runs: int
    em_mean: float
    em_std: float
    solve_mean: float
    solve_std: float
    mean_turns: float
    turn_histogram: dict[int, int]


@dataclass
class Report:
    summaries: list[TaskSummary]
    runs: int
    seed: int
    run_seeds: dict[int, dict[str, int]] = field(default_factory=dict)
    traces: list[tuple[int, SessionTrace]] = field(default_factory=list)

    def summary(self, task: TaskKind | str) -> TaskSummary:
        key = TaskKind.parse(task).value if task != "all" else "all"
        return next(s for s in self.summaries if s.task == key)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["task", "instances", "runs", "em_mean", "em_std", "solve_rate_mean", "solve_rate_std", "mean_turns", "turn_histogram"])
        for s in self.summaries:
            hist = " ".join(f"{t}:{c}" for t, c in sorted(s.turn_histogram.items()))
            w.writerow(
                [s.task, s.instances, s.runs, f"{s.em_mean:.2f}", f"{s.em_std:.2f}", f"{s.solve_mean:.2f}", f"{s.solve_std:.2f}", f"{s.mean_turns:.3f}", hist]
            )
        return buf.getvalue()

    def trace_records(self) -> list[dict]:
        return [trace_to_dict(t, run) for run, t in self.traces]

    def write(self, out_dir: str | Path) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.csv").write_text(self.to_csv(), encoding="utf-8")
        write_traces(self.trace_records(), out / "traces.jsonl")


def evaluate(
    dataset: Sequence[QueryInstance],
    config: SessionConfig,
    runs: int = 1,
    agents_factory: AgentsFactory = default_agents,
    workers: int = 1,
    require_golden: bool = True,
) -> Report:
    """Run every instance ``runs`` times and aggregate exact match and solve rate.

    Session seeds depend only on (config.seed, run, instance id), so results do
    not change with dataset order or worker count.
    """
    if runs < 1:
        raise EvalConfigError("runs must be at least 1")
    if not dataset:
        raise EvalConfigError("dataset is empty")
    if len({i.id for i in dataset}) != len(dataset):
        raise EvalConfigError("instance ids must be unique")
    if require_golden:
        missing = [i.id for i in dataset if i.golden_plan is None]
        if missing:
            raise EvalConfigError(f"{len(missing)} instance(s) lack a golden plan, e.g. {missing[0]}")

    jobs = [(run, inst) for run in range(runs) for inst in dataset]

    def one(job):
        run, inst = job
        cfg = replace(config, seed=derive_seed(config.seed, run, inst.id))
        return run, run_session(inst, cfg, agents_factory(inst, cfg))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, jobs))
    else:
        results = [one(j) for j in jobs]
    results.sort(key=lambda r: (r[0], r[1].instance_id))

    kinds = sorted({i.task_kind.value for i in dataset})
    summaries = [_summarize(k, [(r, t) for r, t in results if t.task_kind.value == k], runs) for k in kinds]
    if len(kinds) > 1:
        summaries.append(_summarize("all", results, runs))
    run_seeds = {run: {t.instance_id: t.seed for r, t in results if r == run} for run in range(runs)}
    return Report(summaries, runs, config.seed, run_seeds, results)


def _summarize(task: str, results: list[tuple[int, SessionTrace]], runs: int) -> TaskSummary:
    em_by_run, solve_by_run = [], []
    for run in range(runs):
        traces = [t for r, t in results if r == run]
        em_by_run.append(100.0 * sum(bool(t.exact_match) for t in traces) / len(traces))
        solve_by_run.append(100.0 * sum(t.accepted for t in traces) / len(traces))
    hist = Counter(t.turns_used for _, t in results)
    return TaskSummary(
        task=task,
        instances=len(results) // runs,
        runs=runs,
        em_mean=statistics.fmean(em_by_run),
        em_std=statistics.pstdev(em_by_run),
        solve_mean=statistics.fmean(solve_by_run),
        solve_std=statistics.pstdev(solve_by_run),
        mean_turns=statistics.fmean(t.turns_used for _, t in results),
        turn_histogram=dict(sorted(hist.items())),
    )
