"""JSON-lines records for datasets and session traces."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable

from ..domain import (
    CalendarPlan,
    MeetingEvent,
    MeetingPlan,
    Plan,
    QueryInstance,
    Segment,
    SessionTrace,
    TaskKind,
    TripPlan,
    format_clock,
    parse_clock,
)
from ..errors import DatasetError


def plan_to_dict(plan: Plan) -> dict:
    if isinstance(plan, TripPlan):
        return {"segments": [{"city": s.city, "start_day": s.start_day, "end_day": s.end_day} for s in plan.segments]}
    if isinstance(plan, CalendarPlan):
        return {"day": plan.day, "start": format_clock(parse_clock(plan.start)), "end": format_clock(parse_clock(plan.end))}
    if isinstance(plan, MeetingPlan):
        return {
            "events": [
                {
                    "friend": e.friend,
                    "location": e.location,
                    "start": format_clock(parse_clock(e.start)),
                    "end": format_clock(parse_clock(e.end)),
                }
                for e in plan.events
            ]
        }
    raise TypeError(f"not a plan: {plan!r}")


def plan_from_dict(task_kind: TaskKind | str, data: dict) -> Plan:
    task_kind = TaskKind.parse(task_kind)
    if task_kind is TaskKind.TRIP:
        return TripPlan(tuple(Segment(s["city"], int(s["start_day"]), int(s["end_day"])) for s in data["segments"]))
    if task_kind is TaskKind.CALENDAR:
        return CalendarPlan(data["day"], parse_clock(data["start"]), parse_clock(data["end"]))
    return MeetingPlan(
        tuple(
            MeetingEvent(e["friend"], e["location"], parse_clock(e["start"]), parse_clock(e["end"]))
            for e in data.get("events", ())
        )
    )


def instance_to_dict(inst: QueryInstance) -> dict:
    out = {"id": inst.id, "task_kind": inst.task_kind.value, "query_text": inst.query_text}
    if inst.golden_plan is not None:
        out["golden_plan"] = plan_to_dict(inst.golden_plan)
    if inst.few_shot:
        out["few_shot"] = [{"query": q, "solution": a} for q, a in inst.few_shot]
    return out


def instance_from_dict(data: dict) -> QueryInstance:
    kind = TaskKind.parse(data["task_kind"])
    golden = data.get("golden_plan")
    few_shot = tuple((p["query"], p["solution"]) for p in data.get("few_shot") or ())
    return QueryInstance(
        id=str(data["id"]),
        task_kind=kind,
        query_text=data["query_text"],
        golden_plan=plan_from_dict(kind, golden) if golden is not None else None,
        few_shot=few_shot,
    )


def load_dataset(path: str | Path) -> list[QueryInstance]:
    """Read one instance per non-blank line; errors carry the 1-based line number."""
    instances: list[QueryInstance] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"invalid JSON: {exc.msg}", lineno) from exc
            if not isinstance(data, dict):
                raise DatasetError("record is not an object", lineno)
            missing = [k for k in ("id", "task_kind", "query_text") if k not in data]
            if missing:
                raise DatasetError(f"missing field(s): {', '.join(missing)}", lineno)
            try:
                TaskKind.parse(data["task_kind"])
            except ValueError as exc:
                raise DatasetError(f"unknown task_kind {data['task_kind']!r}", lineno) from exc
            if str(data["id"]) in seen:
                raise DatasetError(f"duplicate id {data['id']!r}", lineno)
            try:
                inst = instance_from_dict(data)
            except (KeyError, TypeError, ValueError) as exc:
                raise DatasetError(f"malformed record: {exc}", lineno) from exc
            seen.add(inst.id)
            instances.append(inst)
    return instances


def save_dataset(instances: Iterable[QueryInstance], path: str | Path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for inst in instances:
            fh.write(json.dumps(instance_to_dict(inst), ensure_ascii=False) + "\n")


def trace_to_dict(trace: SessionTrace, run: int | None = None) -> dict:
    turns = []
    for t in trace.turns:
        rec = {"turn": t.turn, "qmem_size": t.qmem_size}
        if t.plan is not None:
            rec["plan"] = plan_to_dict(t.plan)
        if t.verdict is not None:
            rec["score"] = t.verdict.score
            rec["violations"] = [v.reason for v in t.verdict.violations]
            rec["accepted"] = t.verdict.accepted
        if t.error:
            rec["error"] = t.error
        turns.append(rec)
    out = {
        "instance_id": trace.instance_id,
        "task_kind": trace.task_kind.value if trace.task_kind else None,
        "seed": trace.seed,
        "accepted": trace.accepted,
        "turns_used": trace.turns_used,
        "exact_match": trace.exact_match,
        "final_plan": plan_to_dict(trace.final_plan) if trace.final_plan is not None else None,
        "turns": turns,
    }
    if run is not None:
        out = {"run": run, **out}
    if trace.error:
        out["error"] = trace.error
    return out


def write_traces(records: Iterable[dict], path: str | Path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")


def read_traces(path: str | Path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]
