"""Session engine: extraction, generate/verify turns, feedback memory, reset.

One session handles one query. The extractor runs once and its constraints
become the session's constraint memory. Each turn the actor proposes a plan,
the verifier scores it, and failed attempts are appended to the feedback
memory. The loop stops at the first accepted verdict or after the turn cap,
and both memories are cleared before the function returns.

What the actor gets to see depends on the ablation mode:

============  =========================  ==============================
mode          constraints                prior failures
============  =========================  ==============================
single        never (one turn only)      never
reflect       never                      own previous output only
multi         turn 1 only                latest failed turn
cmem          every turn                 latest failed turn
full          every turn                 all failed turns (or latest)
============  =========================  ==============================
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

from .domain import (
    CMem,
    ConstraintSet,
    Mode,
    Plan,
    QMem,
    QMemEntry,
    QueryInstance,
    SessionConfig,
    SessionTrace,
    TaskKind,
    TurnRecord,
    Verdict,
    exact_match,
)
from .errors import ExtractionError, PlanningError
from .queryparse import parse_query, render_constraints, render_plan
from .solve import mutation_candidates, noisy_actor_step, solve
from .verify import verify

log = logging.getLogger(__name__)

REFLECT_CRITIQUE = (
    "Review your previous answer against the query. If you find a mistake, correct it; "
    "otherwise repeat the answer unchanged."
)


@dataclass(frozen=True)
class MemoryView:
    """What the actor is shown at one turn."""

    cmem_text: str | None = None
    qmem_errors_text: str | None = None
    constraints: ConstraintSet | None = None
    failures: tuple[QMemEntry, ...] = ()
    previous_plan: Plan | None = None
    critique: str | None = None

    def information(self) -> frozenset:
        facts = set()
        if self.cmem_text is not None:
            facts.add(("cmem", self.cmem_text))
        for e in self.failures:
            facts.add(("failure", e.turn))
        if self.previous_plan is not None:
            facts.add(("previous", self.previous_plan))
        return frozenset(facts)


Extractor = Callable[[str], ConstraintSet]
Actor = Callable[[str, MemoryView, random.Random], Plan]
Verifier = Callable[[str, ConstraintSet, Plan], Verdict]


@dataclass
class AgentBundle:
    extractor: Extractor
    actor: Actor
    verifier: Verifier


@dataclass
class SessionState:
    cmem: CMem | None = None
    qmem: QMem = field(default_factory=QMem)

    def sizes(self) -> tuple[int, int]:
        return (len(self.cmem.constraints) if self.cmem else 0, len(self.qmem))


def reset_session(state: SessionState) -> SessionState:
    state.cmem = None
    state.qmem.clear()
    return state


def render_feedback(entries) -> str:
    blocks = []
    for e in entries:
        lines = [f"Turn {e.turn} (score {e.score}):", f"- Plan: {render_plan(e.plan).replace(chr(10), ' ')}"]
        if e.violations:
            lines += [f"- {v.reason}" for v in e.violations]
        else:
            lines.append("- The plan did not reach a perfect score.")
        blocks.append("\n".join(lines))
    return "\n".join(blocks)


def apply_mode(mode: Mode, turn: int, cmem: CMem | None, qmem: QMem, feedback: str = "all") -> MemoryView:
    mode = Mode(mode)
    entries = qmem.entries
    if mode is Mode.SINGLE_AGENT:
        return MemoryView()
    if mode is Mode.SELF_REFLECT:
        if not entries:
            return MemoryView()
        return MemoryView(previous_plan=entries[-1].plan, critique=REFLECT_CRITIQUE)
    show_cmem = cmem is not None and (mode is not Mode.MULTI_ROUND or turn == 1)
    if mode is Mode.FULL and feedback == "all":
        visible = entries
    else:
        visible = entries[-1:]
    return MemoryView(
        cmem_text=cmem.rendered_text if show_cmem else None,
        qmem_errors_text=render_feedback(visible) if visible else None,
        constraints=cmem.constraints if show_cmem else None,
        failures=tuple(visible),
    )


def run_session(
    instance: QueryInstance,
    config: SessionConfig,
    agents: AgentBundle,
    state: SessionState | None = None,
) -> SessionTrace:
    state = state if state is not None else SessionState()
    rng = random.Random(config.seed)
    turns: list[TurnRecord] = []
    accepted = False
    final_plan = None
    error = None
    try:
        try:
            cs = agents.extractor(instance.query_text)
        except Exception as exc:  # any agent failure aborts extraction
            err = ExtractionError(f"constraint extraction failed: {exc}")
            log.warning("%s: %s", instance.id, err)
            error = str(err)
        else:
            state.cmem = CMem(cs, render_constraints(cs))
            for t in range(1, config.effective_turns + 1):
                view = apply_mode(config.mode, t, state.cmem, state.qmem, config.feedback)
                qsize = len(state.qmem)
                try:
                    plan = agents.actor(instance.query_text, view, rng)
                except Exception as exc:
                    turns.append(TurnRecord(t, None, None, view, qsize, f"actor failed: {exc}"))
                    continue
                final_plan = plan
                try:
                    verdict = agents.verifier(instance.query_text, cs, plan)
                except Exception as exc:
                    turns.append(TurnRecord(t, plan, None, view, qsize, f"verifier failed: {exc}"))
                    continue
                turns.append(TurnRecord(t, plan, verdict, view, qsize))
                if verdict.accepted:
                    accepted = True
                    break
                state.qmem.append(QMemEntry(t, plan, verdict.score, verdict.violations))
    finally:
        reset_session(state)

    em = None
    if instance.golden_plan is not None:
        em = _safe_exact_match(final_plan, instance.golden_plan)
    return SessionTrace(
        instance_id=instance.id,
        turns=tuple(turns),
        accepted=accepted,
        turns_used=len(turns),
        final_plan=final_plan,
        exact_match=em,
        seed=config.seed,
        task_kind=instance.task_kind,
        error=error,
    )


def _safe_exact_match(plan, golden) -> bool:
    if plan is None:
        return False
    try:
        return exact_match(plan, golden)
    except PlanningError:
        return False


# --------------------------------------------------------------------------
# symbolic agents


@lru_cache(maxsize=4096)
def _constraints(task_kind: TaskKind, text: str) -> ConstraintSet:
    return parse_query(task_kind, text)[0]


def symbolic_extractor(task_kind: TaskKind) -> Extractor:
    def extract(query_text: str) -> ConstraintSet:
        return _constraints(task_kind, query_text)

    return extract


def symbolic_verifier(query_text: str, cs: ConstraintSet, plan: Plan) -> Verdict:
    return verify(cs, plan)


def oracle_actor(task_kind: TaskKind) -> Actor:
    def act(query_text: str, view: MemoryView, rng: random.Random) -> Plan:
        plan = solve(_constraints(task_kind, query_text))
        if plan is None:
            raise PlanningError("no feasible plan")
        return plan

    return act


def noisy_actor(task_kind: TaskKind, error_rate: float) -> Actor:
    """Oracle actor that errs with ``error_rate``, avoiding failures it can see."""

    def act(query_text: str, view: MemoryView, rng: random.Random) -> Plan:
        return noisy_actor_step(_constraints(task_kind, query_text), view.failures, error_rate, rng)

    return act


def failing_actor(task_kind: TaskKind) -> Actor:
    def act(query_text: str, view: MemoryView, rng: random.Random) -> Plan:
        return mutation_candidates(_constraints(task_kind, query_text))[0][1]

    return act


class ScriptedActor:
    """Emits a fixed sequence of plans, repeating the last one."""

    def __init__(self, plans):
        self.plans = list(plans)
        self.calls = 0
        self.views: list[MemoryView] = []

    def __call__(self, query_text: str, view: MemoryView, rng: random.Random) -> Plan:
        self.views.append(view)
        plan = self.plans[min(self.calls, len(self.plans) - 1)]
        self.calls += 1
        return plan


def symbolic_agents(task_kind: TaskKind, config: SessionConfig) -> AgentBundle:
    from .domain import ActorKind

    task_kind = TaskKind.parse(task_kind)
    actors = {
        ActorKind.ORACLE: lambda: oracle_actor(task_kind),
        ActorKind.NOISY: lambda: noisy_actor(task_kind, config.error_rate),
        ActorKind.FAILING: lambda: failing_actor(task_kind),
    }
    if config.actor_kind not in actors:
        raise ValueError(f"actor kind {config.actor_kind.value} needs an LLM transport")
    return AgentBundle(symbolic_extractor(task_kind), actors[config.actor_kind](), symbolic_verifier)
