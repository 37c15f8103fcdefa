"""Offline chat endpoint that answers agent prompts symbolically.

Useful for recording replay fixtures and for exercising the LLM code path
without network access. The actor side deliberately gets its first attempt
wrong whenever the prompt carries no failure feedback, so a recorded session
shows the self-correction loop at work.
"""

from __future__ import annotations

import re

from ..domain import TaskKind
from ..errors import PlanningError
from ..queryparse import parse_plan_text, parse_query, render_constraints, render_plan
from ..solve import mutation_candidates, solve
from ..verify import verify
from .replies import format_verdict
from .transport import ChatReply, ChatRequest

_SECTION = re.compile(r"^(?P<label>Query|Input plan|Constraints|Previous Errors|Previous Answer):\n", re.M)


def guess_task_kind(query_text: str) -> TaskKind:
    if re.search(r"\byou arrive at\b", query_text, re.I):
        return TaskKind.MEETING
    if re.search(r"schedule a meeting|work hours", query_text, re.I):
        return TaskKind.CALENDAR
    return TaskKind.TRIP


def _sections(prompt: str) -> dict[str, str]:
    marks = list(_SECTION.finditer(prompt))
    out = {}
    for i, m in enumerate(marks):
        end = marks[i + 1].start() if i + 1 < len(marks) else len(prompt)
        out[m.group("label")] = prompt[m.end() : end]
    return out


def _first_paragraph(text: str) -> str:
    return re.split(r"\n\s*\n", text.strip(), maxsplit=1)[0].strip()


class SymbolicChatBackend:
    def __init__(self, task_kind: TaskKind | str | None = None):
        self.task_kind = TaskKind.parse(task_kind) if task_kind is not None else None
        self.calls = 0

    def send(self, request: ChatRequest) -> ChatReply:
        self.calls += 1
        prompt = request.messages[-1][1]
        sections = _sections(prompt)
        query = re.split(r"\n\s*\nBased on all the information", sections.get("Query", ""))[0].strip()
        kind = self.task_kind or guess_task_kind(query)
        cs, _ = parse_query(kind, query)
        head = prompt.lstrip().lower()
        if "constraint extraction" in head.split("\n", 1)[0]:
            text = render_constraints(cs)
        elif "verifier" in head.split("\n", 1)[0]:
            plan = parse_plan_text(kind, _first_paragraph(sections["Input plan"]))
            text = format_verdict(verify(cs, plan))
        else:
            text = render_plan(self._act(cs, "Previous Errors" in sections))
        return ChatReply(text, prompt_tokens=len(prompt.split()), completion_tokens=len(text.split()))

    @staticmethod
    def _act(cs, has_feedback: bool):
        correct = solve(cs)
        if correct is None:
            raise PlanningError("no feasible plan")
        if has_feedback:
            return correct
        candidates = mutation_candidates(cs)
        return candidates[0][1] if candidates else correct
