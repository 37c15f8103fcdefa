"""Prompt templates for the three agent roles and the slot renderer.

A template body is a sequence of sections separated by blank lines. Slots use
``{name}`` syntax. A section whose slots are all empty or absent is dropped
entirely, so an empty feedback memory never leaves a dangling "Previous
Errors" heading in the prompt.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from ..domain import TaskKind
from ..errors import TemplateError

_SLOT = re.compile(r"\{(\w+)\}")


class Role(str, Enum):
    EXTRACTOR = "extractor"
    VERIFIER = "verifier"
    ACTOR = "actor"


MANDATORY = {
    Role.EXTRACTOR: ("query",),
    Role.VERIFIER: ("query", "solution"),
    Role.ACTOR: ("query",),
}


@dataclass(frozen=True)
class PromptTemplate:
    role: Role
    body: str

    @property
    def slots(self) -> set[str]:
        return set(_SLOT.findall(self.body))

    @classmethod
    def from_file(cls, role: Role | str, path: str | Path) -> PromptTemplate:
        return cls(Role(role), Path(path).read_text(encoding="utf-8"))


EXTRACTOR_TEMPLATE = PromptTemplate(
    Role.EXTRACTOR,
    """You are an expert constraint extraction agent for planning problems.
Your task is to extract only structured constraints in a clean, concise, and strictly formatted style.

Extract constraints using only the format below:
{output_format}

Example queries and their extracted constraints:
{few_shot}

Query:
{query}""",
)

VERIFIER_TEMPLATE = PromptTemplate(
    Role.VERIFIER,
    """You are a meticulous verifier responsible for evaluating {task} plans against a set of hard constraints.
You must assess both the numeric durations and logical feasibility of the plan. Be strict and precise.

Given query, Please evaluate whether the plan satisfies all the constraints.

Query:
{query}

Input plan:
{solution}

Constraints:
{constraints}

Format your response strictly as follows - no extra text, comments, or explanations:
Score: [integer number, reward score between 0 and 100]
Violated Constraints: [string, list any constraints that the plan violates or any errors in the plan, and provide the reason why each constraint was violated]""",
)

ACTOR_TEMPLATE = PromptTemplate(
    Role.ACTOR,
    """You are an expert at planning problems. {task_description}

Along with the task, you are also given example tasks and solutions. You can learn from the examples to generate your own plan on the given task.
{few_shot}

Follow the format of the example solution and the required output format precisely. {output_format}
Only provide the plan, no other text.

Query:
{query}

Constraints:
Your solution must strictly satisfy the following constraints.
{constraints}
If any constraint is violated, the solution is considered incorrect.

Previous Errors:
The following notes lists why previous attempts failed:
{errors}
Do not repeat the same errors.

Previous Answer:
{previous}
{critique}

Based on all the information above, generate your final output.""",
)

TEMPLATES = {Role.EXTRACTOR: EXTRACTOR_TEMPLATE, Role.VERIFIER: VERIFIER_TEMPLATE, Role.ACTOR: ACTOR_TEMPLATE}

TASK_NOUN = {TaskKind.TRIP: "trip", TaskKind.CALENDAR: "meeting", TaskKind.MEETING: "meeting"}

TASK_DESCRIPTION = {
    TaskKind.TRIP: "You are given a trip planning task: visit several cities for fixed numbers of days using direct flights.",
    TaskKind.CALENDAR: "You are given a calendar scheduling task: find a meeting time that fits every participant's schedule.",
    TaskKind.MEETING: "You are given a meeting planning task: meet as many friends as possible given travel times and availability.",
}

PLAN_FORMAT = {
    TaskKind.TRIP: "Write one line per stay, e.g. 'Day 1-5: Arrive in Helsinki and visit Helsinki for 5 days.' and 'Day 5: Fly from Helsinki to Barcelona.'",
    TaskKind.CALENDAR: "Answer with one line: 'Proposed meeting time: Monday, 14:30-15:30'.",
    TaskKind.MEETING: "Write one line per meeting: 'Meet Stephanie at Mission District from 10:30 AM to 12:30 PM.'",
}

CONSTRAINT_FORMAT = {
    TaskKind.TRIP: """1. Total trip duration: <N> days
2. Visit durations per city:
   - <City>: <N> days
3. Fixed-date events: <event> in <City> between Day <a>–<b>
4. Flight constraints:
   - Direct flights only
   - Direct flight connections: <City>–<City>, ...""",
    TaskKind.CALENDAR: """1. Meeting Participants: <Name>, <Name>, ...
2. Meeting Duration: <N> minutes
3. Meeting Day: <Day>
4. Allowed Meeting Hours: <HH:MM>–<HH:MM>
5. Blocked Schedules:
   - <Name>: <HH:MM>–<HH:MM>, ...
6. Meeting Preferences: <text or None>""",
    TaskKind.MEETING: """1. Arrival Time Constraint:
   - You arrive at <Location> at <time>
2. Travel Time Constraints:
   - <Location> → <Location>: <N> minutes
3. Availability Constraint:
   - <Name> is at <Location> from <time>–<time>
4. Meeting Duration Constraint:
   - You want to meet <Name> for at least <N> minutes
5. Optimization Goal:
   - Maximize the number of friends met""",
}


def build_prompt(template: PromptTemplate, slots: dict[str, str | None]) -> str:
    """Fill ``template``; sections whose slots are all empty are omitted.

    Raises TemplateError when a mandatory slot for the template's role is
    missing or empty.
    """
    for name in MANDATORY[template.role]:
        if not slots.get(name):
            raise TemplateError(name)
    kept = []
    for section in re.split(r"\n\s*\n", template.body):
        names = _SLOT.findall(section)
        filled = {n: slots.get(n) or "" for n in names}
        if names and not any(filled.values()):
            continue
        lines = []
        for line in section.split("\n"):
            line_names = _SLOT.findall(line)
            # a line made only of empty slots disappears rather than leaving a blank
            if line_names and not any(filled[n] for n in line_names) and not _SLOT.sub("", line).strip():
                continue
            lines.append(_SLOT.sub(lambda m: filled[m.group(1)], line).rstrip())
        kept.append("\n".join(lines))
    return "\n\n".join(kept)


def format_few_shot(pairs) -> str:
    return "\n\n".join(f"Example {i}:\n{q.strip()}\nSolution:\n{a.strip()}" for i, (q, a) in enumerate(pairs, 1))
