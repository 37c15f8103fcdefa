"""Core data model: task kinds, constraints, plans, verdicts, memories, traces.

Times of day are integer minutes since midnight and trip days are 1-based
integers. Trip segments share their boundary day: the flight day counts toward
both the departure and the arrival city.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import ClassVar, Union

from .errors import CanonicalizationError, ConstraintError, TypeMismatchError


class TaskKind(str, Enum):
    TRIP = "trip"
    CALENDAR = "calendar"
    MEETING = "meeting"

    @classmethod
    def parse(cls, value: str | TaskKind) -> TaskKind:
        if isinstance(value, TaskKind):
            return value
        key = str(value).strip().lower().replace("-", "_")
        aliases = {
            "trip_planning": "trip",
            "tripplanning": "trip",
            "calendar_scheduling": "calendar",
            "calendarscheduling": "calendar",
            "meeting_planning": "meeting",
            "meetingplanning": "meeting",
        }
        return cls(aliases.get(key, key))


# --------------------------------------------------------------------------
# clock helpers

_CLOCK_RE = re.compile(r"^\s*(\d{1,2})(?::(\d{2}))?\s*([ap])?\.?\s*(?:m\.?)?\s*$", re.IGNORECASE)


def parse_clock(text: str | int) -> int:
    """Parse ``"9:00"``, ``"17:30"``, ``"3:15PM"`` or ``"9:00 AM"`` into minutes."""
    if isinstance(text, int):
        return text
    m = _CLOCK_RE.match(text)
    if not m:
        raise ValueError(f"unrecognized time of day: {text!r}")
    hour, minute = int(m.group(1)), int(m.group(2) or 0)
    meridiem = (m.group(3) or "").lower()
    if minute >= 60:
        raise ValueError(f"unrecognized time of day: {text!r}")
    if meridiem:
        if not 1 <= hour <= 12:
            raise ValueError(f"unrecognized time of day: {text!r}")
        hour = hour % 12 + (12 if meridiem == "p" else 0)
    elif hour > 24 or (hour == 24 and minute):
        raise ValueError(f"unrecognized time of day: {text!r}")
    return hour * 60 + minute


def format_clock(minutes: int, twelve_hour: bool = False) -> str:
    hour, minute = divmod(minutes, 60)
    if not twelve_hour:
        return f"{hour:02d}:{minute:02d}"
    suffix = "AM" if hour % 24 < 12 else "PM"
    return f"{(hour % 12) or 12}:{minute:02d} {suffix}"


def canonical_name(name: str) -> str:
    return " ".join(name.split()).casefold()


def _check_interval(owner: str, start: int, end: int) -> None:
    if not start < end:
        raise ConstraintError(f"{owner}: interval start {start} must precede end {end}")


# --------------------------------------------------------------------------
# constraints


@dataclass(frozen=True)
class TotalDuration:
    days: int
    family: ClassVar[TaskKind] = TaskKind.TRIP

    def __post_init__(self):
        if self.days <= 0:
            raise ConstraintError("total duration must be positive")


@dataclass(frozen=True)
class CityStay:
    city: str
    days: int
    family: ClassVar[TaskKind] = TaskKind.TRIP

    def __post_init__(self):
        if self.days <= 0:
            raise ConstraintError(f"stay in {self.city} must be positive")


@dataclass(frozen=True)
class FixedWindow:
    city: str
    start_day: int
    end_day: int
    reason: str
    family: ClassVar[TaskKind] = TaskKind.TRIP

    def __post_init__(self):
        if not 1 <= self.start_day <= self.end_day:
            raise ConstraintError(f"bad window {self.start_day}-{self.end_day} for {self.city}")


@dataclass(frozen=True)
class DirectFlightsOnly:
    family: ClassVar[TaskKind] = TaskKind.TRIP


@dataclass(frozen=True)
class FlightEdge:
    """Undirected direct-flight connection."""

    city_a: str
    city_b: str
    family: ClassVar[TaskKind] = TaskKind.TRIP

    def key(self) -> frozenset[str]:
        return frozenset((canonical_name(self.city_a), canonical_name(self.city_b)))


@dataclass(frozen=True)
class Participants:
    names: tuple[str, ...]
    family: ClassVar[TaskKind] = TaskKind.CALENDAR

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))


@dataclass(frozen=True)
class MeetingDuration:
    minutes: int
    family: ClassVar[TaskKind] = TaskKind.CALENDAR

    def __post_init__(self):
        if self.minutes <= 0:
            raise ConstraintError("meeting duration must be positive")


@dataclass(frozen=True)
class MeetingDay:
    day: str
    family: ClassVar[TaskKind] = TaskKind.CALENDAR


@dataclass(frozen=True)
class WorkHours:
    start: int
    end: int
    family: ClassVar[TaskKind] = TaskKind.CALENDAR

    def __post_init__(self):
        _check_interval("work hours", self.start, self.end)


@dataclass(frozen=True)
class BusyInterval:
    person: str
    start: int
    end: int
    family: ClassVar[TaskKind] = TaskKind.CALENDAR

    def __post_init__(self):
        _check_interval(f"busy interval of {self.person}", self.start, self.end)


@dataclass(frozen=True)
class Preference:
    text: str = "None"
    family: ClassVar[TaskKind] = TaskKind.CALENDAR

    @property
    def is_none(self) -> bool:
        return self.text.strip().lower() in ("", "none")


@dataclass(frozen=True)
class FeasibilityAsserted:
    flag: bool = True
    family: ClassVar[TaskKind] = TaskKind.CALENDAR


@dataclass(frozen=True)
class ArrivalAt:
    location: str
    time: int
    family: ClassVar[TaskKind] = TaskKind.MEETING


@dataclass(frozen=True)
class TravelTime:
    origin: str
    destination: str
    minutes: int
    family: ClassVar[TaskKind] = TaskKind.MEETING

    def __post_init__(self):
        if self.minutes <= 0:
            raise ConstraintError(f"travel {self.origin} -> {self.destination} must take > 0 minutes")


@dataclass(frozen=True)
class Availability:
    friend: str
    location: str
    start: int
    end: int
    family: ClassVar[TaskKind] = TaskKind.MEETING

    def __post_init__(self):
        _check_interval(f"availability of {self.friend}", self.start, self.end)


@dataclass(frozen=True)
class MinMeetingDuration:
    friend: str
    minutes: int
    family: ClassVar[TaskKind] = TaskKind.MEETING

    def __post_init__(self):
        if self.minutes <= 0:
            raise ConstraintError(f"minimum meeting with {self.friend} must be positive")


@dataclass(frozen=True)
class OptimizationGoal:
    objective: str = "maximize_friends_met"
    family: ClassVar[TaskKind] = TaskKind.MEETING


Constraint = Union[
    TotalDuration, CityStay, FixedWindow, DirectFlightsOnly, FlightEdge,
    Participants, MeetingDuration, MeetingDay, WorkHours, BusyInterval, Preference, FeasibilityAsserted,
    ArrivalAt, TravelTime, Availability, MinMeetingDuration, OptimizationGoal,
]  # fmt: skip


class ConstraintSource(str, Enum):
    SYMBOLIC_PARSE = "symbolic_parse"
    LLM_EXTRACT = "llm_extract"


# rendering order of constraint groups, used by ConstraintSet.grouped()
_GROUP_RANK: dict[type, int] = {
    TotalDuration: 0, CityStay: 1, FixedWindow: 2, DirectFlightsOnly: 3, FlightEdge: 4,
    Participants: 0, MeetingDuration: 1, MeetingDay: 2, WorkHours: 3, BusyInterval: 4,
    Preference: 5, FeasibilityAsserted: 6,
    ArrivalAt: 0, TravelTime: 1, Availability: 2, MinMeetingDuration: 3, OptimizationGoal: 4,
}  # fmt: skip


@dataclass(frozen=True)
class ConstraintSet:
    task_kind: TaskKind
    items: tuple[Constraint, ...]
    source: ConstraintSource = ConstraintSource.SYMBOLIC_PARSE

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        for item in self.items:
            if item.family is not self.task_kind:
                raise ConstraintError(f"{type(item).__name__} does not belong to {self.task_kind.value} tasks")
        if self.task_kind is TaskKind.TRIP:
            self._require_one(TotalDuration)
            total = self.first(TotalDuration).days
            for w in self.of(FixedWindow):
                if w.end_day > total:
                    raise ConstraintError(f"window for {w.city} ends after day {total}")
        elif self.task_kind is TaskKind.CALENDAR:
            self._require_one(MeetingDuration)
            self._require_one(MeetingDay)
        else:
            self._require_one(ArrivalAt)
            pairs = [(canonical_name(t.origin), canonical_name(t.destination)) for t in self.of(TravelTime)]
            if len(pairs) != len(set(pairs)):
                raise ConstraintError("a travel pair appears more than once")

    def _require_one(self, kind: type) -> None:
        n = sum(isinstance(c, kind) for c in self.items)
        if n != 1:
            raise ConstraintError(f"{self.task_kind.value} constraints need exactly one {kind.__name__}, got {n}")

    def of(self, kind: type) -> list:
        return [c for c in self.items if isinstance(c, kind)]

    def first(self, kind: type):
        for c in self.items:
            if isinstance(c, kind):
                return c
        return None

    def grouped(self) -> ConstraintSet:
        """Same items, stably reordered into rendering groups."""
        items = sorted(self.items, key=lambda c: _GROUP_RANK[type(c)])
        return ConstraintSet(self.task_kind, tuple(items), self.source)

    def without(self, index: int) -> ConstraintSet:
        items = self.items[:index] + self.items[index + 1 :]
        return ConstraintSet(self.task_kind, items, self.source)

    def __len__(self) -> int:
        return len(self.items)


# --------------------------------------------------------------------------
# plans

Clock = Union[int, str]


@dataclass(frozen=True)
class Segment:
    city: str
    start_day: int
    end_day: int

    @property
    def days(self) -> int:
        return self.end_day - self.start_day + 1


@dataclass(frozen=True)
class TripPlan:
    segments: tuple[Segment, ...]
    task_kind: ClassVar[TaskKind] = TaskKind.TRIP

    def __post_init__(self):
        segs = tuple(s if isinstance(s, Segment) else Segment(*s) for s in self.segments)
        object.__setattr__(self, "segments", segs)


@dataclass(frozen=True)
class CalendarPlan:
    day: str
    start: Clock
    end: Clock
    task_kind: ClassVar[TaskKind] = TaskKind.CALENDAR


@dataclass(frozen=True)
class MeetingEvent:
    friend: str
    location: str
    start: Clock
    end: Clock


@dataclass(frozen=True)
class MeetingPlan:
    events: tuple[MeetingEvent, ...] = ()
    task_kind: ClassVar[TaskKind] = TaskKind.MEETING

    def __post_init__(self):
        evs = tuple(e if isinstance(e, MeetingEvent) else MeetingEvent(*e) for e in self.events)
        object.__setattr__(self, "events", evs)


Plan = Union[TripPlan, CalendarPlan, MeetingPlan]


def canonicalize_plan(plan: Plan) -> Plan:
    """Return the normal form used for exact-match comparison.

    Names are whitespace-collapsed and case-folded, clock strings become
    minutes since midnight, and trip segments are rebuilt from their day
    boundaries after checking contiguity. Idempotent.
    """
    if isinstance(plan, TripPlan):
        return _canonical_trip(plan)
    if isinstance(plan, CalendarPlan):
        try:
            start, end = parse_clock(plan.start), parse_clock(plan.end)
        except ValueError as exc:
            raise CanonicalizationError(str(exc)) from exc
        if not start < end:
            raise CanonicalizationError(f"calendar slot starts at {start} but ends at {end}")
        return CalendarPlan(canonical_name(plan.day), start, end)
    if isinstance(plan, MeetingPlan):
        events = []
        for i, ev in enumerate(plan.events):
            try:
                start, end = parse_clock(ev.start), parse_clock(ev.end)
            except ValueError as exc:
                raise CanonicalizationError(f"event {i}: {exc}") from exc
            if not start < end:
                raise CanonicalizationError(f"event {i} with {ev.friend} does not end after it starts")
            if events and start <= events[-1].start:
                raise CanonicalizationError(f"event {i} with {ev.friend} is out of chronological order")
            events.append(MeetingEvent(canonical_name(ev.friend), canonical_name(ev.location), start, end))
        return MeetingPlan(tuple(events))
    raise TypeMismatchError(f"not a plan: {plan!r}")


def _canonical_trip(plan: TripPlan) -> TripPlan:
    if not plan.segments:
        raise CanonicalizationError("trip plan has no segments")
    boundaries = [1]
    for i, seg in enumerate(plan.segments):
        label = f"segment {i} ({seg.city.strip()} day {seg.start_day}-{seg.end_day})"
        if seg.start_day != boundaries[-1]:
            expected = "day 1" if i == 0 else f"day {boundaries[-1]} (the previous flight day)"
            raise CanonicalizationError(f"{label} should start on {expected}")
        if seg.end_day < seg.start_day:
            raise CanonicalizationError(f"{label} ends before it starts")
        boundaries.append(seg.end_day)
    segs = tuple(
        Segment(canonical_name(seg.city), lo, hi)
        for seg, lo, hi in zip(plan.segments, boundaries, boundaries[1:])
    )
    return TripPlan(segs)


def exact_match(candidate: Plan, golden: Plan) -> bool:
    if candidate.task_kind is not golden.task_kind:
        raise TypeMismatchError(
            f"cannot compare a {candidate.task_kind.value} plan with a {golden.task_kind.value} plan"
        )
    return canonicalize_plan(candidate) == canonicalize_plan(golden)


# --------------------------------------------------------------------------
# verdicts and memories


@dataclass(frozen=True)
class Violation:
    constraint_index: int | None
    reason: str


@dataclass(frozen=True)
class Verdict:
    score: int
    violations: tuple[Violation, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "violations", tuple(self.violations))
        if not 0 <= self.score <= 100:
            raise ValueError(f"score {self.score} outside [0, 100]")
        if self.violations and self.score >= 100:
            raise ValueError("a verdict listing violations cannot score 100")

    @property
    def accepted(self) -> bool:
        return self.score == 100 and not self.violations


@dataclass(frozen=True)
class CMem:
    constraints: ConstraintSet
    rendered_text: str
    created_turn: int = 1


@dataclass(frozen=True)
class QMemEntry:
    turn: int
    plan: Plan
    score: int
    violations: tuple[Violation, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "violations", tuple(self.violations))
        if self.turn < 1:
            raise ValueError("turns are 1-based")
        if self.score >= 100:
            raise ValueError("only failed attempts belong in query-feedback memory")


class QMem:
    """Append-only log of failed attempts within one session."""

    def __init__(self):
        self._entries: list[QMemEntry] = []

    @property
    def entries(self) -> tuple[QMemEntry, ...]:
        return tuple(self._entries)

    def append(self, entry: QMemEntry) -> None:
        if self._entries and entry.turn <= self._entries[-1].turn:
            raise ValueError(f"turn {entry.turn} does not follow turn {self._entries[-1].turn}")
        self._entries.append(entry)

    def clear(self) -> None:
        self._entries.clear()

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)


# --------------------------------------------------------------------------
# session configuration and traces


class Mode(str, Enum):
    SINGLE_AGENT = "single"
    SELF_REFLECT = "reflect"
    MULTI_ROUND = "multi"
    MULTI_ROUND_CMEM = "cmem"
    FULL = "full"


class ActorKind(str, Enum):
    ORACLE = "oracle"
    NOISY = "noisy"
    LLM = "llm"
    FAILING = "failing"


class AgentKind(str, Enum):
    SYMBOLIC = "symbolic"
    LLM = "llm"


@dataclass(frozen=True)
class Temperatures:
    extractor: float = 0.1
    verifier: float = 0.0
    actor: float = 0.7


@dataclass(frozen=True)
class SessionConfig:
    max_turns: int = 5
    mode: Mode = Mode.FULL
    actor_kind: ActorKind = ActorKind.ORACLE
    error_rate: float = 0.0
    verifier_kind: AgentKind = AgentKind.SYMBOLIC
    extractor_kind: AgentKind = AgentKind.SYMBOLIC
    temperatures: Temperatures = field(default_factory=Temperatures)
    seed: int = 0
    # "all" sends every prior failure to the actor in full mode, "latest" only the last one
    feedback: str = "all"

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "actor_kind", ActorKind(self.actor_kind))
        object.__setattr__(self, "verifier_kind", AgentKind(self.verifier_kind))
        object.__setattr__(self, "extractor_kind", AgentKind(self.extractor_kind))
        if self.max_turns < 1:
            raise ValueError("max_turns must be at least 1")
        if not 0.0 <= self.error_rate <= 1.0:
            raise ValueError("error_rate must lie in [0, 1]")
        if self.feedback not in ("all", "latest"):
            raise ValueError("feedback must be 'all' or 'latest'")

    @property
    def effective_turns(self) -> int:
        return 1 if self.mode is Mode.SINGLE_AGENT else self.max_turns


@dataclass(frozen=True)
class TurnRecord:
    turn: int
    plan: Plan | None
    verdict: Verdict | None
    view: object = None
    qmem_size: int = 0
    error: str | None = None


@dataclass(frozen=True)
class SessionTrace:
    instance_id: str
    turns: tuple[TurnRecord, ...]
    accepted: bool
    turns_used: int
    final_plan: Plan | None
    exact_match: bool | None
    seed: int
    task_kind: TaskKind | None = None
    error: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "turns", tuple(self.turns))
        if self.turns_used != len(self.turns):
            raise ValueError("turns_used must equal the number of recorded turns")
        if self.accepted and not (self.turns and self.turns[-1].verdict and self.turns[-1].verdict.accepted):
            raise ValueError("an accepted trace must end on an accepted verdict")


@dataclass(frozen=True)
class QueryInstance:
    id: str
    task_kind: TaskKind
    query_text: str
    golden_plan: Plan | None = None
    few_shot: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "task_kind", TaskKind.parse(self.task_kind))
        object.__setattr__(self, "few_shot", tuple(tuple(p) for p in self.few_shot))
        if self.golden_plan is not None and self.golden_plan.task_kind is not self.task_kind:
            raise TypeMismatchError(f"golden plan of instance {self.id} is not a {self.task_kind.value} plan")
