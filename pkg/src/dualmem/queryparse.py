"""Template grammar for planning queries, constraint lists and plan text.

Three text formats are handled here:

* query text in the templated style of the trip / calendar / meeting
  benchmarks (``parse_query``),
* the numbered constraint list produced by ``render_constraints`` and by an
  LLM extractor (``parse_constraint_text``),
* textual plans emitted by an actor (``parse_plan_text`` / ``render_plan``).

Unrecognized sentences and lines are reported in ``ParseDiagnostics`` rather
than raising.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .domain import (
    ArrivalAt,
    Availability,
    BusyInterval,
    CalendarPlan,
    CityStay,
    ConstraintSet,
    ConstraintSource,
    DirectFlightsOnly,
    FeasibilityAsserted,
    FixedWindow,
    FlightEdge,
    MeetingDay,
    MeetingDuration,
    MeetingEvent,
    MeetingPlan,
    MinMeetingDuration,
    OptimizationGoal,
    Participants,
    Plan,
    Preference,
    Segment,
    TaskKind,
    TotalDuration,
    TravelTime,
    TripPlan,
    WorkHours,
    format_clock,
    parse_clock,
)
from .errors import ConstraintError, IncompleteQueryError, PlanParseError

WEEKDAYS = ("Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday")

TIME = r"\d{1,2}(?::\d{2})?\s*(?:[AaPp]\.?[Mm]\.?)?"
DASH = r"(?:\s*(?:–|—|-|to)\s*)"
NAME = r"(?-i:[A-Z][\w'.-]*(?:\s+[A-Z][\w'.-]*)*)"
_DAY = r"(?P<day>" + "|".join(WEEKDAYS) + r")"

# event phrase -> stored window reason; unlisted phrases are kept verbatim
EVENT_PHRASES: list[tuple[str, str]] = [
    (r"meet (?:a |your |some )?friends?", "meet friend"),
    (r"(?:attend )?(?:a |the |your )?(?:friend's )?wedding", "wedding"),
    (r"(?:attend )?(?:a |the )?workshop", "workshop"),
    (r"(?:attend )?(?:a |the )?conference", "conference"),
    (r"visit (?:your )?relatives", "visit relatives"),
    (r"(?:attend |see )?(?:an? |the )?annual show", "annual show"),
    (r"tour (?:with friends|together)", "tour with friends"),
]


@dataclass
class ParseDiagnostics:
    unrecognized_spans: list[tuple[int, int, str]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def unrecognized(self, offset: int, text: str) -> None:
        self.unrecognized_spans.append((offset, len(text), text))

    def __bool__(self) -> bool:
        return bool(self.unrecognized_spans or self.warnings)


def event_reason(phrase: str) -> str:
    phrase = " ".join(phrase.split())
    for pattern, label in EVENT_PHRASES:
        if re.fullmatch(pattern, phrase, re.IGNORECASE):
            return label
    return phrase


def _sentences(text: str) -> list[tuple[int, str]]:
    """Split into (offset, sentence) pairs on line breaks and sentence stops."""
    out = []
    for line in re.finditer(r"[^\n]+", text):
        base = line.start()
        for piece in re.finditer(r".+?(?:[.!?](?=\s|$)|$)", line.group()):
            raw = piece.group()
            stripped = raw.strip()
            if not stripped:
                continue
            offset = base + piece.start() + (len(raw) - len(raw.lstrip()))
            out.append((offset, stripped))
    return out


def _clean(sentence: str) -> str:
    s = re.sub(r"^[\s~*•>-]+", "", sentence)
    s = re.sub(r"^CONSTRAINTS:\s*", "", s)
    s = s.replace("**", "")
    return s.strip().rstrip(".;").strip()


def _minutes(text: str) -> int:
    text = text.strip().lower()
    words = {"one": 1, "an": 1, "a": 1, "two": 2, "three": 3, "four": 4}
    if m := re.search(r"\((\d+)\s*minutes?\)", text):
        return int(m.group(1))
    if re.fullmatch(r"half an? hour", text):
        return 30
    if m := re.fullmatch(r"(\d+)\s*(?:minutes?|mins?)", text):
        return int(m.group(1))
    if m := re.fullmatch(r"(\d+(?:\.\d+)?|one|an|a|two|three|four)\s*hours?(?:\s+and a half)?", text):
        n = m.group(1)
        hours = float(words[n]) if n in words else float(n)
        if text.endswith("and a half"):
            hours += 0.5
        return int(round(hours * 60))
    raise ValueError(f"unrecognized duration: {text!r}")


def _split_names(text: str) -> tuple[str, ...]:
    parts = re.split(r",\s*(?:and\s+)?|\s+and\s+", text.strip())
    return tuple(p.strip() for p in parts if p.strip())


def _intervals(text: str) -> list[tuple[int, int]]:
    out = []
    for chunk in re.split(r",|;", text):
        chunk = chunk.strip()
        if not chunk:
            continue
        m = re.fullmatch(rf"({TIME}){DASH}({TIME})", chunk)
        if not m:
            raise ValueError(f"unrecognized interval: {chunk!r}")
        out.append((parse_clock(m.group(1)), parse_clock(m.group(2))))
    return out


# --------------------------------------------------------------------------
# query grammar


def parse_query(task_kind: TaskKind, text: str) -> tuple[ConstraintSet, ParseDiagnostics]:
    """Extract the constraints of a templated query, in document order.

    Raises IncompleteQueryError when a mandatory constraint family is absent.
    """
    if not text or not text.strip():
        raise ValueError("query text is empty")
    task_kind = TaskKind.parse(task_kind)
    diag = ParseDiagnostics()
    parser = {TaskKind.TRIP: _TripRules, TaskKind.CALENDAR: _CalendarRules, TaskKind.MEETING: _MeetingRules}
    rules = parser[task_kind](diag)
    for offset, sentence in _sentences(text):
        cleaned = _clean(sentence)
        if not cleaned:
            continue
        try:
            matched = rules.feed(cleaned)
        except (ValueError, ConstraintError) as exc:
            diag.warnings.append(f"offset {offset}: {exc}")
            matched = False
        if not matched:
            diag.unrecognized(offset, sentence)
    items = rules.finish()
    return build_constraint_set(task_kind, items, ConstraintSource.SYMBOLIC_PARSE), diag


def build_constraint_set(task_kind: TaskKind, items: list, source: ConstraintSource) -> ConstraintSet:
    mandatory = {
        TaskKind.TRIP: [TotalDuration],
        TaskKind.CALENDAR: [MeetingDuration, MeetingDay],
        TaskKind.MEETING: [ArrivalAt],
    }[task_kind]
    for kind in mandatory:
        if not any(isinstance(c, kind) for c in items):
            raise IncompleteQueryError(kind.__name__)
    return ConstraintSet(task_kind, tuple(items), source)


class _TripRules:
    def __init__(self, diag: ParseDiagnostics):
        self.diag = diag
        self.items: list = []
        self.expect_edges = False

    def feed(self, s: str) -> bool:
        if m := re.search(r"(?:cities for|trip (?:of|lasting)) (?P<days>\d+) days", s, re.I):
            days = int(m.group("days"))
            if not any(isinstance(c, TotalDuration) for c in self.items):
                self.items.append(TotalDuration(days))
            return True
        if re.search(r"only take direct flights", s, re.I):
            self.items.append(DirectFlightsOnly())
            return True
        if m := re.search(rf"(?:like to|want to|plan to|wish to|going to) (?:visit|stay in) ({NAME}) for (\d+) days", s, re.I):
            self.items.append(CityStay(m.group(1), int(m.group(2))))
            return True
        if m := re.search(rf"from day (\d+) to day (\d+), there is an? (.+?) (?:you want to attend|in) (?:in )?({NAME})$", s, re.I):
            self.items.append(FixedWindow(m.group(4), int(m.group(1)), int(m.group(2)), event_reason(m.group(3))))
            return True
        if m := re.search(
            rf"(?:want|would like|plan|are going|have|need) to (.+?) in ({NAME}) between day (\d+) and day (\d+)", s, re.I
        ):
            self.items.append(FixedWindow(m.group(2), int(m.group(3)), int(m.group(4)), event_reason(m.group(1))))
            return True
        if m := re.match(r"here are the cities that have direct flights:?\s*(.*)$", s, re.I):
            rest = m.group(1).strip()
            self.expect_edges = not rest
            return self._edges(rest) if rest else True
        if self.expect_edges and self._edges(s):
            return True
        if re.match(r"find a trip plan", s, re.I):
            return True
        return False

    def _edges(self, s: str) -> bool:
        edges = []
        for chunk in re.split(r"[,;]", s):
            chunk = chunk.strip()
            if not chunk:
                continue
            m = re.fullmatch(rf"(?:from )?({NAME})\s+(?:and|to)\s+({NAME})", chunk, re.I) or re.fullmatch(
                rf"({NAME})\s*(?:–|—|-|↔|<->)\s*({NAME})", chunk
            )
            if not m:
                return False
            edges.append(FlightEdge(m.group(1), m.group(2)))
        self.items.extend(edges)
        return bool(edges)

    def finish(self) -> list:
        return self.items


class _CalendarRules:
    def __init__(self, diag: ParseDiagnostics):
        self.diag = diag
        self.items: list = []

    def feed(self, s: str) -> bool:
        if m := re.search(
            rf"schedule a meeting for (?P<names>.+?) for (?P<dur>.+?) between the work hours of (?P<a>{TIME}){DASH}(?P<b>{TIME}) on {_DAY}",
            s,
            re.I,
        ):
            self.items.append(Participants(_split_names(m.group("names"))))
            self.items.append(MeetingDuration(_minutes(m.group("dur"))))
            self.items.append(MeetingDay(m.group("day").title()))
            self.items.append(WorkHours(parse_clock(m.group("a")), parse_clock(m.group("b"))))
            return True
        if m := re.match(
            rf"(?P<who>{NAME}) (?:has meetings|has blocked (?:their|his|her) calendar|is busy|is occupied) on {_DAY} during (?P<spans>.+)$",
            s,
            re.I,
        ):
            for a, b in _intervals(m.group("spans")):
                self.items.append(BusyInterval(m.group("who"), a, b))
            return True
        if re.match(rf"{NAME} (?:is free the entire day|has no meetings the whole day|is wide open)", s, re.I):
            return True
        if re.search(r"there exists a solution", s, re.I):
            self.items.append(FeasibilityAsserted(True))
            return True
        if re.search(r"would (?:like to|rather) avoid|would rather not|prefers?|earli?est availability|do(?:es)? not want to meet", s, re.I):
            self.items.append(Preference(s))
            return True
        if re.match(r"here are the existing schedules|find a time that works", s, re.I):
            return True
        return False

    def finish(self) -> list:
        if not any(isinstance(c, Preference) for c in self.items):
            self.items.append(Preference("None"))
        return self.items


class _MeetingRules:
    def __init__(self, diag: ParseDiagnostics):
        self.diag = diag
        self.items: list = []

    def feed(self, s: str) -> bool:
        if re.search(r"meet as many friends as possible", s, re.I):
            if not any(isinstance(c, OptimizationGoal) for c in self.items):
                self.items.append(OptimizationGoal())
            return True
        if re.match(r"solve the problem by considering|travel distances", s, re.I):
            return True
        if m := re.fullmatch(rf"({NAME})\s*(?:→|->|\bto\b)\s*({NAME}):\s*(\d+)(?: minutes)?", s, re.I):
            self.items.append(TravelTime(m.group(1), m.group(2), int(m.group(3))))
            return True
        if m := re.search(rf"you arrive at ({NAME}) at ({TIME})$", s, re.I):
            self.items.append(ArrivalAt(m.group(1), parse_clock(m.group(2))))
            return True
        if m := re.match(rf"({NAME}) (?:will be|is) at ({NAME}) from ({TIME}){DASH}({TIME})$", s, re.I):
            self.items.append(Availability(m.group(1), m.group(2), parse_clock(m.group(3)), parse_clock(m.group(4))))
            return True
        if m := re.search(rf"meet ({NAME}) for (?:a minimum of|at least) (\d+) minutes", s, re.I):
            self.items.append(MinMeetingDuration(m.group(1), int(m.group(2))))
            return True
        return False

    def finish(self) -> list:
        return self.items


def preference_bounds(text: str) -> tuple[int | None, int | None] | None:
    """Interpret a calendar preference as (earliest start, latest end).

    Returns None for ``"None"`` and for phrasings that carry no usable bound.
    """
    s = text.lower()
    m = re.search(rf"\b(after|before)\s+({TIME})", s)
    if not m:
        return None
    t = parse_clock(m.group(2))
    negative = re.search(r"avoid|rather not|not want|no meetings", s) is not None
    if (m.group(1) == "after") == negative:
        return (None, t)
    return (t, None)


# --------------------------------------------------------------------------
# constraint list rendering


def _duration_text(minutes: int) -> str:
    if minutes % 60 == 0:
        hours = minutes // 60
        return f"{hours} hour{'s' if hours > 1 else ''} ({minutes} minutes)"
    return f"{minutes} minutes"


def render_constraints(cs: ConstraintSet) -> str:
    """Numbered, grouped plaintext listing of a constraint set."""
    render = {TaskKind.TRIP: _render_trip, TaskKind.CALENDAR: _render_calendar, TaskKind.MEETING: _render_meeting}
    groups = [g for g in render[cs.task_kind](cs) if g is not None]
    lines = []
    for n, (title, inline, bullets) in enumerate(groups, 1):
        lines.append(f"{n}. {title}:" + (f" {inline}" if inline else ""))
        lines.extend(f"   - {b}" for b in bullets)
    return "\n".join(lines)


def _render_trip(cs: ConstraintSet):
    windows = cs.of(FixedWindow)
    yield ("Total trip duration", f"{cs.first(TotalDuration).days} days", [])
    stays = []
    for stay in cs.of(CityStay):
        note = [f"Day {w.start_day}–{w.end_day}" for w in windows if w.city == stay.city]
        stays.append(f"{stay.city}: {stay.days} days" + (f" ({', '.join(note)})" if note else ""))
    yield ("Visit durations per city", "", stays) if stays else None
    events = [f"{w.reason} in {w.city} between Day {w.start_day}–{w.end_day}" for w in windows]
    if len(events) == 1:
        yield ("Fixed-date events", events[0], [])
    elif events:
        yield ("Fixed-date events", "", events)
    flights = []
    if cs.of(DirectFlightsOnly):
        flights.append("Direct flights only")
    if edges := cs.of(FlightEdge):
        flights.append("Direct flight connections: " + ", ".join(f"{e.city_a}–{e.city_b}" for e in edges))
    yield ("Flight constraints", "", flights) if flights else None


def _render_calendar(cs: ConstraintSet):
    if p := cs.first(Participants):
        yield ("Meeting Participants", ", ".join(p.names), [])
    yield ("Meeting Duration", _duration_text(cs.first(MeetingDuration).minutes), [])
    yield ("Meeting Day", cs.first(MeetingDay).day, [])
    if wh := cs.first(WorkHours):
        yield ("Allowed Meeting Hours", f"{format_clock(wh.start)}–{format_clock(wh.end)}", [])
    by_person: dict[str, list[str]] = {}
    for b in cs.of(BusyInterval):
        by_person.setdefault(b.person, []).append(f"{format_clock(b.start)}–{format_clock(b.end)}")
    if by_person:
        yield ("Blocked Schedules", "", [f"{who}: {', '.join(spans)}" for who, spans in by_person.items()])
    prefs = [p.text for p in cs.of(Preference)]
    if len(prefs) == 1:
        yield ("Meeting Preferences", prefs[0], [])
    elif prefs:
        yield ("Meeting Preferences", "", prefs)
    for f in cs.of(FeasibilityAsserted):
        yield ("Feasibility", str(f.flag), [])


def _render_meeting(cs: ConstraintSet):
    a = cs.first(ArrivalAt)
    yield ("Arrival Time Constraint", "", [f"You arrive at {a.location} at {format_clock(a.time, True)}"])
    if tt := cs.of(TravelTime):
        yield ("Travel Time Constraints", "", [f"{t.origin} → {t.destination}: {t.minutes} minutes" for t in tt])
    if av := cs.of(Availability):
        yield (
            "Availability Constraint",
            "",
            [f"{x.friend} is at {x.location} from {format_clock(x.start, True)}–{format_clock(x.end, True)}" for x in av],
        )
    if md := cs.of(MinMeetingDuration):
        yield ("Meeting Duration Constraint", "", [f"You want to meet {x.friend} for at least {x.minutes} minutes" for x in md])
    if cs.of(OptimizationGoal):
        yield ("Optimization Goal", "", ["Maximize the number of friends met"])


# --------------------------------------------------------------------------
# constraint list parsing (extractor output)

_HEADER = re.compile(r"^\s*\d+\s*[.)]\s*(?P<label>[^:]+?)\s*:\s*(?P<rest>.*)$")
_BULLET = re.compile(r"^\s*(?:--|-|–|—|•|\*)\s*(?P<body>.+)$")


def parse_constraint_text(
    task_kind: TaskKind, text: str, source: ConstraintSource = ConstraintSource.LLM_EXTRACT
) -> tuple[list, ParseDiagnostics]:
    """Parse a numbered constraint list into constraint items.

    Returns the recognized items and diagnostics; the caller decides how to
    treat an empty or incomplete result.
    """
    task_kind = TaskKind.parse(task_kind)
    diag = ParseDiagnostics()
    items: list = []
    label = ""
    offset = 0
    for raw in text.splitlines(keepends=True):
        line = raw.rstrip("\n")
        here, offset = offset, offset + len(raw)
        if not line.strip():
            continue
        line = line.replace("**", "").replace("\\;", " ").replace("\\quad", "")
        bodies = []
        if m := _HEADER.match(line):
            label = m.group("label").strip().lower()
            if m.group("rest").strip():
                bodies.append(m.group("rest").strip())
            elif _label_only(task_kind, label):
                bodies.append("")
            else:
                continue
        elif m := _BULLET.match(line):
            bodies.append(m.group("body").strip())
        else:
            bodies.append(line.strip())
        for body in bodies:
            try:
                got = _constraint_line(task_kind, label, body.rstrip(".").strip())
            except (ValueError, ConstraintError) as exc:
                diag.warnings.append(str(exc))
                got = None
            if got is None:
                diag.unrecognized(here, line)
            else:
                items.extend(got)
    # a goal may be given both as a header and as its bullet
    goals = [i for i, c in enumerate(items) if isinstance(c, OptimizationGoal)]
    for i in reversed(goals[1:]):
        del items[i]
    return items, diag


def _label_only(task_kind: TaskKind, label: str) -> bool:
    return task_kind is TaskKind.MEETING and label.startswith("optimization goal")


def _constraint_line(task_kind: TaskKind, label: str, body: str) -> list | None:
    if task_kind is TaskKind.TRIP:
        return _trip_line(label, body)
    if task_kind is TaskKind.CALENDAR:
        return _calendar_line(label, body)
    return _meeting_line(label, body)


def _trip_line(label: str, body: str) -> list | None:
    if label.startswith("total trip duration"):
        m = re.fullmatch(r"(\d+)\s*days?", body, re.I)
        return [TotalDuration(int(m.group(1)))] if m else None
    if label.startswith("visit duration"):
        m = re.fullmatch(r"(.+?):\s*(\d+)\s*days?(?:\s*\(.*\))?", body, re.I)
        return [CityStay(m.group(1).strip(), int(m.group(2)))] if m else None
    if label.startswith(("fixed-date event", "fixed date event", "timing constraint", "fixed event")):
        m = re.fullmatch(rf"(.+?) in (.+?) between day (\d+)(?:{DASH}|\s+and\s+day\s+)(\d+)", body, re.I)
        return [FixedWindow(m.group(2).strip(), int(m.group(3)), int(m.group(4)), event_reason(m.group(1)))] if m else None
    if label.startswith("flight"):
        if re.fullmatch(r"direct flights only", body, re.I):
            return [DirectFlightsOnly()]
        if m := re.fullmatch(r"direct flight connections?:\s*(.+)", body, re.I):
            edges = []
            for chunk in re.split(r"[,;]", m.group(1)):
                e = re.fullmatch(r"\s*(.+?)\s*(?:–|—|-|↔|<->|\band\b)\s*(.+?)\s*", chunk)
                if not e:
                    return None
                edges.append(FlightEdge(e.group(1), e.group(2)))
            return edges
    return None


def _calendar_line(label: str, body: str) -> list | None:
    if label.startswith("meeting participants"):
        return [Participants(_split_names(body))]
    if label.startswith("meeting duration"):
        return [MeetingDuration(_minutes(body))]
    if label.startswith("meeting day"):
        m = re.fullmatch(_DAY, body.strip(), re.I)
        return [MeetingDay(m.group("day").title())] if m else None
    if label.startswith(("allowed meeting hours", "work hours")):
        m = re.fullmatch(rf"(?:between\s+)?({TIME})(?:{DASH}|\s+and\s+)({TIME})", body, re.I)
        return [WorkHours(parse_clock(m.group(1)), parse_clock(m.group(2)))] if m else None
    if label.startswith(("blocked schedule", "busy")):
        m = re.fullmatch(r"(.+?):\s*(.+)", body)
        if not m:
            return None
        who = m.group(1).strip()
        return [BusyInterval(who, a, b) for a, b in _intervals(m.group(2))]
    if label.startswith("meeting preference"):
        return [Preference(body or "None")]
    if label.startswith("feasibility"):
        m = re.match(r"(true|false)\b", body, re.I)
        return [FeasibilityAsserted(m.group(1).lower() == "true")] if m else None
    return None


def _meeting_line(label: str, body: str) -> list | None:
    if label.startswith("arrival"):
        m = re.fullmatch(rf"(?:you arrive at )?(.+?) at ({TIME})", body, re.I)
        return [ArrivalAt(m.group(1).strip(), parse_clock(m.group(2)))] if m else None
    if label.startswith("travel time"):
        m = re.fullmatch(r"(.+?)\s*(?:→|->|\bto\b)\s*(.+?):\s*(\d+)(?:\s*minutes?)?", body, re.I)
        return [TravelTime(m.group(1).strip(), m.group(2).strip(), int(m.group(3)))] if m else None
    if label.startswith("availability"):
        m = re.fullmatch(rf"(.+?) (?:is|will be) at (.+?) from ({TIME}){DASH}({TIME})", body, re.I)
        if not m:
            return None
        return [Availability(m.group(1).strip(), m.group(2).strip(), parse_clock(m.group(3)), parse_clock(m.group(4)))]
    if label.startswith("meeting duration"):
        m = re.fullmatch(r"(?:you want to meet )?(.+?) for (?:at least|a minimum of) (\d+) minutes", body, re.I)
        return [MinMeetingDuration(m.group(1).strip(), int(m.group(2)))] if m else None
    if label.startswith("optimization goal"):
        return [OptimizationGoal()] if not body or re.search(r"maximi[sz]e|as many", body, re.I) else None
    return None


def constraint_set_from_text(task_kind: TaskKind, text: str) -> tuple[ConstraintSet, ParseDiagnostics]:
    items, diag = parse_constraint_text(task_kind, text)
    return build_constraint_set(TaskKind.parse(task_kind), items, ConstraintSource.LLM_EXTRACT), diag


# --------------------------------------------------------------------------
# plan text


def render_plan(plan: Plan) -> str:
    """Render a plan in the textual format that ``parse_plan_text`` reads."""
    if isinstance(plan, TripPlan):
        lines = []
        for i, seg in enumerate(plan.segments):
            if i == 0:
                lines.append(f"Day {seg.start_day}-{seg.end_day}: Arrive in {seg.city} and visit {seg.city} for {seg.days} days.")
            else:
                prev = plan.segments[i - 1]
                lines.append(f"Day {seg.start_day}: Fly from {prev.city} to {seg.city}.")
                lines.append(f"Day {seg.start_day}-{seg.end_day}: Visit {seg.city} for {seg.days} days.")
        return "\n".join(lines)
    if isinstance(plan, CalendarPlan):
        start, end = parse_clock(plan.start), parse_clock(plan.end)
        return f"Proposed meeting time: {plan.day}, {format_clock(start)}-{format_clock(end)}"
    if isinstance(plan, MeetingPlan):
        if not plan.events:
            return "No meetings are possible."
        return "\n".join(
            f"Meet {e.friend} at {e.location} from {format_clock(parse_clock(e.start), True)} to {format_clock(parse_clock(e.end), True)}."
            for e in plan.events
        )
    raise TypeError(f"not a plan: {plan!r}")


def parse_plan_text(task_kind: TaskKind, text: str) -> Plan:
    if not text or not text.strip():
        raise PlanParseError("plan text is empty")
    task_kind = TaskKind.parse(task_kind)
    lines = [ln.replace("**", "").replace("\\quad", "").strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if task_kind is TaskKind.TRIP:
        return _parse_trip_plan(lines)
    if task_kind is TaskKind.CALENDAR:
        return _parse_calendar_plan(lines)
    return _parse_meeting_plan(lines)


_CITY_AFTER_VERB = re.compile(
    r"(?:arriv\w*\s+(?:in|at)|visit(?:ing|s)?|stay(?:ing|s)?\s+in|remain(?:ing|s)?\s+in|spend\w*\s+.*?\s+in)\s+"
    r"(?P<city>.+?)(?=\s+(?:and|for|until|from|on)\b|[.,;!]|$)",
    re.I,
)


def _parse_trip_plan(lines: list[str]) -> TripPlan:
    segments = []
    for line in lines:
        m = re.search(r"Day\s*(\d+)\s*(?:(?:–|—|-|to)\s*(?:Day\s*)?(\d+))?\s*:\s*(.*)$", line, re.I)
        if not m:
            continue
        body = m.group(3)
        if re.match(r"(?:take a flight|fly|flight|travel)\b", body, re.I):
            continue
        c = _CITY_AFTER_VERB.search(body)
        if not c:
            continue
        start = int(m.group(1))
        end = int(m.group(2)) if m.group(2) else start
        segments.append(Segment(c.group("city").strip(), start, end))
    if not segments:
        raise PlanParseError("no itinerary lines found", lines[0] if lines else "")
    return TripPlan(tuple(segments))


def _parse_calendar_plan(lines: list[str]) -> CalendarPlan:
    for line in lines:
        m = re.search(rf"(?:{_DAY},?\s*)?(?P<a>{TIME}){DASH}(?P<b>{TIME})", line, re.I)
        if not m or not re.search(r":\d{2}", m.group(0)):
            continue
        day = m.group("day")
        if day is None:
            d = re.search(_DAY, " ".join(lines), re.I)
            if d is None:
                raise PlanParseError("meeting time has no day", line)
            day = d.group("day")
        return CalendarPlan(day.title(), parse_clock(m.group("a")), parse_clock(m.group("b")))
    raise PlanParseError("no meeting time found", lines[0] if lines else "")


_MEET_LINE = re.compile(
    rf"\bmeet\s+(?P<name>.+?)(?:\s+at\s+(?P<loc>.+?))?(?:\s+for\s+\d+\s+minutes)?,?\s+(?:from\s+)?"
    rf"(?P<a>{TIME}){DASH}(?P<b>{TIME})",
    re.I,
)


def _parse_meeting_plan(lines: list[str]) -> MeetingPlan:
    events = []
    location = None
    recognized = False
    for line in lines:
        for sentence in re.split(r"(?<=[.!?])\s+", line):
            if m := re.search(r"\b(?:start|arrive|are)\s+(?:at|in)\s+(.+?)(?:\s+at\s+\d|\s+in\s+\d|[.,]|$)", sentence, re.I):
                location = m.group(1).strip()
                recognized = True
            if m := re.search(r"\btravel\s+to\s+(.+?)(?:\s+in\s+\d|[.,]|$)", sentence, re.I):
                location = m.group(1).strip()
                recognized = True
            if re.search(r"no meetings are possible", sentence, re.I):
                recognized = True
            if m := _MEET_LINE.search(sentence):
                loc = (m.group("loc") or location or "").strip()
                if not loc:
                    raise PlanParseError("meeting has no location", sentence)
                events.append(MeetingEvent(m.group("name").strip(), loc, parse_clock(m.group("a")), parse_clock(m.group("b"))))
                location = loc
                recognized = True
    if not recognized:
        raise PlanParseError("no schedule lines found", lines[0] if lines else "")
    return MeetingPlan(tuple(events))
