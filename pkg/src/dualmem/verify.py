"""Deterministic plan verifier with per-constraint violation reasons."""

from __future__ import annotations

from dataclasses import dataclass

from .domain import (
    ArrivalAt,
    Availability,
    BusyInterval,
    CalendarPlan,
    CityStay,
    ConstraintSet,
    DirectFlightsOnly,
    FixedWindow,
    FlightEdge,
    MeetingDay,
    MeetingDuration,
    MeetingPlan,
    MinMeetingDuration,
    OptimizationGoal,
    Plan,
    Preference,
    TaskKind,
    TotalDuration,
    TravelTime,
    TripPlan,
    Verdict,
    Violation,
    WorkHours,
    canonical_name,
    canonicalize_plan,
    format_clock,
)
from .errors import CanonicalizationError, EmptyConstraintsError, TypeMismatchError
from .queryparse import preference_bounds


@dataclass(frozen=True)
class CheckOutcome:
    """Result of checking one constraint item.

    ``constraint_index`` is None for structural checks that belong to no single
    item (unknown cities, repeated visits, unknown travel legs). Those do not
    count toward the score ratio, but a failed one caps the score at 99.
    """

    constraint_index: int | None
    satisfied: bool
    reason: str = ""


def compute_score(outcomes: list[CheckOutcome]) -> int:
    if not outcomes:
        raise EmptyConstraintsError("no checkable constraints")
    counted = [o for o in outcomes if o.constraint_index is not None] or outcomes
    score = 100 * sum(o.satisfied for o in counted) // len(counted)
    if any(not o.satisfied for o in outcomes if o.constraint_index is None):
        score = min(score, 99)
    return score


def verify(cs: ConstraintSet, plan: Plan) -> Verdict:
    if plan.task_kind is not cs.task_kind:
        raise TypeMismatchError(f"{plan.task_kind.value} plan checked against {cs.task_kind.value} constraints")
    if not cs.items:
        raise EmptyConstraintsError("constraint set is empty")
    try:
        outcomes = check(cs, plan)
    except CanonicalizationError as exc:
        return Verdict(0, (Violation(None, f"Plan is malformed: {exc}"),))
    score = compute_score(outcomes)
    violations = tuple(Violation(o.constraint_index, o.reason) for o in outcomes if not o.satisfied)
    return Verdict(score, violations)


def check(cs: ConstraintSet, plan: Plan) -> list[CheckOutcome]:
    """One outcome per checkable constraint plus any structural outcomes."""
    plan = canonicalize_plan(plan)
    if cs.task_kind is TaskKind.TRIP:
        return _check_trip(cs, plan)
    if cs.task_kind is TaskKind.CALENDAR:
        return _check_calendar(cs, plan)
    return _check_meeting(cs, plan)


def _fail(index, reason) -> CheckOutcome:
    return CheckOutcome(index, False, reason)


def _ok(index) -> CheckOutcome:
    return CheckOutcome(index, True)


# --------------------------------------------------------------------------
# trip


def _check_trip(cs: ConstraintSet, plan: TripPlan) -> list[CheckOutcome]:
    outcomes = []
    segs = plan.segments
    by_city = {s.city: s for s in segs}
    requested = {canonical_name(c.city) for c in cs.of(CityStay)}

    structural = []
    seen = set()
    for s in segs:
        if s.city in seen:
            structural.append(f"Plan visits {s.city.title()} more than once")
        seen.add(s.city)
        if requested and s.city not in requested:
            structural.append(f"Plan visits {s.city.title()}, which is not one of the requested cities")
    outcomes.append(_fail(None, "; ".join(structural)) if structural else _ok(None))

    edges = {e.key() for e in cs.of(FlightEdge)}
    for i, c in enumerate(cs.items):
        if isinstance(c, TotalDuration):
            covered = sum(s.days for s in segs) - (len(segs) - 1)
            if covered == c.days:
                outcomes.append(_ok(i))
            else:
                outcomes.append(
                    _fail(i, f"Total trip duration is incorrect: the itinerary covers {covered} days but the trip must last {c.days} days")
                )
        elif isinstance(c, CityStay):
            seg = by_city.get(canonical_name(c.city))
            if seg is None:
                outcomes.append(_fail(i, f"{c.city} is not visited: the plan must spend {c.days} days there"))
            elif seg.days != c.days:
                outcomes.append(
                    _fail(
                        i,
                        f"{c.city} visit duration is incorrect: {c.days} days are required but the itinerary "
                        f"covers {seg.days} days (Day {seg.start_day}–{seg.end_day})",
                    )
                )
            else:
                outcomes.append(_ok(i))
        elif isinstance(c, FixedWindow):
            seg = by_city.get(canonical_name(c.city))
            if seg is not None and seg.start_day <= c.start_day and c.end_day <= seg.end_day:
                outcomes.append(_ok(i))
            else:
                where = f"Day {seg.start_day}–{seg.end_day}" if seg else "no days"
                outcomes.append(
                    _fail(
                        i,
                        f"Fixed-date event missed: {c.reason} in {c.city} between Day {c.start_day}–{c.end_day}, "
                        f"but the plan is in {c.city} on {where}",
                    )
                )
        elif isinstance(c, DirectFlightsOnly):
            bad = [
                f"{a.city.title()}–{b.city.title()}"
                for a, b in zip(segs, segs[1:])
                if frozenset((a.city, b.city)) not in edges
            ]
            if bad:
                outcomes.append(_fail(i, f"No direct flight for transition(s): {', '.join(bad)}"))
            else:
                outcomes.append(_ok(i))
    return outcomes


# --------------------------------------------------------------------------
# calendar


def _check_calendar(cs: ConstraintSet, plan: CalendarPlan) -> list[CheckOutcome]:
    outcomes = []
    slot = f"{format_clock(plan.start)}–{format_clock(plan.end)}"
    for i, c in enumerate(cs.items):
        if isinstance(c, MeetingDay):
            if canonical_name(c.day) == plan.day:
                outcomes.append(_ok(i))
            else:
                outcomes.append(_fail(i, f"Meeting day is incorrect: the plan uses {plan.day.title()} but the meeting must be on {c.day}"))
        elif isinstance(c, MeetingDuration):
            length = plan.end - plan.start
            if length == c.minutes:
                outcomes.append(_ok(i))
            else:
                outcomes.append(_fail(i, f"Meeting duration is incorrect: {slot} lasts {length} minutes but {c.minutes} minutes are required"))
        elif isinstance(c, WorkHours):
            if c.start <= plan.start and plan.end <= c.end:
                outcomes.append(_ok(i))
            else:
                outcomes.append(
                    _fail(i, f"The proposed meeting time of {slot} falls outside the allowed hours {format_clock(c.start)}–{format_clock(c.end)}")
                )
        elif isinstance(c, BusyInterval):
            if plan.end <= c.start or c.end <= plan.start:
                outcomes.append(_ok(i))
            else:
                outcomes.append(
                    _fail(
                        i,
                        f"{c.person} is busy from {format_clock(c.start)} to {format_clock(c.end)}, "
                        f"overlapping with the proposed meeting time of {slot}",
                    )
                )
        elif isinstance(c, Preference):
            bounds = preference_bounds(c.text)
            if bounds is None:
                continue
            lo, hi = bounds
            if (lo is None or plan.start >= lo) and (hi is None or plan.end <= hi):
                outcomes.append(_ok(i))
            else:
                outcomes.append(_fail(i, f"Meeting preference not respected ({c.text}): proposed time is {slot}"))
    return outcomes


# --------------------------------------------------------------------------
# meeting


def travel_table(cs: ConstraintSet) -> dict[tuple[str, str], int]:
    return {(canonical_name(t.origin), canonical_name(t.destination)): t.minutes for t in cs.of(TravelTime)}


def travel_minutes(table: dict[tuple[str, str], int], a: str, b: str) -> int | None:
    if a == b:
        return 0
    return table.get((a, b))


def _check_meeting(cs: ConstraintSet, plan: MeetingPlan) -> list[CheckOutcome]:
    from .solve.oracle import max_friends_met

    outcomes = []
    events = plan.events
    table = travel_table(cs)
    known = {canonical_name(a.friend) for a in cs.of(Availability)}
    met = [e.friend for e in events]

    structural = []
    arrival = cs.first(ArrivalAt)
    if events and travel_minutes(table, canonical_name(arrival.location), events[0].location) is None:
        structural.append(f"No travel time is known from {arrival.location} to {events[0].location.title()}")
    for e in events:
        if e.friend not in known:
            structural.append(f"{e.friend.title()} is not one of the friends in the query")
    if len(set(met)) != len(met):
        structural.append("A friend is met more than once")
    for a, b in zip(events, events[1:]):
        if travel_minutes(table, a.location, b.location) is None:
            structural.append(f"No travel time is known from {a.location.title()} to {b.location.title()}")
        elif a.location == b.location and b.start < a.end:
            structural.append(f"Meetings with {a.friend.title()} and {b.friend.title()} overlap")
    outcomes.append(_fail(None, "; ".join(structural)) if structural else _ok(None))

    for i, c in enumerate(cs.items):
        if isinstance(c, ArrivalAt):
            if not events:
                outcomes.append(_ok(i))
                continue
            first = events[0]
            here = canonical_name(c.location)
            leg = travel_minutes(table, here, first.location)
            if leg is not None and c.time + leg > first.start:
                outcomes.append(
                    _fail(
                        i,
                        f"Arrival Time Constraint: arriving at {c.location} at {format_clock(c.time, True)} and travelling "
                        f"{leg} minutes, you cannot meet {first.friend.title()} at {format_clock(first.start, True)}",
                    )
                )
            else:
                outcomes.append(_ok(i))
        elif isinstance(c, TravelTime):
            key = (canonical_name(c.origin), canonical_name(c.destination))
            late = [
                (a, b)
                for a, b in zip(events, events[1:])
                if (a.location, b.location) == key and a.end + c.minutes > b.start
            ]
            if late:
                a, b = late[0]
                outcomes.append(
                    _fail(
                        i,
                        f"Travel Time Constraint: leaving {c.origin} at {format_clock(a.end, True)} takes {c.minutes} minutes, "
                        f"so {c.destination} cannot be reached by {format_clock(b.start, True)} to meet {b.friend.title()}",
                    )
                )
            else:
                outcomes.append(_ok(i))
        elif isinstance(c, Availability):
            ev = _event_for(events, c.friend)
            if ev is None:
                outcomes.append(_ok(i))
            elif ev.location != canonical_name(c.location):
                outcomes.append(_fail(i, f"Availability Constraint: {c.friend} is at {c.location}, not at {ev.location.title()}"))
            elif ev.start < c.start or ev.end > c.end:
                outcomes.append(
                    _fail(
                        i,
                        f"Availability Constraint: {c.friend} is only available from {format_clock(c.start, True)} to "
                        f"{format_clock(c.end, True)}, but the meeting runs {format_clock(ev.start, True)} to {format_clock(ev.end, True)}",
                    )
                )
            else:
                outcomes.append(_ok(i))
        elif isinstance(c, MinMeetingDuration):
            ev = _event_for(events, c.friend)
            if ev is None or ev.end - ev.start >= c.minutes:
                outcomes.append(_ok(i))
            else:
                outcomes.append(
                    _fail(
                        i,
                        f"Meeting Duration Constraint: The meeting with {c.friend} only lasts {ev.end - ev.start} minutes "
                        f"(from {format_clock(ev.start, True)} to {format_clock(ev.end, True)}), which is less than the "
                        f"required minimum duration of {c.minutes} minutes",
                    )
                )
        elif isinstance(c, OptimizationGoal):
            best = max_friends_met(cs)
            count = len(set(met))
            if count >= best:
                outcomes.append(_ok(i))
            else:
                outcomes.append(_fail(i, f"Optimization Goal: the plan meets {count} friend(s) but {best} can be met"))
    return outcomes


def _event_for(events, friend):
    key = canonical_name(friend)
    for e in events:
        if e.friend == key:
            return e
    return None
