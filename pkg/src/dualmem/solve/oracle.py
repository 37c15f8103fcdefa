"""Brute-force solvers, one per task family.

Every solver yields plans in a fixed order so that ``solve`` is simply the
first plan and ``enumerate_all`` a prefix of the full list:

* trip: city permutations in lexicographic order, restricted to direct-flight
  paths, days assigned left to right with shared flight days;
* calendar: slot starts on a fixed grid inside the work hours, earliest first;
* meeting: visit orders over friend subsets, largest subset first, then
  earliest finish, then lexicographic friend order. Each meeting starts as
  early as travel allows and lasts exactly its minimum duration.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import islice
from typing import Iterator

from ..domain import (
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
    MeetingEvent,
    MeetingPlan,
    MinMeetingDuration,
    OptimizationGoal,
    Plan,
    Preference,
    Segment,
    TaskKind,
    TotalDuration,
    TripPlan,
    WorkHours,
    canonical_name,
)
from ..errors import ArgumentError, InstanceTooLargeError
from ..queryparse import preference_bounds

MAX_TRIP_CITIES = 10
MAX_MEETING_FRIENDS = 10
DEFAULT_GRID = 30


def solve(cs: ConstraintSet, grid: int = DEFAULT_GRID) -> Plan | None:
    """First plan in solver order, or None when the instance is infeasible."""
    return _first(cs, grid)


@lru_cache(maxsize=4096)
def _first(cs: ConstraintSet, grid: int) -> Plan | None:
    return next(_plans(cs, grid), None)


def enumerate_all(cs: ConstraintSet, limit: int, grid: int = DEFAULT_GRID) -> list[Plan]:
    if limit <= 0:
        raise ArgumentError("limit must be positive")
    return list(islice(_plans(cs, grid), limit))


def _plans(cs: ConstraintSet, grid: int) -> Iterator[Plan]:
    if cs.task_kind is TaskKind.TRIP:
        return _trip_plans(cs)
    if cs.task_kind is TaskKind.CALENDAR:
        return _calendar_plans(cs, grid)
    return _meeting_plans(cs)


# --------------------------------------------------------------------------
# trip


def _trip_plans(cs: ConstraintSet) -> Iterator[TripPlan]:
    stays = cs.of(CityStay)
    if len(stays) > MAX_TRIP_CITIES:
        raise InstanceTooLargeError(f"{len(stays)} cities exceed the cap of {MAX_TRIP_CITIES}")
    if not stays:
        return
    total = cs.first(TotalDuration).days
    if sum(s.days for s in stays) - (len(stays) - 1) != total:
        return
    cities = sorted(stays, key=lambda s: canonical_name(s.city))
    direct = bool(cs.of(DirectFlightsOnly))
    edges = {e.key() for e in cs.of(FlightEdge)}
    windows: dict[str, list[FixedWindow]] = {}
    for w in cs.of(FixedWindow):
        windows.setdefault(canonical_name(w.city), []).append(w)
    stay_keys = {canonical_name(s.city) for s in stays}
    if any(city not in stay_keys for city in windows):
        return

    def extend(path: list[Segment], used: set[int], day: int) -> Iterator[TripPlan]:
        if len(path) == len(cities):
            yield TripPlan(tuple(path))
            return
        for k, stay in enumerate(cities):
            if k in used:
                continue
            key = canonical_name(stay.city)
            if path and direct and frozenset((canonical_name(path[-1].city), key)) not in edges:
                continue
            seg = Segment(stay.city, day, day + stay.days - 1)
            if any(not (seg.start_day <= w.start_day and w.end_day <= seg.end_day) for w in windows.get(key, ())):
                continue
            path.append(seg)
            used.add(k)
            yield from extend(path, used, seg.end_day)
            used.discard(k)
            path.pop()

    yield from extend([], set(), 1)


# --------------------------------------------------------------------------
# calendar


def _calendar_plans(cs: ConstraintSet, grid: int) -> Iterator[CalendarPlan]:
    if grid <= 0:
        raise ArgumentError("grid must be positive")
    day = cs.first(MeetingDay).day
    length = cs.first(MeetingDuration).minutes
    hours = cs.first(WorkHours)
    lo, hi = (hours.start, hours.end) if hours else (0, 24 * 60)
    for pref in cs.of(Preference):
        bounds = preference_bounds(pref.text)
        if bounds:
            lo = max(lo, bounds[0]) if bounds[0] is not None else lo
            hi = min(hi, bounds[1]) if bounds[1] is not None else hi
    busy = [(b.start, b.end) for b in cs.of(BusyInterval)]
    start = -(-lo // grid) * grid
    while start + length <= hi:
        end = start + length
        if all(end <= b0 or b1 <= start for b0, b1 in busy):
            yield CalendarPlan(day, start, end)
        start += grid


# --------------------------------------------------------------------------
# meeting


def _friends(cs: ConstraintSet) -> list[tuple[str, str, int, int, int]]:
    minimum = {canonical_name(m.friend): m.minutes for m in cs.of(MinMeetingDuration)}
    seen = set()
    out = []
    for a in cs.of(Availability):
        key = canonical_name(a.friend)
        if key in seen:
            continue
        seen.add(key)
        out.append((a.friend, a.location, a.start, a.end, minimum.get(key, 1)))
    if len(out) > MAX_MEETING_FRIENDS:
        raise InstanceTooLargeError(f"{len(out)} friends exceed the cap of {MAX_MEETING_FRIENDS}")
    return sorted(out, key=lambda f: canonical_name(f[0]))


@lru_cache(maxsize=4096)
def _meeting_schedules(cs: ConstraintSet) -> tuple[tuple[MeetingEvent, ...], ...]:
    """Every feasible earliest-start schedule, best first."""
    from ..verify import travel_minutes, travel_table

    arrival: ArrivalAt = cs.first(ArrivalAt)
    table = travel_table(cs)
    friends = _friends(cs)
    found: list[tuple[MeetingEvent, ...]] = []

    def extend(path: list[MeetingEvent], used: set[int], now: int, here: str) -> None:
        found.append(tuple(path))
        for k, (name, loc, open_, close, minutes) in enumerate(friends):
            if k in used:
                continue
            leg = travel_minutes(table, here, canonical_name(loc))
            if leg is None:
                continue
            start = max(open_, now + leg)
            if start + minutes > close:
                continue
            path.append(MeetingEvent(name, loc, start, start + minutes))
            used.add(k)
            extend(path, used, start + minutes, canonical_name(loc))
            used.discard(k)
            path.pop()

    extend([], set(), arrival.time, canonical_name(arrival.location))
    found.sort(key=lambda evs: (-len(evs), evs[-1].end if evs else 0, [canonical_name(e.friend) for e in evs]))
    return tuple(found)


def max_friends_met(cs: ConstraintSet) -> int:
    schedules = _meeting_schedules(cs)
    return len(schedules[0]) if schedules else 0


def _meeting_plans(cs: ConstraintSet) -> Iterator[MeetingPlan]:
    schedules = _meeting_schedules(cs)
    best = len(schedules[0])
    maximize = bool(cs.of(OptimizationGoal))
    for evs in schedules:
        if maximize and len(evs) < best:
            break
        yield MeetingPlan(evs)
