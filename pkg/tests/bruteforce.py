"""Independent acceptance checker, written directly from constraint semantics.

Shares no code with the verifier beyond the data classes, so agreement between
the two is meaningful evidence.
"""

from itertools import permutations

from dualmem.domain import (
    ArrivalAt,
    Availability,
    BusyInterval,
    CalendarPlan,
    CityStay,
    DirectFlightsOnly,
    FixedWindow,
    FlightEdge,
    MeetingDay,
    MeetingDuration,
    MinMeetingDuration,
    OptimizationGoal,
    Preference,
    TotalDuration,
    TravelTime,
    TripPlan,
    WorkHours,
    parse_clock,
)
from dualmem.queryparse import preference_bounds


def _k(name):
    return " ".join(name.split()).casefold()


def accepts(cs, plan) -> bool:
    if isinstance(plan, TripPlan):
        return _trip(cs, plan)
    if isinstance(plan, CalendarPlan):
        return _calendar(cs, plan)
    return _meeting(cs, plan)


def _trip(cs, plan):
    segs = [(_k(s.city), s.start_day, s.end_day) for s in plan.segments]
    if not segs or segs[0][1] != 1:
        return False
    for (_, _, e), (_, s, _) in zip(segs, segs[1:]):
        if s != e:
            return False
    if any(e < s for _, s, e in segs):
        return False
    cities = [c for c, _, _ in segs]
    if len(set(cities)) != len(cities):
        return False
    stays = {_k(c.city): c.days for c in cs.items if isinstance(c, CityStay)}
    if stays and set(cities) != set(stays):
        return False
    span = {c: (s, e) for c, s, e in segs}
    for c in cs.items:
        if isinstance(c, TotalDuration) and segs[-1][2] != c.days:
            return False
        if isinstance(c, CityStay) and span[_k(c.city)][1] - span[_k(c.city)][0] + 1 != c.days:
            return False
        if isinstance(c, FixedWindow):
            s, e = span.get(_k(c.city), (None, None))
            if s is None or not (s <= c.start_day and c.end_day <= e):
                return False
    if any(isinstance(c, DirectFlightsOnly) for c in cs.items):
        edges = {frozenset((_k(c.city_a), _k(c.city_b))) for c in cs.items if isinstance(c, FlightEdge)}
        if any(frozenset(p) not in edges for p in zip(cities, cities[1:])):
            return False
    return True


def _calendar(cs, plan):
    start, end = parse_clock(plan.start), parse_clock(plan.end)
    for c in cs.items:
        if isinstance(c, MeetingDay) and _k(c.day) != _k(plan.day):
            return False
        if isinstance(c, MeetingDuration) and end - start != c.minutes:
            return False
        if isinstance(c, WorkHours) and not (c.start <= start and end <= c.end):
            return False
        if isinstance(c, BusyInterval) and start < c.end and c.start < end:
            return False
        if isinstance(c, Preference) and not c.is_none:
            bounds = preference_bounds(c.text)
            if bounds:
                lo, hi = bounds
                if (lo is not None and start < lo) or (hi is not None and end > hi):
                    return False
    return True


def _meeting_setup(cs):
    arrival = next(c for c in cs.items if isinstance(c, ArrivalAt))
    travel = {(_k(c.origin), _k(c.destination)): c.minutes for c in cs.items if isinstance(c, TravelTime)}
    avail = {_k(c.friend): c for c in cs.items if isinstance(c, Availability)}
    need = {_k(c.friend): c.minutes for c in cs.items if isinstance(c, MinMeetingDuration)}
    return arrival, travel, avail, need


def _hop(travel, a, b):
    return 0 if a == b else travel.get((a, b))


def _meeting(cs, plan):
    arrival, travel, avail, need = _meeting_setup(cs)
    where, now = _k(arrival.location), arrival.time
    seen = set()
    for ev in plan.events:
        f, loc = _k(ev.friend), _k(ev.location)
        s, e = parse_clock(ev.start), parse_clock(ev.end)
        if f in seen or f not in avail or loc != _k(avail[f].location):
            return False
        seen.add(f)
        hop = _hop(travel, where, loc)
        if hop is None or s < now + hop:
            return False
        if s < avail[f].start or e > avail[f].end or e - s < need.get(f, 1):
            return False
        where, now = loc, e
    if any(isinstance(c, OptimizationGoal) for c in cs.items):
        return len(plan.events) == max_met(cs)
    return True


def max_met(cs) -> int:
    """Largest number of friends reachable, by trying every visiting order."""
    arrival, travel, avail, need = _meeting_setup(cs)
    friends = sorted(avail)
    best = 0
    for r in range(len(friends), 0, -1):
        if r <= best:
            break
        for order in permutations(friends, r):
            where, now, ok = _k(arrival.location), arrival.time, True
            for f in order:
                loc = _k(avail[f].location)
                hop = _hop(travel, where, loc)
                if hop is None:
                    ok = False
                    break
                s = max(now + hop, avail[f].start)
                e = s + need.get(f, 1)
                if e > avail[f].end:
                    ok = False
                    break
                where, now = loc, e
            if ok:
                best = r
                break
    return best
