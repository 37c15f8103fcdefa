"""Seeded noisy actor: corrupts oracle plans with a fixed mutation set.

The mutation space of an instance is finite and deterministic. The actor never
re-emits a plan it can see in its failure memory while an untried mutation is
left; once every mutation has been tried it falls back to the correct plan.
"""

from __future__ import annotations

import random
from enum import Enum
from functools import lru_cache
from typing import Iterable

from ..domain import (
    BusyInterval,
    CalendarPlan,
    ConstraintSet,
    MeetingDuration,
    MeetingEvent,
    MeetingPlan,
    Plan,
    QMemEntry,
    Segment,
    TripPlan,
    WorkHours,
    canonicalize_plan,
)
from ..errors import CanonicalizationError, InfeasibleError
from ..verify import verify
from .oracle import solve


class MutationKind(str, Enum):
    SHIFT_TRIP_SEGMENT = "shift_trip_segment"
    SHRINK_STAY = "shrink_stay"
    SWAP_ADJACENT_CITIES = "swap_adjacent_cities"
    PICK_BUSY_SLOT = "pick_busy_slot"
    SHIFT_SLOT_OUTSIDE_HOURS = "shift_slot_outside_hours"
    TRUNCATE_MEETING = "truncate_meeting"
    DROP_EVENT = "drop_event"


def _trip_variants(plan: TripPlan):
    segs = plan.segments
    for j in range(len(segs) - 1):
        for delta in (-2, -1, 1, 2):
            b = segs[j].end_day + delta
            if segs[j].start_day <= b <= segs[j + 1].end_day:
                new = list(segs)
                new[j] = Segment(segs[j].city, segs[j].start_day, b)
                new[j + 1] = Segment(segs[j + 1].city, b, segs[j + 1].end_day)
                yield MutationKind.SHIFT_TRIP_SEGMENT, TripPlan(tuple(new))
    for i, seg in enumerate(segs):
        if seg.days < 2:
            continue
        new = list(segs[:i]) + [Segment(seg.city, seg.start_day, seg.end_day - 1)]
        new += [Segment(s.city, s.start_day - 1, s.end_day - 1) for s in segs[i + 1 :]]
        yield MutationKind.SHRINK_STAY, TripPlan(tuple(new))
    for i in range(len(segs) - 1):
        new = list(segs)
        new[i] = Segment(segs[i + 1].city, segs[i].start_day, segs[i].end_day)
        new[i + 1] = Segment(segs[i].city, segs[i + 1].start_day, segs[i + 1].end_day)
        yield MutationKind.SWAP_ADJACENT_CITIES, TripPlan(tuple(new))


def _calendar_variants(cs: ConstraintSet, plan: CalendarPlan):
    length = cs.first(MeetingDuration).minutes
    for b in cs.of(BusyInterval):
        if b.start + length <= 24 * 60:
            yield MutationKind.PICK_BUSY_SLOT, CalendarPlan(plan.day, b.start, b.start + length)
    hours = cs.first(WorkHours)
    if hours:
        if hours.start - length >= 0:
            yield MutationKind.SHIFT_SLOT_OUTSIDE_HOURS, CalendarPlan(plan.day, hours.start - length, hours.start)
        if hours.end + length <= 24 * 60:
            yield MutationKind.SHIFT_SLOT_OUTSIDE_HOURS, CalendarPlan(plan.day, hours.end, hours.end + length)


def _meeting_variants(plan: MeetingPlan):
    events = plan.events
    for i, ev in enumerate(events):
        cut = 15
        while ev.end - cut > ev.start:
            new = list(events)
            new[i] = MeetingEvent(ev.friend, ev.location, ev.start, ev.end - cut)
            yield MutationKind.TRUNCATE_MEETING, MeetingPlan(tuple(new))
            cut += 15
    for i in range(len(events)):
        yield MutationKind.DROP_EVENT, MeetingPlan(events[:i] + events[i + 1 :])


@lru_cache(maxsize=4096)
def mutation_candidates(cs: ConstraintSet) -> tuple[tuple[MutationKind, Plan], ...]:
    """All distinct mutated plans of the oracle plan that fail verification."""
    base = solve(cs)
    if base is None:
        raise InfeasibleError("instance has no solution to mutate")
    if isinstance(base, TripPlan):
        variants = _trip_variants(base)
    elif isinstance(base, CalendarPlan):
        variants = _calendar_variants(cs, base)
    else:
        variants = _meeting_variants(base)
    seen = {canonicalize_plan(base)}
    out = []
    for kind, plan in variants:
        try:
            key = canonicalize_plan(plan)
        except CanonicalizationError:
            continue
        if key in seen or verify(cs, plan).score >= 100:
            continue
        seen.add(key)
        out.append((kind, plan))
    return tuple(out)


def noisy_actor_step(
    cs: ConstraintSet,
    qmem: Iterable[QMemEntry],
    error_rate: float,
    rng: random.Random,
) -> Plan:
    """Return the oracle plan with probability ``1 - error_rate``, else a mutation.

    Mutations already present in ``qmem`` are skipped; when none remain the
    oracle plan is returned.
    """
    if not 0.0 <= error_rate <= 1.0:
        raise ValueError("error_rate must lie in [0, 1]")
    correct = solve(cs)
    if correct is None:
        raise InfeasibleError("instance has no solution")
    if rng.random() >= error_rate:
        return correct
    tried = set()
    for entry in qmem:
        try:
            tried.add(canonicalize_plan(entry.plan))
        except CanonicalizationError:
            pass
    untried = [p for _, p in mutation_candidates(cs) if canonicalize_plan(p) not in tried]
    if not untried:
        return correct
    return rng.choice(untried)
