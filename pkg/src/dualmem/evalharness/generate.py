"""Seeded synthetic instances with known-feasible golden plans.

Each generator builds a plan first, derives constraints that the plan meets,
and renders them as query text in the same phrasing the query parser reads.
The parsed text is checked against the intended constraints, so a generated
instance always round-trips. In unique mode constraints are tightened until
the oracle enumerates exactly one plan.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from ..domain import QueryInstance, TaskKind, format_clock
from ..errors import GenerationError
from ..queryparse import parse_query
from ..solve import enumerate_all, solve
from ..solve.oracle import MAX_MEETING_FRIENDS, MAX_TRIP_CITIES
from ..verify import verify

CITIES = (
    "Amsterdam", "Athens", "Barcelona", "Berlin", "Brussels", "Budapest", "Copenhagen", "Dublin",
    "Florence", "Geneva", "Helsinki", "Krakow", "Lisbon", "London", "Lyon", "Madrid", "Milan",
    "Munich", "Naples", "Oslo", "Paris", "Porto", "Prague", "Riga", "Rome", "Seville",
    "Stockholm", "Tallinn", "Valencia", "Venice", "Vienna", "Vilnius", "Warsaw", "Zurich",
)  # fmt: skip

PEOPLE = (
    "Aaron", "Alice", "Bobby", "Carol", "Diane", "Emily", "Frank", "Gloria", "Harold", "Isabel",
    "Jacob", "Janice", "Kevin", "Laura", "Martin", "Megan", "Nancy", "Oliver", "Patrick", "Rachel",
    "Samuel", "Sharon", "Teresa", "Victor", "Walter", "Yvonne",
)  # fmt: skip

DISTRICTS = (
    "Alamo Square", "Bayview", "Chinatown", "Embarcadero", "Financial District", "Fisherman's Wharf",
    "Golden Gate Park", "Haight-Ashbury", "Marina District", "Mission District", "Nob Hill",
    "North Beach", "Presidio", "Richmond District", "Russian Hill", "Sunset District", "Union Square",
)  # fmt: skip

EVENTS = (
    ("meet a friend", "You want to meet a friend in {city} between day {a} and day {b}."),
    ("wedding", "From day {a} to day {b}, there is a wedding you want to attend in {city}."),
    ("workshop", "You have to attend a workshop in {city} between day {a} and day {b}."),
    ("conference", "From day {a} to day {b}, there is a conference you want to attend in {city}."),
    ("visit relatives", "You plan to visit relatives in {city} between day {a} and day {b}."),
)

_DURATION_TEXT = {30: "half an hour", 60: "one hour", 90: "90 minutes", 120: "two hours"}


@dataclass(frozen=True)
class Difficulty:
    """``size`` is cities, participants or friends; ``horizon`` is trip days or work-day hours."""

    size: int
    horizon: int | None = None
    unique: bool = False


def generate_instance(task_kind: TaskKind | str, difficulty: Difficulty, seed: int) -> QueryInstance:
    task_kind = TaskKind.parse(task_kind)
    rng = random.Random(f"{task_kind.value}/{difficulty.size}/{difficulty.horizon}/{difficulty.unique}/{seed}")
    build = {TaskKind.TRIP: _trip, TaskKind.CALENDAR: _calendar, TaskKind.MEETING: _meeting}[task_kind]
    query = build(rng, difficulty)
    cs, diag = parse_query(task_kind, query)
    if diag.unrecognized_spans:
        raise GenerationError(f"generated text did not parse cleanly: {diag.unrecognized_spans[0][2]!r}")
    golden = solve(cs)
    if golden is None or not verify(cs, golden).accepted:
        raise GenerationError("generated instance has no verified solution")
    if difficulty.unique and len(enumerate_all(cs, 2)) != 1:
        raise GenerationError("could not tighten the instance to a unique solution")
    tag = "u" if difficulty.unique else "n"
    return QueryInstance(
        id=f"{task_kind.value}-{difficulty.size}-{difficulty.horizon or 0}-{tag}-{seed}",
        task_kind=task_kind,
        query_text=query,
        golden_plan=golden,
    )


def synthesize(task_kind, count: int, difficulty, seed: int = 0) -> list[QueryInstance]:
    """``count`` instances with consecutive seeds; ``difficulty`` may be a list to cycle through."""
    levels = list(difficulty) if isinstance(difficulty, (list, tuple)) else [difficulty]
    return [generate_instance(task_kind, levels[i % len(levels)], seed + i) for i in range(count)]


def _unique_enough(task_kind: TaskKind, text: str) -> bool:
    cs, _ = parse_query(task_kind, text)
    return len(enumerate_all(cs, 2)) == 1


# --------------------------------------------------------------------------
# trip


def _trip(rng: random.Random, d: Difficulty) -> str:
    n = d.size
    horizon = d.horizon if d.horizon is not None else 3 * n + 2
    if not 2 <= n <= MAX_TRIP_CITIES:
        raise GenerationError(f"trip size must lie in [2, {MAX_TRIP_CITIES}]")
    # every stay is at least 2 days: sum(stays) - (n - 1) == horizon
    spare = horizon + n - 1 - 2 * n
    if spare < 0:
        raise GenerationError(f"{horizon} days are too few for {n} cities")
    cuts = sorted(rng.randint(0, spare) for _ in range(n - 1))
    extras = [b - a for a, b in zip([0] + cuts, cuts + [spare])]
    stays = [2 + e for e in extras]
    cities = rng.sample(CITIES, n)
    segments, day = [], 1
    for city, days in zip(cities, stays):
        segments.append((city, day, day + days - 1))
        day += days - 1

    edges = [(a, b) for a, b in zip(cities, cities[1:])]
    if not d.unique:
        for _ in range(rng.randint(0, n)):
            a, b = rng.sample(cities, 2)
            if (a, b) not in edges and (b, a) not in edges:
                edges.append((a, b))
    rng.shuffle(edges)
    edges = [e if rng.random() < 0.5 else (e[1], e[0]) for e in edges]

    order = list(range(n))
    rng.shuffle(order)
    windows = [order[0]]

    def render(window_idx) -> str:
        lines = [f"You plan to visit {n} European cities for {horizon} days in total.", "You only take direct flights to commute between cities."]
        pinned = {i: EVENTS[rng_events[i]] for i in window_idx}
        for i in stay_order:
            city, a, b = segments[i]
            lines.append(f"You would like to visit {city} for {stays[i]} days.")
            if i in pinned:
                lines.append(pinned[i][1].format(city=city, a=a, b=b))
        pairs = ", ".join(f"{a} and {b}" for a, b in edges)
        lines.append(f"Here are the cities that have direct flights: {pairs}.")
        lines.append(f"Find a trip plan of visiting the cities for {horizon} days by taking direct flights to commute between them.")
        return "\n".join(lines)

    stay_order = list(range(n))
    rng.shuffle(stay_order)
    rng_events = [rng.randrange(len(EVENTS)) for _ in range(n)]
    text = render(windows)
    if d.unique:
        for i in order[1:]:
            if _unique_enough(TaskKind.TRIP, text):
                break
            windows.append(i)
            text = render(windows)
    return text


# --------------------------------------------------------------------------
# calendar


def _calendar(rng: random.Random, d: Difficulty) -> str:
    n = d.size
    hours = d.horizon if d.horizon is not None else 8
    if not 1 <= n <= len(PEOPLE):
        raise GenerationError(f"calendar size must lie in [1, {len(PEOPLE)}]")
    if not 1 <= hours <= 14:
        raise GenerationError("work day must last between 1 and 14 hours")
    start_h = rng.choice((8, 9, 9, 10)) if hours <= 12 else 8
    work = (start_h * 60, (start_h + hours) * 60)
    length = rng.choice([m for m in (30, 60, 60, 90) if m <= hours * 60] or [30])
    cells = list(range(work[0], work[1] - length + 1, 30))
    slot = rng.choice(cells)
    taken = (slot, slot + length)
    day = rng.choice(("Monday", "Tuesday", "Wednesday", "Thursday", "Friday"))
    names = rng.sample(PEOPLE, n)

    busy: dict[str, set[int]] = {p: set() for p in names}
    free_cells = [c for c in range(work[0], work[1], 30) if c + 30 <= taken[0] or c >= taken[1]]
    for p in names:
        for c in free_cells:
            if rng.random() < 0.3:
                busy[p].add(c)

    preference = None
    if not d.unique and rng.random() < 0.3 and taken[1] < work[1]:
        cutoff = rng.choice(range(taken[1], work[1], 30))
        preference = f"{rng.choice(names)} would like to avoid more meetings on {day} after {format_clock(cutoff)}."

    def render() -> str:
        who = names[0] if n == 1 else ", ".join(names[:-1]) + " and " + names[-1]
        lines = [
            f"You need to schedule a meeting for {who} for {_DURATION_TEXT[length]} between the work hours of "
            f"{format_clock(work[0])} to {format_clock(work[1])} on {day}.",
            "Here are the existing schedules for everyone during the day:",
        ]
        for p in names:
            spans = _merge(sorted(busy[p]))
            if spans:
                joined = ", ".join(f"{format_clock(a)} to {format_clock(b)}" for a, b in spans)
                lines.append(f"{p} has meetings on {day} during {joined};")
            else:
                lines.append(f"{p} is free the entire day.")
        if preference:
            lines.append(preference)
        lines.append("Find a time that works for everyone's schedule and constraints.")
        return "\n".join(lines)

    text = render()
    if d.unique:
        while True:
            cs, _ = parse_query(TaskKind.CALENDAR, text)
            others = [p for p in enumerate_all(cs, 64) if p.start != slot]
            if not others:
                break
            other = rng.choice(others)
            s = other.start
            cell = s if s < slot else s + length - 30
            busy[rng.choice(names)].add(cell)
            text = render()
    return text


def _merge(cells: list[int]) -> list[tuple[int, int]]:
    spans: list[list[int]] = []
    for c in cells:
        if spans and spans[-1][1] == c:
            spans[-1][1] = c + 30
        else:
            spans.append([c, c + 30])
    return [tuple(s) for s in spans]


# --------------------------------------------------------------------------
# meeting


def _meeting(rng: random.Random, d: Difficulty) -> str:
    n = d.size
    if not 1 <= n <= MAX_MEETING_FRIENDS:
        raise GenerationError(f"meeting size must lie in [1, {MAX_MEETING_FRIENDS}]")
    places = rng.sample(DISTRICTS, n + 1)
    home, spots = places[0], places[1:]
    travel = {}
    for a in places:
        for b in places:
            if a != b:
                travel[(a, b)] = rng.randint(5, 30)
    friends = rng.sample(PEOPLE, n)
    arrive = 9 * 60
    # keep the whole day before 22:00
    budget = (22 * 60 - arrive) // n - 45
    lengths = [m for m in (15, 30, 45, 60, 75, 90, 105, 120) if m <= max(15, budget)]
    t, here = arrive, home
    plan = []
    for f, where in zip(friends, spots):
        t += travel[(here, where)] + rng.choice((0, 15))
        length = rng.choice(lengths)
        plan.append((f, where, t, t + length))
        t, here = t + length, where
    windows = {}
    for f, where, a, b in plan:
        windows[f] = (max(arrive, a - rng.choice((0, 15, 30, 60, 90))), min(23 * 60 + 30, b + rng.choice((0, 15, 30, 60, 90))))

    order = list(range(n))
    rng.shuffle(order)

    def render() -> str:
        lines = [
            "You are visiting San Francisco for the day and want to meet as many friends as possible.",
            "Solve the problem by considering various schedules and picking the best one to optimize your goals.",
            "Travel distances (in minutes):",
        ]
        lines += [f"{a} to {b}: {m}." for (a, b), m in travel.items()]
        lines.append(f"You arrive at {home} at {format_clock(arrive, True)}.")
        for i in order:
            f, where, a, b = plan[i]
            lo, hi = windows[f]
            lines.append(f"{f} will be at {where} from {format_clock(lo, True)} to {format_clock(hi, True)}.")
            lines.append(f"You'd like to meet {f} for a minimum of {b - a} minutes.")
        return "\n".join(lines)

    text = render()
    if d.unique:
        for i in order:
            if _unique_enough(TaskKind.MEETING, text):
                break
            f, _, a, b = plan[i]
            windows[f] = (a, b)
            text = render()
    return text

