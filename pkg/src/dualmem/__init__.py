"""Actor/verifier planning loop with per-query constraint and feedback memory."""

from .domain import (
    CalendarPlan,
    ConstraintSet,
    MeetingEvent,
    MeetingPlan,
    Mode,
    QueryInstance,
    Segment,
    SessionConfig,
    TaskKind,
    TripPlan,
    Verdict,
    Violation,
    canonicalize_plan,
    exact_match,
)
from .orchestrate import AgentBundle, run_session, symbolic_agents
from .queryparse import parse_query, render_constraints, render_plan
from .solve import enumerate_all, solve
from .verify import verify

__version__ = "0.1.0"

__all__ = [
    "AgentBundle",
    "CalendarPlan",
    "ConstraintSet",
    "MeetingEvent",
    "MeetingPlan",
    "Mode",
    "QueryInstance",
    "Segment",
    "SessionConfig",
    "TaskKind",
    "TripPlan",
    "Verdict",
    "Violation",
    "canonicalize_plan",
    "enumerate_all",
    "exact_match",
    "parse_query",
    "render_constraints",
    "render_plan",
    "run_session",
    "solve",
    "symbolic_agents",
    "verify",
]
