
import pytest
from golden import CALENDAR_QUERY, MEETING_QUERY, TRIP_QUERY

from dualmem.domain import (
    CMem,
    Mode,
    QMem,
    QMemEntry,
    QueryInstance,
    SessionConfig,
    TaskKind,
    Verdict,
    Violation,
)
from dualmem.orchestrate import (
    AgentBundle,
    MemoryView,
    ScriptedActor,
    SessionState,
    apply_mode,
    failing_actor,
    oracle_actor,
    reset_session,
    run_session,
    symbolic_agents,
    symbolic_extractor,
    symbolic_verifier,
)
from dualmem.queryparse import parse_query, render_constraints
from dualmem.solve import mutation_candidates, solve

QUERIES = {TaskKind.TRIP: TRIP_QUERY, TaskKind.CALENDAR: CALENDAR_QUERY, TaskKind.MEETING: MEETING_QUERY}


def _instance(kind):
    cs, _ = parse_query(kind, QUERIES[kind])
    return QueryInstance(f"ref-{kind.value}", kind, QUERIES[kind], solve(cs)), cs


def _bundle(kind, actor):
    return AgentBundle(symbolic_extractor(kind), actor, symbolic_verifier)


@pytest.mark.parametrize("kind", list(TaskKind))
def test_oracle_is_accepted_on_first_turn(kind):
    inst, _ = _instance(kind)
    trace = run_session(inst, SessionConfig(), symbolic_agents(kind, SessionConfig()))
    assert trace.accepted and trace.turns_used == 1 and trace.exact_match


@pytest.mark.parametrize("kind", list(TaskKind))
def test_self_correction_after_one_failure(kind):
    inst, cs = _instance(kind)
    actor = ScriptedActor([mutation_candidates(cs)[0][1], solve(cs)])
    trace = run_session(inst, SessionConfig(max_turns=5), _bundle(kind, actor))
    assert trace.accepted and trace.turns_used == 2
    assert trace.turns[1].qmem_size == 1
    assert len(actor.views[1].failures) == 1 and actor.views[1].qmem_errors_text


def test_failing_actor_uses_every_turn():
    inst, _ = _instance(TaskKind.TRIP)
    trace = run_session(inst, SessionConfig(max_turns=5), _bundle(TaskKind.TRIP, failing_actor(TaskKind.TRIP)))
    assert not trace.accepted and trace.turns_used == 5
    assert [t.qmem_size for t in trace.turns] == [0, 1, 2, 3, 4]
    assert trace.exact_match is False


def test_single_mode_runs_one_turn():
    inst, _ = _instance(TaskKind.TRIP)
    config = SessionConfig(max_turns=5, mode="single")
    trace = run_session(inst, config, _bundle(TaskKind.TRIP, failing_actor(TaskKind.TRIP)))
    assert trace.turns_used == 1


def _memories(n_failures=3):
    cs, _ = parse_query(TaskKind.TRIP, TRIP_QUERY)
    cmem = CMem(cs, render_constraints(cs))
    qmem = QMem()
    for t, (_, plan) in enumerate(mutation_candidates(cs)[:n_failures], start=1):
        qmem.append(QMemEntry(t, plan, 50, (Violation(None, f"bad {t}"),)))
    return cmem, qmem


def test_mode_views():
    cmem, qmem = _memories()
    assert apply_mode(Mode.SINGLE_AGENT, 4, cmem, qmem) == MemoryView()
    reflect = apply_mode(Mode.SELF_REFLECT, 4, cmem, qmem)
    assert reflect.previous_plan == qmem.entries[-1].plan and reflect.cmem_text is None and reflect.critique
    first = apply_mode(Mode.MULTI_ROUND, 1, cmem, QMem())
    later = apply_mode(Mode.MULTI_ROUND, 4, cmem, qmem)
    assert first.cmem_text == cmem.rendered_text and later.cmem_text is None
    assert [e.turn for e in later.failures] == [3]
    cm = apply_mode(Mode.MULTI_ROUND_CMEM, 4, cmem, qmem)
    assert cm.cmem_text == cmem.rendered_text and [e.turn for e in cm.failures] == [3]
    full = apply_mode(Mode.FULL, 4, cmem, qmem)
    assert [e.turn for e in full.failures] == [1, 2, 3]
    assert "bad 1" in full.qmem_errors_text and "bad 3" in full.qmem_errors_text
    assert [e.turn for e in apply_mode(Mode.FULL, 4, cmem, qmem, "latest").failures] == [3]


def test_information_grows_along_the_ladder():
    cmem, qmem = _memories()
    cm = apply_mode(Mode.MULTI_ROUND_CMEM, 4, cmem, qmem).information()
    full = apply_mode(Mode.FULL, 4, cmem, qmem).information()
    multi = apply_mode(Mode.MULTI_ROUND, 4, cmem, qmem).information()
    assert multi <= cm <= full and cm < full


def test_constraint_memory_is_fixed_across_turns():
    inst, _ = _instance(TaskKind.MEETING)
    actor = failing_actor(TaskKind.MEETING)
    seen = []

    def watch(q, view, rng):
        seen.append(view.cmem_text)
        return actor(q, view, rng)

    run_session(inst, SessionConfig(max_turns=4), _bundle(TaskKind.MEETING, watch))
    assert len(seen) == 4 and len(set(seen)) == 1 and seen[0]


def test_sessions_do_not_leak_between_queries():
    state = SessionState()
    config = SessionConfig(max_turns=3)
    trip, _ = _instance(TaskKind.TRIP)
    cal, _ = _instance(TaskKind.CALENDAR)
    first = run_session(trip, config, _bundle(TaskKind.TRIP, failing_actor(TaskKind.TRIP)), state)
    assert state.sizes() == (0, 0)
    middle = run_session(cal, config, _bundle(TaskKind.CALENDAR, failing_actor(TaskKind.CALENDAR)), state)
    again = run_session(trip, config, _bundle(TaskKind.TRIP, failing_actor(TaskKind.TRIP)), state)
    assert middle.turns[0].view.failures == ()
    assert [t.view for t in first.turns] == [t.view for t in again.turns]
    assert [t.plan for t in first.turns] == [t.plan for t in again.turns]


def test_reset_is_idempotent():
    cmem, qmem = _memories()
    state = SessionState(cmem, qmem)
    reset_session(state)
    reset_session(state)
    assert state.sizes() == (0, 0) and state.cmem is None


def test_extractor_failure_is_recorded():
    inst, _ = _instance(TaskKind.TRIP)

    def broken(_):
        raise RuntimeError("model went away")

    state = SessionState()
    trace = run_session(inst, SessionConfig(), AgentBundle(broken, oracle_actor(TaskKind.TRIP), symbolic_verifier), state)
    assert not trace.accepted and trace.turns_used == 0
    assert "model went away" in trace.error
    assert state.sizes() == (0, 0)


def test_actor_error_consumes_a_turn():
    inst, cs = _instance(TaskKind.CALENDAR)
    calls = []

    def flaky(q, view, rng):
        calls.append(1)
        if len(calls) == 1:
            raise ValueError("unparseable answer")
        return solve(cs)

    trace = run_session(inst, SessionConfig(), _bundle(TaskKind.CALENDAR, flaky))
    assert trace.accepted and trace.turns_used == 2
    assert "unparseable" in trace.turns[0].error and trace.turns[1].qmem_size == 0


def test_verifier_with_violations_never_accepts():
    inst, cs = _instance(TaskKind.TRIP)

    def stubborn(q, c, plan):
        return Verdict(99, (Violation(0, "nope"),))

    trace = run_session(inst, SessionConfig(max_turns=2), AgentBundle(symbolic_extractor(TaskKind.TRIP), oracle_actor(TaskKind.TRIP), stubborn))
    assert not trace.accepted and trace.turns_used == 2


def test_seeded_sessions_repeat():
    inst, _ = _instance(TaskKind.MEETING)
    config = SessionConfig(max_turns=5, actor_kind="noisy", error_rate=0.6, seed=17)
    a = run_session(inst, config, symbolic_agents(TaskKind.MEETING, config))
    b = run_session(inst, config, symbolic_agents(TaskKind.MEETING, config))
    assert [t.plan for t in a.turns] == [t.plan for t in b.turns]


def test_llm_actor_needs_transport():
    with pytest.raises(ValueError):
        symbolic_agents(TaskKind.TRIP, SessionConfig(actor_kind="llm"))
