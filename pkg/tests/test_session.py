import pytest

from fxscout.semantics import describe
from fxscout.session import (SessionError, SessionManager,
                             UnknownSessionError)


@pytest.fixture()
def manager(small_index, providers, config):
    return SessionManager(small_index, providers, config)


def intent(providers, text="golden ring of sparks"):
    llm, emb = providers
    return describe(text, llm, emb)


def seeded_session(manager, providers, w=0.5):
    return manager.create_session(intent(providers), None, w,
                                  intent_text="golden ring of sparks")


def run_rounds(manager, session, n):
    for _ in range(n):
        choice = session.current_round.presented[0]
        session = manager.select_and_advance(session.id, choice)
    return session


def test_create_session_runs_first_round(manager, providers, config):
    session = seeded_session(manager, providers)
    assert session.id.startswith("session-")
    assert len(session.rounds) == 1
    assert session.rounds[0].mode == "local"
    assert len(session.rounds[0].presented) == config.top_k
    assert session.events[0]["type"] == "create"


def test_create_requires_some_intent(manager):
    with pytest.raises(SessionError):
        manager.create_session(None, None, 0.5)


def test_duplicate_session_id_rejected(manager, providers):
    manager.create_session(intent(providers), None, 0.5, session_id="s1")
    with pytest.raises(SessionError):
        manager.create_session(intent(providers), None, 0.5,
                               session_id="s1")


def test_unknown_session(manager):
    with pytest.raises(UnknownSessionError):
        manager.get("nope")
    with pytest.raises(UnknownSessionError):
        manager.select_and_advance("nope", "fx")


def test_mode_sequence_over_six_rounds(manager, providers):
    session = seeded_session(manager, providers)
    session = run_rounds(manager, session, 5)
    assert [r.mode for r in session.rounds] == \
        ["local", "local", "directional", "local", "directional", "local"]


def test_selection_must_be_presented(manager, providers):
    session = seeded_session(manager, providers)
    absent = next(i for i in manager.index.ids
                  if i not in session.current_round.presented)
    with pytest.raises(SessionError):
        manager.select_and_advance(session.id, absent)


def test_no_effect_presented_twice(manager, providers):
    session = seeded_session(manager, providers)
    session = run_rounds(manager, session, 5)
    seen = [e for r in session.rounds for e in r.presented]
    assert len(seen) == len(set(seen))


def test_weight_update_validated(manager, providers):
    session = seeded_session(manager, providers)
    choice = session.current_round.presented[0]
    with pytest.raises(SessionError):
        manager.select_and_advance(session.id, choice, w=1.5)
    session = manager.select_and_advance(session.id, choice, w=0.9)
    assert session.w == 0.9


def test_exhaustion_yields_short_rounds(small_index, providers, config):
    # a 36-effect corpus runs out after nine 4-effect rounds
    manager = SessionManager(small_index, providers, config)
    session = seeded_session(manager, providers)
    for _ in range(9):
        if not session.current_round.presented:
            break
        session = manager.select_and_advance(
            session.id, session.current_round.presented[0])
    total = sum(len(r.presented) for r in session.rounds)
    assert total <= len(small_index.ids)


def test_replay_reproduces_candidates(manager, small_index, providers,
                                      config):
    session = seeded_session(manager, providers)
    session = run_rounds(manager, session, 5)
    fresh = SessionManager(small_index, providers, config)
    replayed = fresh.replay(session.events)
    assert [r.presented for r in replayed.rounds] == \
        [r.presented for r in session.rounds]
    assert [r.mode for r in replayed.rounds] == \
        [r.mode for r in session.rounds]
    assert [r.results for r in replayed.rounds] == \
        [r.results for r in session.rounds]


def test_replay_rejects_malformed_log(manager):
    with pytest.raises(SessionError):
        manager.replay([])
    with pytest.raises(SessionError):
        manager.replay([{"type": "select", "effect_id": "x"}])


def test_session_to_dict(manager, providers):
    session = seeded_session(manager, providers)
    doc = session.to_dict()
    assert doc["id"] == session.id
    assert len(doc["rounds"]) == 1
    assert doc["rounds"][0]["results"][0]["effect_id"] == \
        session.rounds[0].presented[0]
