"""Exploration sessions: intent, alternating rounds, append-only event log.

Round 1 searches locally from the user's intent, round 2 locally from the
first selection, and from round 3 on the mode strictly alternates between
directional (driven by the last two selections) and local. Every mutation is
recorded as an event; replaying a session's log against the same index
reproduces the identical candidate lists, which doubles as an integration
test of engine determinism.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field

from .config import EngineConfig
from .kinematics import Kinematics
from .metrics import MetricParams
from .search import (RankedResult, SearchConstraint, directional_explore,
                     local_explore, search_topk)
from .semantics import SemanticDescriptor


class SessionError(ValueError):
    pass


class UnknownSessionError(KeyError):
    pass


@dataclass
class Round:
    mode: str                      # local | directional
    presented: list[str]
    results: list[RankedResult]
    selected: str | None = None

    def to_dict(self) -> dict:
        return {"mode": self.mode,
                "presented": list(self.presented),
                "selected": self.selected,
                "results": [r.to_dict() for r in self.results]}


@dataclass
class ExplorationSession:
    id: str
    intent: SearchConstraint
    intent_text: str | None
    w: float
    rounds: list[Round] = field(default_factory=list)
    presented_all: set[str] = field(default_factory=set)
    selections: list[str] = field(default_factory=list)
    events: list[dict] = field(default_factory=list)

    @property
    def current_round(self) -> Round:
        return self.rounds[-1]

    def next_mode(self) -> str:
        # modes follow: local, local, (directional, local)*
        if len(self.selections) < 2:
            return "local"
        return "directional" if len(self.rounds) % 2 == 0 else "local"

    def to_dict(self) -> dict:
        return {"id": self.id,
                "w": self.w,
                "intent_text": self.intent_text,
                "rounds": [r.to_dict() for r in self.rounds],
                "selections": list(self.selections)}


class SessionManager:
    """Owns all live sessions over one shared read-only corpus index."""

    def __init__(self, index, providers, config: EngineConfig | None = None):
        self.index = index
        self.llm, self.embedder = providers
        self.config = config or EngineConfig()
        self.params = MetricParams.from_config(self.config, sigma=index.sigma)
        self._sessions: dict[str, ExplorationSession] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._counter = itertools.count(1)
        self._registry_lock = threading.Lock()

    def _new_id(self) -> str:
        return f"session-{next(self._counter):06d}"

    def create_session(self, semantic: SemanticDescriptor | None,
                       kinematics: Kinematics | None,
                       w: float | None, intent_text: str | None = None,
                       session_id: str | None = None) -> ExplorationSession:
        if semantic is None and kinematics is None:
            raise SessionError("intent needs text or graphical input")
        if w is None:
            w = 0.5
        constraint = SearchConstraint(semantic=semantic,
                                      kinematics=kinematics, w=w)
        with self._registry_lock:
            sid = session_id or self._new_id()
            if sid in self._sessions:
                raise SessionError(f"session id in use: {sid}")
            session = ExplorationSession(id=sid, intent=constraint,
                                         intent_text=intent_text,
                                         w=constraint.effective_w)
            self._sessions[sid] = session
            self._locks[sid] = threading.Lock()
        results = search_topk(constraint, self.index, self.config.top_k,
                              self.params, self.config)
        self._record_round(session, "local", results)
        session.events.append({
            "type": "create",
            "text": intent_text,
            "kinematics": kinematics.to_dict() if kinematics else None,
            "w": w})
        return session

    def get(self, session_id: str) -> ExplorationSession:
        session = self._sessions.get(session_id)
        if session is None:
            raise UnknownSessionError(session_id)
        return session

    def select_and_advance(self, session_id: str, selected_effect_id: str,
                           w: float | None = None) -> ExplorationSession:
        session = self.get(session_id)
        with self._locks[session_id]:
            if selected_effect_id not in session.current_round.presented:
                raise SessionError(
                    "selection was not presented in the current round")
            if w is not None:
                if not 0.0 <= w <= 1.0:
                    raise SessionError("w must lie in [0, 1]")
                session.w = w
            session.current_round.selected = selected_effect_id
            session.selections.append(selected_effect_id)
            mode = session.next_mode()
            exclude = frozenset(session.presented_all)
            if mode == "directional":
                prev_id, curr_id = session.selections[-2:]
                results = directional_explore(
                    prev_id, curr_id, session.intent_text or "",
                    self.index, self.llm, self.embedder,
                    self.params, self.config, session.w, exclude=exclude)
            else:
                results = local_explore(selected_effect_id, self.index,
                                        self.params, self.config, session.w,
                                        exclude=exclude)
            self._record_round(session, mode, results)
            session.events.append({"type": "select",
                                   "effect_id": selected_effect_id,
                                   "w": w})
            return session

    def _record_round(self, session: ExplorationSession, mode: str,
                      results: list[RankedResult]) -> None:
        presented = [r.effect_id for r in results]
        overlap = session.presented_all.intersection(presented)
        assert not overlap, f"effects presented twice: {overlap}"
        session.rounds.append(Round(mode=mode, presented=presented,
                                    results=results))
        session.presented_all.update(presented)

    def replay(self, events: list[dict],
               semantic: SemanticDescriptor | None = None
               ) -> ExplorationSession:
        """Rebuild a session purely from its event log.

        Semantic intent is re-derived from the logged text through the same
        providers; graphical intent replays from the logged kinematics dict.
        """
        from .semantics import describe

        if not events or events[0]["type"] != "create":
            raise SessionError("event log must start with a create event")
        head = events[0]
        if semantic is None and head.get("text"):
            semantic = describe(head["text"], self.llm, self.embedder)
        kinematics = (Kinematics.from_dict(head["kinematics"])
                      if head.get("kinematics") else None)
        session = self.create_session(semantic, kinematics, head.get("w"),
                                      intent_text=head.get("text"))
        for event in events[1:]:
            if event["type"] != "select":
                raise SessionError(f"unknown event type: {event['type']}")
            self.select_and_advance(session.id, event["effect_id"],
                                    event.get("w"))
        return session
