"""HTTP session facade for interactive abbreviated conversation.

A session is an append-only transcript of partner and user turns. The
partner types full text; the user types abbreviations, reviews the
ranked expansion options, and selects one, which joins the transcript
and becomes context for the next expansion.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from pydantic import BaseModel

from .expander import ExpansionBackend, ExpansionQuery, ExpansionResult


class ServiceError(Exception):
    code = "internal"
    status = 500
    retryable = False

    def payload(self) -> dict:
        return {"code": self.code, "message": str(self), "retryable": self.retryable}


class UnknownBackendError(ServiceError):
    code = "unknown_backend"
    status = 400


class UnknownSessionError(ServiceError):
    code = "unknown_session"
    status = 404


class ValidationFailure(ServiceError):
    code = "invalid_request"
    status = 422


class BackendFailure(ServiceError):
    code = "backend_failure"
    status = 502
    retryable = True


@dataclass
class SessionTurn:
    author: str  # "user" | "partner"
    text: str
    manual: bool = False

    def to_dict(self) -> dict:
        return {"author": self.author, "text": self.text, "manual": self.manual}


@dataclass
class Session:
    id: str
    backend_id: str
    k: int
    created_at: float
    turns: list[SessionTurn] = field(default_factory=list)
    last_options: list[str] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "backend": self.backend_id,
            "k": self.k,
            "turns": [t.to_dict() for t in self.turns],
        }


class SessionStore:
    """In-memory sessions over registered backends; per-session operations
    are serialized, sessions never share state. An optional journal
    directory gets one append-only JSONL file per session."""

    def __init__(
        self,
        backends: dict[str, ExpansionBackend],
        default_k: int = 5,
        context_mode: str = "full",
        journal_dir: str | Path | None = None,
    ):
        if not backends:
            raise ValueError("at least one backend is required")
        if context_mode not in ("full", "previous_1"):
            raise ValueError(f"unsupported context mode {context_mode!r}")
        self.backends = dict(backends)
        self.default_backend = next(iter(backends))
        self.default_k = default_k
        self.context_mode = context_mode
        self.journal_dir = Path(journal_dir) if journal_dir else None
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def _journal(self, session_id: str, event: dict) -> None:
        if self.journal_dir is None:
            return
        self.journal_dir.mkdir(parents=True, exist_ok=True)
        with open(self.journal_dir / f"{session_id}.jsonl", "a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, ensure_ascii=False) + "\n")

    def create_session(self, backend_id: str | None = None, k: int | None = None) -> Session:
        backend_id = backend_id or self.default_backend
        if backend_id not in self.backends:
            raise UnknownBackendError(f"no backend named {backend_id!r}")
        k = k or self.default_k
        if k < 1:
            raise ValidationFailure("k must be >= 1")
        session = Session(
            id=uuid.uuid4().hex,
            backend_id=backend_id,
            k=k,
            created_at=time.time(),
        )
        with self._lock:
            self._sessions[session.id] = session
        self._journal(session.id, {"event": "create", "backend": backend_id, "k": k})
        return session

    def get_session(self, session_id: str) -> Session:
        with self._lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise UnknownSessionError(f"no session {session_id!r}")
        return session

    def add_partner_turn(self, session_id: str, text: str) -> Session:
        if not text or not text.strip():
            raise ValidationFailure("turn text must be non-empty")
        session = self.get_session(session_id)
        with session.lock:
            session.turns.append(SessionTurn(author="partner", text=text.strip()))
        self._journal(session_id, {"event": "partner_turn", "text": text.strip()})
        return session

    def expand_in_session(
        self,
        session_id: str,
        abbreviation: str,
        noisy: bool = False,
        k: int | None = None,
    ) -> ExpansionResult:
        """Query the session's backend; the session itself is not mutated
        beyond remembering the offered options."""
        if not abbreviation:
            raise ValidationFailure("abbreviation must be non-empty")
        session = self.get_session(session_id)
        with session.lock:
            context = tuple(t.text for t in session.turns)
            if self.context_mode == "previous_1":
                context = context[-1:]
            query = ExpansionQuery(
                context=context,
                abbreviation=abbreviation,
                noisy=noisy,
                k=k or session.k,
            )
            try:
                result = self.backends[session.backend_id].expand(query)
            except Exception as err:  # backend errors surface typed
                raise BackendFailure(str(err)) from err
            session.last_options = result.phrases()
        return result

    def select_option(self, session_id: str, phrase: str) -> Session:
        """Append the chosen expansion as a user turn; free text that was
        never offered is accepted but flagged manual."""
        if not phrase or not phrase.strip():
            raise ValidationFailure("phrase must be non-empty")
        session = self.get_session(session_id)
        with session.lock:
            manual = phrase not in session.last_options
            session.turns.append(
                SessionTurn(author="user", text=phrase, manual=manual)
            )
        self._journal(session_id, {"event": "select", "text": phrase, "manual": manual})
        return session


class CreateSessionBody(BaseModel):
    backend: str | None = None
    k: int | None = None


class TurnBody(BaseModel):
    author: str = "partner"
    text: str


class ExpandBody(BaseModel):
    abbreviation: str
    noisy: bool = False
    k: int | None = None


class SelectBody(BaseModel):
    phrase: str


def create_app(store: SessionStore, cors_origins: list[str] | None = None):
    """FastAPI wiring over a session store."""
    from fastapi import FastAPI, Request
    from fastapi.middleware.cors import CORSMiddleware
    from fastapi.responses import JSONResponse

    app = FastAPI(title="aexpand service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors_origins or ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ServiceError)
    async def service_error_handler(_request: Request, err: ServiceError):
        return JSONResponse(status_code=err.status, content=err.payload())

    @app.post("/sessions")
    def create_session(body: CreateSessionBody | None = None):
        body = body or CreateSessionBody()
        session = store.create_session(body.backend, body.k)
        return {"id": session.id}

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return store.get_session(session_id).to_dict()

    @app.post("/sessions/{session_id}/turns")
    def add_turn(session_id: str, body: TurnBody):
        if body.author != "partner":
            raise ValidationFailure("only partner turns can be posted directly")
        return store.add_partner_turn(session_id, body.text).to_dict()

    @app.post("/sessions/{session_id}/expand")
    def expand(session_id: str, body: ExpandBody):
        start = time.perf_counter()
        result = store.expand_in_session(
            session_id, body.abbreviation, body.noisy, body.k
        )
        return {
            "options": [{"phrase": o.phrase, "count": o.count} for o in result.options],
            "latency_ms": round((time.perf_counter() - start) * 1000.0, 3),
        }

    @app.post("/sessions/{session_id}/select")
    def select(session_id: str, body: SelectBody):
        return store.select_option(session_id, body.phrase).to_dict()

    return app
