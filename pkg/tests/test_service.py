"""Session store behavior and the HTTP facade."""

import json

import pytest
from fastapi.testclient import TestClient

from aexpand.dialogdata import convert_dialogs
from aexpand.expander import ExpansionQuery, ExpansionResult, LutBackend, build_lut
from aexpand.service import (
    BackendFailure,
    SessionStore,
    UnknownBackendError,
    UnknownSessionError,
    ValidationFailure,
    create_app,
)

from conftest import SIX_TURN_TEXTS, make_dialog


class RecordingBackend:
    """Wraps a real backend, keeping every query it saw."""

    def __init__(self, inner):
        self.inner = inner
        self.queries = []

    def expand(self, query):
        self.queries.append(query)
        return self.inner.expand(query)


class FailingBackend:
    def expand(self, query):
        raise RuntimeError("model fell over")


@pytest.fixture
def backend():
    examples, _ = convert_dialogs([make_dialog(SIX_TURN_TEXTS, "six")])
    return RecordingBackend(LutBackend(build_lut(examples)))


@pytest.fixture
def store(backend):
    return SessionStore({"lut": backend})


class TestSessionStore:
    def test_create_session(self, store):
        session = store.create_session("lut", k=5)
        assert session.turns == []
        assert session.k == 5

    def test_unknown_backend(self, store):
        with pytest.raises(UnknownBackendError):
            store.create_session("nonexistent")

    def test_distinct_ids(self, store):
        a = store.create_session()
        b = store.create_session()
        assert a.id != b.id

    def test_add_partner_turn(self, store):
        session = store.create_session()
        store.add_partner_turn(session.id, "Would you like to sit down?")
        assert [t.text for t in store.get_session(session.id).turns] == [
            "Would you like to sit down?"
        ]

    def test_empty_turn_rejected(self, store):
        session = store.create_session()
        with pytest.raises(ValidationFailure):
            store.add_partner_turn(session.id, "   ")

    def test_turn_order_preserved(self, store):
        session = store.create_session()
        store.add_partner_turn(session.id, "one")
        store.add_partner_turn(session.id, "two")
        assert [t.text for t in store.get_session(session.id).turns] == ["one", "two"]

    def test_unknown_session(self, store):
        with pytest.raises(UnknownSessionError):
            store.add_partner_turn("missing", "hello")

    def test_expand_uses_session_context(self, store, backend):
        session = store.create_session()
        store.add_partner_turn(session.id, "Would you like to sit down?")
        result = store.expand_in_session(session.id, "n,imfsu")
        assert "no, i'm fine standing up" in [o.phrase for o in result.options]
        assert backend.queries[-1].context == ("Would you like to sit down?",)

    def test_expand_does_not_mutate_session(self, store):
        session = store.create_session()
        store.add_partner_turn(session.id, "hello there")
        before = [t.text for t in store.get_session(session.id).turns]
        store.expand_in_session(session.id, "ht")
        assert [t.text for t in store.get_session(session.id).turns] == before

    def test_empty_abbreviation_rejected(self, store):
        session = store.create_session()
        with pytest.raises(ValidationFailure):
            store.expand_in_session(session.id, "")

    def test_deterministic_repeat(self, store):
        session = store.create_session()
        a = store.expand_in_session(session.id, "wyltsd").phrases()
        b = store.expand_in_session(session.id, "wyltsd").phrases()
        assert a == b

    def test_select_appends_user_turn_and_feeds_context(self, store, backend):
        session = store.create_session()
        store.add_partner_turn(session.id, "Would you like to sit down?")
        store.expand_in_session(session.id, "n,imfsu")
        store.select_option(session.id, "no, i'm fine standing up")
        turns = store.get_session(session.id).turns
        assert len(turns) == 2
        assert turns[1].author == "user"
        assert turns[1].manual is False
        store.expand_in_session(session.id, "aysydtwtsd")
        assert backend.queries[-1].context == (
            "Would you like to sit down?",
            "no, i'm fine standing up",
        )

    def test_free_text_selection_flagged_manual(self, store):
        session = store.create_session()
        store.select_option(session.id, "something i typed myself")
        assert store.get_session(session.id).turns[0].manual is True

    def test_sessions_are_isolated(self, store):
        a = store.create_session()
        b = store.create_session()
        store.add_partner_turn(a.id, "only in a")
        assert store.get_session(b.id).turns == []

    def test_backend_failure_is_typed_and_retryable(self):
        store = SessionStore({"bad": FailingBackend()})
        session = store.create_session()
        with pytest.raises(BackendFailure) as err:
            store.expand_in_session(session.id, "x")
        assert err.value.retryable is True

    def test_journal_written(self, tmp_path, backend):
        store = SessionStore({"lut": backend}, journal_dir=tmp_path)
        session = store.create_session()
        store.add_partner_turn(session.id, "hello")
        journal = (tmp_path / f"{session.id}.jsonl").read_text().splitlines()
        events = [json.loads(line)["event"] for line in journal]
        assert events == ["create", "partner_turn"]


class TestHttpApi:
    @pytest.fixture
    def client(self, store):
        return TestClient(create_app(store))

    def test_full_loop(self, client):
        session_id = client.post("/sessions", json={}).json()["id"]
        r = client.post(
            f"/sessions/{session_id}/turns",
            json={"author": "partner", "text": "Would you like to sit down?"},
        )
        assert r.status_code == 200
        r = client.post(
            f"/sessions/{session_id}/expand", json={"abbreviation": "n,imfsu"}
        )
        assert r.status_code == 200
        body = r.json()
        assert "latency_ms" in body
        phrases = [o["phrase"] for o in body["options"]]
        assert "no, i'm fine standing up" in phrases
        r = client.post(
            f"/sessions/{session_id}/select",
            json={"phrase": "no, i'm fine standing up"},
        )
        assert r.status_code == 200
        transcript = client.get(f"/sessions/{session_id}").json()
        assert len(transcript["turns"]) == 2

    def test_error_shape(self, client):
        r = client.post("/sessions/nope/expand", json={"abbreviation": "x"})
        assert r.status_code == 404
        body = r.json()
        assert body["code"] == "unknown_session"
        assert body["retryable"] is False
        assert "message" in body

    def test_unknown_backend_error(self, client):
        r = client.post("/sessions", json={"backend": "missing"})
        assert r.status_code == 400
        assert r.json()["code"] == "unknown_backend"

    def test_validation_error(self, client):
        session_id = client.post("/sessions", json={}).json()["id"]
        r = client.post(f"/sessions/{session_id}/expand", json={"abbreviation": ""})
        assert r.status_code == 422

    def test_cors_headers(self, client):
        r = client.options(
            "/sessions",
            headers={
                "Origin": "http://localhost:5173",
                "Access-Control-Request-Method": "POST",
            },
        )
        assert r.headers.get("access-control-allow-origin") in ("*", "http://localhost:5173")

    def test_options_never_resorted(self, client):
        # server order is the contract; counts arrive descending
        session_id = client.post("/sessions", json={}).json()["id"]
        r = client.post(f"/sessions/{session_id}/expand", json={"abbreviation": "wyltsd"})
        counts = [o["count"] for o in r.json()["options"]]
        assert counts == sorted(counts, reverse=True)
