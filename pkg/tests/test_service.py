"""HTTP/WebSocket session service."""

from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from querydialog.service import create_app


@pytest.fixture()
def client(runtime):
    return TestClient(create_app(runtime))


def test_create_session_returns_greeting(client):
    payload = client.post("/sessions").json()
    assert payload["speaker"] == "system"
    assert "Quelle question vous intéresse ?" in payload["text"]
    assert payload["state"]["subdialogue"] == "Choice"


def test_submit_runs_full_turn(client):
    session_id = client.post("/sessions").json()["session"]
    response = client.post(
        f"/sessions/{session_id}/utterances",
        json={"text": "je voudrais des informations sur le paludisme"},
    )
    payload = response.json()
    assert payload["text"].startswith("Donc c'est paludisme ?")
    assert payload["state"]["qud"]


def test_unknown_session_404(client):
    assert client.post("/sessions/nope/utterances", json={"text": "x"}).status_code == 404
    assert client.get("/sessions/nope/state").status_code == 404


def test_state_snapshot_tracks_query(client):
    session_id = client.post("/sessions").json()["session"]
    for text in ("je voudrais des informations sur le paludisme", "non",
                 "ajouter le qualificatif thérapeutique"):
        client.post(f"/sessions/{session_id}/utterances", json={"text": text})
    state = client.get(f"/sessions/{session_id}/state").json()
    assert state["query"] == "motcle(paludisme), qualificatif(thérapeutique)"


def test_transcript_endpoint(client):
    session_id = client.post("/sessions").json()["session"]
    client.post(f"/sessions/{session_id}/utterances", json={"text": "bonjour"})
    transcript = client.get(f"/sessions/{session_id}/transcript").json()
    speakers = [t["speaker"] for t in transcript["turns"]]
    assert speakers[0] == "system"
    assert "user" in speakers


def test_websocket_streams_turns(client):
    session_id = client.post("/sessions").json()["session"]
    with client.websocket_connect(f"/sessions/{session_id}/ws") as ws:
        client.post(
            f"/sessions/{session_id}/utterances",
            json={"text": "je voudrais des informations sur le paludisme"},
        )
        event = ws.receive_json()
        assert event["session"] == session_id
        assert event["speaker"] == "system"
        assert event["text"].startswith("Donc c'est paludisme ?")


def test_ui_served_when_frontend_present(client):
    response = client.get("/ui/")
    assert response.status_code == 200
    assert "querydialog" in response.text
