"""HTTP/WebSocket session service consumed by the browser client.

Endpoints:
  POST /sessions                      create a session, returns the greeting turn
  POST /sessions/{id}/utterances      submit an utterance, returns the system turn
  GET  /sessions/{id}/state           read-only information-state snapshot
  GET  /sessions/{id}/transcript      full transcript
  WS   /sessions/{id}/ws              turn stream (one JSON message per turn)

Per-session turns are serialized by the session lock; concurrent submits to
one session queue in arrival order.
"""

from __future__ import annotations

import asyncio
import os
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .config import Runtime, RuntimeConfig, build_runtime
from .session import DialogueSession, SessionStore, Turn


class UtteranceIn(BaseModel):
    text: str


def _ui_directory() -> Optional[Path]:
    candidates = []
    env = os.environ.get("QUERYDIALOG_UI_DIR")
    if env:
        candidates.append(Path(env))
    candidates.append(Path(__file__).resolve().parents[2] / "frontend")
    for candidate in candidates:
        if (candidate / "index.html").is_file():
            return candidate
    return None


def _turn_payload(session: DialogueSession, turn: Turn) -> dict:
    return {
        "session": session.id,
        "speaker": turn.speaker,
        "text": turn.text,
        "moves": [str(m) for m in turn.moves],
        "state": session.snapshot(),
    }


def create_app(runtime: Optional[Runtime] = None, transcript_dir: Optional[str] = None) -> FastAPI:
    runtime = runtime or build_runtime(RuntimeConfig())
    store = SessionStore(runtime, transcript_dir=transcript_dir)
    app = FastAPI(title="querydialog session service")
    app.state.store = store
    watchers: dict = {}

    def _session_or_404(session_id: str) -> DialogueSession:
        session = store.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return session

    async def _broadcast(session_id: str, payload: dict) -> None:
        for queue in watchers.get(session_id, []):
            await queue.put(payload)

    @app.post("/sessions")
    async def create_session() -> dict:
        session = store.create()
        turn = await asyncio.to_thread(session.start)
        payload = _turn_payload(session, turn)
        await _broadcast(session.id, payload)
        return payload

    @app.post("/sessions/{session_id}/utterances")
    async def submit_utterance(session_id: str, utterance: UtteranceIn) -> dict:
        session = _session_or_404(session_id)
        turn = await asyncio.to_thread(session.submit, utterance.text)
        payload = _turn_payload(session, turn)
        await _broadcast(session.id, payload)
        return payload

    @app.get("/sessions/{session_id}/state")
    async def get_state(session_id: str) -> dict:
        return _session_or_404(session_id).snapshot()

    @app.get("/sessions/{session_id}/transcript")
    async def get_transcript(session_id: str) -> dict:
        session = _session_or_404(session_id)
        return {"session": session.id, "turns": session.transcript_entries()}

    @app.websocket("/sessions/{session_id}/ws")
    async def turn_stream(websocket: WebSocket, session_id: str):
        session = store.get(session_id)
        if session is None:
            await websocket.close(code=4404)
            return
        await websocket.accept()
        queue: asyncio.Queue = asyncio.Queue()
        watchers.setdefault(session_id, []).append(queue)
        try:
            while True:
                payload = await queue.get()
                await websocket.send_json(payload)
        except WebSocketDisconnect:
            pass
        finally:
            watchers.get(session_id, []).remove(queue)

    ui_dir = _ui_directory()
    if ui_dir is not None:
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
