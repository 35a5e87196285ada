"""Session orchestration: one dialogue per session, transcripts, replay.

A session glues the interpreter, engine and generator together around a
single engine state.  Turns are serialized per session; the transcript is
append-only and can be persisted as line-delimited JSON records, one file
per session.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .config import Runtime
from .core import USER, DialogueMove, Proposition
from .engine import EngineState
from .interpreter import DialogueContext, EmptyUtterance


@dataclass
class Turn:
    speaker: str
    text: str
    moves: tuple
    timestamp: float


class ReplayError(Exception):
    """Replay script malformed; carries the offending line number."""

    def __init__(self, message: str, lineno: int = 0):
        super().__init__(message)
        self.lineno = lineno


class DialogueSession:
    """One conversation: state, transcript and the engine trio."""

    def __init__(self, runtime: Runtime, session_id: Optional[str] = None,
                 transcript_dir: Optional[str] = None):
        self.id = session_id or uuid.uuid4().hex
        self.runtime = runtime
        self.engine = runtime.make_engine(trace_hook=self._on_trace)
        self.interpreter = runtime.make_interpreter()
        self.generator = runtime.make_generator()
        self.state = EngineState()
        self.transcript: list = []
        self.trace: list = []
        self.created = time.time()
        self.updated = self.created
        self._lock = threading.Lock()
        self._transcript_path = None
        self._trace_path = None
        if transcript_dir:
            directory = Path(transcript_dir)
            directory.mkdir(parents=True, exist_ok=True)
            self._transcript_path = directory / f"{self.id}.jsonl"
            self._trace_path = directory / f"{self.id}.trace.jsonl"

    # ------------------------------------------------------------------

    def _on_trace(self, record: dict) -> None:
        self.trace.append(record)
        if self._trace_path is not None:
            with self._trace_path.open("a", encoding="utf-8") as handle:
                handle.write(json.dumps(record, ensure_ascii=False) + "\n")

    def _record(self, turn: Turn) -> None:
        self.transcript.append(turn)
        self.updated = turn.timestamp
        if self._transcript_path is not None:
            entry = {
                "speaker": turn.speaker,
                "text": turn.text,
                "moves": [str(m) for m in turn.moves],
                "ts": turn.timestamp,
            }
            with self._transcript_path.open("a", encoding="utf-8") as handle:
                handle.write(json.dumps(entry, ensure_ascii=False) + "\n")

    def _context(self) -> DialogueContext:
        return DialogueContext(
            qud=self.state.info.shared.qud,
            last_terms=self.state.last_terms,
        )

    def _system_turn(self, moves) -> Turn:
        text = self.generator.realize(moves) if moves else ""
        turn = Turn(speaker="system", text=text, moves=tuple(moves), timestamp=time.time())
        self._record(turn)
        return turn

    # ------------------------------------------------------------------

    def start(self) -> Turn:
        """System-initiative greeting turn of a fresh session."""
        with self._lock:
            self.state, moves = self.engine.opening_turn(self.state)
            return self._system_turn(moves)

    def submit(self, text: str) -> Turn:
        """One full user turn: interpret, integrate, select, realize."""
        with self._lock:
            user_turn = Turn(speaker="user", text=text, moves=(), timestamp=time.time())
            try:
                analysis = self.interpreter.analyse(text, self._context())
                moves = list(analysis.moves)
            except EmptyUtterance:
                analysis = None
                moves = [DialogueMove(USER, "inform", Proposition("EnonceVide"))]
            if not moves:
                moves = [DialogueMove(USER, "inform", Proposition("Incompris"))]
            user_turn.moves = tuple(moves)
            self._record(user_turn)
            self.state, system_moves = self.engine.respond(self.state, moves)
            return self._system_turn(system_moves)

    def snapshot(self) -> dict:
        """Read-only view of the state for clients; never a mutation channel."""
        info = self.state.info
        frame = info.active_frame
        return {
            "session": self.id,
            "qud": [str(q) for q in info.shared.qud[::-1]],
            "issues": [str(q) for q in info.shared.issues[::-1]],
            "subdialogue": frame.plan_name if frame else None,
            "plan_stack": [f.plan_name for f in info.private.plan],
            "query": self.state.query.canonical(self.runtime.terminology),
            "result_count": None if self.state.results is None else len(self.state.results),
            "commitments": [str(p) for p in info.shared.commitments],
            "strategy": self.engine.strategy_mode(self.state).mode,
            "closed": self.state.closed,
        }

    def transcript_entries(self) -> list:
        return [
            {
                "speaker": t.speaker,
                "text": t.text,
                "moves": [str(m) for m in t.moves],
                "ts": t.timestamp,
            }
            for t in self.transcript
        ]


# ---------------------------------------------------------------------------
# Replay


def parse_script(source: str) -> list:
    """Alternating expected-system / user lines: ``S: ...`` and ``U: ...``."""
    steps = []
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("S:"):
            steps.append(("S", line[2:].strip(), lineno))
        elif line.startswith("U:"):
            steps.append(("U", line[2:].strip(), lineno))
        else:
            raise ReplayError(f"line {lineno}: expected 'S:' or 'U:' prefix", lineno)
    return steps


@dataclass
class ReplayMismatch:
    lineno: int
    expected: str
    actual: str


@dataclass
class ReplayReport:
    passed: bool
    mismatches: list = field(default_factory=list)
    transcript: list = field(default_factory=list)

    def diff_text(self) -> str:
        lines = []
        for m in self.mismatches:
            lines.append(f"line {m.lineno}: expected: {m.expected}")
            lines.append(f"line {m.lineno}: actual:   {m.actual}")
        return "\n".join(lines)


def replay(runtime: Runtime, script: str) -> ReplayReport:
    """Feed a script's user lines through a fresh session and diff the output.

    The expected system line(s) following each user line must match the
    produced turn bit-for-bit.  An empty script passes with an empty
    transcript.
    """
    steps = parse_script(script)
    report = ReplayReport(passed=True)
    if not steps:
        return report
    session = DialogueSession(runtime)
    position = 0
    if steps[0][0] == "S":
        turn = session.start()
        expected, lineno = steps[0][1], steps[0][2]
        if turn.text != expected:
            report.passed = False
            report.mismatches.append(ReplayMismatch(lineno, expected, turn.text))
        position = 1
    while position < len(steps):
        kind, text, lineno = steps[position]
        if kind != "U":
            raise ReplayError(f"line {lineno}: expected a user line", lineno)
        turn = session.submit(text)
        position += 1
        if position < len(steps) and steps[position][0] == "S":
            expected, expected_line = steps[position][1], steps[position][2]
            if turn.text != expected:
                report.passed = False
                report.mismatches.append(ReplayMismatch(expected_line, expected, turn.text))
            position += 1
    report.transcript = session.transcript_entries()
    return report


class SessionStore:
    """In-memory session registry used by the HTTP service and the REPL."""

    def __init__(self, runtime: Runtime, transcript_dir: Optional[str] = None):
        self.runtime = runtime
        self.transcript_dir = transcript_dir
        self._sessions: dict = {}
        self._lock = threading.Lock()

    def create(self) -> DialogueSession:
        session = DialogueSession(self.runtime, transcript_dir=self.transcript_dir)
        with self._lock:
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Optional[DialogueSession]:
        with self._lock:
            return self._sessions.get(session_id)
