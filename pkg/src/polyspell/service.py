"""HTTP session service for live adaptive-matrix spelling.

Exposes knowledge-base upload and interactive spelling sessions as a small
JSON API so clients (e.g. the bundled web UI) never duplicate engine logic:
selections are addressed by matrix cell ``(row, col)`` and the server
validates them against its own current matrix, so a stale client cannot
desynchronize symbol identity.

Endpoints::

    POST   /kbs                        upload a phrasebook, build a KB
    GET    /kbs                        list loaded KBs
    POST   /sessions                   open a spelling session on a KB
    GET    /sessions/{id}              current state (+ metrics so far)
    POST   /sessions/{id}/selections   select the cell at (row, col)
    POST   /sessions/{id}/undo         select the undo symbol
    GET    /sessions/{id}/metrics      throughput metrics of the session
    DELETE /sessions/{id}              close the session, persist its KB

Live sessions report two timing views: ``*_model`` metrics come from the
virtual stimulus-timing clock, ``*_wall`` metrics from real wall-clock
timestamps recorded one-to-one with the selection log.

Concurrency: operations on one session are serialized per session id, and
every engine call that may read or mutate a knowledge base (sentence
commits, matrix builds, uploads, saves) runs under that KB's writer lock,
so concurrent sessions never lose a committed sentence count.

Configuration: ``create_app(kb_dir=...)`` or the ``KB_DIR`` environment
variable select where KBs are persisted (``{name}.kb`` files, reloaded on
startup); the ``PORT`` environment variable sets the default serving port.
"""

from __future__ import annotations

import os
import re
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict

from .engine import (
    EngineConfig,
    SelectionError,
    SelectionMatrix,
    SelectionRecord,
    Speller,
    session_metrics,
)
from .kb import KnowledgeBase
from .metrics import TimingConfig, ocm, sm
from .text import ssp, swp

DEFAULT_PORT = 8077

_KB_NAME = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]{0,63}$")


# -- registry ---------------------------------------------------------------


@dataclass
class _KbEntry:
    name: str
    kb: KnowledgeBase
    # Writer lock: sentence commits, matrix builds, ingestion and saves all
    # serialize here so no committed count is ever lost.
    lock: threading.RLock = field(default_factory=threading.RLock)


@dataclass
class _SessionEntry:
    id: str
    kb_entry: _KbEntry
    speller: Speller
    created_wall: float
    # One timestamp per engine log record, in order.
    wall_times: list[float] = field(default_factory=list)
    lock: threading.RLock = field(default_factory=threading.RLock)
    # Last mutating request's idempotency key and its response, so a client
    # retrying a lost response does not select twice.
    last_nonce: tuple[str, str] | None = None  # (operation, nonce)
    last_response: dict[str, Any] | None = None


class _Registry:
    """All server state: loaded KBs, open sessions, storage directory."""

    def __init__(self, kb_dir: Path | None) -> None:
        self.kb_dir = kb_dir
        self.kbs: dict[str, _KbEntry] = {}
        self.sessions: dict[str, _SessionEntry] = {}
        self.mutex = threading.Lock()  # guards the two dicts
        if kb_dir is not None:
            kb_dir.mkdir(parents=True, exist_ok=True)
            for path in sorted(kb_dir.glob("*.kb")):
                self.kbs[path.stem] = _KbEntry(path.stem, KnowledgeBase.load(path))

    def kb_or_404(self, name: str) -> _KbEntry:
        with self.mutex:
            entry = self.kbs.get(name)
        if entry is None:
            raise HTTPException(404, f"unknown knowledge base {name!r}")
        return entry

    def session_or_404(self, session_id: str) -> _SessionEntry:
        with self.mutex:
            entry = self.sessions.get(session_id)
        if entry is None:
            raise HTTPException(404, f"unknown session {session_id!r}")
        return entry

    def save_kb(self, entry: _KbEntry) -> bool:
        if self.kb_dir is None:
            return False
        with entry.lock:
            entry.kb.save(self.kb_dir / f"{entry.name}.kb")
        return True


# -- request bodies ----------------------------------------------------------


class KbUpload(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    text: str
    mode: str = "table"


class SessionConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kb: str
    predictions: bool = True
    p_sharp: int = 4
    learn: bool = True
    nrs: int = 12
    sd_s: float = 0.125
    isi_s: float = 0.125
    pre_s: float = 3.0
    post_s: float = 3.0
    ppd_s: float = 10.0


class SelectionBody(BaseModel):
    model_config = ConfigDict(extra="forbid")

    row: int
    col: int
    correct: bool | None = None
    nonce: str | None = None


class UndoBody(BaseModel):
    model_config = ConfigDict(extra="forbid")

    correct: bool | None = None
    nonce: str | None = None


# -- payload builders --------------------------------------------------------


def _matrix_payload(matrix: SelectionMatrix) -> dict[str, Any]:
    cells: list[dict[str, Any] | None] = []
    for symbol in matrix.cells:
        if symbol is None:
            cells.append(None)
        else:
            cells.append(
                {
                    "kind": symbol.kind,
                    "label": symbol.label,
                    "prediction_id": symbol.prediction_id,
                    "word": symbol.word,
                    "spell": symbol.spell,
                }
            )
    return {"rows": matrix.rows, "cols": matrix.cols, "cells": cells}


def _state_payload(entry: _SessionEntry) -> dict[str, Any]:
    """Session state snapshot; caller holds the session and KB locks."""
    speller = entry.speller
    matrix = speller.matrix
    spelled = speller.session.spelled
    return {
        "id": entry.id,
        "kb": entry.kb_entry.name,
        "spelled": spelled,
        "ssp": ssp(spelled, speller.kb.alphabet),
        "swp": swp(spelled),
        "matrix": _matrix_payload(matrix),
        "legend": {str(p.prediction_id): p.word for p in matrix.predictions},
        "prediction_phase": speller.prediction_phase,
        "ppd_s": speller.timing.ppd_s,
        "selections": speller.session.selections,
        "committed": list(speller.session.committed),
    }


def _record_payload(record: SelectionRecord) -> dict[str, Any]:
    return {
        "step": record.step,
        "kind": record.symbol_kind,
        "label": record.label,
        "delta": record.delta,
        "correct": record.correct,
        "t_model_s": record.t_virtual_s,
    }


def _metrics_payload(entry: _SessionEntry) -> dict[str, Any]:
    """Model-clock and wall-clock metrics; caller holds the session lock."""
    speller = entry.speller
    report = session_metrics(speller.session, speller.timing)
    # Sub-resolution wall durations (back-to-back test requests) are clamped
    # to keep the rate definitions total.
    wall_s = max(entry.wall_times[-1] - entry.created_wall, 1e-9)
    return {
        "selections": report.selections,
        "characters": report.characters,
        "total_intensifications": report.total_intensifications,
        "isr": report.isr,
        "ac": report.ac,
        "ec": report.ec,
        "t_model_s": report.total_time_s,
        "sm_model": report.sm,
        "ocm_model": report.ocm,
        "t_wall_s": wall_s,
        "sm_wall": sm(report.selections, wall_s),
        "ocm_wall": ocm(report.characters, wall_s),
    }


def _apply(
    registry: _Registry,
    session_id: str,
    operation: str,
    nonce: str | None,
    correct: bool | None,
    cell: tuple[int, int] | None,
) -> dict[str, Any]:
    """Run one mutating session operation (selection or undo)."""
    entry = registry.session_or_404(session_id)
    with entry.lock:
        if nonce is not None and entry.last_nonce == (operation, nonce):
            assert entry.last_response is not None
            return entry.last_response
        speller = entry.speller
        with entry.kb_entry.lock:
            committed_before = len(speller.session.committed)
            try:
                if cell is None:
                    record = speller.undo(correct=correct)
                else:
                    record = speller.select_at(cell[0], cell[1], correct=correct)
            except (SelectionError, IndexError) as exc:
                raise HTTPException(409, str(exc)) from exc
            entry.wall_times.append(time.time())
            committed = speller.session.committed
            payload = _state_payload(entry)
        payload["record"] = _record_payload(record)
        payload["delta"] = record.delta
        payload["sentence_complete"] = len(committed) > committed_before
        payload["committed_sentence"] = committed[-1] if committed else None
        if nonce is not None:
            entry.last_nonce = (operation, nonce)
            entry.last_response = payload
        else:
            entry.last_nonce = None
            entry.last_response = None
        return payload


# -- application -------------------------------------------------------------


def create_app(kb_dir: str | Path | None = None) -> FastAPI:
    """Build the service; ``kb_dir`` falls back to the ``KB_DIR`` env var."""
    if kb_dir is None:
        kb_dir = os.environ.get("KB_DIR") or None
    registry = _Registry(Path(kb_dir) if kb_dir is not None else None)

    app = FastAPI(title="polyspell service")
    app.state.registry = registry

    # The bundled web UI may be served from a different origin (e.g. a static
    # file server); the API holds no credentials, so a wildcard is safe.
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def _bad_request(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.post("/kbs", status_code=201)
    def upload_kb(body: KbUpload) -> dict[str, Any]:
        if not _KB_NAME.match(body.name):
            raise HTTPException(
                400, "KB names use letters, digits, '.', '_' or '-' only"
            )
        kb = KnowledgeBase()
        try:
            stats = kb.ingest(body.text.splitlines(), mode=body.mode)
        except ValueError as exc:
            raise HTTPException(400, str(exc)) from exc
        entry = _KbEntry(body.name, kb)
        with registry.mutex:
            if body.name in registry.kbs:
                raise HTTPException(409, f"knowledge base {body.name!r} exists")
            registry.kbs[body.name] = entry
        registry.save_kb(entry)
        return {
            "name": body.name,
            "sentences": stats.sentences,
            "distinct_words": stats.distinct_words,
            "mean_word_chars": stats.mean_word_chars,
            "discarded": stats.discarded,
        }

    @app.get("/kbs")
    def list_kbs() -> dict[str, Any]:
        with registry.mutex:
            entries = sorted(registry.kbs.values(), key=lambda e: e.name)
        listing = []
        for entry in entries:
            with entry.lock:
                listing.append(
                    {
                        "name": entry.name,
                        "sentences": entry.kb.sentences.total,
                        "distinct_words": entry.kb.words.nwords,
                    }
                )
        return {"kbs": listing}

    @app.post("/sessions", status_code=201)
    def create_session(body: SessionConfig) -> dict[str, Any]:
        kb_entry = registry.kb_or_404(body.kb)
        try:
            config = EngineConfig(
                p_sharp=body.p_sharp,
                predictions=body.predictions,
                learn=body.learn,
            )
            timing = TimingConfig(
                sd_s=body.sd_s,
                isi_s=body.isi_s,
                pre_s=body.pre_s,
                post_s=body.post_s,
                ppd_s=body.ppd_s,
                nrs=body.nrs,
            )
        except ValueError as exc:
            raise HTTPException(400, str(exc)) from exc
        entry = _SessionEntry(
            id=uuid.uuid4().hex,
            kb_entry=kb_entry,
            speller=Speller(kb_entry.kb, config, timing),
            created_wall=time.time(),
        )
        with registry.mutex:
            registry.sessions[entry.id] = entry
        with entry.lock, kb_entry.lock:
            return _state_payload(entry)

    @app.get("/sessions/{session_id}")
    def get_state(session_id: str) -> dict[str, Any]:
        entry = registry.session_or_404(session_id)
        with entry.lock, entry.kb_entry.lock:
            payload = _state_payload(entry)
            payload["metrics"] = (
                _metrics_payload(entry) if entry.speller.session.log else None
            )
            return payload

    @app.post("/sessions/{session_id}/selections")
    def post_selection(session_id: str, body: SelectionBody) -> dict[str, Any]:
        return _apply(
            registry, session_id, "selections", body.nonce, body.correct,
            (body.row, body.col),
        )

    @app.post("/sessions/{session_id}/undo")
    def post_undo(session_id: str, body: UndoBody | None = None) -> dict[str, Any]:
        body = body or UndoBody()
        return _apply(registry, session_id, "undo", body.nonce, body.correct, None)

    @app.get("/sessions/{session_id}/metrics")
    def get_metrics(session_id: str) -> dict[str, Any]:
        entry = registry.session_or_404(session_id)
        with entry.lock:
            if not entry.speller.session.log:
                raise HTTPException(409, "session has no selections yet")
            return _metrics_payload(entry)

    @app.delete("/sessions/{session_id}")
    def delete_session(session_id: str) -> dict[str, Any]:
        entry = registry.session_or_404(session_id)
        with entry.lock:
            saved = registry.save_kb(entry.kb_entry)
            with registry.mutex:
                registry.sessions.pop(session_id, None)
        return {"id": session_id, "deleted": True, "kb_saved": saved}

    return app


def default_port() -> int:
    """Serving port from the ``PORT`` environment variable."""
    return int(os.environ.get("PORT", DEFAULT_PORT))


app = create_app()
