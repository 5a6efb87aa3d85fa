"""HTTP facade: registration, sessions, steps, and learner records.

Bearer-token auth with one active token and one active session per
learner. Per-session operations are serialized behind a lock; the
knowledge base is shared read-only; the learner store serializes writes
per learner. All state survives restarts only through the stores.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import secrets
import threading
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any
from uuid import uuid4

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .errors import (
    InsufficientBankError,
    InvalidAnswerError,
    LearnerNotFoundError,
    MissingAnswerError,
    MissingResponseError,
    OutOfRangeResponseError,
    QuestionnaireError,
    ScoreOutOfRangeError,
    StorageError,
    TutorError,
    UnknownConceptError,
    UnknownItemError,
    UnknownQuestionError,
    WrongStateError,
)
from .kb import KnowledgeBase, load_knowledge_base
from .learner import (
    LearnerModel,
    Questionnaire,
    aggregate_topic_knowledge,
    default_questionnaire,
    load_questionnaire,
    new_learner,
)
from .pedagogy import PedagogyConfig, default_config, load_pedagogy_config
from .session import Session, SessionState, start_session
from .store import LearnerStore

logger = logging.getLogger(__name__)

# Engine error -> (HTTP status, stable machine code). Codes never change
# across releases; clients switch on them.
_ERROR_MAP: list[tuple[type[TutorError], int]] = [
    (WrongStateError, 409),
    (InsufficientBankError, 409),
    (LearnerNotFoundError, 404),
    (UnknownConceptError, 404),
    (MissingAnswerError, 422),
    (UnknownQuestionError, 422),
    (InvalidAnswerError, 422),
    (MissingResponseError, 422),
    (UnknownItemError, 422),
    (OutOfRangeResponseError, 422),
    (QuestionnaireError, 422),
    (ScoreOutOfRangeError, 422),
    (StorageError, 500),
]


def _error_response(exc: TutorError) -> JSONResponse:
    status = 500
    for klass, code in _ERROR_MAP:
        if isinstance(exc, klass):
            status = code
            break
    body: dict[str, Any] = {"code": exc.code, "message": str(exc)}
    if isinstance(exc, InsufficientBankError):
        body["detail"] = {"concept_id": exc.concept_id}
    return JSONResponse(status_code=status, content=body)


def _api_error(status: int, code: str, message: str, detail: Any = None) -> JSONResponse:
    body: dict[str, Any] = {"code": code, "message": message}
    if detail is not None:
        body["detail"] = detail
    return JSONResponse(status_code=status, content=body)


@dataclass
class ServiceSettings:
    kb_path: Path | None = None
    pedagogy_path: Path | None = None
    questionnaire_path: Path | None = None
    data_dir: Path = Path("tutor_data")
    token_ttl_seconds: int = 86400
    frontend_dir: Path | None = None


class TokenStore:
    """Single active bearer token per learner, with expiry."""

    def __init__(self, ttl_seconds: int):
        self.ttl = ttl_seconds
        self._lock = threading.Lock()
        self._by_token: dict[str, tuple[str, float]] = {}
        self._by_learner: dict[str, str] = {}

    def issue(self, learner_id: str) -> str:
        token = secrets.token_urlsafe(16)  # 128 random bits
        with self._lock:
            old = self._by_learner.get(learner_id)
            if old:
                self._by_token.pop(old, None)
            self._by_token[token] = (learner_id, time.time() + self.ttl)
            self._by_learner[learner_id] = token
        return token

    def resolve(self, token: str) -> str | None:
        with self._lock:
            entry = self._by_token.get(token)
            if entry is None:
                return None
            learner_id, expires = entry
            if time.time() >= expires:
                self._by_token.pop(token, None)
                self._by_learner.pop(learner_id, None)
                return None
            return learner_id


@dataclass
class SessionHandle:
    session_id: str
    learner_id: str
    session: Session
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionRegistry:
    def __init__(self):
        self._lock = threading.Lock()
        self._by_id: dict[str, SessionHandle] = {}
        self._by_learner: dict[str, str] = {}

    def get(self, session_id: str) -> SessionHandle | None:
        with self._lock:
            return self._by_id.get(session_id)

    def for_learner(self, learner_id: str) -> SessionHandle | None:
        with self._lock:
            session_id = self._by_learner.get(learner_id)
            return self._by_id.get(session_id) if session_id else None

    def add(self, handle: SessionHandle) -> None:
        with self._lock:
            self._by_id[handle.session_id] = handle
            self._by_learner[handle.learner_id] = handle.session_id


def _load_faq() -> dict[str, Any]:
    with resources.files("adaptutor.data").joinpath("faq.json").open("rb") as fh:
        return json.load(fh)


def _model_view(kb: KnowledgeBase, model: LearnerModel) -> dict[str, Any]:
    concepts = []
    for cid in kb.curriculum:
        concept = kb.concepts[cid]
        knowledge = model.concept_knowledge.get(cid)
        concepts.append(
            {
                "concept_id": cid,
                "title": concept.title,
                "topic_id": kb.topic_of[cid],
                "score": knowledge.last_score if knowledge else None,
                "knowledge_level": knowledge.level.value if knowledge else None,
                "attempts": knowledge.attempts if knowledge else 0,
            }
        )
    return {
        "learner_id": model.learner_id,
        "name": model.name,
        "learner_level": model.level.value,
        "style": None
        if model.style is None
        else {
            "dominant": model.style.dominant.value,
            "scores": {s.value: v for s, v in sorted(model.style.scores.items())},
        },
        "concepts": concepts,
        "topics": [
            {
                "id": topic.id,
                "title": topic.title,
                "score": aggregate_topic_knowledge(model, topic),
            }
            for topic in kb.topics
        ],
    }


def create_app(settings: ServiceSettings | None = None) -> FastAPI:
    settings = settings or ServiceSettings()

    if settings.kb_path is not None:
        kb = load_knowledge_base(Path(settings.kb_path))
    else:
        with resources.files("adaptutor.data").joinpath("sample_kb.json").open("rb") as fh:
            kb = load_knowledge_base(fh)
    config: PedagogyConfig = (
        load_pedagogy_config(Path(settings.pedagogy_path))
        if settings.pedagogy_path is not None
        else default_config()
    )
    questionnaire: Questionnaire = (
        load_questionnaire(Path(settings.questionnaire_path))
        if settings.questionnaire_path is not None
        else default_questionnaire()
    )
    store = LearnerStore(settings.data_dir)
    tokens = TokenStore(settings.token_ttl_seconds)
    registry = SessionRegistry()
    faq = _load_faq()

    app = FastAPI(title="adaptutor", docs_url=None, redoc_url=None)
    app.state.kb = kb
    app.state.store = store
    app.state.tokens = tokens
    app.state.registry = registry

    @app.exception_handler(TutorError)
    async def _tutor_error(_request: Request, exc: TutorError):
        return _error_response(exc)

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_request: Request, exc: RequestValidationError):
        return _api_error(422, "MALFORMED_PAYLOAD", "request body is not valid JSON for this endpoint")

    def _authenticate(request: Request) -> str | None:
        header = request.headers.get("authorization", "")
        if not header.startswith("Bearer "):
            return None
        return tokens.resolve(header[len("Bearer "):])

    def _owned_session(request: Request, session_id: str) -> SessionHandle | JSONResponse:
        learner_id = _authenticate(request)
        if learner_id is None:
            return _api_error(401, "INVALID_TOKEN", "missing, invalid, or expired bearer token")
        handle = registry.get(session_id)
        if handle is None or handle.learner_id != learner_id:
            return _api_error(404, "SESSION_NOT_FOUND", f"no session '{session_id}' for this learner")
        return handle

    # -- endpoints -------------------------------------------------------------

    @app.post("/api/learners", status_code=201)
    async def register(payload: dict):
        name = payload.get("name")
        if not isinstance(name, str) or not name.strip():
            return _api_error(400, "INVALID_NAME", "name must be a non-empty string")
        name = name.strip()
        model = store.find_by_name(name)
        resumed = model is not None
        if model is None:
            model = new_learner(name)
            store.save(model)
        token = tokens.issue(model.learner_id)
        return {
            "learner_id": model.learner_id,
            "name": model.name,
            "token": token,
            "resumed": resumed,
        }

    @app.post("/api/sessions", status_code=201)
    async def open_session(request: Request):
        learner_id = _authenticate(request)
        if learner_id is None:
            return _api_error(401, "INVALID_TOKEN", "missing, invalid, or expired bearer token")
        handle = registry.for_learner(learner_id)
        if handle is None:
            model = store.load(learner_id)
            session = start_session(model, kb, config, questionnaire, store=store)
            handle = SessionHandle(session_id=uuid4().hex, learner_id=learner_id, session=session)
            registry.add(handle)
        return {"session_id": handle.session_id, "state": handle.session.state.value}

    @app.get("/api/sessions/{session_id}/step")
    async def next_step(session_id: str, request: Request):
        handle = _owned_session(request, session_id)
        if isinstance(handle, JSONResponse):
            return handle
        with handle.lock:
            session = handle.session
            if session.state is SessionState.SELECTING_CONCEPT:
                step = session.advance()
            elif session.state is SessionState.PRESENTING:
                if session.presentation_delivered:
                    step = session.advance()  # re-fetch acknowledges the presentation
                else:
                    session.presentation_delivered = True
                    step = session.current_step()
            else:
                step = session.current_step()
            return {"session_id": session_id, "state": session.state.value, "step": step}

    @app.post("/api/sessions/{session_id}/submit")
    async def submit(session_id: str, payload: dict, request: Request):
        handle = _owned_session(request, session_id)
        if isinstance(handle, JSONResponse):
            return handle
        has_responses = "responses" in payload
        has_answers = "answers" in payload
        if has_responses == has_answers:
            return _api_error(
                422,
                "MALFORMED_PAYLOAD",
                "payload must contain exactly one of 'responses' or 'answers'",
            )
        with handle.lock:
            session = handle.session
            if has_responses:
                body = payload["responses"]
                if not isinstance(body, dict):
                    return _api_error(422, "MALFORMED_PAYLOAD", "'responses' must be an object")
                result = session.submit_questionnaire(body)
            else:
                body = payload["answers"]
                if not isinstance(body, dict):
                    return _api_error(422, "MALFORMED_PAYLOAD", "'answers' must be an object")
                _graded, result = session.submit_answers(body)
            return {"session_id": session_id, "state": session.state.value, "result": result}

    @app.get("/api/learners/{learner_id}/model")
    async def learner_model(learner_id: str, request: Request):
        caller = _authenticate(request)
        if caller is None:
            return _api_error(401, "INVALID_TOKEN", "missing, invalid, or expired bearer token")
        if caller != learner_id:
            return _api_error(404, "LEARNER_NOT_FOUND", f"no record for learner '{learner_id}'")
        handle = registry.for_learner(learner_id)
        model = handle.session.model if handle else store.load(learner_id)
        return _model_view(kb, model)

    @app.get("/api/faq")
    async def get_faq():
        return faq

    if settings.frontend_dir is not None and Path(settings.frontend_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/app", StaticFiles(directory=settings.frontend_dir, html=True), name="app")

    return app


def _settings_from_args(argv: list[str] | None = None) -> tuple[ServiceSettings, str, int]:
    parser = argparse.ArgumentParser(
        prog="adaptutor-service", description="Run the tutoring HTTP service."
    )
    parser.add_argument("--kb", default=os.environ.get("TUTOR_KB"), help="knowledge-base JSON path")
    parser.add_argument(
        "--pedagogy-config",
        default=os.environ.get("TUTOR_PEDAGOGY"),
        help="pedagogy config JSON path",
    )
    parser.add_argument(
        "--questionnaire",
        default=os.environ.get("TUTOR_QUESTIONNAIRE"),
        help="questionnaire JSON path",
    )
    parser.add_argument(
        "--data-dir", default=os.environ.get("TUTOR_DATA_DIR", "tutor_data"),
        help="learner record directory",
    )
    parser.add_argument(
        "--bind", default=os.environ.get("TUTOR_BIND", "127.0.0.1:8000"), help="host:port"
    )
    parser.add_argument(
        "--token-ttl",
        type=int,
        default=int(os.environ.get("TUTOR_TOKEN_TTL", "86400")),
        help="token lifetime in seconds",
    )
    parser.add_argument(
        "--frontend",
        default=os.environ.get("TUTOR_FRONTEND"),
        help="optional static frontend directory to mount at /app",
    )
    args = parser.parse_args(argv)
    host, _, port = args.bind.partition(":")
    settings = ServiceSettings(
        kb_path=Path(args.kb) if args.kb else None,
        pedagogy_path=Path(args.pedagogy_config) if args.pedagogy_config else None,
        questionnaire_path=Path(args.questionnaire) if args.questionnaire else None,
        data_dir=Path(args.data_dir),
        token_ttl_seconds=args.token_ttl,
        frontend_dir=Path(args.frontend) if args.frontend else None,
    )
    return settings, host or "127.0.0.1", int(port or 8000)


def main(argv: list[str] | None = None) -> None:
    import uvicorn

    logging.basicConfig(level=logging.INFO)
    settings, host, port = _settings_from_args(argv)
    uvicorn.run(create_app(settings), host=host, port=port)


if __name__ == "__main__":
    main()
