"""HTTP API for the posteditor UI and scripts.

A thin adapter over the pipeline: every response can be reproduced by
direct pipeline calls with the same inputs.  Sessions hold a document and
its per-utterance states; edits are serialized per utterance through
optimistic version numbers (a stale version gets 409).  Sessions are
isolated from each other except through the shared association counts,
which is the learning channel.

Paths, bodies and response fields are documented in docs/api.md.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field, replace
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel

from .errors import (
    InputError,
    LuNotCandidate,
    ParseError,
    UnknownAttribute,
    UnknownNode,
    ValidationFailed,
)
from .graph import UnlDocument, parse_document
from .pipeline import (
    ChooseLu,
    DeconvConfig,
    SetAttribute,
    UtteranceState,
    deconvert,
    edit_and_redeconvert,
    export_enriched_graph,
    global_replace,
    node_candidates,
    redeconvert,
    resolve_trace,
)
from .store import load_session, save_session
from .validate import validate

POLICIES = ("always", "every-k", "on-demand")


@dataclass
class Session:
    id: str
    document: UnlDocument
    document_text: str
    config: DeconvConfig
    states: list[UtteranceState] = field(default_factory=list)
    policy: str = "always"
    k: int = 1
    lock: threading.Lock = field(default_factory=threading.Lock)

    def utterance(self, u: str) -> UtteranceState:
        try:
            idx = int(u.lstrip("u"))
            return self.states[idx]
        except (ValueError, IndexError):
            raise HTTPException(404, f"unknown utterance {u!r}") from None


class CreateSession(BaseModel):
    document: str
    seed: int = 0
    profile: str | None = None


class ChooseBody(BaseModel):
    lu: str
    version: int | None = None


class AttributeBody(BaseModel):
    name: str
    value: str | None = None
    level: str = "interlingual"
    version: int | None = None


class ReplaceBody(BaseModel):
    from_lu: str
    to_lu: str


class PolicyBody(BaseModel):
    policy: str
    k: int | None = None


def _utterance_json(session: Session, idx: int) -> dict:
    state = session.states[idx]
    out = {
        "id": f"u{idx}",
        "index": idx,
        "version": state.version,
        "dirty_from": state.dirty_from,
    }
    if state.text is not None:
        out["rendered"] = state.text.rendered
        out["marked"] = state.text.marked
        out["tokens"] = [t.to_json() for t in state.text.tokens]
    return out


def create_app(config: DeconvConfig, session_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="deconv", docs_url=None, redoc_url=None)
    sessions: dict[str, Session] = {}
    session_dir_path = Path(session_dir) if session_dir else None

    def persist(session: Session):
        if session_dir_path is None:
            return
        session_dir_path.mkdir(parents=True, exist_ok=True)
        header = {
            "id": session.id,
            "document": session.document_text,
            "seed": session.config.seed,
            "policy": session.policy,
            "k": session.k,
        }
        save_session(session_dir_path / f"{session.id}.session", header, session.states)

    def get_session(s: str) -> Session:
        if s in sessions:
            return sessions[s]
        if session_dir_path is not None:
            path = session_dir_path / f"{s}.session"
            if path.exists():
                header, states = load_session(path, config)
                cfg = replace(config, seed=header["seed"])
                for state in states:
                    state.config = cfg
                session = Session(
                    id=s,
                    document=parse_document(header["document"]),
                    document_text=header["document"],
                    config=cfg,
                    states=states,
                    policy=header["policy"],
                    k=header["k"],
                )
                sessions[s] = session
                return session
        raise HTTPException(404, f"unknown session {s!r}")

    def check_version(state: UtteranceState, version: int | None):
        if version is not None and version != state.version:
            raise HTTPException(
                409,
                f"version conflict: utterance at {state.version}, request at {version}",
            )

    def run_edit(session: Session, state: UtteranceState, edit, version: int | None):
        with session.lock:
            check_version(state, version)
            try:
                edit_and_redeconvert(state, edit, policy=session.policy, k=session.k)
            except (UnknownNode, UnknownAttribute) as exc:
                raise HTTPException(404, str(exc)) from exc
            except LuNotCandidate as exc:
                raise HTTPException(400, str(exc)) from exc
            persist(session)

    @app.post("/sessions")
    def create_session(body: CreateSession):
        try:
            document = parse_document(body.document)
        except ParseError as exc:
            raise HTTPException(400, str(exc)) from exc
        cfg = replace(config, seed=body.seed)
        if body.profile:
            raise HTTPException(400, "profile switching is configured at server start")
        session = Session(
            id=uuid.uuid4().hex,
            document=document,
            document_text=body.document,
            config=cfg,
        )
        reports = []
        for idx, utt in enumerate(document.utterances):
            report = validate(utt.graph, cfg.inventories)
            reports.append({"id": f"u{idx}", "validation": report.to_json()})
            session.states.append(UtteranceState(graph=utt.graph, config=cfg))
        sessions[session.id] = session
        persist(session)
        return {"session": session.id, "utterances": reports}

    @app.post("/sessions/{s}/deconvert")
    def deconvert_session(s: str):
        session = get_session(s)
        with session.lock:
            failures = []
            for idx, state in enumerate(session.states):
                try:
                    if state.dirty_from is not None:
                        redeconvert(state)
                except ValidationFailed as exc:
                    failures.append({"id": f"u{idx}", "validation": exc.report.to_json()})
            if failures:
                raise HTTPException(422, detail={"failures": failures})
            persist(session)
            return {
                "utterances": [
                    _utterance_json(session, i) for i in range(len(session.states))
                ]
            }

    @app.get("/sessions/{s}/utterances/{u}/tokens/{i}/trace")
    def trace(s: str, u: str, i: int):
        session = get_session(s)
        state = session.utterance(u)
        try:
            chain = resolve_trace(state, token_index=i)
        except UnknownNode as exc:
            raise HTTPException(404, str(exc)) from exc
        except InputError as exc:
            raise HTTPException(400, str(exc)) from exc
        return {"chain": [{"stage": stage, **info} for stage, info in chain]}

    @app.get("/sessions/{s}/utterances/{u}/nodes/{n}/candidates")
    def candidates(s: str, u: str, n: int, widen: bool = False):
        session = get_session(s)
        state = session.utterance(u)
        try:
            return node_candidates(state, n, widen=widen)
        except UnknownNode as exc:
            raise HTTPException(404, str(exc)) from exc

    @app.post("/sessions/{s}/utterances/{u}/nodes/{n}/choose")
    def choose(s: str, u: str, n: int, body: ChooseBody):
        session = get_session(s)
        state = session.utterance(u)
        run_edit(session, state, ChooseLu(node=n, lu=body.lu), body.version)
        return {"utterance": _utterance_json(session, session.states.index(state))}

    @app.post("/sessions/{s}/utterances/{u}/nodes/{n}/attributes")
    def set_attribute(s: str, u: str, n: int, body: AttributeBody):
        session = get_session(s)
        state = session.utterance(u)
        edit = SetAttribute(node=n, name=body.name, value=body.value, level=body.level)
        run_edit(session, state, edit, body.version)
        return {"utterance": _utterance_json(session, session.states.index(state))}

    @app.post("/sessions/{s}/replace")
    def replace_document(s: str, body: ReplaceBody):
        session = get_session(s)
        with session.lock:
            result = global_replace(session.states, body.from_lu, body.to_lu)
            persist(session)
            return {
                "changed": [f"u{i}" for i in result.changed],
                "skipped": result.skipped,
                "utterances": [
                    _utterance_json(session, i) for i in result.changed
                ],
            }

    @app.get("/sessions/{s}/export", response_class=PlainTextResponse)
    def export(s: str):
        session = get_session(s)
        blocks = [export_enriched_graph(state) for state in session.states]
        return "\n".join(blocks)

    @app.put("/sessions/{s}/policy")
    def set_policy(s: str, body: PolicyBody):
        session = get_session(s)
        if body.policy not in POLICIES:
            raise HTTPException(400, f"unknown policy {body.policy!r}")
        with session.lock:
            session.policy = body.policy
            if body.k is not None:
                if body.k < 1:
                    raise HTTPException(400, "k must be >= 1")
                session.k = body.k
            persist(session)
        return {"policy": session.policy, "k": session.k}

    @app.post("/sessions/{s}/redeconvert")
    def redeconvert_session(s: str):
        session = get_session(s)
        with session.lock:
            for state in session.states:
                if state.dirty_from is not None:
                    redeconvert(state)
            persist(session)
            return {
                "utterances": [
                    _utterance_json(session, i) for i in range(len(session.states))
                ]
            }

    return app
