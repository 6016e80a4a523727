"""HTTP session service: one synthesizer loop per session, answers over REST.

Endpoints: GET /specs, POST /sessions, POST /sessions/{id}/answers,
GET /sessions/{id}. Errors use {"error": code, "message": text}. Mutations
on one session are serialized; a losing concurrent writer gets 409.
"""

from __future__ import annotations

import random
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from ..corpus import load_corpus
from ..dsl import cached_targets, evaluate_concrete, parse_spec
from ..dsl.nodes import SearchSpec
from ..errors import CapacityError, EmptyKnowledge, ParseError, QuerySynthError, SemanticError
from ..oracles import detect_inconsistency
from ..symexec import SymexecResult, symbolic_execute
from ..synthesis import SessionState, SynthesisConfig, apply_outcome, start_session
from .models import (
    AnswerRequest,
    AnswerResponse,
    CreateSessionRequest,
    DeclInfo,
    InconsistencyInfo,
    PendingQuery,
    RoundInfo,
    SessionCreated,
    SessionSnapshot,
    SpecInfo,
)
from .store import SessionRecord, SessionStore


def _err(status: int, code: str, message: str) -> HTTPException:
    return HTTPException(status_code=status, detail={"error": code, "message": message})


def _decls(decls) -> list[DeclInfo]:
    return [DeclInfo(name=d.name, dim=d.dim, ranges=list(d.ranges)) for d in decls]


def _pending(state: SessionState) -> PendingQuery | None:
    if state.pending is None:
        return None
    return PendingQuery(
        values=list(state.pending.query),
        entropy_bits=state.pending.entropy_bits,
        candidate_count=len(state.knowledge),
    )


def _inconsistency(record: SessionRecord) -> InconsistencyInfo | None:
    rep = record.inconsistency
    if rep is None:
        return None
    return InconsistencyInfo(
        empty_at_round=rep.empty_at_round,
        flip_round=rep.flip_round,
        restoring_outcomes=list(rep.restoring_outcomes),
        message=rep.describe(),
    )


def create_app(
    corpus_directory: Path | None = None,
    ttl_seconds: float = 86400.0,
    snapshot_dir: Path | str | None = None,
    config: SynthesisConfig = SynthesisConfig(),
) -> FastAPI:
    app = FastAPI(title="querysynth session service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    entries = {e.name: e for e in load_corpus(corpus_directory, validate="none")}
    store = SessionStore(ttl_seconds, snapshot_dir)
    analyses: dict[str, SymexecResult] = {}
    app.state.store = store

    @app.exception_handler(HTTPException)
    async def _http_error(request: Request, exc: HTTPException):
        detail = exc.detail
        if not isinstance(detail, dict) or "error" not in detail:
            detail = {"error": "http_error", "message": str(exc.detail)}
        return JSONResponse(status_code=exc.status_code, content=detail)

    def _analysis(name: str, spec: SearchSpec) -> SymexecResult:
        if name not in analyses:
            analyses[name] = symbolic_execute(spec, path_cap=config.path_cap)
        return analyses[name]

    @app.get("/specs", response_model=list[SpecInfo])
    def list_specs():
        out = []
        for e in entries.values():
            spec = e.spec()
            out.append(SpecInfo(
                name=e.name,
                title=e.title,
                params=e.params,
                outcomes=list(spec.outcomes),
                n_targets=e.expected_targets,
                n_queries=e.expected_queries,
                tier=e.tier,
                query_decls=_decls(spec.query_decls),
                target_decls=_decls(spec.target_decls),
                display=e.display,
            ))
        return out

    @app.post("/sessions", response_model=SessionCreated, status_code=201)
    def create_session(req: CreateSessionRequest):
        display = None
        if req.source is not None:
            try:
                spec = parse_spec(req.source, name=req.name or "uploaded")
            except (ParseError, SemanticError) as exc:
                raise _err(422, "invalid_spec", str(exc))
            analysis = None
        elif req.spec is not None:
            entry = entries.get(req.spec)
            if entry is None:
                raise _err(404, "unknown_spec", f"no corpus entry named {req.spec!r}")
            spec = entry.spec()
            display = entry.display
            analysis = _analysis(entry.name, spec)
        else:
            raise _err(422, "invalid_spec", "provide either 'spec' or 'source'")

        session_config = SynthesisConfig(
            scan_cap=config.scan_cap,
            sample_budget=config.sample_budget,
            seed=req.seed,
            max_rounds=config.max_rounds,
            enumeration_cap=config.enumeration_cap,
            path_cap=config.path_cap,
        )
        try:
            state = start_session(spec, session_config, analysis)
        except (CapacityError, QuerySynthError) as exc:
            raise _err(422, "invalid_spec", str(exc))

        target = None
        if req.mode == "hidden-target-demo":
            targets = cached_targets(spec, session_config.enumeration_cap)
            target = targets[random.Random(req.seed).randrange(len(targets))]

        record = SessionRecord(
            id=store.new_id(),
            spec=spec,
            mode=req.mode,
            state=state,
            display=display,
            target=target,
        )
        store.put(record)
        return SessionCreated(
            session_id=record.id,
            spec=spec.name,
            mode=record.mode,
            status=record.status,
            outcomes=list(spec.outcomes),
            round=state.rounds_played,
            candidate_count=len(state.knowledge),
            pending_query=_pending(state),
            query_decls=_decls(spec.query_decls),
            target_decls=_decls(spec.target_decls),
            display=display,
        )

    @app.post("/sessions/{session_id}/answers", response_model=AnswerResponse)
    def post_answer(session_id: str, req: AnswerRequest):
        record = store.get(session_id)
        if record is None:
            raise _err(404, "unknown_session", "no such session (it may have expired)")
        if not record.lock.acquire(blocking=False):
            raise _err(409, "busy", "another answer for this session is in flight")
        try:
            state = record.state
            if record.status != "running" or state.pending is None:
                raise _err(409, "no_pending_query",
                           f"session is {record.status}; no query awaits an answer")
            if req.round is not None and req.round != state.rounds_played + 1:
                raise _err(409, "stale_round",
                           f"answer targets round {req.round} but round "
                           f"{state.rounds_played + 1} is pending")
            if record.mode == "hidden-target-demo" and req.outcome is None:
                outcome = evaluate_concrete(record.spec, state.pending.query, record.target)
            elif req.outcome is None:
                raise _err(422, "missing_outcome", "human-oracle sessions must send an outcome")
            else:
                outcome = req.outcome
            if outcome not in record.spec.outcomes:
                raise _err(422, "undeclared_outcome",
                           f"{outcome!r} is not one of {list(record.spec.outcomes)}")
            try:
                record.state = apply_outcome(state, outcome)
            except EmptyKnowledge:
                record.attempted = (tuple(state.pending.query), outcome)
                record.inconsistency = detect_inconsistency(state, record.attempted)
                store.snapshot(record)
                return AnswerResponse(
                    session_id=record.id,
                    status="inconsistent",
                    round=state.rounds_played + 1,
                    outcome=outcome,
                    candidate_count=0,
                    inconsistency=_inconsistency(record),
                )
            store.snapshot(record)
            state = record.state
            return AnswerResponse(
                session_id=record.id,
                status=state.status,
                round=state.rounds_played,
                outcome=outcome,
                candidate_count=len(state.knowledge),
                pending_query=_pending(state),
                final_candidates=([list(t) for t in state.knowledge.candidates]
                                  if state.status == "converged" else None),
            )
        finally:
            record.lock.release()

    @app.get("/sessions/{session_id}", response_model=SessionSnapshot)
    def get_session(session_id: str):
        record = store.get(session_id)
        if record is None:
            raise _err(404, "unknown_session", "no such session (it may have expired)")
        state = record.state
        transcript = [RoundInfo(
            round=r.index,
            query=list(r.query),
            entropy_bits=r.entropy_bits,
            outcome=r.outcome,
            candidates_before=r.candidates_before,
            candidates_after=r.candidates_after,
        ) for r in state.transcript]
        if record.attempted is not None:
            transcript.append(RoundInfo(
                round=len(state.transcript) + 1,
                query=list(record.attempted[0]),
                entropy_bits=state.pending.entropy_bits if state.pending else 0.0,
                outcome=record.attempted[1],
                candidates_before=len(state.knowledge),
                candidates_after=0,
            ))
        return SessionSnapshot(
            session_id=record.id,
            spec=record.spec.name,
            mode=record.mode,
            status=record.status,
            outcomes=list(record.spec.outcomes),
            round=state.rounds_played,
            candidate_count=len(state.knowledge) if record.inconsistency is None else 0,
            pending_query=_pending(state) if record.status == "running" else None,
            transcript=transcript,
            final_candidates=([list(t) for t in state.knowledge.candidates]
                              if state.status == "converged" else None),
            inconsistency=_inconsistency(record),
            query_decls=_decls(record.spec.query_decls),
            target_decls=_decls(record.spec.target_decls),
            display=record.display,
        )

    return app
