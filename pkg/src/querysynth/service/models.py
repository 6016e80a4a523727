"""Request/response bodies for the session service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class DeclInfo(BaseModel):
    name: str
    dim: int
    ranges: list[tuple[int, int]]


class SpecInfo(BaseModel):
    name: str
    title: str
    params: str
    outcomes: list[str]
    n_targets: int
    n_queries: int
    tier: str
    query_decls: list[DeclInfo]
    target_decls: list[DeclInfo]
    display: Optional[dict] = None


class CreateSessionRequest(BaseModel):
    spec: Optional[str] = Field(default=None, description="corpus entry name")
    source: Optional[str] = Field(default=None, description="inline .search source")
    name: Optional[str] = Field(default=None, description="name for an uploaded source")
    mode: Literal["human-oracle", "hidden-target-demo"] = "human-oracle"
    seed: int = 0


class PendingQuery(BaseModel):
    values: list[int]
    entropy_bits: float
    candidate_count: int


class SessionCreated(BaseModel):
    session_id: str
    spec: str
    mode: str
    status: str
    outcomes: list[str]
    round: int
    candidate_count: int
    pending_query: Optional[PendingQuery]
    query_decls: list[DeclInfo]
    target_decls: list[DeclInfo]
    display: Optional[dict] = None


class AnswerRequest(BaseModel):
    outcome: Optional[str] = Field(
        default=None,
        description="required in human-oracle mode; omitted in demo mode, where the "
                    "hidden target answers")
    round: Optional[int] = Field(
        default=None,
        description="1-based round this answer responds to; a mismatch means the "
                    "query on screen is stale and the answer is rejected")


class InconsistencyInfo(BaseModel):
    empty_at_round: int
    flip_round: Optional[int]
    restoring_outcomes: list[str]
    message: str


class AnswerResponse(BaseModel):
    session_id: str
    status: str  # running | converged | inconsistent
    round: int
    outcome: str
    candidate_count: int
    pending_query: Optional[PendingQuery] = None
    final_candidates: Optional[list[list[int]]] = None
    inconsistency: Optional[InconsistencyInfo] = None


class RoundInfo(BaseModel):
    round: int
    query: list[int]
    entropy_bits: float
    outcome: str
    candidates_before: int
    candidates_after: int


class SessionSnapshot(BaseModel):
    session_id: str
    spec: str
    mode: str
    status: str
    outcomes: list[str]
    round: int
    candidate_count: int
    pending_query: Optional[PendingQuery]
    transcript: list[RoundInfo]
    final_candidates: Optional[list[list[int]]] = None
    inconsistency: Optional[InconsistencyInfo] = None
    query_decls: list[DeclInfo]
    target_decls: list[DeclInfo]
    display: Optional[dict] = None


class ErrorBody(BaseModel):
    error: str
    message: str
