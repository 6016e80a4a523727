"""The meta-search loop: worthwhile queries, entropy argmax, knowledge update.

Each round scores queries by the Shannon entropy of their outcome distribution
over the surviving candidates and plays a maximal one (lexicographically
smallest on ties). A query is worthwhile exactly when its entropy is positive,
i.e. when the candidates do not all map to one outcome. The session converges
when no valid query is worthwhile.

Query spaces up to the scan cap are scanned exhaustively, which makes the
emptiness test exact. Larger spaces fall back to uniform accept-reject
sampling of the declared box against the validity predicate; sampled sessions
are flagged in the transcript because convergence is then only as strong as
the sample, with termination still guaranteed by the no-repeat rule and the
round cap.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace
from typing import Iterator, Mapping, Sequence

from . import constraints as C
from .counting import OutcomeCounter, OutcomeDistribution
from .dsl import cached_queries, cached_targets, is_valid_query, query_box_size
from .dsl.nodes import SearchSpec
from .errors import (
    CapacityError,
    InvalidOutcome,
    NoWorthwhileQuery,
    QuerySynthError,
    RoundLimitExceeded,
)
from .symexec import SymexecResult, symbolic_execute

DEFAULT_SCAN_CAP = 250_000
DEFAULT_SAMPLE_BUDGET = 20_000


@dataclass(frozen=True)
class SynthesisConfig:
    scan_cap: int = DEFAULT_SCAN_CAP
    sample_budget: int = DEFAULT_SAMPLE_BUDGET
    seed: int = 0
    max_rounds: int | None = None  # None: 10 * |T|
    enumeration_cap: int = 2_000_000
    path_cap: int = 100_000

    def round_cap(self, n_targets: int) -> int:
        return self.max_rounds if self.max_rounds is not None else 10 * n_targets


@dataclass(frozen=True)
class QueryScore:
    query: tuple[int, ...]
    distribution: OutcomeDistribution
    entropy_bits: float


@dataclass(frozen=True)
class Round:
    index: int  # 1-based
    query: tuple[int, ...]
    distribution: OutcomeDistribution
    outcome: str
    entropy_bits: float
    candidates_before: int
    candidates_after: int


@dataclass(frozen=True)
class SessionState:
    spec: SearchSpec
    phi: Mapping[str, C.Formula]
    knowledge: C.Knowledge
    transcript: tuple[Round, ...]
    status: str  # "running" | "converged"
    config: SynthesisConfig
    pending: QueryScore | None
    sampled: bool  # selection ran in sampling mode at least once
    symstats: object = field(default=None, compare=False, repr=False)

    @property
    def rounds_played(self) -> int:
        return len(self.transcript)

    @property
    def played_queries(self) -> frozenset:
        return frozenset(r.query for r in self.transcript)


# --- scoring primitives ------------------------------------------------------


def entropy_from_counts(counts: Sequence[int]) -> float:
    """Shannon entropy in bits of counts/total, with 0 log 0 = 0.

    Counts are accumulated in descending order so equal multisets produce
    bit-identical floats, which the deterministic tie-break relies on.
    """
    total = sum(counts)
    if total <= 0:
        raise ValueError("entropy of an empty distribution")
    h = 0.0
    for c in sorted(counts, reverse=True):
        if c == 0:
            continue
        p = c / total
        h -= p * math.log2(p)
    return h


def entropy(dist: OutcomeDistribution) -> float:
    return entropy_from_counts(dist.counts)


def is_worthwhile(phi_map: Mapping[str, C.Formula], k: C.Knowledge,
                  q_hat: Sequence[int]) -> bool:
    """Candidate-pair form: two surviving candidates disagree under q_hat."""
    counts = OutcomeCounter(phi_map, k).counts(q_hat)
    return max(counts) < len(k)


def is_worthwhile_eq2(phi_map: Mapping[str, C.Formula], k: C.Knowledge,
                      q_hat: Sequence[int],
                      solver: C.SatSolver = C.DEFAULT_SOLVER) -> bool:
    """Literal filter-predicate form: some outcome is possible and not implied."""
    q = tuple(int(x) for x in q_hat)
    for phi in phi_map.values():
        possible = C.is_satisfiable_over(phi, k.candidates, q, solver)
        not_implied = C.is_satisfiable_over(C.Not(phi), k.candidates, q, solver)
        if possible and not_implied:
            return True
    return False


# --- query space -------------------------------------------------------------


def _query_list(spec: SearchSpec, config: SynthesisConfig) -> tuple[tuple[int, ...], ...] | None:
    """Full valid query list in scan mode, None when the box exceeds the cap."""
    if query_box_size(spec) > config.scan_cap:
        return None
    return cached_queries(spec, cap=max(config.scan_cap, 1))


def _sample_queries(spec: SearchSpec, config: SynthesisConfig,
                    round_index: int) -> list[tuple[int, ...]]:
    """Accept-reject sample of the query box; deterministic per (seed, round)."""
    if config.sample_budget <= 0:
        raise CapacityError(
            "query box exceeds the scan cap and the sample budget is zero")
    rng = random.Random(f"{config.seed}:{round_index}")
    ranges = spec.query_ranges
    seen = set()
    out = []
    for _ in range(config.sample_budget):
        q = tuple(rng.randint(lo, hi) for lo, hi in ranges)
        if q in seen:
            continue
        if not is_valid_query(spec, q):
            continue
        seen.add(q)
        out.append(q)
    out.sort()
    return out


def worthwhile_queries(phi_map: Mapping[str, C.Formula], k: C.Knowledge,
                       spec: SearchSpec,
                       config: SynthesisConfig = SynthesisConfig()) -> Iterator[tuple[int, ...]]:
    """Yield worthwhile queries: the exact set in scan mode, else a filtered sample."""
    queries = _query_list(spec, config)
    if queries is None:
        queries = _sample_queries(spec, config, round_index=0)
    counter = OutcomeCounter(phi_map, k)
    n = len(k)
    for q in queries:
        if max(counter.counts(q)) < n:
            yield q


def _select(counter: OutcomeCounter, queries, n: int,
            exclude: frozenset = frozenset()) -> QueryScore | None:
    best_h = -1.0
    best_q = None
    for q in queries:
        if q in exclude:
            continue
        counts = counter.counts(q)
        if max(counts) == n:
            continue
        h = entropy_from_counts(counts)
        if h > best_h or (h == best_h and (best_q is None or q < best_q)):
            best_h = h
            best_q = q
    if best_q is None:
        return None
    return QueryScore(best_q, counter.distribution(best_q), best_h)


def select_query(phi_map: Mapping[str, C.Formula], k: C.Knowledge, spec: SearchSpec,
                 config: SynthesisConfig = SynthesisConfig()) -> QueryScore:
    """Maximal-entropy worthwhile query; NoWorthwhileQuery when none exists."""
    queries = _query_list(spec, config)
    if queries is None:
        queries = _sample_queries(spec, config, round_index=0)
    score = _select(OutcomeCounter(phi_map, k), queries, len(k))
    if score is None:
        raise NoWorthwhileQuery("no valid query can gain information")
    return score


# --- session loop ------------------------------------------------------------


def _next_pending(spec, phi_map, knowledge, config, transcript, scan_queries):
    """Select the next query or None for convergence; enforces the round cap."""
    counter = OutcomeCounter(phi_map, knowledge)
    sampled_round = scan_queries is None
    if sampled_round:
        queries = _sample_queries(spec, config, round_index=len(transcript) + 1)
        exclude = frozenset(r.query for r in transcript)
    else:
        queries = scan_queries
        exclude = frozenset()
    score = _select(counter, queries, len(knowledge), exclude)
    if score is None:
        return None, sampled_round
    cap = config.round_cap(len(cached_targets(spec, config.enumeration_cap)))
    if len(transcript) >= cap:
        raise RoundLimitExceeded(
            f"round cap of {cap} hit with worthwhile queries remaining")
    return score, sampled_round


def start_session(spec: SearchSpec, config: SynthesisConfig = SynthesisConfig(),
                  analysis: SymexecResult | None = None) -> SessionState:
    """Symbolically execute (once) and select the first query."""
    if analysis is None:
        analysis = symbolic_execute(spec, path_cap=config.path_cap)
    targets = cached_targets(spec, config.enumeration_cap)
    if not targets:
        raise QuerySynthError("spec admits no valid target")
    knowledge = C.Knowledge.from_targets(targets)
    scan_queries = _query_list(spec, config)
    pending, sampled = _next_pending(spec, analysis.phi, knowledge, config, (), scan_queries)
    state = SessionState(
        spec=spec,
        phi=analysis.phi,
        knowledge=knowledge,
        transcript=(),
        status="running" if pending else "converged",
        config=config,
        pending=pending,
        sampled=sampled,
        symstats=analysis.stats,
    )
    return state


def apply_outcome(state: SessionState, outcome: str) -> SessionState:
    """Record the oracle's answer for the pending query and advance one round."""
    if state.status != "running" or state.pending is None:
        raise QuerySynthError("session is not awaiting an answer")
    if outcome not in state.spec.outcomes:
        raise InvalidOutcome(f"{outcome!r} is not a declared outcome")
    score = state.pending
    if score.query in state.played_queries:
        raise QuerySynthError(f"query {score.query} selected twice; engine bug")
    obs = C.substitute_query(state.phi[outcome], score.query)
    knowledge = C.conjoin_and_filter(state.knowledge, obs)  # EmptyKnowledge propagates
    if len(knowledge) >= len(state.knowledge):
        raise QuerySynthError("knowledge did not shrink on a worthwhile query; engine bug")
    rec = Round(
        index=len(state.transcript) + 1,
        query=score.query,
        distribution=score.distribution,
        outcome=outcome,
        entropy_bits=score.entropy_bits,
        candidates_before=len(state.knowledge),
        candidates_after=len(knowledge),
    )
    transcript = state.transcript + (rec,)
    scan_queries = _query_list(state.spec, state.config)
    pending, sampled = _next_pending(
        state.spec, state.phi, knowledge, state.config, transcript, scan_queries)
    return replace(
        state,
        knowledge=knowledge,
        transcript=transcript,
        status="running" if pending else "converged",
        pending=pending,
        sampled=state.sampled or sampled,
    )


def step(state: SessionState, oracle) -> SessionState:
    """One synthesize/evaluate/update round against an oracle."""
    if state.status != "running":
        raise QuerySynthError("cannot step a converged session")
    outcome = oracle.answer(state.spec, state.pending.query)
    return apply_outcome(state, outcome)


def run_session(spec: SearchSpec, oracle,
                config: SynthesisConfig = SynthesisConfig(),
                analysis: SymexecResult | None = None) -> SessionState:
    """Drive the loop until no query is worthwhile; returns the final state."""
    state = start_session(spec, config, analysis)
    while state.status == "running":
        state = step(state, oracle)
    return state
