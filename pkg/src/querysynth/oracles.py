"""Outcome sources: simulated hidden target, scripted replay, live external.

A hidden-target oracle can never contradict the engine (the true target
survives every filter). External answers come from humans, who can err, so
inconsistency detection lives here too.
"""

from __future__ import annotations

import json
import queue
from dataclasses import dataclass
from typing import Mapping, Sequence

from . import constraints as C
from .dsl import cached_targets, evaluate_concrete, is_valid_target
from .dsl.nodes import SearchSpec
from .errors import InvalidOutcome, OracleTimeout, QuerySynthError, ReplayExhausted

DEFAULT_EXTERNAL_TIMEOUT = 600.0  # seconds of human thinking time per round


class HiddenTargetOracle:
    """Answers by evaluating the spec against a fixed secret target."""

    def __init__(self, spec: SearchSpec, target: Sequence[int]):
        self.target = tuple(int(x) for x in target)
        if not is_valid_target(spec, self.target):
            raise QuerySynthError(f"{self.target} is not a valid target")

    def answer(self, spec: SearchSpec, q_star: Sequence[int]) -> str:
        return evaluate_concrete(spec, q_star, self.target)


class ReplayOracle:
    """Plays back a scripted outcome list; errs when over-asked."""

    def __init__(self, outcomes: Sequence[str]):
        self.outcomes = list(outcomes)
        self.position = 0

    @staticmethod
    def from_transcript(path_or_data) -> "ReplayOracle":
        if isinstance(path_or_data, (str, bytes)) or hasattr(path_or_data, "__fspath__"):
            with open(path_or_data, encoding="utf-8") as fh:
                data = json.load(fh)
        else:
            data = path_or_data
        return ReplayOracle([r["outcome"] for r in data["rounds"]])

    def answer(self, spec: SearchSpec, q_star: Sequence[int]) -> str:
        if self.position >= len(self.outcomes):
            raise ReplayExhausted(
                f"replay script has only {len(self.outcomes)} answers")
        out = self.outcomes[self.position]
        self.position += 1
        if out not in spec.outcomes:
            raise InvalidOutcome(f"replayed label {out!r} is not declared")
        return out


class ExternalOracle:
    """Synchronous bridge to an out-of-process answerer (e.g. a human).

    The engine side calls answer(); the other side polls pending() and calls
    reply(). One oracle serves one session.
    """

    def __init__(self, timeout: float = DEFAULT_EXTERNAL_TIMEOUT):
        self.timeout = timeout
        self._questions: queue.Queue = queue.Queue(maxsize=1)
        self._answers: queue.Queue = queue.Queue(maxsize=1)

    def answer(self, spec: SearchSpec, q_star: Sequence[int]) -> str:
        self._questions.put(tuple(q_star))
        try:
            label = self._answers.get(timeout=self.timeout)
        except queue.Empty:
            raise OracleTimeout(f"no answer within {self.timeout}s") from None
        if label not in spec.outcomes:
            raise InvalidOutcome(f"external label {label!r} is not declared")
        return label

    def pending(self, timeout: float | None = None) -> tuple[int, ...]:
        try:
            return self._questions.get(timeout=timeout)
        except queue.Empty:
            raise OracleTimeout("engine asked nothing") from None

    def reply(self, label: str) -> None:
        self._answers.put(label)


# --- inconsistency forensics ---------------------------------------------------


@dataclass(frozen=True)
class InconsistencyReport:
    """Produced when answers filtered the candidate set to nothing."""

    empty_at_round: int  # 1-based round whose answer emptied the set
    flip_round: int | None  # earliest round a single flip can repair, if any
    restoring_outcomes: tuple[str, ...] = ()

    def describe(self) -> str:
        if self.flip_round is None:
            return (f"answers became contradictory at round {self.empty_at_round}; "
                    "no single changed answer repairs them")
        alts = ", ".join(self.restoring_outcomes)
        return (f"answers became contradictory at round {self.empty_at_round}; "
                f"changing round {self.flip_round} to one of [{alts}] would be consistent")


def _replay_filter(spec: SearchSpec, phi: Mapping[str, C.Formula],
                   rounds: Sequence[tuple[tuple[int, ...], str]]):
    """Filter the full target set through (query, outcome) pairs.

    Returns (surviving candidates, index of the first round that emptied them
    or None).
    """
    candidates = cached_targets(spec)
    for i, (q, outcome) in enumerate(rounds):
        obs = C.substitute_query(phi[outcome], q)
        candidates = C.filter_candidates(tuple(candidates), obs)
        if not candidates:
            return (), i
    return tuple(candidates), None


def detect_inconsistency(state, attempted: tuple[Sequence[int], str] | None = None
                         ) -> InconsistencyReport | None:
    """Check a session's answers; report the earliest repairable round.

    `attempted` appends a (query, outcome) pair that was rejected by the
    knowledge filter before being recorded.
    """
    spec, phi = state.spec, state.phi
    rounds = [(r.query, r.outcome) for r in state.transcript]
    if attempted is not None:
        rounds.append((tuple(int(x) for x in attempted[0]), attempted[1]))
    _, empty_at = _replay_filter(spec, phi, rounds)
    if empty_at is None:
        return None
    for i in range(len(rounds)):
        restoring = []
        for alt in spec.outcomes:
            if alt == rounds[i][1]:
                continue
            flipped = list(rounds)
            flipped[i] = (rounds[i][0], alt)
            _, still_empty = _replay_filter(spec, phi, flipped)
            if still_empty is None:
                restoring.append(alt)
        if restoring:
            return InconsistencyReport(empty_at + 1, i + 1, tuple(restoring))
    return InconsistencyReport(empty_at + 1, None)
