"""Model counts and outcome distributions over the materialized candidate set.

Counting is exact enumeration: the number of surviving candidates satisfying
an outcome constraint with the query pinned. Two backends exist on purpose —
the constraint evaluator here and an interpreter tally — and must agree;
their agreement is the executable form of the analysis soundness claim.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Protocol, Sequence

import numpy as np

from . import constraints as C
from .dsl import evaluate_concrete
from .dsl.nodes import SearchSpec


class ModelCounter(Protocol):
    """Counting backend slot.

    The shipped backend enumerates the materialized candidates exactly; a
    parametric (piecewise symbolic) counter could be slotted in for domains
    that are too large to materialize.
    """

    def count(self, phi: C.Formula, k: C.Knowledge, q_star: Sequence[int]) -> int: ...


class EnumerationCounter:
    def count(self, phi: C.Formula, k: C.Knowledge, q_star: Sequence[int]) -> int:
        q = tuple(int(x) for x in q_star)
        mask = C.compile_vector(phi)(k.columns(), q, k.ones())
        return int(np.count_nonzero(mask))


DEFAULT_COUNTER = EnumerationCounter()


@dataclass(frozen=True)
class OutcomeDistribution:
    query: tuple[int, ...]
    counts: tuple[int, ...]  # aligned with `outcomes`
    outcomes: tuple[str, ...]
    total: int

    @property
    def probs(self) -> tuple[float, ...]:
        return tuple(c / self.total for c in self.counts)

    def count_of(self, outcome: str) -> int:
        return self.counts[self.outcomes.index(outcome)]


class OutcomeCounter:
    """Per-round counting cache: one knowledge set, many queries.

    Distributions are pure functions of (phi, knowledge, query); the cache
    is an optimization for the argmax scan and dies with the round.
    """

    def __init__(self, phi: Mapping[str, C.Formula], knowledge: C.Knowledge):
        self.outcomes = tuple(phi.keys())
        self.knowledge = knowledge
        self._fns = [C.compile_vector(phi[o]) for o in self.outcomes]
        self._cols = knowledge.columns()
        self._ones = knowledge.ones()
        self._cache: dict[tuple[int, ...], tuple[int, ...]] = {}

    def counts(self, q_star: Sequence[int]) -> tuple[int, ...]:
        key = tuple(int(x) for x in q_star)
        hit = self._cache.get(key)
        if hit is None:
            hit = tuple(int(np.count_nonzero(fn(self._cols, key, self._ones)))
                        for fn in self._fns)
            self._cache[key] = hit
        return hit

    def distribution(self, q_star: Sequence[int]) -> OutcomeDistribution:
        key = tuple(int(x) for x in q_star)
        counts = self.counts(key)
        total = len(self.knowledge)
        dist = OutcomeDistribution(key, counts, self.outcomes, total)
        if sum(counts) != total:
            raise AssertionError(
                f"outcome constraints do not partition the candidates at {key}: "
                f"{counts} vs {total}")
        return dist


def count_models(phi: C.Formula, k: C.Knowledge, q_star: Sequence[int],
                 counter: ModelCounter = DEFAULT_COUNTER) -> int:
    """Candidates in k satisfying phi with the query substituted."""
    return counter.count(phi, k, q_star)


def outcome_distribution(phi_map: Mapping[str, C.Formula], k: C.Knowledge,
                         q_star: Sequence[int]) -> OutcomeDistribution:
    return OutcomeCounter(phi_map, k).distribution(q_star)


def interpreter_counts(spec: SearchSpec, k: C.Knowledge,
                       q_star: Sequence[int]) -> dict[str, int]:
    """Tally outcome labels by running the concrete interpreter per candidate."""
    q = tuple(int(x) for x in q_star)
    counts = {o: 0 for o in spec.outcomes}
    for t in k.candidates:
        counts[evaluate_concrete(spec, q, t)] += 1
    return counts


def count_models_by_constraint_eval(
    phi: C.Formula,
    k: C.Knowledge,
    q_star: Sequence[int],
    spec: SearchSpec,
    phi_map: Mapping[str, C.Formula],
) -> int:
    """Cross-check backend: count via the original interpreter.

    phi must be one of phi_map's formulas; the count returned is the tally of
    the label tied to it.
    """
    label = None
    for o, f in phi_map.items():
        if f == phi:
            label = o
            break
    if label is None:
        raise ValueError("phi is not one of the outcome constraints")
    return interpreter_counts(spec, k, q_star)[label]
