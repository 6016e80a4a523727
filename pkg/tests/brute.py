"""Independent brute-force oracles used to freeze expected values.

Everything here works off plain outcome tables produced by the concrete
interpreter, deliberately bypassing the constraint/counting/synthesis path
it is used to check.
"""

from __future__ import annotations

import math
from functools import lru_cache

from querysynth import constraints as C
from querysynth.dsl import cached_queries, cached_targets, evaluate_concrete


def outcome_table(spec):
    """table[q][t] -> outcome label, via the interpreter only."""
    targets = cached_targets(spec)
    queries = cached_queries(spec)
    return {q: {t: evaluate_concrete(spec, q, t) for t in targets} for q in queries}


def brute_worthwhile(table, candidates, q) -> bool:
    seen = {table[q][t] for t in candidates}
    return len(seen) > 1


def brute_entropy(table, candidates, q) -> float:
    tally: dict[str, int] = {}
    for t in candidates:
        tally[table[q][t]] = tally.get(table[q][t], 0) + 1
    n = len(candidates)
    return -sum((c / n) * math.log2(c / n) for c in tally.values())


def optimal_expected_rounds(table, targets, queries) -> float:
    """Minimum expected query count over all adaptive strategies.

    Exhaustive recursion over knowledge sets with memoization; outcomes are
    assumed uniform over the surviving candidates. A strategy stops when one
    candidate remains, matching the engine's round accounting.
    """

    @lru_cache(maxsize=None)
    def opt(candidates: frozenset) -> float:
        if len(candidates) <= 1:
            return 0.0
        best = math.inf
        n = len(candidates)
        for q in queries:
            groups: dict[str, list] = {}
            for t in candidates:
                groups.setdefault(table[q][t], []).append(t)
            if len(groups) == 1:
                continue  # useless query
            cost = 1.0 + sum(len(g) / n * opt(frozenset(g)) for g in groups.values())
            if cost < best:
                best = cost
        if math.isinf(best):
            # no query separates these candidates; identification stalls here
            return 0.0
        return best

    return opt(frozenset(targets))


def random_instance(rng, max_targets=12, max_queries=12, max_outcomes=4):
    """A random deterministic outcome table compiled to outcome constraints.

    Returns (phi_map, knowledge, queries): 1-D targets/queries, formulas built
    from equality atoms so they exercise the same machinery as real specs.
    """
    n_t = rng.randint(1, max_targets)
    n_q = rng.randint(1, max_queries)
    n_o = rng.randint(1, max_outcomes)
    labels = [f"o{i}" for i in range(n_o)]
    table = {(q,): {(t,): labels[rng.randrange(n_o)] for t in range(n_t)}
             for q in range(n_q)}
    phi_map = {}
    tvar = C.TVar(C.TARGET, 0)
    qvar = C.TVar(C.QUERY, 0)
    for o in labels:
        cells = []
        for q in range(n_q):
            hit_ts = [t for t in range(n_t) if table[(q,)][(t,)] == o]
            if not hit_ts:
                continue
            ts = C.disj([C.Eq(tvar, C.TInt(t)) for t in hit_ts])
            cells.append(C.conj([C.Eq(qvar, C.TInt(q)), ts]))
        phi_map[o] = C.disj(cells) if cells else C.FALSE
    # random nonempty knowledge subset
    kept = [t for t in range(n_t) if rng.random() < 0.7]
    if not kept:
        kept = [rng.randrange(n_t)]
    knowledge = C.Knowledge.from_targets([(t,) for t in kept])
    queries = [(q,) for q in range(n_q)]
    return phi_map, knowledge, queries, table
