import random

import pytest

from querysynth import constraints as C
from querysynth.counting import (
    OutcomeCounter,
    count_models,
    count_models_by_constraint_eval,
    interpreter_counts,
    outcome_distribution,
)
from querysynth.dsl import cached_queries, cached_targets
from querysynth.symexec import symbolic_execute

T0 = C.TVar(C.TARGET, 0)
Q0 = C.TVar(C.QUERY, 0)
Q1 = C.TVar(C.QUERY, 1)

# the interval-search outcome constraints in their simplified form
PHI_L = C.Lt(T0, Q0)
PHI_M = C.And((C.le(Q0, T0), C.le(T0, Q1)))
PHI_H = C.Lt(Q1, T0)


def kappa(lo=1, hi=27):
    return C.Knowledge.from_targets([(t,) for t in range(lo, hi + 1)])


class TestCountModels:
    def test_low_at_interior_point(self):
        assert count_models(PHI_L, kappa(), (5, 20)) == 4  # q0 - 1

    def test_low_saturates_above_the_range(self):
        assert count_models(PHI_L, kappa(), (30, 35)) == 27

    def test_middle_at_reference_query(self):
        assert count_models(PHI_M, kappa(), (10, 18)) == 9

    def test_monotone_under_shrinking_knowledge(self):
        rng = random.Random(3)
        for _ in range(50):
            q = (rng.randint(-2, 30), rng.randint(-2, 30))
            big = kappa()
            small = kappa(*(sorted((rng.randint(1, 27), rng.randint(1, 27)))))
            for phi in (PHI_L, PHI_M, PHI_H):
                assert count_models(phi, small, q) <= count_models(phi, big, q)


class TestPiecewise:
    """Closed-form counts for the 1..27 interval-search instance.

    #L: 27 when q0 >= 27 (off by one exactly at q0 = 27), q0 - 1 on 1 <= q0 < 27,
    0 otherwise. #H: 27 when q1 < 0, 27 - q1 on 0 <= q1 < 27, 0 otherwise.
    """

    def brute_low(self, q0):
        return sum(1 for t in range(1, 28) if t < q0)

    def brute_high(self, q1):
        return sum(1 for t in range(1, 28) if t > q1)

    def test_low_chambers_exact(self):
        rng = random.Random(41)
        k = kappa()
        for _ in range(100):
            q0 = rng.randint(1, 26)
            assert count_models(PHI_L, k, (q0, rng.randint(-5, 35))) == q0 - 1
        for _ in range(100):
            q0 = rng.randint(28, 80)  # the q0 == 27 boundary is the suspect point
            assert count_models(PHI_L, k, (q0, 0)) == 27
        for _ in range(100):
            q0 = rng.randint(-40, 0)
            assert count_models(PHI_L, k, (q0, 0)) == 0

    def test_low_suspect_boundary_against_enumeration(self):
        # the printed chamber claims 27 at q0 = 27; enumeration says 26
        assert count_models(PHI_L, kappa(), (27, 0)) == self.brute_low(27) == 26

    def test_high_chambers_exact(self):
        rng = random.Random(42)
        k = kappa()
        for _ in range(100):
            q1 = rng.randint(-40, -1)
            assert count_models(PHI_H, k, (0, q1)) == 27
        for _ in range(100):
            q1 = rng.randint(0, 26)
            assert count_models(PHI_H, k, (0, q1)) == 27 - q1
        for _ in range(100):
            q1 = rng.randint(27, 80)
            assert count_models(PHI_H, k, (0, q1)) == 0

    def test_middle_consistent_chambers(self):
        rng = random.Random(43)
        k = kappa()
        for _ in range(100):
            q1 = rng.randint(28, 60)
            assert count_models(PHI_M, k, (rng.randint(-10, 1), q1)) == 27
        for _ in range(100):
            q0 = rng.randint(2, 27)
            assert count_models(PHI_M, k, (q0, rng.randint(28, 60))) == 28 - q0
        for _ in range(100):
            q1 = rng.randint(1, 27)
            assert count_models(PHI_M, k, (rng.randint(-10, 1), q1)) == q1
        # the misprinted chamber guard (q0 < 1) disagrees with enumeration
        brute = sum(1 for t in range(1, 28) if 0 <= t <= 5)
        assert count_models(PHI_M, k, (0, 5)) == brute == 5  # not q1 - q0 + 1 = 6


class TestDistribution:
    def test_worked_example_thirds(self, lmh27):
        res = symbolic_execute(lmh27)
        dist = outcome_distribution(res.phi, kappa(), (10, 18))
        assert dist.counts == (9, 9, 9)
        assert dist.probs == (pytest.approx(1 / 3), pytest.approx(1 / 3), pytest.approx(1 / 3))
        assert sum(dist.counts) == 27

    def test_singleton_knowledge_concentrates(self, lmh27):
        res = symbolic_execute(lmh27)
        dist = outcome_distribution(res.phi, kappa(5, 5), (10, 18))
        assert sorted(dist.counts) == [0, 0, 1]

    def test_useless_query_concentrates(self, lmh27):
        res = symbolic_execute(lmh27)
        dist = outcome_distribution(res.phi, kappa(10, 18), (3, 7))
        assert dist.counts == (0, 0, 9)

    def test_partition_invariant(self, lmh27):
        res = symbolic_execute(lmh27)
        counter = OutcomeCounter(res.phi, kappa())
        rng = random.Random(9)
        for _ in range(50):
            q = (rng.randint(-3, 31), rng.randint(-3, 31))
            assert sum(counter.counts(q)) == 27

    def test_counter_caches(self, lmh27):
        res = symbolic_execute(lmh27)
        counter = OutcomeCounter(res.phi, kappa())
        a = counter.counts((10, 18))
        assert counter.counts((10, 18)) is a


class TestInterpreterBackend:
    def test_agrees_on_lmh_reference_point(self, lmh27):
        res = symbolic_execute(lmh27)
        k = kappa()
        tallies = interpreter_counts(lmh27, k, (10, 18))
        assert tallies == {"Low": 9, "Middle": 9, "High": 9}
        for outcome, phi in res.phi.items():
            assert count_models(phi, k, (10, 18)) == \
                count_models_by_constraint_eval(phi, k, (10, 18), lmh27, res.phi)

    def test_agrees_at_interior_point(self, lmh27):
        res = symbolic_execute(lmh27)
        k = kappa()
        assert count_models_by_constraint_eval(res.phi["Low"], k, (5, 20), lmh27, res.phi) == 4

    def test_exhaustive_agreement_simplemm1(self, corpus):
        spec = corpus["simplemm1"].spec()
        res = symbolic_execute(spec)
        k = C.Knowledge.from_targets(cached_targets(spec))
        for q in cached_queries(spec):
            tallies = interpreter_counts(spec, k, q)
            for outcome, phi in res.phi.items():
                assert count_models(phi, k, q) == tallies[outcome]

    def test_unknown_phi_rejected(self, lmh27):
        res = symbolic_execute(lmh27)
        with pytest.raises(ValueError):
            count_models_by_constraint_eval(C.TRUE, kappa(), (1, 1), lmh27, res.phi)
