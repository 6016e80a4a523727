"""Full-scale corpus entries: excluded from the default run (pytest -m slow)."""

import random

import pytest

from querysynth.corpus import load_corpus
from querysynth.dsl import cached_targets
from querysynth.oracles import HiddenTargetOracle
from querysynth.symexec import symbolic_execute
from querysynth.synthesis import SynthesisConfig, run_session

pytestmark = pytest.mark.slow


def test_slow_entries_match_expected_counts():
    load_corpus(validate="all", fuzz=100)


@pytest.mark.parametrize("name", ["lmh100", "bbox2d10", "mastermind4", "password4",
                                  "pinpoint100", "split3d10"])
def test_three_random_targets_identify(name, corpus):
    entry = corpus[name]
    spec = entry.spec()
    analysis = symbolic_execute(spec)
    targets = cached_targets(spec)
    rng = random.Random(name)
    for _ in range(3):
        t = targets[rng.randrange(len(targets))]
        final = run_session(spec, HiddenTargetOracle(spec, t), analysis=analysis)
        assert final.status == "converged"
        assert final.knowledge.candidates == (t,)


def test_sampling_mode_on_full_scale_password():
    # the 6-digit query box exceeds the scan cap, forcing accept-reject sampling
    entry = next(e for e in load_corpus(validate="none") if e.name == "password6")
    spec = entry.spec()
    analysis = symbolic_execute(spec)
    config = SynthesisConfig(sample_budget=4000, seed=1)
    final = run_session(spec, HiddenTargetOracle(spec, (3, 1, 4, 1, 5, 9)), config,
                        analysis=analysis)
    assert final.sampled is True
    assert (3, 1, 4, 1, 5, 9) in final.knowledge.candidates
