import pytest

from querysynth.corpus import load_corpus
from querysynth.dsl import parse_spec

LMH27_SOURCE = """
targets t[1] in 1..27
queries q[2] in 1..27
outcomes "Low", "Middle", "High"

evaluate {
  if (t < q[0]) { return "Low" }
  if (q[0] <= t && t <= q[1]) { return "Middle" }
  return "High"
}
"""


@pytest.fixture(scope="session")
def lmh27():
    return parse_spec(LMH27_SOURCE, name="lmh27")


@pytest.fixture(scope="session")
def corpus():
    return {e.name: e for e in load_corpus(validate="none")}


@pytest.fixture(scope="session")
def ci_corpus(corpus):
    return {name: e for name, e in corpus.items() if not e.slow}
