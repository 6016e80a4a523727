"""The shipped problem corpus: .search files plus expected metadata.

Every entry records the counts our encoding enumerates to; the originally
reported figures ride along as reference (some reference encodings differ,
and timing columns are hardware-bound).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .dsl import (
    cached_queries,
    cached_targets,
    evaluate_concrete,
    parse_spec,
)
from .dsl.nodes import SearchSpec
from .errors import CorpusError, QuerySynthError

_FUZZ_TRIALS = 200


def corpus_dir() -> Path:
    return Path(resources.files("querysynth") / "problems")


@dataclass
class CorpusEntry:
    name: str
    path: Path
    title: str
    params: str
    expected_targets: int
    expected_queries: int
    expected_outcomes: int  # non-false outcome constraints
    tier: str  # "ci" | "slow"
    identifiable: bool
    reported: dict
    notes: str | None = None
    display: dict | None = None
    _spec: SearchSpec = None

    @property
    def slow(self) -> bool:
        return self.tier == "slow"

    def spec(self) -> SearchSpec:
        if self._spec is None:
            self._spec = parse_spec(self.path.read_text(encoding="utf-8"), name=self.name)
        return self._spec


def _validate(entry: CorpusEntry, fuzz: int) -> None:
    try:
        spec = entry.spec()
    except QuerySynthError as exc:
        raise CorpusError(f"{entry.name}: {exc}") from exc
    targets = cached_targets(spec)
    queries = cached_queries(spec)
    if len(targets) != entry.expected_targets:
        raise CorpusError(
            f"{entry.name}: enumerated {len(targets)} targets, manifest says "
            f"{entry.expected_targets}")
    if len(queries) != entry.expected_queries:
        raise CorpusError(
            f"{entry.name}: enumerated {len(queries)} queries, manifest says "
            f"{entry.expected_queries}")
    rng = random.Random(entry.name)
    for _ in range(fuzz):
        t = targets[rng.randrange(len(targets))]
        q = queries[rng.randrange(len(queries))]
        try:
            outcome = evaluate_concrete(spec, q, t)
        except QuerySynthError as exc:
            raise CorpusError(f"{entry.name}: evaluate failed at q={q} t={t}: {exc}") from exc
        if outcome not in spec.outcomes:
            raise CorpusError(f"{entry.name}: undeclared outcome {outcome!r} at q={q} t={t}")


def load_corpus(directory: Path | None = None, validate: str = "ci",
                fuzz: int = _FUZZ_TRIALS) -> list[CorpusEntry]:
    """Load the manifest and entries.

    validate: "none" parses the manifest only; "ci" additionally parses,
    enumerates, and fuzzes the ci-tier entries; "all" validates everything
    (slow entries enumerate large domains; expect several seconds).
    """
    directory = Path(directory) if directory is not None else corpus_dir()
    manifest_path = directory / "manifest.json"
    if not manifest_path.exists():
        raise CorpusError(f"no manifest at {manifest_path}")
    data = json.loads(manifest_path.read_text(encoding="utf-8"))
    entries = []
    for raw in data["entries"]:
        path = directory / raw["file"]
        if not path.exists():
            raise CorpusError(f"{raw['name']}: missing file {path}")
        entries.append(CorpusEntry(
            name=raw["name"],
            path=path,
            title=raw["title"],
            params=raw["params"],
            expected_targets=raw["expected"]["targets"],
            expected_queries=raw["expected"]["queries"],
            expected_outcomes=raw["expected"]["outcomes"],
            tier=raw["tier"],
            identifiable=raw["identifiable"],
            reported=raw["reported"],
            notes=raw.get("notes"),
            display=raw.get("display"),
        ))
    if validate != "none":
        for entry in entries:
            if entry.slow and validate != "all":
                try:
                    entry.spec()
                except QuerySynthError as exc:
                    raise CorpusError(f"{entry.name}: {exc}") from exc
            else:
                _validate(entry, fuzz)
    return entries


def corpus_entry(name: str, directory: Path | None = None) -> CorpusEntry:
    for entry in load_corpus(directory, validate="none"):
        if entry.name == name:
            return entry
    raise CorpusError(f"no corpus entry named {name!r}")
