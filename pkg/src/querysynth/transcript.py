"""Session transcripts: versioned JSON records of every round (schema 1).

Knowledge updates are recorded as s-expression formulas so a transcript is
self-describing and replayable without rerunning the analysis.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

from . import constraints as C
from .synthesis import SessionState

SCHEMA = 1


def state_to_transcript(state: SessionState, target: Sequence[int] | None = None,
                        timings: dict | None = None) -> dict:
    spec = state.spec
    rounds = []
    for r in state.transcript:
        rounds.append({
            "round": r.index,
            "query": list(r.query),
            "entropy_bits": r.entropy_bits,
            "outcome": r.outcome,
            "counts": {o: c for o, c in zip(r.distribution.outcomes, r.distribution.counts)},
            "candidates_before": r.candidates_before,
            "candidates_after": r.candidates_after,
            "observation": C.to_sexpr(C.substitute_query(state.phi[r.outcome], r.query)),
        })
    doc = {
        "schema": SCHEMA,
        "spec": spec.name,
        "mode": "sample" if state.sampled else "scan",
        "status": state.status,
        "config": {
            "scan_cap": state.config.scan_cap,
            "sample_budget": state.config.sample_budget,
            "seed": state.config.seed,
            "max_rounds": state.config.max_rounds,
        },
        "target": list(target) if target is not None else None,
        "outcomes": list(spec.outcomes),
        "phi": {o: C.to_sexpr(f) for o, f in state.phi.items()},
        "rounds": rounds,
        "final_candidates": [list(t) for t in state.knowledge.candidates],
        "timings": timings or {},
    }
    return doc


def write_transcript(state: SessionState, path: Path | str,
                     target: Sequence[int] | None = None,
                     timings: dict | None = None) -> dict:
    doc = state_to_transcript(state, target, timings)
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return doc


def read_transcript(path: Path | str) -> dict:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("schema") != SCHEMA:
        raise ValueError(f"unsupported transcript schema {doc.get('schema')!r}")
    return doc
