"""Command-line front end.

Subcommands: solve (run one spec against a simulated target), bench (corpus
experiment harness), landscape (entropy grid for plotting), replay (verify a
recorded transcript), serve (HTTP session service).

Tables and CSV go to stdout and are byte-deterministic for a fixed seed in
scan mode; timing and progress diagnostics go to stderr (bench can embed
timing columns with --timings, which naturally breaks determinism).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
import time
from pathlib import Path

from . import constraints as C
from .corpus import load_corpus
from .counting import OutcomeCounter
from .dsl import cached_targets, parse_spec
from .errors import DimensionError, QuerySynthError
from .oracles import HiddenTargetOracle, ReplayOracle
from .symexec import symbolic_execute
from .synthesis import SessionState, SynthesisConfig, run_session, start_session, step
from .transcript import read_transcript, write_transcript


def _load_spec(ref: str):
    path = Path(ref)
    if path.exists():
        return parse_spec(path.read_text(encoding="utf-8"), name=path.stem)
    for entry in load_corpus(validate="none"):
        if entry.name == ref:
            return entry.spec()
    raise QuerySynthError(f"{ref!r} is neither a file nor a corpus entry")


def _config(args) -> SynthesisConfig:
    return SynthesisConfig(
        scan_cap=args.scan_cap,
        sample_budget=args.sample_budget,
        seed=args.seed,
        max_rounds=args.max_rounds,
    )


def _parse_vector(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.replace("(", "").replace(")", "").split(","))


def _print_rounds(state: SessionState, out) -> None:
    print("round  query                 entropy  outcome       candidates", file=out)
    for r in state.transcript:
        q = ",".join(str(v) for v in r.query)
        print(f"{r.index:>5}  ({q})".ljust(29)
              + f"{r.entropy_bits:7.4f}  {r.outcome:<12}  {r.candidates_after}", file=out)


def cmd_solve(args) -> int:
    spec = _load_spec(args.spec)
    config = _config(args)
    t0 = time.perf_counter()
    analysis = symbolic_execute(spec, path_cap=config.path_cap)
    sym_s = time.perf_counter() - t0
    if args.dump_constraints:
        for outcome, formula in analysis.phi.items():
            print(f"{outcome}: {C.to_sexpr(formula)}")
    targets = cached_targets(spec, config.enumeration_cap)

    if args.all_targets:
        chosen = list(targets)
    elif args.target is not None:
        chosen = [_parse_vector(args.target)]
    else:
        chosen = [targets[random.Random(args.seed).randrange(len(targets))]]

    rounds_seen = []
    for t in chosen:
        t0 = time.perf_counter()
        final = run_session(spec, HiddenTargetOracle(spec, t), config, analysis=analysis)
        solve_s = time.perf_counter() - t0
        tname = ",".join(str(v) for v in t)
        print(f"# {spec.name}  target=({tname})  mode={'sample' if final.sampled else 'scan'}")
        _print_rounds(final, sys.stdout)
        survivors = " ".join("(" + ",".join(str(v) for v in c) + ")"
                             for c in final.knowledge.candidates)
        print(f"{final.status} in {len(final.transcript)} rounds; candidates: {survivors}")
        rounds_seen.append(len(final.transcript))
        print(f"[timing] symexec {sym_s:.3f}s solve {solve_s:.3f}s", file=sys.stderr)
        if args.transcript:
            out = Path(args.transcript)
            if len(chosen) > 1:
                out.mkdir(parents=True, exist_ok=True)
                dest = out / f"{spec.name}-t{'_'.join(str(v) for v in t)}.json"
            else:
                dest = out
            write_transcript(final, dest, target=t,
                             timings={"symexec_s": sym_s, "solve_s": solve_s})
    if len(chosen) > 1:
        print(f"# {len(chosen)} targets: mean rounds "
              f"{sum(rounds_seen) / len(rounds_seen):.3f}, max {max(rounds_seen)}")
    return 0


def cmd_bench(args) -> int:
    entries = load_corpus(validate="none")
    if args.names:
        wanted = set(args.names)
        entries = [e for e in entries if e.name in wanted]
        missing = wanted - {e.name for e in entries}
        if missing:
            print(f"unknown entries: {sorted(missing)}", file=sys.stderr)
            return 2
    elif args.tier != "all":
        entries = [e for e in entries if e.tier == args.tier]

    fields = ["name", "params", "avg_rounds", "psi", "phi", "n_queries", "n_targets", "status"]
    if args.timings:
        fields[2:2] = ["avg_solve_s", "symexec_s"]
    rows = []
    for entry in entries:
        row = {"name": entry.name, "params": entry.params, "status": "ok"}
        try:
            spec = entry.spec()
            config = SynthesisConfig(seed=args.seed, scan_cap=args.scan_cap,
                                     sample_budget=args.sample_budget)
            t0 = time.perf_counter()
            analysis = symbolic_execute(spec, path_cap=config.path_cap)
            sym_s = time.perf_counter() - t0
            targets = cached_targets(spec, config.enumeration_cap)
            rng = random.Random(args.seed)
            rounds, solve_times = [], []
            for _ in range(args.reps):
                t = targets[rng.randrange(len(targets))]
                t0 = time.perf_counter()
                final = run_session(spec, HiddenTargetOracle(spec, t), config,
                                    analysis=analysis)
                solve_times.append(time.perf_counter() - t0)
                rounds.append(len(final.transcript))
            row.update({
                "avg_rounds": f"{sum(rounds) / len(rounds):.3f}" if rounds else "",
                "psi": len(analysis.paths),
                "phi": analysis.stats.phi_nonfalse,
                "n_queries": entry.expected_queries,
                "n_targets": entry.expected_targets,
            })
            if args.timings:
                row["symexec_s"] = f"{sym_s:.3f}"
                row["avg_solve_s"] = (
                    f"{sum(solve_times) / len(solve_times):.3f}" if solve_times else "")
        except QuerySynthError as exc:
            row["status"] = f"error: {exc}"
        rows.append(row)
        print(f"[bench] {entry.name} {row['status']}", file=sys.stderr)

    if args.reps == 0:
        rows = []
    if args.format == "json":
        text = json.dumps(rows, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=fields, restval="", lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k, "") for k in fields})
        text = buf.getvalue()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_landscape(args) -> int:
    spec = _load_spec(args.spec)
    config = _config(args)
    if spec.query_dim != 2 and not (args.allow_1d and spec.query_dim == 1):
        raise DimensionError(
            f"landscape wants a 2-dimensional query space, got {spec.query_dim} "
            "(use --allow-1d for one dimension)")
    analysis = symbolic_execute(spec, path_cap=config.path_cap)
    targets = cached_targets(spec, config.enumeration_cap)
    knowledge = C.Knowledge.from_targets(targets)
    if args.knowledge:
        obs = C.from_sexpr(args.knowledge)
        knowledge = C.conjoin_and_filter(knowledge, obs)
    from .dsl import cached_queries
    queries = cached_queries(spec, config.enumeration_cap)
    counter = OutcomeCounter(analysis.phi, knowledge)
    from .synthesis import entropy_from_counts
    lines = []
    header = ",".join(f"q{i}" for i in range(spec.query_dim)) + ",entropy_bits"
    lines.append(header)
    for q in queries:
        counts = counter.counts(q)
        h = entropy_from_counts(counts) if max(counts) < len(knowledge) else 0.0
        lines.append(",".join(str(v) for v in q) + f",{h:.12f}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_replay(args) -> int:
    doc = read_transcript(args.transcript)
    spec = _load_spec(args.spec if args.spec else doc["spec"])
    config = SynthesisConfig(
        scan_cap=doc["config"]["scan_cap"],
        sample_budget=doc["config"]["sample_budget"],
        seed=doc["config"]["seed"],
        max_rounds=doc["config"]["max_rounds"],
    )
    oracle = ReplayOracle.from_transcript(doc)
    state = start_session(spec, config)
    for recorded in doc["rounds"]:
        if state.status != "running":
            print("replay diverged: session converged early", file=sys.stderr)
            return 1
        if list(state.pending.query) != recorded["query"]:
            print(f"replay diverged at round {recorded['round']}: "
                  f"{list(state.pending.query)} != {recorded['query']}", file=sys.stderr)
            return 1
        state = step(state, oracle)
    final = [list(t) for t in state.knowledge.candidates]
    if final != doc["final_candidates"] or state.status != doc["status"]:
        print("replay diverged: final state differs", file=sys.stderr)
        return 1
    print(f"replay ok: {len(doc['rounds'])} rounds reproduced")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(snapshot_dir=args.snapshot_dir, ttl_seconds=args.ttl)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="base RNG seed")
    p.add_argument("--scan-cap", type=int, default=SynthesisConfig.scan_cap,
                   help="largest query box scanned exhaustively")
    p.add_argument("--sample-budget", type=int, default=SynthesisConfig.sample_budget,
                   help="accept-reject samples per round beyond the scan cap")
    p.add_argument("--max-rounds", type=int, default=None,
                   help="safety cap on rounds (default 10x target count)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="querysynth",
        description="Synthesize entropy-optimal search steps from a problem spec.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a spec against a simulated hidden target")
    p.add_argument("spec", help=".search file path or corpus entry name")
    p.add_argument("--target", help="explicit target vector, e.g. 5 or 3,4")
    p.add_argument("--all-targets", action="store_true",
                   help="run one session per valid target")
    p.add_argument("--transcript", help="write transcript JSON here (directory with --all-targets)")
    p.add_argument("--dump-constraints", action="store_true",
                   help="print per-outcome constraints before solving")
    _add_common(p)
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("bench", help="run corpus experiments")
    p.add_argument("names", nargs="*", help="corpus entry names (default: tier selection)")
    p.add_argument("--tier", choices=["ci", "slow", "all"], default="ci")
    p.add_argument("--reps", type=int, default=3, help="sessions per entry")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", help="write results here instead of stdout")
    p.add_argument("--timings", action=argparse.BooleanOptionalAction, default=True,
                   help="include wall-clock columns (breaks byte determinism)")
    _add_common(p)
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("landscape", help="emit the entropy value of every query")
    p.add_argument("spec")
    p.add_argument("--knowledge", help="s-expression over targets narrowing the candidates")
    p.add_argument("--allow-1d", action="store_true")
    p.add_argument("--out")
    _add_common(p)
    p.set_defaults(fn=cmd_landscape)

    p = sub.add_parser("replay", help="re-run a transcript and verify it reproduces")
    p.add_argument("transcript")
    p.add_argument("--spec", help="override the spec source (path or corpus name)")
    p.set_defaults(fn=cmd_replay)

    p = sub.add_parser("serve", help="run the HTTP session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--ttl", type=float, default=86400.0, help="session idle lifetime (s)")
    p.add_argument("--snapshot-dir", help="persist session snapshots here")
    p.set_defaults(fn=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except QuerySynthError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
