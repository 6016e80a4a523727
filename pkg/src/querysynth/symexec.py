"""Symbolic execution of the evaluate function.

Both target and query vectors are symbolic. Every branch on a symbolic
condition forks the path, extending the path constraint with the condition
on the true side and its negation on the false side. Array reads and writes
at symbolic indices fork over the in-bounds index values. The result is one
path constraint per terminating path, each tagged with the outcome label it
returns, merged per label into the outcome constraint map.

Feasibility: paths are pruned when provably infeasible. The checker layers
per-variable domain propagation (bounds plus excluded values), an equality
union-find over variable-to-variable atoms, witness sampling over the valid
domain, and, when the valid domain is small enough, complete enumeration.
A path that cannot be proven infeasible is kept; a kept-but-infeasible path
only ever contributes zero model counts.
"""

from __future__ import annotations

import random
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import constraints as C
from .dsl import nodes as ast
from .dsl.interp import cached_queries, cached_targets
from .errors import CapacityError, EvalError, PathExplosion

DEFAULT_PATH_CAP = 100_000
DEFAULT_EXHAUSTIVE_PAIRS = 4_000_000
_SAMPLE_WITNESSES = 256


@dataclass(frozen=True)
class PathConstraint:
    psi: C.Formula
    outcome: str


@dataclass
class SymexecStats:
    paths_explored: int = 0
    paths_kept: int = 0
    pruned_during_search: int = 0
    pruned_by_checker: int = 0
    unproven_kept: int = 0
    phi_nonfalse: int = 0
    feasibility: str = "exact"  # or "sampled"
    seconds: float = 0.0


@dataclass
class SymexecResult:
    paths: tuple[PathConstraint, ...]
    phi: dict[str, C.Formula]  # every declared outcome, FALSE when unreachable
    stats: SymexecStats


# --- per-path domain propagation ------------------------------------------------


class _Domains:
    """Per-variable (lo, hi, excluded) maps; detects simple contradictions."""

    __slots__ = ("data",)

    def __init__(self, data: dict):
        self.data = data

    @staticmethod
    def from_spec(spec: ast.SearchSpec) -> "_Domains":
        data = {}
        for i, (lo, hi) in enumerate(spec.target_ranges):
            data[C.TVar(C.TARGET, i)] = (lo, hi, frozenset())
        for j, (lo, hi) in enumerate(spec.query_ranges):
            data[C.TVar(C.QUERY, j)] = (lo, hi, frozenset())
        return _Domains(data)

    def copy(self) -> "_Domains":
        return _Domains(dict(self.data))

    def _narrow(self, var: C.TVar, lo=None, hi=None, exclude=None) -> bool:
        cur = self.data.get(var)
        if cur is None:
            return True
        clo, chi, cex = cur
        if lo is not None:
            clo = max(clo, lo)
        if hi is not None:
            chi = min(chi, hi)
        if exclude is not None:
            cex = cex | {exclude}
        if clo > chi:
            return False
        if clo == chi and clo in cex:
            return False
        if len(cex) >= chi - clo + 1 and all(v in cex for v in range(clo, chi + 1)):
            return False
        self.data[var] = (clo, chi, cex)
        return True

    def add(self, atom: C.Formula) -> bool:
        """Narrow by one atom; returns False when provably unsatisfiable."""
        pos, inner = True, atom
        if isinstance(inner, C.Not):
            pos, inner = False, inner.inner
        if isinstance(inner, (C.Lt, C.Eq)):
            a, b = inner.left, inner.right
            if isinstance(inner, C.Eq):
                if isinstance(a, C.TVar) and isinstance(b, C.TInt):
                    return self._narrow(a, lo=b.value, hi=b.value) if pos \
                        else self._narrow(a, exclude=b.value)
                if isinstance(b, C.TVar) and isinstance(a, C.TInt):
                    return self._narrow(b, lo=a.value, hi=a.value) if pos \
                        else self._narrow(b, exclude=a.value)
                return True
            if isinstance(a, C.TVar) and isinstance(b, C.TInt):
                # a < c / not (a < c)
                return self._narrow(a, hi=b.value - 1) if pos else self._narrow(a, lo=b.value)
            if isinstance(b, C.TVar) and isinstance(a, C.TInt):
                # c < b / not (c < b)
                return self._narrow(b, lo=a.value + 1) if pos else self._narrow(b, hi=a.value)
        return True

    def range_of(self, term: C.Term) -> tuple[int, int] | None:
        """Interval bound for a term, when derivable."""
        if isinstance(term, C.TInt):
            return (term.value, term.value)
        if isinstance(term, C.TVar):
            cur = self.data.get(term)
            return (cur[0], cur[1]) if cur else None
        if isinstance(term, C.TAdd):
            ra, rb = self.range_of(term.left), self.range_of(term.right)
            if ra and rb:
                return (ra[0] + rb[0], ra[1] + rb[1])
            return None
        if isinstance(term, C.TMul):
            ra, rb = self.range_of(term.left), self.range_of(term.right)
            if ra and rb:
                prods = [x * y for x in ra for y in rb]
                return (min(prods), max(prods))
            return None
        return None


def _equality_consistent(atoms: tuple[C.Formula, ...], domains: _Domains) -> bool:
    """Union-find over var==var atoms; false on a provable contradiction."""
    parent: dict[C.TVar, C.TVar] = {}

    def find(v: C.TVar) -> C.TVar:
        parent.setdefault(v, v)
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    diseqs: list[tuple[C.TVar, C.TVar]] = []
    for atom in atoms:
        pos, inner = True, atom
        if isinstance(inner, C.Not):
            pos, inner = False, inner.inner
        if isinstance(inner, C.Eq) and isinstance(inner.left, C.TVar) and isinstance(inner.right, C.TVar):
            if pos:
                parent[find(inner.left)] = find(inner.right)
            else:
                diseqs.append((inner.left, inner.right))
    for a, b in diseqs:
        if find(a) == find(b):
            return False
    # classes must have a nonempty common domain
    classes: dict[C.TVar, tuple[int, int]] = {}
    for v in list(parent):
        root = find(v)
        rng = domains.range_of(v)
        if rng is None:
            continue
        cur = classes.get(root)
        merged = rng if cur is None else (max(cur[0], rng[0]), min(cur[1], rng[1]))
        if merged[0] > merged[1]:
            return False
        classes[root] = merged
    return True


# --- executor --------------------------------------------------------------------


@dataclass
class _State:
    env: dict
    atoms: list
    domains: _Domains

    def fork(self) -> "_State":
        return _State(dict(self.env), list(self.atoms), self.domains.copy())


class _Executor:
    def __init__(self, spec: ast.SearchSpec, path_cap: int):
        self.spec = spec
        self.path_cap = path_cap
        self.terminal: list[tuple[list, str]] = []  # (atoms, label)
        self.explored = 0
        self.pruned = 0

    def run(self) -> None:
        env = {}
        for name, val in self.spec.constants.items():
            env[name] = [C.TInt(v) for v in val] if isinstance(val, tuple) else C.TInt(val)
        off = 0
        for d in self.spec.query_decls:
            vs = [C.TVar(C.QUERY, off + i) for i in range(d.dim)]
            env[d.name] = vs[0] if d.dim == 1 else vs
            off += d.dim
        off = 0
        for d in self.spec.target_decls:
            vs = [C.TVar(C.TARGET, off + i) for i in range(d.dim)]
            env[d.name] = vs[0] if d.dim == 1 else vs
            off += d.dim
        state = _State(env, [], _Domains.from_spec(self.spec))
        for end_state, result in self.exec_stmts(self.spec.evaluate_fn.stmts, 0, state):
            if result is None or result[0] != "label":
                raise EvalError("evaluate ended without an outcome label on some path")
            self.terminal.append((end_state.atoms, result[1]))
            if len(self.terminal) > self.path_cap:
                raise PathExplosion(f"more than {self.path_cap} symbolic paths")

    # statements ------------------------------------------------------------

    def exec_stmts(self, stmts: tuple, i: int, state: _State):
        """Yield (state, result) pairs; result None means fell through."""
        if i >= len(stmts):
            yield state, None
            return
        for mid_state, result in self.exec_stmt(stmts[i], state):
            if result is not None:
                yield mid_state, result
            else:
                yield from self.exec_stmts(stmts, i + 1, mid_state)

    def branch(self, state: _State, cond: C.Formula):
        """Yield (state, taken) for the feasible sides of a condition."""
        cond = C.simplify(cond)
        if isinstance(cond, C.FBool):
            yield state, cond.value
            return
        neg = C.simplify(C.Not(cond))
        self.explored += 1
        true_state = state.fork()
        true_state.atoms.append(cond)
        if true_state.domains.add(cond):
            yield true_state, True
        else:
            self.pruned += 1
        state.atoms.append(neg)
        if state.domains.add(neg):
            yield state, False
        else:
            self.pruned += 1

    def exec_stmt(self, st, state: _State):
        cls = st.__class__
        if cls is ast.Assign:
            value = st.value
            if isinstance(value, tuple):
                for s2, elems in self.eval_list(value, state):
                    s2.env[st.name] = list(elems)
                    yield s2, None
                return
            if value.__class__ is ast.ArrayDeclare:
                for s2, size in self.eval_expr(value.size, state):
                    size = C.simplify_term(size)
                    if not isinstance(size, C.TInt):
                        raise EvalError("array size must be a concrete value under analysis")
                    if size.value < 0:
                        raise EvalError(f"negative array size {size.value}")
                    s2.env[st.name] = [C.TInt(0)] * size.value
                    yield s2, None
                return
            for s2, v in self.eval_expr(value, state):
                s2.env[st.name] = list(v) if isinstance(v, list) else v
                yield s2, None
            return
        if cls is ast.If:
            for s2, cond in self.eval_expr(st.cond, state):
                for s3, taken in self.branch(s2, cond):
                    if taken:
                        yield from self.exec_stmts(st.body.stmts, 0, s3)
                    else:
                        yield s3, None
            return
        if cls is ast.IfElse:
            for s2, cond in self.eval_expr(st.cond, state):
                for s3, taken in self.branch(s2, cond):
                    body = st.then_body if taken else st.else_body
                    yield from self.exec_stmts(body.stmts, 0, s3)
            return
        if cls is ast.Return:
            if st.label is not None:
                yield state, ("label", st.label)
                return
            for s2, v in self.eval_expr(st.value, state):
                yield s2, ("value", v)
            return
        if cls is ast.While:
            yield from self.exec_while(st, state, self.spec.unroll_bound)
            return
        if cls is ast.ArrayStore:
            for s2, idx in self.eval_expr(st.index, state):
                for s3, pinned in self.pin_index(s2, idx, len(s2.env[st.name]), st.name):
                    for s4, v in self.eval_expr(st.value, s3):
                        arr = list(s4.env[st.name])
                        arr[pinned] = v
                        s4.env[st.name] = arr
                        yield s4, None
            return
        if cls is ast.StatementList:
            yield from self.exec_stmts(st.stmts, 0, state)
            return
        raise EvalError(f"unknown statement {st!r}")

    def exec_while(self, st: ast.While, state: _State, fuel: int):
        for s2, cond in self.eval_expr(st.cond, state):
            for s3, taken in self.branch(s2, cond):
                if not taken:
                    yield s3, None
                    continue
                if fuel == 0:
                    raise EvalError(
                        f"while loop not finished after {self.spec.unroll_bound} unrolled iterations")
                for s4, result in self.exec_stmts(st.body.stmts, 0, s3):
                    if result is not None:
                        yield s4, result
                    else:
                        yield from self.exec_while(st, s4, fuel - 1)

    # expressions -----------------------------------------------------------

    def eval_list(self, exprs: tuple, state: _State, upto: int | None = None):
        n = len(exprs) if upto is None else upto
        if n == 0:
            yield state, []
            return
        for s2, head in self.eval_list(exprs, state, n - 1):
            for s3, v in self.eval_expr(exprs[n - 1], s2):
                yield s3, head + [v]

    def pin_index(self, state: _State, idx: C.Term, length: int, name: str):
        """Fork a symbolic index over its feasible in-bounds values."""
        idx = C.simplify_term(idx)
        if isinstance(idx, C.TInt):
            if not 0 <= idx.value < length:
                raise EvalError(f"index {idx.value} out of range for {name!r} (length {length})")
            yield state, idx.value
            return
        rng = state.domains.range_of(idx)
        lo = 0 if rng is None else max(0, rng[0])
        hi = length - 1 if rng is None else min(length - 1, rng[1])
        if rng is not None and (rng[0] < 0 or rng[1] >= length):
            # out-of-bounds is reachable unless the constraints forbid it
            oob = C.simplify(C.Or((C.Lt(idx, C.TInt(0)), C.Not(C.Lt(idx, C.TInt(length))))))
            probe = state.domains.copy()
            feasible_oob = True
            if isinstance(oob, C.FBool):
                feasible_oob = oob.value
            elif isinstance(oob, C.Or):
                feasible_oob = any(probe.copy().add(part) for part in oob.parts)
            else:
                feasible_oob = probe.add(oob)
            if feasible_oob:
                raise EvalError(
                    f"index into {name!r} may leave 0..{length - 1} on some path")
        self.explored += max(0, hi - lo)
        for i in range(lo, hi + 1):
            pin = C.Eq(idx, C.TInt(i))
            forked = state.fork()
            forked.atoms.append(pin)
            if forked.domains.add(pin):
                yield forked, i
            else:
                self.pruned += 1

    def eval_expr(self, e, state: _State):
        cls = e.__class__
        if cls is ast.IntConst:
            yield state, C.TInt(e.value)
            return
        if cls is ast.BoolConst:
            yield state, (C.TRUE if e.value else C.FALSE)
            return
        if cls is ast.VarRef:
            yield state, state.env[e.name]
            return
        if cls is ast.ArrayAccess:
            arr = state.env[e.name]
            view = arr if isinstance(arr, list) else [arr]  # dim-1 input as x[0]
            for s2, idx in self.eval_expr(e.index, state):
                for s3, pinned in self.pin_index(s2, idx, len(view), e.name):
                    yield s3, view[pinned]
            return
        if cls is ast.Length:
            arr = state.env[e.name]
            yield state, C.TInt(1 if not isinstance(arr, list) else len(arr))
            return
        if cls in (ast.Plus, ast.Times, ast.Less, ast.Equal, ast.And, ast.Or):
            ctor = {
                ast.Plus: C.TAdd, ast.Times: C.TMul,
                ast.Less: C.Lt, ast.Equal: C.Eq,
                ast.And: lambda a, b: C.And((a, b)),
                ast.Or: lambda a, b: C.Or((a, b)),
            }[cls]
            for s2, a in self.eval_expr(e.left, state):
                for s3, b in self.eval_expr(e.right, s2):
                    v = ctor(a, b)
                    yield s3, (C.simplify_term(v) if cls in (ast.Plus, ast.Times) else C.simplify(v))
            return
        if cls is ast.Not:
            for s2, v in self.eval_expr(e.inner, state):
                yield s2, C.simplify(C.Not(v))
            return
        if cls is ast.FunctionCall:
            fn = self.spec.aux_fns[e.name]
            callee_env = {}
            for name, val in self.spec.constants.items():
                callee_env[name] = [C.TInt(v) for v in val] if isinstance(val, tuple) else C.TInt(val)
            for param, arg in zip(fn.params, e.args):
                v = state.env[arg]
                callee_env[param] = list(v) if isinstance(v, list) else v
            caller_env = state.env
            state.env = callee_env
            for s2, result in self.exec_stmts(fn.body.stmts, 0, state):
                if result is None or result[0] != "value":
                    raise EvalError(f"fn {e.name!r} did not return a value on some path")
                s2.env = dict(caller_env)  # locals die; each fork gets its own frame
                yield s2, result[1]
            return
        raise EvalError(f"unknown expression {e!r}")


# --- feasibility back end ----------------------------------------------------------


def _witness_columns(targets):
    tmat = np.asarray(targets, dtype=np.int64)
    return tuple(np.ascontiguousarray(tmat[:, i]) for i in range(tmat.shape[1]))


def _check_paths(spec, raw_paths, exhaustive_pairs, rng, stats):
    """Split raw (atoms, label) paths into kept PathConstraints, pruning infeasible."""
    try:
        targets = cached_targets(spec)
        queries = cached_queries(spec)
    except CapacityError:
        targets = queries = None

    domains0 = _Domains.from_spec(spec)
    exhaustive = (
        targets is not None and queries is not None
        and targets and queries
        and len(targets) * len(queries) <= exhaustive_pairs
    )
    stats.feasibility = "exact" if exhaustive else "sampled"

    tcols = ones = None
    if targets:
        tcols = _witness_columns(targets)
        ones = np.ones(len(targets), dtype=bool)

    kept = []
    for atoms, label in raw_paths:
        psi = C.conj(atoms) if atoms else C.TRUE
        # cheap disproofs first
        dom = domains0.copy()
        ok = all(dom.add(a) for a in atoms)
        if ok:
            ok = _equality_consistent(tuple(atoms), dom)
        if not ok:
            stats.pruned_by_checker += 1
            continue
        if targets is None or queries is None or not targets or not queries:
            kept.append(PathConstraint(psi, label))
            stats.unproven_kept += 1
            continue
        # witness sampling
        fn = C.compile_scalar(psi)
        found = False
        for _ in range(min(_SAMPLE_WITNESSES, len(targets) * len(queries))):
            t = targets[rng.randrange(len(targets))]
            q = queries[rng.randrange(len(queries))]
            if fn(t, q):
                found = True
                break
        if found:
            kept.append(PathConstraint(psi, label))
            continue
        if not exhaustive:
            kept.append(PathConstraint(psi, label))
            stats.unproven_kept += 1
            continue
        vfn = C.compile_vector(psi)
        for q in queries:
            if vfn(tcols, q, ones).any():
                found = True
                break
        if found:
            kept.append(PathConstraint(psi, label))
        else:
            stats.pruned_by_checker += 1
    return kept


def symbolic_execute(
    spec: ast.SearchSpec,
    path_cap: int = DEFAULT_PATH_CAP,
    exhaustive_pairs: int = DEFAULT_EXHAUSTIVE_PAIRS,
) -> SymexecResult:
    """Analyze the evaluate function into path and outcome constraints."""
    start = time.perf_counter()
    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 20_000))
    try:
        ex = _Executor(spec, path_cap)
        ex.run()
    finally:
        sys.setrecursionlimit(old_limit)

    stats = SymexecStats()
    stats.paths_explored = ex.explored + len(ex.terminal)
    stats.pruned_during_search = ex.pruned
    rng = random.Random(0)
    kept = _check_paths(spec, ex.terminal, exhaustive_pairs, rng, stats)
    stats.paths_kept = len(kept)

    phi: dict[str, C.Formula] = {}
    for outcome in spec.outcomes:
        psis = tuple(p.psi for p in kept if p.outcome == outcome)
        phi[outcome] = C.disj(psis) if psis else C.FALSE
    stats.phi_nonfalse = sum(1 for f in phi.values() if f != C.FALSE)
    stats.seconds = time.perf_counter() - start
    return SymexecResult(tuple(kept), phi, stats)
