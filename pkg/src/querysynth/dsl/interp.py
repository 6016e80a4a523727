"""Concrete tree-walking interpreter plus domain enumeration.

Integers are Python ints (arbitrary width), so the declared semantics hold
without overflow handling. Arrays have value semantics: assignment and
argument passing copy.
"""

from __future__ import annotations

import itertools
from typing import Sequence

from ..errors import CapacityError, EvalError
from . import nodes as ast

DEFAULT_ENUM_CAP = 2_000_000


def _binder(spec: ast.SearchSpec):
    cached = spec.__dict__.get("_binder")
    if cached is None:
        def build(decls):
            out, off = [], 0
            for d in decls:
                out.append((d.name, off, d.dim))
                off += d.dim
            return tuple(out)

        cached = (build(spec.query_decls), build(spec.target_decls))
        spec.__dict__["_binder"] = cached
    return cached


def _bind(env: dict, binder, vec: Sequence[int]) -> None:
    for name, off, dim in binder:
        env[name] = vec[off] if dim == 1 else list(vec[off:off + dim])


class _Interp:
    __slots__ = ("spec", "fns", "bound")

    def __init__(self, spec: ast.SearchSpec):
        self.spec = spec
        self.fns = spec.aux_fns
        self.bound = spec.unroll_bound

    def run(self, body: ast.StatementList, env: dict):
        result = self.exec_stmts(body, env)
        if result is None:
            raise EvalError("function body fell off the end without returning")
        return result

    def exec_stmts(self, sl: ast.StatementList, env: dict):
        for st in sl.stmts:
            result = self.exec_stmt(st, env)
            if result is not None:
                return result
        return None

    def exec_stmt(self, st, env: dict):
        cls = st.__class__
        if cls is ast.Assign:
            value = st.value
            if isinstance(value, tuple):
                env[st.name] = [self.eval(e, env) for e in value]
            elif value.__class__ is ast.ArrayDeclare:
                size = self.eval(value.size, env)
                if size < 0:
                    raise EvalError(f"negative array size {size}")
                env[st.name] = [0] * size
            else:
                v = self.eval(value, env)
                env[st.name] = list(v) if isinstance(v, list) else v
            return None
        if cls is ast.If:
            if self.eval(st.cond, env):
                return self.exec_stmts(st.body, env)
            return None
        if cls is ast.IfElse:
            branch = st.then_body if self.eval(st.cond, env) else st.else_body
            return self.exec_stmts(branch, env)
        if cls is ast.Return:
            if st.label is not None:
                return ("label", st.label)
            return ("value", self.eval(st.value, env))
        if cls is ast.While:
            iterations = 0
            while self.eval(st.cond, env):
                iterations += 1
                if iterations > self.bound:
                    raise EvalError(f"while loop exceeded unroll bound {self.bound}")
                result = self.exec_stmts(st.body, env)
                if result is not None:
                    return result
            return None
        if cls is ast.ArrayStore:
            arr = env[st.name]
            idx = self.eval(st.index, env)
            if not 0 <= idx < len(arr):
                raise EvalError(f"index {idx} out of range for {st.name!r} (length {len(arr)})")
            arr[idx] = self.eval(st.value, env)
            return None
        if cls is ast.StatementList:
            return self.exec_stmts(st, env)
        raise EvalError(f"unknown statement {st!r}")

    def eval(self, e, env: dict):
        cls = e.__class__
        if cls is ast.IntConst or cls is ast.BoolConst:
            return e.value
        if cls is ast.VarRef:
            return env[e.name]
        if cls is ast.ArrayAccess:
            arr = env[e.name]
            idx = self.eval(e.index, env)
            if isinstance(arr, int):  # dim-1 declared input used as x[0]
                if idx != 0:
                    raise EvalError(f"index {idx} out of range for scalar {e.name!r}")
                return arr
            if not 0 <= idx < len(arr):
                raise EvalError(f"index {idx} out of range for {e.name!r} (length {len(arr)})")
            return arr[idx]
        if cls is ast.Less:
            return self.eval(e.left, env) < self.eval(e.right, env)
        if cls is ast.Equal:
            return self.eval(e.left, env) == self.eval(e.right, env)
        if cls is ast.Plus:
            return self.eval(e.left, env) + self.eval(e.right, env)
        if cls is ast.Times:
            return self.eval(e.left, env) * self.eval(e.right, env)
        if cls is ast.And:
            return self.eval(e.left, env) and self.eval(e.right, env)
        if cls is ast.Or:
            return self.eval(e.left, env) or self.eval(e.right, env)
        if cls is ast.Not:
            return not self.eval(e.inner, env)
        if cls is ast.Length:
            arr = env[e.name]
            return 1 if isinstance(arr, int) else len(arr)
        if cls is ast.FunctionCall:
            fn = self.fns[e.name]
            fenv = {name: v for name, v in self.spec.constants.items()}
            for cname, cval in fenv.items():
                if isinstance(cval, tuple):
                    fenv[cname] = list(cval)
            for param, arg in zip(fn.params, e.args):
                v = env[arg]
                fenv[param] = list(v) if isinstance(v, list) else v
            kind, value = self.run(fn.body, fenv)
            if kind != "value":
                raise EvalError(f"fn {e.name!r} returned an outcome label")
            return value
        raise EvalError(f"unknown expression {e!r}")


def _base_env(spec: ast.SearchSpec) -> dict:
    env = {}
    for name, val in spec.constants.items():
        env[name] = list(val) if isinstance(val, tuple) else val
    return env


def evaluate_concrete(spec: ast.SearchSpec, q: Sequence[int], t: Sequence[int]) -> str:
    """Run the evaluate block on concrete vectors; returns the outcome label."""
    if len(q) != spec.query_dim or len(t) != spec.target_dim:
        raise EvalError(
            f"expected query dim {spec.query_dim} and target dim {spec.target_dim}, "
            f"got {len(q)} and {len(t)}")
    qb, tb = _binder(spec)
    env = _base_env(spec)
    _bind(env, qb, q)
    _bind(env, tb, t)
    kind, value = _Interp(spec).run(spec.evaluate_fn, env)
    if kind != "label":
        raise EvalError("evaluate returned a value instead of an outcome label")
    return value


def _passes_validity(spec: ast.SearchSpec, fn_name: str | None, binder, vec) -> bool:
    if fn_name is None:
        return True
    env = _base_env(spec)
    _bind(env, binder, vec)
    kind, value = _Interp(spec).run(spec.aux_fns[fn_name].body, env)
    return bool(value)


def _enumerate_box(ranges, cap: int):
    size = 1
    for lo, hi in ranges:
        size *= hi - lo + 1
    if size > cap:
        raise CapacityError(f"domain box has {size} points, above the cap of {cap}")
    return itertools.product(*[range(lo, hi + 1) for lo, hi in ranges])


def enumerate_targets(spec: ast.SearchSpec, cap: int = DEFAULT_ENUM_CAP) -> list[tuple[int, ...]]:
    """All valid targets in lexicographic order. CapacityError if the box exceeds cap."""
    _, tb = _binder(spec)
    return [t for t in _enumerate_box(spec.target_ranges, cap)
            if _passes_validity(spec, spec.target_validity, tb, t)]


def enumerate_queries(spec: ast.SearchSpec, cap: int = DEFAULT_ENUM_CAP) -> list[tuple[int, ...]]:
    """All valid queries in lexicographic order. CapacityError if the box exceeds cap."""
    qb, _ = _binder(spec)
    return [q for q in _enumerate_box(spec.query_ranges, cap)
            if _passes_validity(spec, spec.query_validity, qb, q)]


def query_box_size(spec: ast.SearchSpec) -> int:
    size = 1
    for lo, hi in spec.query_ranges:
        size *= hi - lo + 1
    return size


def cached_targets(spec: ast.SearchSpec, cap: int = DEFAULT_ENUM_CAP) -> tuple[tuple[int, ...], ...]:
    """enumerate_targets memoized on the spec object (idempotent, thread-safe)."""
    cache = spec.__dict__.setdefault("_enum_cache", {})
    key = ("t", cap)
    if key not in cache:
        cache[key] = tuple(enumerate_targets(spec, cap))
    return cache[key]


def cached_queries(spec: ast.SearchSpec, cap: int = DEFAULT_ENUM_CAP) -> tuple[tuple[int, ...], ...]:
    """enumerate_queries memoized on the spec object."""
    cache = spec.__dict__.setdefault("_enum_cache", {})
    key = ("q", cap)
    if key not in cache:
        cache[key] = tuple(enumerate_queries(spec, cap))
    return cache[key]


def is_valid_query(spec: ast.SearchSpec, q: Sequence[int]) -> bool:
    """Inside the declared box and passing the validity predicate, if any."""
    if len(q) != spec.query_dim:
        return False
    for v, (lo, hi) in zip(q, spec.query_ranges):
        if not lo <= v <= hi:
            return False
    qb, _ = _binder(spec)
    return _passes_validity(spec, spec.query_validity, qb, q)


def is_valid_target(spec: ast.SearchSpec, t: Sequence[int]) -> bool:
    if len(t) != spec.target_dim:
        return False
    for v, (lo, hi) in zip(t, spec.target_ranges):
        if not lo <= v <= hi:
            return False
    _, tb = _binder(spec)
    return _passes_validity(spec, spec.target_validity, tb, t)
