"""Quantifier-free integer constraints: the shared currency of the engine.

Terms are integer expressions over constants and coordinates of the target
and query vectors. Formulas combine comparison atoms (less, equal) with
and/or/not. Everything is immutable and hashable; operations are pure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Protocol, Sequence, Union

import numpy as np

from .errors import EmptyKnowledge, ParseError, UnboundVariable

TARGET = "t"
QUERY = "q"


# --- terms -----------------------------------------------------------------


@dataclass(frozen=True)
class TInt:
    value: int


@dataclass(frozen=True)
class TVar:
    role: str  # TARGET or QUERY
    index: int


@dataclass(frozen=True)
class TAdd:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class TMul:
    left: "Term"
    right: "Term"


Term = Union[TInt, TVar, TAdd, TMul]


# --- formulas ---------------------------------------------------------------


@dataclass(frozen=True)
class FBool:
    value: bool


@dataclass(frozen=True)
class Lt:
    left: Term
    right: Term


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class And:
    parts: tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    parts: tuple["Formula", ...]


@dataclass(frozen=True)
class Not:
    inner: "Formula"


Formula = Union[FBool, Lt, Eq, And, Or, Not]

TRUE = FBool(True)
FALSE = FBool(False)


def conj(parts: Iterable[Formula]) -> Formula:
    return simplify(And(tuple(parts)))


def disj(parts: Iterable[Formula]) -> Formula:
    return simplify(Or(tuple(parts)))


def le(a: Term, b: Term) -> Formula:
    """a <= b, expressed in the two-atom language as not(b < a)."""
    return Not(Lt(b, a))


# --- evaluation --------------------------------------------------------------


def eval_term(term: Term, t: Sequence[int], q: Sequence[int]) -> int:
    if isinstance(term, TInt):
        return term.value
    if isinstance(term, TVar):
        vec = t if term.role == TARGET else q
        if term.index >= len(vec):
            raise UnboundVariable(f"{term.role}{term.index} not bound (vector has {len(vec)} coords)")
        return vec[term.index]
    if isinstance(term, TAdd):
        return eval_term(term.left, t, q) + eval_term(term.right, t, q)
    if isinstance(term, TMul):
        return eval_term(term.left, t, q) * eval_term(term.right, t, q)
    raise TypeError(f"not a term: {term!r}")


def eval_formula(f: Formula, t: Sequence[int], q: Sequence[int] = ()) -> bool:
    """Total boolean evaluation under a full assignment of both vectors."""
    if isinstance(f, FBool):
        return f.value
    if isinstance(f, Lt):
        return eval_term(f.left, t, q) < eval_term(f.right, t, q)
    if isinstance(f, Eq):
        return eval_term(f.left, t, q) == eval_term(f.right, t, q)
    if isinstance(f, And):
        return all(eval_formula(p, t, q) for p in f.parts)
    if isinstance(f, Or):
        return any(eval_formula(p, t, q) for p in f.parts)
    if isinstance(f, Not):
        return not eval_formula(f.inner, t, q)
    raise TypeError(f"not a formula: {f!r}")


# --- structure queries -------------------------------------------------------


def term_vars(term: Term) -> set[TVar]:
    if isinstance(term, TInt):
        return set()
    if isinstance(term, TVar):
        return {term}
    return term_vars(term.left) | term_vars(term.right)


def formula_vars(f: Formula) -> set[TVar]:
    if isinstance(f, FBool):
        return set()
    if isinstance(f, (Lt, Eq)):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, Not):
        return formula_vars(f.inner)
    out: set[TVar] = set()
    for p in f.parts:
        out |= formula_vars(p)
    return out


def has_query_vars(f: Formula) -> bool:
    return any(v.role == QUERY for v in formula_vars(f))


# --- substitution and simplification -----------------------------------------


def _subst_term(term: Term, q_star: Sequence[int]) -> Term:
    if isinstance(term, TInt):
        return term
    if isinstance(term, TVar):
        if term.role == QUERY:
            return TInt(int(q_star[term.index]))
        return term
    if isinstance(term, TAdd):
        return TAdd(_subst_term(term.left, q_star), _subst_term(term.right, q_star))
    return TMul(_subst_term(term.left, q_star), _subst_term(term.right, q_star))


def substitute_query(f: Formula, q_star: Sequence[int]) -> Formula:
    """Replace every query coordinate with the played value; fold constants."""
    if isinstance(f, FBool):
        return f
    if isinstance(f, Lt):
        return simplify(Lt(_subst_term(f.left, q_star), _subst_term(f.right, q_star)))
    if isinstance(f, Eq):
        return simplify(Eq(_subst_term(f.left, q_star), _subst_term(f.right, q_star)))
    if isinstance(f, Not):
        return simplify(Not(substitute_query(f.inner, q_star)))
    parts = tuple(substitute_query(p, q_star) for p in f.parts)
    return simplify(And(parts) if isinstance(f, And) else Or(parts))


def simplify_term(term: Term) -> Term:
    if isinstance(term, (TInt, TVar)):
        return term
    a = simplify_term(term.left)
    b = simplify_term(term.right)
    if isinstance(a, TInt) and isinstance(b, TInt):
        return TInt(a.value + b.value) if isinstance(term, TAdd) else TInt(a.value * b.value)
    if isinstance(term, TAdd):
        if isinstance(a, TInt) and a.value == 0:
            return b
        if isinstance(b, TInt) and b.value == 0:
            return a
        return TAdd(a, b)
    if isinstance(a, TInt) and a.value in (0, 1):
        return TInt(0) if a.value == 0 else b
    if isinstance(b, TInt) and b.value in (0, 1):
        return TInt(0) if b.value == 0 else a
    return TMul(a, b)


def simplify(f: Formula) -> Formula:
    """Constant folding, and/or flattening with dedup, double-negation removal."""
    if isinstance(f, FBool):
        return f
    if isinstance(f, (Lt, Eq)):
        a = simplify_term(f.left)
        b = simplify_term(f.right)
        if isinstance(a, TInt) and isinstance(b, TInt):
            hit = a.value < b.value if isinstance(f, Lt) else a.value == b.value
            return TRUE if hit else FALSE
        return Lt(a, b) if isinstance(f, Lt) else Eq(a, b)
    if isinstance(f, Not):
        inner = simplify(f.inner)
        if isinstance(inner, FBool):
            return FALSE if inner.value else TRUE
        if isinstance(inner, Not):
            return inner.inner
        return Not(inner)
    flat: list[Formula] = []
    seen: set[Formula] = set()
    absorb = FALSE if isinstance(f, And) else TRUE
    for p in f.parts:
        sp = simplify(p)
        if sp == absorb:
            return absorb
        if isinstance(sp, FBool):
            continue  # neutral element
        inner_parts = sp.parts if type(sp) is type(f) else (sp,)
        for ip in inner_parts:
            if ip not in seen:
                seen.add(ip)
                flat.append(ip)
    if not flat:
        return TRUE if isinstance(f, And) else FALSE
    if len(flat) == 1:
        return flat[0]
    return And(tuple(flat)) if isinstance(f, And) else Or(tuple(flat))


# --- s-expression serialization ----------------------------------------------


def term_to_sexpr(term: Term) -> str:
    if isinstance(term, TInt):
        return str(term.value)
    if isinstance(term, TVar):
        return f"{term.role}{term.index}"
    op = "+" if isinstance(term, TAdd) else "*"
    return f"({op} {term_to_sexpr(term.left)} {term_to_sexpr(term.right)})"


def to_sexpr(f: Formula) -> str:
    if isinstance(f, FBool):
        return "true" if f.value else "false"
    if isinstance(f, Lt):
        return f"(lt {term_to_sexpr(f.left)} {term_to_sexpr(f.right)})"
    if isinstance(f, Eq):
        return f"(eq {term_to_sexpr(f.left)} {term_to_sexpr(f.right)})"
    if isinstance(f, Not):
        # negated atoms print as their complements: not(b < a) is a <= b
        if isinstance(f.inner, Lt):
            return f"(le {term_to_sexpr(f.inner.right)} {term_to_sexpr(f.inner.left)})"
        if isinstance(f.inner, Eq):
            return f"(ne {term_to_sexpr(f.inner.left)} {term_to_sexpr(f.inner.right)})"
        return f"(not {to_sexpr(f.inner)})"
    op = "and" if isinstance(f, And) else "or"
    return f"({op} {' '.join(to_sexpr(p) for p in f.parts)})"


def _tokenize_sexpr(text: str) -> list[str]:
    return text.replace("(", " ( ").replace(")", " ) ").split()


def from_sexpr(text: str) -> Formula:
    """Parse the transcript serialization; also accepts le/gt/ge/ne sugar."""
    tokens = _tokenize_sexpr(text)
    pos = 0

    def next_tok() -> str:
        nonlocal pos
        if pos >= len(tokens):
            raise ParseError("unexpected end of s-expression")
        tok = tokens[pos]
        pos += 1
        return tok

    def parse_term(tok: str) -> Term:
        if tok == "(":
            op = next_tok()
            if op not in ("+", "*"):
                raise ParseError(f"unknown term operator {op!r}")
            a = parse_term(next_tok())
            b = parse_term(next_tok())
            if next_tok() != ")":
                raise ParseError("expected ) in term")
            return TAdd(a, b) if op == "+" else TMul(a, b)
        if tok and (tok[0] in (TARGET, QUERY)) and tok[1:].isdigit():
            return TVar(tok[0], int(tok[1:]))
        try:
            return TInt(int(tok))
        except ValueError:
            raise ParseError(f"bad term token {tok!r}") from None

    def parse_formula() -> Formula:
        tok = next_tok()
        if tok == "true":
            return TRUE
        if tok == "false":
            return FALSE
        if tok != "(":
            raise ParseError(f"expected formula, got {tok!r}")
        op = next_tok()
        if op in ("lt", "eq", "le", "gt", "ge", "ne"):
            a = parse_term(next_tok())
            b = parse_term(next_tok())
            if next_tok() != ")":
                raise ParseError(f"expected ) after {op}")
            if op == "lt":
                return Lt(a, b)
            if op == "eq":
                return Eq(a, b)
            if op == "le":
                return Not(Lt(b, a))
            if op == "gt":
                return Lt(b, a)
            if op == "ge":
                return Not(Lt(a, b))
            return Not(Eq(a, b))
        if op == "not":
            inner = parse_formula()
            if next_tok() != ")":
                raise ParseError("expected ) after not")
            return Not(inner)
        if op in ("and", "or"):
            parts = []
            while pos < len(tokens) and tokens[pos] != ")":
                parts.append(parse_formula())
            if next_tok() != ")":
                raise ParseError(f"unterminated ({op} ...)")
            return And(tuple(parts)) if op == "and" else Or(tuple(parts))
        raise ParseError(f"unknown operator {op!r}")

    f = parse_formula()
    if pos != len(tokens):
        raise ParseError("trailing tokens after formula")
    return f


# --- compiled evaluators -------------------------------------------------------

_scalar_cache: dict[Formula, object] = {}
_vector_cache: dict[Formula, object] = {}


def _term_src(term: Term, tname: str, qname: str) -> str:
    if isinstance(term, TInt):
        return repr(term.value)
    if isinstance(term, TVar):
        base = tname if term.role == TARGET else qname
        return f"{base}[{term.index}]"
    op = "+" if isinstance(term, TAdd) else "*"
    return f"({_term_src(term.left, tname, qname)} {op} {_term_src(term.right, tname, qname)})"


def _scalar_src(f: Formula) -> str:
    if isinstance(f, FBool):
        return "True" if f.value else "False"
    if isinstance(f, Lt):
        return f"({_term_src(f.left, 't', 'q')} < {_term_src(f.right, 't', 'q')})"
    if isinstance(f, Eq):
        return f"({_term_src(f.left, 't', 'q')} == {_term_src(f.right, 't', 'q')})"
    if isinstance(f, Not):
        return f"(not {_scalar_src(f.inner)})"
    op = " and " if isinstance(f, And) else " or "
    return "(" + op.join(_scalar_src(p) for p in f.parts) + ")"


def compile_scalar(f: Formula):
    """Compile to a python function fn(t, q) -> bool (short-circuiting)."""
    fn = _scalar_cache.get(f)
    if fn is None:
        ns: dict = {}
        exec(f"def _fn(t, q=()):\n    return {_scalar_src(f)}\n", ns)
        fn = ns["_fn"]
        _scalar_cache[f] = fn
    return fn


def _vector_src(f: Formula) -> str:
    if isinstance(f, FBool):
        return "ones" if f.value else "(~ones)"
    if isinstance(f, Lt):
        return f"({_term_src(f.left, 'T', 'q')} < {_term_src(f.right, 'T', 'q')})"
    if isinstance(f, Eq):
        return f"({_term_src(f.left, 'T', 'q')} == {_term_src(f.right, 'T', 'q')})"
    if isinstance(f, Not):
        return f"(~{_vector_src(f.inner)})"
    op = " & " if isinstance(f, And) else " | "
    return "(" + op.join(_vector_src(p) for p in f.parts) + ")"


def compile_vector(f: Formula):
    """Compile to fn(T, q, ones) -> bool ndarray over rows of the column set T.

    T is a tuple of int64 column arrays (one per target coordinate), q a tuple
    of ints, ones a preallocated all-True bool array of the row count.
    """
    fn = _vector_cache.get(f)
    if fn is None:
        ns: dict = {}
        exec(f"def _fn(T, q, ones):\n    return ones & ({_vector_src(f)})\n", ns)
        fn = ns["_fn"]
        _vector_cache[f] = fn
    return fn


# --- knowledge ------------------------------------------------------------------


@dataclass(eq=False)
class Knowledge:
    """Accumulated facts about the target: a formula plus the surviving candidates.

    Treated as immutable after construction; updates go through conjoin_and_filter.
    """

    formula: Formula
    candidates: tuple[tuple[int, ...], ...]
    _cols: tuple = field(default=None, repr=False, compare=False)

    @staticmethod
    def from_targets(targets: Sequence[Sequence[int]], formula: Formula = TRUE) -> "Knowledge":
        return Knowledge(formula, tuple(tuple(int(x) for x in t) for t in targets))

    def __len__(self) -> int:
        return len(self.candidates)

    def columns(self) -> tuple:
        if self._cols is None:
            if self.candidates:
                mat = np.asarray(self.candidates, dtype=np.int64)
                cols = tuple(np.ascontiguousarray(mat[:, i]) for i in range(mat.shape[1]))
            else:
                cols = ()
            object.__setattr__(self, "_cols", cols)
        return self._cols

    def ones(self) -> np.ndarray:
        return np.ones(len(self.candidates), dtype=bool)


def _check_bound(f: Formula, tdim: int, qdim: int | None = None) -> None:
    for v in formula_vars(f):
        limit = tdim if v.role == TARGET else qdim
        if limit is not None and v.index >= limit:
            raise UnboundVariable(f"{v.role}{v.index} out of range (dimension {limit})")


def filter_candidates(candidates: tuple[tuple[int, ...], ...], obs: Formula) -> tuple[tuple[int, ...], ...]:
    """Candidates satisfying a target-only observation formula."""
    if not candidates:
        return candidates
    _check_bound(obs, len(candidates[0]))
    cols = tuple(np.asarray([c[i] for c in candidates], dtype=np.int64) for i in range(len(candidates[0])))
    mask = compile_vector(obs)(cols, (), np.ones(len(candidates), dtype=bool))
    return tuple(c for c, keep in zip(candidates, mask) if keep)


def conjoin_and_filter(k: Knowledge, obs: Formula) -> Knowledge:
    """kappa <- kappa AND obs; refilter candidates. Raises EmptyKnowledge on wipeout."""
    if has_query_vars(obs):
        raise ValueError("observation formula must contain only target variables")
    if not k.candidates:
        raise EmptyKnowledge("knowledge already empty")
    _check_bound(obs, len(k.candidates[0]))
    mask = compile_vector(obs)(k.columns(), (), k.ones())
    kept = tuple(c for c, keep in zip(k.candidates, mask) if keep)
    if not kept:
        raise EmptyKnowledge("observation eliminates every candidate")
    if len(kept) == len(k.candidates) and obs == TRUE:
        return k
    return Knowledge(conj([k.formula, obs]), kept)


class SatSolver(Protocol):
    """Backend for existential checks over the candidate set.

    The default is exact enumeration (the domains are finite and
    materialized); an SMT-backed implementation can be slotted in for
    domains too large to materialize.
    """

    def exists(self, f: Formula, candidates: Sequence[Sequence[int]],
               q_star: Sequence[int]) -> bool: ...


class EnumerationSolver:
    def exists(self, f: Formula, candidates: Sequence[Sequence[int]],
               q_star: Sequence[int]) -> bool:
        if not candidates:
            return False
        _check_bound(f, len(candidates[0]), len(q_star))
        cols = tuple(np.asarray([c[i] for c in candidates], dtype=np.int64)
                     for i in range(len(candidates[0])))
        mask = compile_vector(f)(cols, tuple(int(x) for x in q_star),
                                 np.ones(len(candidates), dtype=bool))
        return bool(mask.any())


DEFAULT_SOLVER = EnumerationSolver()


def is_satisfiable_over(f: Formula, candidates: Sequence[Sequence[int]],
                        q_star: Sequence[int], solver: SatSolver = DEFAULT_SOLVER) -> bool:
    """Does some candidate satisfy f with the query pinned to q_star?"""
    return solver.exists(f, candidates, q_star)
