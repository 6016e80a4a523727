"""AST for the search-problem language.

Node kinds are exactly: StatementList, If, IfElse, While, Assign, ArrayStore,
Return, FunctionDefine, FunctionCall, ArrayDeclare, ArrayAccess, Length,
And, Or, Not, Less, Equal, Plus, Times, IntConst, BoolConst, VarRef.
Sugar in the concrete syntax (<=, >, >=, !=, binary and unary minus) is
desugared at parse time; it never reaches the tree.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Union


@dataclass(frozen=True)
class IntConst:
    value: int


@dataclass(frozen=True)
class BoolConst:
    value: bool


@dataclass(frozen=True)
class VarRef:
    name: str


@dataclass(frozen=True)
class ArrayAccess:
    name: str
    index: "Expr"


@dataclass(frozen=True)
class Length:
    name: str


@dataclass(frozen=True)
class FunctionCall:
    name: str
    args: tuple[str, ...]  # arguments are identifiers


@dataclass(frozen=True)
class ArrayDeclare:
    name: str
    size: "Expr"


@dataclass(frozen=True)
class Plus:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Times:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Less:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Equal:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class And:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Or:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Not:
    inner: "Expr"


Expr = Union[
    IntConst, BoolConst, VarRef, ArrayAccess, Length, FunctionCall,
    ArrayDeclare, Plus, Times, Less, Equal, And, Or, Not,
]


@dataclass(frozen=True)
class StatementList:
    stmts: tuple["Stmt", ...]


@dataclass(frozen=True)
class If:
    cond: Expr
    body: StatementList


@dataclass(frozen=True)
class IfElse:
    cond: Expr
    then_body: StatementList
    else_body: StatementList


@dataclass(frozen=True)
class While:
    cond: Expr
    body: StatementList


@dataclass(frozen=True)
class Assign:
    name: str
    value: Union[Expr, tuple[Expr, ...]]  # tuple form is an array literal


@dataclass(frozen=True)
class ArrayStore:
    name: str
    index: Expr
    value: Expr


@dataclass(frozen=True)
class Return:
    # exactly one of value/label is set; label returns are outcome labels
    value: Expr | None = None
    label: str | None = None


@dataclass(frozen=True)
class FunctionDefine:
    name: str
    params: tuple[str, ...]
    body: StatementList


Stmt = Union[StatementList, If, IfElse, While, Assign, ArrayStore, Return]


@dataclass(frozen=True)
class VarDecl:
    """One declared target or query variable: a fixed-dimension integer box."""

    name: str
    dim: int
    ranges: tuple[tuple[int, int], ...]  # inclusive (lo, hi) per coordinate


@dataclass
class SearchSpec:
    """A parsed search-problem specification. Immutable after construction."""

    name: str
    target_decls: tuple[VarDecl, ...]
    query_decls: tuple[VarDecl, ...]
    outcomes: tuple[str, ...]
    evaluate_fn: StatementList
    aux_fns: dict[str, FunctionDefine]
    constants: dict[str, Union[int, tuple[int, ...]]]
    target_validity: str | None = None
    query_validity: str | None = None
    unroll_bound: int = 64

    @property
    def target_dim(self) -> int:
        return sum(d.dim for d in self.target_decls)

    @property
    def query_dim(self) -> int:
        return sum(d.dim for d in self.query_decls)

    @property
    def target_ranges(self) -> tuple[tuple[int, int], ...]:
        return tuple(r for d in self.target_decls for r in d.ranges)

    @property
    def query_ranges(self) -> tuple[tuple[int, int], ...]:
        return tuple(r for d in self.query_decls for r in d.ranges)

    def decl_slices(self, decls: tuple[VarDecl, ...]) -> dict[str, tuple[int, int]]:
        """Map decl name -> (offset, dim) into the flattened vector."""
        out = {}
        off = 0
        for d in decls:
            out[d.name] = (off, d.dim)
            off += d.dim
        return out


# --- serialization -----------------------------------------------------------


def to_json(node) -> dict:
    """Machine-readable dump: {"kind": ..., fields...} with nested nodes."""
    def conv(v):
        if isinstance(v, tuple):
            return [conv(x) for x in v]
        if hasattr(v, "__dataclass_fields__"):
            return to_json(v)
        return v

    out = {"kind": type(node).__name__}
    for f in fields(node):
        out[f.name] = conv(getattr(node, f.name))
    return out


_PREC = {Or: 1, And: 2, Not: 3, Less: 4, Equal: 4, Plus: 5, Times: 6}


def _expr_src(e: Expr, parent_prec: int = 0) -> str:
    if isinstance(e, IntConst):
        s = str(e.value)
        return f"({s})" if e.value < 0 and parent_prec >= 5 else s
    if isinstance(e, BoolConst):
        return "true" if e.value else "false"
    if isinstance(e, VarRef):
        return e.name
    if isinstance(e, ArrayAccess):
        return f"{e.name}[{_expr_src(e.index)}]"
    if isinstance(e, Length):
        return f"length({e.name})"
    if isinstance(e, FunctionCall):
        return f"{e.name}({', '.join(e.args)})"
    if isinstance(e, ArrayDeclare):
        return f"array({_expr_src(e.size)})"
    if isinstance(e, Not):
        bare = (IntConst, BoolConst, VarRef, ArrayAccess, Length, FunctionCall, Not)
        inner = _expr_src(e.inner, _PREC[Not])
        return f"!{inner}" if isinstance(e.inner, bare) else f"!({inner})"
    ops = {Plus: "+", Times: "*", Less: "<", Equal: "==", And: "&&", Or: "||"}
    prec = _PREC[type(e)]
    s = f"{_expr_src(e.left, prec)} {ops[type(e)]} {_expr_src(e.right, prec + 1)}"
    return f"({s})" if prec < parent_prec else s


def _stmt_src(s: Stmt, indent: int) -> list[str]:
    pad = "  " * indent
    if isinstance(s, StatementList):
        return [line for st in s.stmts for line in _stmt_src(st, indent)]
    if isinstance(s, If):
        return [f"{pad}if ({_expr_src(s.cond)}) {{", *_stmt_src(s.body, indent + 1), f"{pad}}}"]
    if isinstance(s, IfElse):
        return [
            f"{pad}if ({_expr_src(s.cond)}) {{", *_stmt_src(s.then_body, indent + 1),
            f"{pad}}} else {{", *_stmt_src(s.else_body, indent + 1), f"{pad}}}",
        ]
    if isinstance(s, While):
        return [f"{pad}while ({_expr_src(s.cond)}) {{", *_stmt_src(s.body, indent + 1), f"{pad}}}"]
    if isinstance(s, Assign):
        if isinstance(s.value, tuple):
            return [f"{pad}{s.name} = [{', '.join(_expr_src(v) for v in s.value)}]"]
        return [f"{pad}{s.name} = {_expr_src(s.value)}"]
    if isinstance(s, ArrayStore):
        return [f"{pad}{s.name}[{_expr_src(s.index)}] = {_expr_src(s.value)}"]
    if isinstance(s, Return):
        if s.label is not None:
            return [f'{pad}return "{s.label}"']
        return [f"{pad}return {_expr_src(s.value)}"]
    raise TypeError(f"not a statement: {s!r}")


def _ranges_src(d: VarDecl) -> str:
    if len(set(d.ranges)) == 1:
        lo, hi = d.ranges[0]
        return f"{lo}..{hi}"
    return "(" + ", ".join(f"{lo}..{hi}" for lo, hi in d.ranges) + ")"


def to_source(spec: SearchSpec) -> str:
    """Pretty-print back to concrete syntax; reparsing yields an equal AST."""
    lines = []
    for label, decls in (("targets", spec.target_decls), ("queries", spec.query_decls)):
        lines.append(f"{label} " + ", ".join(f"{d.name}[{d.dim}] in {_ranges_src(d)}" for d in decls))
    lines.append("outcomes " + ", ".join(f'"{o}"' for o in spec.outcomes))
    if spec.unroll_bound != 64:
        lines.append(f"unroll {spec.unroll_bound}")
    for name, val in spec.constants.items():
        if isinstance(val, tuple):
            lines.append(f"constant {name} = [{', '.join(str(v) for v in val)}]")
        else:
            lines.append(f"constant {name} = {val}")
    for fn in spec.aux_fns.values():
        if fn.name in (spec.target_validity, spec.query_validity):
            lines.append(f"\n{fn.name} {{")
        else:
            lines.append(f"\nfn {fn.name}({', '.join(fn.params)}) {{")
        lines.extend(_stmt_src(fn.body, 1))
        lines.append("}")
    lines.append("\nevaluate {")
    lines.extend(_stmt_src(spec.evaluate_fn, 1))
    lines.append("}")
    return "\n".join(lines) + "\n"
