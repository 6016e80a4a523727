"""Concrete syntax for .search files.

Line comments start with '#'. Declarations:

    targets t[1] in 1..27
    queries q[2] in 1..27            # or per-coordinate: in (1..27, 0..5)
    outcomes "Low", "Middle", "High"
    constant A = [3, 7, 9]
    unroll 128
    fn helper(a, b) { ... }
    valid_target { return ... }      # boolean; sees target vars
    valid_query  { return ... }      # boolean; sees query vars
    evaluate { ... }                 # returns a declared outcome label

Statements are C-style with braces; ';' separators are optional. Expressions
are C-like; <=, >, >=, !=, '-' and unary minus are sugar over the kernel
operators (less, equal, not, plus, times). Function-call arguments must be
identifiers; local arrays come from 'x = array(n)' (zero-filled) or literals.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ParseError, SemanticError
from . import nodes as ast

KEYWORDS = {
    "targets", "queries", "outcomes", "constant", "unroll", "fn", "evaluate",
    "valid_target", "valid_query", "if", "else", "while", "return", "true",
    "false", "length", "array", "in",
}

_SYMBOLS = ("&&", "||", "==", "!=", "<=", ">=", "..", "{", "}", "(", ")",
            "[", "]", ",", ";", "=", "<", ">", "!", "+", "-", "*")


@dataclass
class Token:
    kind: str  # NAME KEYWORD INT STRING SYM EOF
    value: str
    line: int
    col: int


def tokenize(source: str) -> list[Token]:
    tokens = []
    i, line, col = 0, 1, 1
    n = len(source)
    while i < n:
        c = source[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and source[i] != "\n":
                i += 1
            continue
        if c == '"':
            j = source.find('"', i + 1)
            if j < 0:
                raise ParseError("unterminated string", line, col)
            tokens.append(Token("STRING", source[i + 1:j], line, col))
            col += j + 1 - i
            i = j + 1
            continue
        if c.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            tokens.append(Token("INT", source[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            word = source[i:j]
            tokens.append(Token("KEYWORD" if word in KEYWORDS else "NAME", word, line, col))
            col += j - i
            i = j
            continue
        for sym in _SYMBOLS:
            if source.startswith(sym, i):
                tokens.append(Token("SYM", sym, line, col))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {c!r}", line, col)
    tokens.append(Token("EOF", "", line, col))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.pos = 0

    # token plumbing

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str) -> ParseError:
        tok = self.peek()
        return ParseError(message, tok.line, tok.col)

    def expect(self, kind: str, value: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind or (value is not None and tok.value != value):
            want = value if value is not None else kind
            raise self.error(f"expected {want!r}, found {tok.value or tok.kind!r}")
        return self.next()

    def accept(self, kind: str, value: str | None = None) -> Token | None:
        tok = self.peek()
        if tok.kind == kind and (value is None or tok.value == value):
            return self.next()
        return None

    # declarations

    def parse_spec(self, name: str) -> ast.SearchSpec:
        target_decls: list[ast.VarDecl] = []
        query_decls: list[ast.VarDecl] = []
        outcomes: list[str] = []
        constants: dict = {}
        fns: dict[str, ast.FunctionDefine] = {}
        evaluate = None
        target_validity = None
        query_validity = None
        unroll = 64

        while self.peek().kind != "EOF":
            tok = self.expect("KEYWORD")
            if tok.value == "targets":
                target_decls.extend(self.var_decls())
            elif tok.value == "queries":
                query_decls.extend(self.var_decls())
            elif tok.value == "outcomes":
                outcomes.append(self.expect("STRING").value)
                while self.accept("SYM", ","):
                    outcomes.append(self.expect("STRING").value)
            elif tok.value == "constant":
                cname = self.expect("NAME").value
                self.expect("SYM", "=")
                if self.accept("SYM", "["):
                    vals = [self.int_literal()]
                    while self.accept("SYM", ","):
                        vals.append(self.int_literal())
                    self.expect("SYM", "]")
                    constants[cname] = tuple(vals)
                else:
                    constants[cname] = self.int_literal()
            elif tok.value == "unroll":
                unroll = int(self.expect("INT").value)
            elif tok.value == "fn":
                fname = self.expect("NAME").value
                self.expect("SYM", "(")
                params = []
                if not self.accept("SYM", ")"):
                    params.append(self.expect("NAME").value)
                    while self.accept("SYM", ","):
                        params.append(self.expect("NAME").value)
                    self.expect("SYM", ")")
                if fname in fns:
                    raise self.error(f"function {fname!r} defined twice")
                fns[fname] = ast.FunctionDefine(fname, tuple(params), self.block())
            elif tok.value in ("valid_target", "valid_query"):
                if tok.value in fns:
                    raise self.error(f"{tok.value} defined twice")
                fns[tok.value] = ast.FunctionDefine(tok.value, (), self.block())
                if tok.value == "valid_target":
                    target_validity = tok.value
                else:
                    query_validity = tok.value
            elif tok.value == "evaluate":
                if evaluate is not None:
                    raise self.error("evaluate defined twice")
                evaluate = self.block()
            else:
                raise self.error(f"unexpected {tok.value!r} at top level")

        if evaluate is None:
            raise SemanticError("spec has no evaluate block")
        spec = ast.SearchSpec(
            name=name,
            target_decls=tuple(target_decls),
            query_decls=tuple(query_decls),
            outcomes=tuple(outcomes),
            evaluate_fn=evaluate,
            aux_fns=fns,
            constants=constants,
            target_validity=target_validity,
            query_validity=query_validity,
            unroll_bound=unroll,
        )
        _analyze(spec)
        return spec

    def int_literal(self) -> int:
        neg = self.accept("SYM", "-") is not None
        v = int(self.expect("INT").value)
        return -v if neg else v

    def var_decls(self) -> list[ast.VarDecl]:
        decls = [self.var_decl()]
        while self.accept("SYM", ","):
            decls.append(self.var_decl())
        return decls

    def var_decl(self) -> ast.VarDecl:
        name = self.expect("NAME").value
        self.expect("SYM", "[")
        dim = int(self.expect("INT").value)
        self.expect("SYM", "]")
        if dim < 1:
            raise self.error(f"dimension of {name!r} must be positive")
        self.expect("KEYWORD", "in")
        if self.accept("SYM", "("):
            ranges = [self.range_literal()]
            while self.accept("SYM", ","):
                ranges.append(self.range_literal())
            self.expect("SYM", ")")
            if len(ranges) != dim:
                raise self.error(f"{name!r} declares {dim} coordinates but {len(ranges)} ranges")
        else:
            ranges = [self.range_literal()] * dim
        return ast.VarDecl(name, dim, tuple(ranges))

    def range_literal(self) -> tuple[int, int]:
        lo = self.int_literal()
        self.expect("SYM", "..")
        hi = self.int_literal()
        return (lo, hi)

    # statements

    def block(self) -> ast.StatementList:
        self.expect("SYM", "{")
        stmts = []
        while not self.accept("SYM", "}"):
            stmts.append(self.statement())
            while self.accept("SYM", ";"):
                pass
        return ast.StatementList(tuple(stmts))

    def statement(self) -> ast.Stmt:
        tok = self.peek()
        if tok.kind == "KEYWORD" and tok.value == "if":
            return self.if_statement()
        if tok.kind == "KEYWORD" and tok.value == "while":
            self.next()
            self.expect("SYM", "(")
            cond = self.expression()
            self.expect("SYM", ")")
            return ast.While(cond, self.block())
        if tok.kind == "KEYWORD" and tok.value == "return":
            self.next()
            if self.peek().kind == "STRING":
                return ast.Return(label=self.next().value)
            return ast.Return(value=self.expression())
        if tok.kind == "NAME":
            name = self.next().value
            if self.accept("SYM", "["):
                index = self.expression()
                self.expect("SYM", "]")
                self.expect("SYM", "=")
                return ast.ArrayStore(name, index, self.expression())
            self.expect("SYM", "=")
            if self.accept("SYM", "["):
                elems = [self.expression()]
                while self.accept("SYM", ","):
                    elems.append(self.expression())
                self.expect("SYM", "]")
                return ast.Assign(name, tuple(elems))
            if self.peek().kind == "KEYWORD" and self.peek().value == "array":
                self.next()
                self.expect("SYM", "(")
                size = self.expression()
                self.expect("SYM", ")")
                return ast.Assign(name, ast.ArrayDeclare(name, size))
            return ast.Assign(name, self.expression())
        raise self.error(f"expected statement, found {tok.value or tok.kind!r}")

    def if_statement(self) -> ast.Stmt:
        self.expect("KEYWORD", "if")
        self.expect("SYM", "(")
        cond = self.expression()
        self.expect("SYM", ")")
        body = self.block()
        if self.accept("KEYWORD", "else"):
            if self.peek().kind == "KEYWORD" and self.peek().value == "if":
                else_body = ast.StatementList((self.if_statement(),))
            else:
                else_body = self.block()
            return ast.IfElse(cond, body, else_body)
        return ast.If(cond, body)

    # expressions (precedence climbing; sugar desugared here)

    def expression(self) -> ast.Expr:
        return self.or_expr()

    def or_expr(self) -> ast.Expr:
        left = self.and_expr()
        while self.accept("SYM", "||"):
            left = ast.Or(left, self.and_expr())
        return left

    def and_expr(self) -> ast.Expr:
        left = self.not_expr()
        while self.accept("SYM", "&&"):
            left = ast.And(left, self.not_expr())
        return left

    def not_expr(self) -> ast.Expr:
        if self.accept("SYM", "!"):
            return ast.Not(self.not_expr())
        return self.comparison()

    def comparison(self) -> ast.Expr:
        left = self.additive()
        tok = self.peek()
        if tok.kind == "SYM" and tok.value in ("<", "<=", ">", ">=", "==", "!="):
            op = self.next().value
            right = self.additive()
            if op == "<":
                return ast.Less(left, right)
            if op == "<=":
                return ast.Not(ast.Less(right, left))
            if op == ">":
                return ast.Less(right, left)
            if op == ">=":
                return ast.Not(ast.Less(left, right))
            if op == "==":
                return ast.Equal(left, right)
            return ast.Not(ast.Equal(left, right))
        return left

    def additive(self) -> ast.Expr:
        left = self.multiplicative()
        while True:
            if self.accept("SYM", "+"):
                left = ast.Plus(left, self.multiplicative())
            elif self.accept("SYM", "-"):
                left = ast.Plus(left, ast.Times(ast.IntConst(-1), self.multiplicative()))
            else:
                return left

    def multiplicative(self) -> ast.Expr:
        left = self.unary()
        while self.accept("SYM", "*"):
            left = ast.Times(left, self.unary())
        return left

    def unary(self) -> ast.Expr:
        if self.accept("SYM", "-"):
            operand = self.unary()
            if isinstance(operand, ast.IntConst):
                return ast.IntConst(-operand.value)
            return ast.Times(ast.IntConst(-1), operand)
        return self.primary()

    def primary(self) -> ast.Expr:
        tok = self.peek()
        if tok.kind == "INT":
            self.next()
            return ast.IntConst(int(tok.value))
        if tok.kind == "KEYWORD" and tok.value in ("true", "false"):
            self.next()
            return ast.BoolConst(tok.value == "true")
        if tok.kind == "KEYWORD" and tok.value == "length":
            self.next()
            self.expect("SYM", "(")
            name = self.expect("NAME").value
            self.expect("SYM", ")")
            return ast.Length(name)
        if self.accept("SYM", "("):
            inner = self.expression()
            self.expect("SYM", ")")
            return inner
        if tok.kind == "NAME":
            name = self.next().value
            if self.accept("SYM", "["):
                index = self.expression()
                self.expect("SYM", "]")
                return ast.ArrayAccess(name, index)
            if self.accept("SYM", "("):
                args = []
                if not self.accept("SYM", ")"):
                    args.append(self.expect("NAME").value)
                    while self.accept("SYM", ","):
                        args.append(self.expect("NAME").value)
                    self.expect("SYM", ")")
                return ast.FunctionCall(name, tuple(args))
            return ast.VarRef(name)
        raise self.error(f"expected expression, found {tok.value or tok.kind!r}")


def parse_spec(source_text: str, name: str = "spec") -> ast.SearchSpec:
    """Parse and validate a .search source; raises ParseError/SemanticError."""
    return _Parser(source_text).parse_spec(name)


# --- semantic analysis --------------------------------------------------------

INT, BOOL = "int", "bool"


def _arr(length: int | None):
    return ("array", length)


def _is_arr(kind) -> bool:
    return isinstance(kind, tuple)


class _Analyzer:
    def __init__(self, spec: ast.SearchSpec):
        self.spec = spec
        self._fn_stack: list[str] = []

    def run(self) -> None:
        spec = self.spec
        if not spec.target_decls:
            raise SemanticError("spec declares no targets")
        if not spec.query_decls:
            raise SemanticError("spec declares no queries")
        if not spec.outcomes:
            raise SemanticError("spec declares no outcomes")
        if len(set(spec.outcomes)) != len(spec.outcomes):
            raise SemanticError("duplicate outcome label")
        names_seen = set()
        for d in spec.target_decls + spec.query_decls:
            if d.name in names_seen or d.name in spec.constants:
                raise SemanticError(f"variable {d.name!r} declared twice")
            names_seen.add(d.name)
            for lo, hi in d.ranges:
                if lo > hi:
                    raise SemanticError(f"empty interval {lo}..{hi} for {d.name!r}")
        if spec.unroll_bound < 1:
            raise SemanticError("unroll bound must be at least 1")
        for fn in spec.aux_fns.values():
            if len(set(fn.params)) != len(fn.params):
                raise SemanticError(f"duplicate parameter in fn {fn.name!r}")
            for p in fn.params:
                if p in spec.constants:
                    raise SemanticError(f"parameter {p!r} of {fn.name!r} shadows a constant")

        base = {name: (INT if not isinstance(v, tuple) else _arr(len(v)))
                for name, v in spec.constants.items()}
        env_t = dict(base)
        env_q = dict(base)
        for d in spec.target_decls:
            env_t[d.name] = INT if d.dim == 1 else _arr(d.dim)
        for d in spec.query_decls:
            env_q[d.name] = INT if d.dim == 1 else _arr(d.dim)
        env_eval = dict(env_t)
        env_eval.update({d.name: (INT if d.dim == 1 else _arr(d.dim)) for d in spec.query_decls})

        # dim-1 decl names evaluate as scalars but remain indexable as x[0]
        self.decl_dims = {d.name: d.dim for d in spec.target_decls + spec.query_decls}
        self.const_names = set(spec.constants)

        self.check_body(spec.evaluate_fn, env_eval, mode="evaluate")
        if not self.always_returns(spec.evaluate_fn):
            raise SemanticError("evaluate may fall off the end without a return")
        for vname, env in ((spec.target_validity, env_t), (spec.query_validity, env_q)):
            if vname is None:
                continue
            body = spec.aux_fns[vname].body
            self.check_body(body, dict(env), mode="bool")
            if not self.always_returns(body):
                raise SemanticError(f"{vname} may fall off the end without a return")
        for fn in spec.aux_fns.values():
            if fn.name in (spec.target_validity, spec.query_validity):
                continue
            if not self.always_returns(fn.body):
                raise SemanticError(f"fn {fn.name!r} may fall off the end without a return")

    # flow-insensitive-ish kind checking; branch envs merge by intersection

    def check_body(self, body: ast.StatementList, env: dict, mode: str) -> str | None:
        """mode: 'evaluate' (label returns), 'bool', 'fn'. Returns fn return kind."""
        self._ret_kind: str | None = None
        self._mode = mode
        self.check_stmts(body, env)
        return self._ret_kind

    def check_stmts(self, sl: ast.StatementList, env: dict) -> None:
        for st in sl.stmts:
            self.check_stmt(st, env)

    def check_stmt(self, st: ast.Stmt, env: dict) -> None:
        if isinstance(st, ast.StatementList):
            self.check_stmts(st, env)
        elif isinstance(st, ast.If):
            self.require(st.cond, env, BOOL)
            self.check_stmts(st.body, dict(env))
        elif isinstance(st, ast.IfElse):
            self.require(st.cond, env, BOOL)
            env_then = dict(env)
            env_else = dict(env)
            self.check_stmts(st.then_body, env_then)
            self.check_stmts(st.else_body, env_else)
            for name, kind in env_then.items():
                if name not in env and env_else.get(name) == kind:
                    env[name] = kind
        elif isinstance(st, ast.While):
            self.require(st.cond, env, BOOL)
            self.check_stmts(st.body, dict(env))
        elif isinstance(st, ast.Assign):
            if isinstance(st.value, tuple):
                for e in st.value:
                    self.require(e, env, INT)
                kind = _arr(len(st.value))
            elif isinstance(st.value, ast.ArrayDeclare):
                self.require(st.value.size, env, INT)
                size = st.value.size
                kind = _arr(size.value if isinstance(size, ast.IntConst) else None)
            else:
                kind = self.infer(st.value, env)
                if _is_arr(kind) and st.value.__class__ is not ast.VarRef:
                    raise SemanticError(f"cannot assign array expression to {st.name!r}")
            old = env.get(st.name)
            if old is not None and _is_arr(old) != _is_arr(kind):
                raise SemanticError(f"{st.name!r} rebound to a different kind")
            if st.name in self.decl_dims or st.name in self.const_names:
                raise SemanticError(f"cannot assign to {st.name!r}")
            env[st.name] = kind
        elif isinstance(st, ast.ArrayStore):
            kind = env.get(st.name)
            if kind is None:
                raise SemanticError(f"undeclared array {st.name!r}")
            if not _is_arr(kind):
                raise SemanticError(f"{st.name!r} is not an array")
            if st.name in self.decl_dims or st.name in self.const_names:
                raise SemanticError(f"cannot assign to {st.name!r}")
            self.require(st.index, env, INT)
            self.check_index_bounds(st.index, kind)
            self.require(st.value, env, INT)
        elif isinstance(st, ast.Return):
            if st.label is not None:
                if self._mode != "evaluate":
                    raise SemanticError("outcome label returned outside evaluate")
                if st.label not in self.spec.outcomes:
                    raise SemanticError(f"undeclared outcome label {st.label!r}")
            else:
                kind = self.infer(st.value, env)
                if self._mode == "evaluate":
                    raise SemanticError("evaluate must return a declared outcome label")
                if self._mode == "bool" and kind != BOOL:
                    raise SemanticError("validity predicate must return a boolean")
                if _is_arr(kind):
                    raise SemanticError("functions cannot return arrays")
                if self._ret_kind is None:
                    self._ret_kind = kind
                elif self._ret_kind != kind:
                    raise SemanticError("inconsistent return kinds in function")
        else:
            raise SemanticError(f"unknown statement {st!r}")

    def require(self, e: ast.Expr, env: dict, want: str) -> None:
        got = self.infer(e, env)
        if got != want:
            raise SemanticError(f"expected {want} expression, got {got}")

    def check_index_bounds(self, index: ast.Expr, kind) -> None:
        if isinstance(index, ast.IntConst) and _is_arr(kind) and kind[1] is not None:
            if not (0 <= index.value < kind[1]):
                raise SemanticError(f"index {index.value} out of bounds for length {kind[1]}")

    def infer(self, e: ast.Expr, env: dict):
        if isinstance(e, ast.IntConst):
            return INT
        if isinstance(e, ast.BoolConst):
            return BOOL
        if isinstance(e, ast.VarRef):
            kind = env.get(e.name)
            if kind is None:
                raise SemanticError(f"undeclared identifier {e.name!r}")
            return kind
        if isinstance(e, ast.ArrayAccess):
            kind = env.get(e.name)
            if kind is None:
                raise SemanticError(f"undeclared identifier {e.name!r}")
            if not _is_arr(kind):
                if env.get(e.name) == INT and e.name in self.decl_dims and self.decl_dims[e.name] == 1:
                    kind = _arr(1)  # x[0] on a dim-1 declared input
                else:
                    raise SemanticError(f"{e.name!r} is not an array")
            self.require(e.index, env, INT)
            self.check_index_bounds(e.index, kind)
            return INT
        if isinstance(e, ast.Length):
            kind = env.get(e.name)
            if kind is None:
                raise SemanticError(f"undeclared identifier {e.name!r}")
            if not _is_arr(kind):
                raise SemanticError(f"length() of non-array {e.name!r}")
            return INT
        if isinstance(e, ast.FunctionCall):
            return self.check_call(e, env)
        if isinstance(e, (ast.Plus, ast.Times)):
            self.require(e.left, env, INT)
            self.require(e.right, env, INT)
            return INT
        if isinstance(e, (ast.Less, ast.Equal)):
            self.require(e.left, env, INT)
            self.require(e.right, env, INT)
            return BOOL
        if isinstance(e, (ast.And, ast.Or)):
            self.require(e.left, env, BOOL)
            self.require(e.right, env, BOOL)
            return BOOL
        if isinstance(e, ast.Not):
            self.require(e.inner, env, BOOL)
            return BOOL
        if isinstance(e, ast.ArrayDeclare):
            raise SemanticError("array(...) only allowed on the right of an assignment")
        raise SemanticError(f"unknown expression {e!r}")

    def check_call(self, call: ast.FunctionCall, env: dict):
        spec = self.spec
        fn = spec.aux_fns.get(call.name)
        if fn is None or call.name in (spec.target_validity, spec.query_validity):
            raise SemanticError(f"unknown function {call.name!r}")
        if len(call.args) != len(fn.params):
            raise SemanticError(
                f"{call.name!r} takes {len(fn.params)} arguments, got {len(call.args)}")
        if call.name in self._fn_stack:
            raise SemanticError(f"recursive call to {call.name!r}")
        fn_env = {name: (INT if not isinstance(v, tuple) else _arr(len(v)))
                  for name, v in spec.constants.items()}
        for param, arg in zip(fn.params, call.args):
            kind = env.get(arg)
            if kind is None:
                raise SemanticError(f"undeclared identifier {arg!r} in call to {call.name!r}")
            fn_env[param] = kind
        self._fn_stack.append(call.name)
        outer_mode, outer_ret = self._mode, self._ret_kind
        self._mode, self._ret_kind = "fn", None
        try:
            self.check_stmts(fn.body, fn_env)
            ret = self._ret_kind
        finally:
            self._mode, self._ret_kind = outer_mode, outer_ret
            self._fn_stack.pop()
        if ret is None:
            raise SemanticError(f"fn {call.name!r} never returns a value")
        return ret

    def always_returns(self, sl: ast.StatementList) -> bool:
        def stmt_returns(st: ast.Stmt) -> bool:
            if isinstance(st, ast.Return):
                return True
            if isinstance(st, ast.StatementList):
                return self.always_returns(st)
            if isinstance(st, ast.IfElse):
                return self.always_returns(st.then_body) and self.always_returns(st.else_body)
            return False

        return any(stmt_returns(st) for st in sl.stmts)


def _analyze(spec: ast.SearchSpec) -> None:
    _Analyzer(spec).run()
