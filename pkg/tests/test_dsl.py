import pytest

from querysynth.dsl import (
    enumerate_queries,
    enumerate_targets,
    evaluate_concrete,
    parse_spec,
    to_json,
    to_source,
)
from querysynth.errors import CapacityError, EvalError, ParseError, SemanticError

from conftest import LMH27_SOURCE


class TestParse:
    def test_lmh_shape(self, lmh27):
        assert lmh27.outcomes == ("Low", "Middle", "High")
        assert lmh27.target_dim == 1
        assert lmh27.query_dim == 2
        assert lmh27.target_ranges == ((1, 27),)
        assert lmh27.query_ranges == ((1, 27), (1, 27))

    def test_empty_evaluate_is_rejected(self):
        src = LMH27_SOURCE.replace(
            LMH27_SOURCE[LMH27_SOURCE.index("evaluate"):], "evaluate { }\n")
        with pytest.raises(SemanticError):
            parse_spec(src)

    def test_if_without_else_needs_fallthrough_return(self):
        src = """
targets t[1] in 1..3
queries q[1] in 1..3
outcomes "A", "B"
evaluate {
  if (t < q) { return "A" }
}
"""
        with pytest.raises(SemanticError):
            parse_spec(src)

    def test_out_of_bounds_literal_index(self):
        src = LMH27_SOURCE.replace("q[0] <= t", "q[2] <= t")
        with pytest.raises(SemanticError):
            parse_spec(src)

    def test_undeclared_identifier(self):
        src = LMH27_SOURCE.replace("t < q[0]", "t < bogus")
        with pytest.raises(SemanticError):
            parse_spec(src)

    def test_duplicate_outcome_label(self):
        src = LMH27_SOURCE.replace('"High"', '"Low"')
        with pytest.raises(SemanticError):
            parse_spec(src)

    def test_syntax_error_carries_position(self):
        with pytest.raises(ParseError) as info:
            parse_spec("targets t[1] in 1..\noutcomes \"A\"\n")
        assert info.value.line >= 1

    def test_missing_evaluate(self):
        with pytest.raises(SemanticError):
            parse_spec('targets t[1] in 1..3\nqueries q[1] in 1..3\noutcomes "A"\n')

    def test_empty_interval_rejected(self):
        with pytest.raises(SemanticError):
            parse_spec(LMH27_SOURCE.replace("1..27", "9..3"))

    def test_arity_mismatch(self):
        src = """
targets t[1] in 1..3
queries q[1] in 1..3
outcomes "A", "B"
fn double(x) { return x + x }
evaluate {
  v = double(t, q)
  if (v < q) { return "A" }
  return "B"
}
"""
        with pytest.raises(SemanticError):
            parse_spec(src)

    def test_recursion_rejected(self):
        src = """
targets t[1] in 1..3
queries q[1] in 1..3
outcomes "A", "B"
fn loop(x) { y = loop(x) ; return y }
evaluate {
  v = loop(t)
  if (v < q) { return "A" }
  return "B"
}
"""
        with pytest.raises(SemanticError):
            parse_spec(src)

    def test_undeclared_return_label(self):
        with pytest.raises(SemanticError):
            parse_spec(LMH27_SOURCE.replace('return "High"', 'return "Huge"'))

    def test_assign_to_declared_input_rejected(self):
        src = LMH27_SOURCE.replace('evaluate {', 'evaluate {\n  t = 4')
        with pytest.raises(SemanticError):
            parse_spec(src)

    def test_call_arguments_must_be_identifiers(self):
        src = """
targets t[1] in 1..3
queries q[1] in 1..3
outcomes "A", "B"
fn double(x) { return x + x }
evaluate {
  v = double(t + 1)
  if (v < q) { return "A" }
  return "B"
}
"""
        with pytest.raises(ParseError):
            parse_spec(src)


class TestInterp:
    @pytest.mark.parametrize("t,expected", [(5, "Low"), (10, "Middle"), (18, "Middle"),
                                            (19, "High"), (27, "High")])
    def test_lmh_outcomes(self, lmh27, t, expected):
        assert evaluate_concrete(lmh27, (10, 18), (t,)) == expected

    def test_deterministic(self, lmh27):
        runs = {evaluate_concrete(lmh27, (10, 18), (7,)) for _ in range(5)}
        assert runs == {"Low"}

    def test_loop_bound_errors(self):
        src = """
targets t[1] in 1..3
queries q[1] in 1..3
outcomes "A"
unroll 8
evaluate {
  i = 0
  while (0 < 1) { i = i + 1 }
  return "A"
}
"""
        spec = parse_spec(src)
        with pytest.raises(EvalError):
            evaluate_concrete(spec, (1,), (1,))

    def test_loop_within_bound_ok(self):
        src = """
targets t[1] in 1..3
queries q[1] in 1..3
outcomes "A", "B"
unroll 8
evaluate {
  i = 0
  while (i < 8) { i = i + 1 }
  if (i == 8) { return "A" }
  return "B"
}
"""
        spec = parse_spec(src)
        assert evaluate_concrete(spec, (1,), (1,)) == "A"

    def test_functions_and_arrays(self):
        src = """
targets t[1] in 0..3
queries q[1] in 0..3
outcomes "Yes", "No"
constant A = [3, 1, 2, 0]
fn sum_upto(xs, n) {
  s = 0
  i = 0
  while (i < n) { s = s + xs[i] ; i = i + 1 }
  return s
}
evaluate {
  n = t + 1
  s = sum_upto(A, n)
  if (s == q + q) { return "Yes" }
  return "No"
}
"""
        spec = parse_spec(src)
        # prefix sums of A: 3, 4, 6, 6
        assert evaluate_concrete(spec, (3,), (1,)) == "No"
        assert evaluate_concrete(spec, (2,), (1,)) == "Yes"
        assert evaluate_concrete(spec, (3,), (2,)) == "Yes"

    def test_array_store_and_length(self):
        src = """
targets t[1] in 0..2
queries q[1] in 0..2
outcomes "Yes", "No"
evaluate {
  buf = array(3)
  buf[t] = 1
  hits = 0
  i = 0
  while (i < length(buf)) {
    if (buf[i] == 1) { hits = hits + i }
    i = i + 1
  }
  if (hits == q) { return "Yes" }
  return "No"
}
"""
        spec = parse_spec(src)
        assert evaluate_concrete(spec, (2,), (2,)) == "Yes"
        assert evaluate_concrete(spec, (1,), (2,)) == "No"


class TestEnumeration:
    def test_lmh_targets(self, lmh27):
        ts = enumerate_targets(lmh27)
        assert len(ts) == 27
        assert ts[0] == (1,) and ts[-1] == (27,)
        assert ts == sorted(ts)

    def test_singleton_box(self):
        spec = parse_spec(
            'targets a[2] in 1..1\nqueries q[1] in 1..1\noutcomes "X"\nevaluate { return "X" }')
        assert enumerate_targets(spec) == [(1, 1)]

    def test_movierank3_validity(self, corpus):
        spec = corpus["movierank3"].spec()
        assert len(enumerate_targets(spec)) == 6
        assert len(enumerate_queries(spec)) == 9

    def test_capacity(self, lmh27):
        with pytest.raises(CapacityError):
            enumerate_targets(lmh27, cap=5)


class TestRoundTrip:
    def test_lmh_roundtrip(self, lmh27):
        again = parse_spec(to_source(lmh27), name=lmh27.name)
        assert again.evaluate_fn == lmh27.evaluate_fn
        assert again.target_decls == lmh27.target_decls
        assert again.query_decls == lmh27.query_decls
        assert again.outcomes == lmh27.outcomes

    def test_corpus_roundtrip(self, corpus):
        for entry in corpus.values():
            spec = entry.spec()
            again = parse_spec(to_source(spec), name=spec.name)
            assert again.evaluate_fn == spec.evaluate_fn, entry.name
            assert again.aux_fns == spec.aux_fns, entry.name
            assert again.constants == spec.constants, entry.name

    def test_json_dump(self, lmh27):
        doc = to_json(lmh27.evaluate_fn)
        assert doc["kind"] == "StatementList"
        kinds = set()

        def walk(node):
            if isinstance(node, dict):
                kinds.add(node.get("kind"))
                for v in node.values():
                    walk(v)
            elif isinstance(node, list):
                for v in node:
                    walk(v)

        walk(doc)
        assert "If" in kinds and "Return" in kinds and "Less" in kinds
        allowed = {"StatementList", "If", "IfElse", "While", "Assign", "ArrayStore",
                   "Return", "FunctionDefine", "FunctionCall", "ArrayDeclare",
                   "ArrayAccess", "Length", "And", "Or", "Not", "Less", "Equal",
                   "Plus", "Times", "IntConst", "BoolConst", "VarRef", None}
        assert kinds <= allowed

    def test_corpus_node_kinds_stay_in_grammar(self, corpus):
        allowed = {"StatementList", "If", "IfElse", "While", "Assign", "ArrayStore",
                   "Return", "FunctionDefine", "FunctionCall", "ArrayDeclare",
                   "ArrayAccess", "Length", "And", "Or", "Not", "Less", "Equal",
                   "Plus", "Times", "IntConst", "BoolConst", "VarRef", None}

        def walk(node, kinds):
            if isinstance(node, dict):
                kinds.add(node.get("kind"))
                for v in node.values():
                    walk(v, kinds)
            elif isinstance(node, list):
                for v in node:
                    walk(v, kinds)

        for entry in corpus.values():
            spec = entry.spec()
            kinds = set()
            walk(to_json(spec.evaluate_fn), kinds)
            for fn in spec.aux_fns.values():
                walk(to_json(fn), kinds)
            assert kinds <= allowed, entry.name
