from .nodes import SearchSpec, VarDecl, to_json, to_source
from .parser import parse_spec
from .interp import (
    cached_queries,
    cached_targets,
    evaluate_concrete,
    enumerate_queries,
    enumerate_targets,
    is_valid_query,
    is_valid_target,
    query_box_size,
)

__all__ = [
    "SearchSpec", "VarDecl", "parse_spec", "to_json", "to_source",
    "evaluate_concrete", "enumerate_queries", "enumerate_targets",
    "cached_queries", "cached_targets",
    "is_valid_query", "is_valid_target", "query_box_size",
]
