"""querysynth: adaptive search-step synthesis from programmatic specifications.

Pipeline: parse a .search spec, symbolically execute its evaluate function
into per-outcome constraints, count models to get outcome distributions,
and repeatedly play the query with maximal Shannon information gain until
no query can teach anything more.
"""

__version__ = "0.1.0"

from .dsl import parse_spec, SearchSpec  # noqa: F401
