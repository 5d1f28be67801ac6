"""Retrieval of math word problems that share the same problem model.

A problem's equation is parsed into a normalized binary expression tree
(variables for text numbers, one shared placeholder for constants); two
problems are duplicates exactly when their trees match node for node in
postorder. The canonical signature of that traversal keys a hash index,
which makes duplicate retrieval a dictionary lookup.
"""

from .corpus import (
    IndexedCorpus,
    MWPRecord,
    build_index,
    load_index,
    load_records,
    make_record,
    parse_problem,
    save_index,
)
from .expr import ExprTree, parse_equation
from .matching import signature, trees_match
from .retrieval import MatchResult, add_problem, query, query_raw

__version__ = "0.1.0"

__all__ = [
    "ExprTree",
    "IndexedCorpus",
    "MWPRecord",
    "MatchResult",
    "add_problem",
    "build_index",
    "load_index",
    "load_records",
    "make_record",
    "parse_equation",
    "parse_problem",
    "query",
    "query_raw",
    "save_index",
    "signature",
    "trees_match",
    "__version__",
]
