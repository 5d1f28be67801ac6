"""Structural tree matching and canonical signatures.

Two trees represent the same problem model when their postorder traversals
align node for node: operators must carry the same symbol, any variable
matches any variable, and any constant matches any constant (all constants
share one placeholder). Because every operator is binary, that alignment
is equivalent to equality of the canonical postorder signature, which is
what the corpus index hashes on.
"""

from __future__ import annotations

from .expr import ConstantNode, ExprTree, OperatorNode, VariableNode, postorder

SIGNATURE_VAR = "VAR"
SIGNATURE_CONST = "CONST"
SIGNATURE_OP_PREFIX = "OP:"


def trees_match(a: ExprTree, b: ExprTree) -> bool:
    """Pairwise postorder comparison of two expression trees."""
    nodes_a = list(postorder(a.root))
    nodes_b = list(postorder(b.root))
    if len(nodes_a) != len(nodes_b):
        return False
    for na, nb in zip(nodes_a, nodes_b):
        if isinstance(na, OperatorNode):
            if not isinstance(nb, OperatorNode) or na.symbol != nb.symbol:
                return False
        elif isinstance(na, VariableNode):
            if not isinstance(nb, VariableNode):
                return False
        else:
            if not isinstance(nb, ConstantNode):
                return False
    return True


def signature(tree: ExprTree) -> str:
    """Canonical space-joined postorder serialization.

    Alphabet: ``OP:<symbol>`` for operators, ``VAR`` for every variable
    regardless of index, ``CONST`` for every constant.
    ``signature(a) == signature(b)`` iff ``trees_match(a, b)``.
    """
    parts: list[str] = []
    for node in postorder(tree.root):
        if isinstance(node, OperatorNode):
            parts.append(SIGNATURE_OP_PREFIX + node.symbol)
        elif isinstance(node, VariableNode):
            parts.append(SIGNATURE_VAR)
        else:
            parts.append(SIGNATURE_CONST)
    return " ".join(parts)
