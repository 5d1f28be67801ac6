import random

from hypothesis import given, strategies as st

from mwpr.expr import ConstantNode, ExprTree, OperatorNode, VariableNode
from mwpr.matching import signature, trees_match
from treegen import (
    brute_force_match,
    count_variables,
    random_tree,
    relabel_variables,
    replace_nth_variable_with_constant,
)


def tree(*nodes):
    return ExprTree(*nodes)


SIMPLE_SUM = tree(OperatorNode("+", VariableNode(0), VariableNode(1)))
VARIANT = tree(OperatorNode(
    "+", VariableNode(0),
    OperatorNode("-", OperatorNode("*", VariableNode(1), VariableNode(2)),
                 ConstantNode())))


class TestTreesMatch:
    def test_identical_trees(self):
        assert trees_match(SIMPLE_SUM, SIMPLE_SUM)

    def test_operator_mismatch_at_root(self):
        other = tree(OperatorNode("-", VariableNode(0), VariableNode(1)))
        assert not trees_match(SIMPLE_SUM, other)

    def test_extra_operations_do_not_match(self):
        # same theme, extra * and - operations: must not match
        assert not trees_match(SIMPLE_SUM, VARIANT)
        assert not trees_match(VARIANT, SIMPLE_SUM)

    def test_variable_indices_are_ignored(self):
        a = tree(OperatorNode("*", VariableNode(0), ConstantNode()))
        b = tree(OperatorNode("*", VariableNode(3), ConstantNode()))
        assert trees_match(a, b)

    def test_any_constant_matches_any_constant(self):
        # all constants share the single placeholder
        a = tree(ConstantNode())
        b = tree(ConstantNode())
        assert trees_match(a, b)

    def test_variable_does_not_match_constant(self):
        assert not trees_match(tree(VariableNode(0)), tree(ConstantNode()))

    def test_positional_not_commutative(self):
        a = tree(OperatorNode("+", ConstantNode(), VariableNode(0)))
        b = tree(OperatorNode("+", VariableNode(0), ConstantNode()))
        assert not trees_match(a, b)


class TestSignature:
    def test_simple_sum(self):
        assert signature(SIMPLE_SUM) == "VAR VAR OP:+"

    def test_single_leaf(self):
        assert signature(tree(VariableNode(0))) == "VAR"

    def test_variant(self):
        assert signature(VARIANT) == "VAR VAR VAR OP:* CONST OP:- OP:+"

    def test_alphabet_and_shape(self):
        rng = random.Random(4)
        allowed_ops = {f"OP:{sym}" for sym in "+-*/^"}
        for _ in range(100):
            parts = signature(random_tree(rng)).split(" ")
            assert all(p in allowed_ops or p in ("VAR", "CONST")
                       for p in parts)
            operands = sum(1 for p in parts if p in ("VAR", "CONST"))
            operators = len(parts) - operands
            assert operands == operators + 1
            # valid postfix shape: every prefix keeps operands ahead
            balance = 0
            for p in parts:
                balance += 1 if p in ("VAR", "CONST") else -1
                assert balance >= 1


class TestSignatureTreeMatchAgreement:
    def test_three_way_agreement_on_seeded_pairs(self):
        rng = random.Random(123)
        for _ in range(400):
            a = random_tree(rng)
            if rng.random() < 0.5:
                b = relabel_variables(a, rng)
            else:
                b = random_tree(rng)
            expected = brute_force_match(a, b)
            assert trees_match(a, b) == expected
            assert (signature(a) == signature(b)) == expected

    def test_equivalence_relation(self):
        rng = random.Random(321)
        trees = [random_tree(rng, max_depth=3) for _ in range(60)]
        for t in trees:
            assert trees_match(t, t)
        for _ in range(300):
            a, b, c = (rng.choice(trees) for _ in range(3))
            assert trees_match(a, b) == trees_match(b, a)
            if trees_match(a, b) and trees_match(b, c):
                assert trees_match(a, c)

    def test_relabeling_never_changes_match_or_signature(self):
        rng = random.Random(55)
        for _ in range(200):
            a = random_tree(rng)
            b = relabel_variables(a, rng)
            assert trees_match(a, b)
            assert signature(a) == signature(b)

    def test_variable_to_constant_mutation_breaks_match(self):
        rng = random.Random(77)
        mutated_checked = 0
        while mutated_checked < 200:
            a = random_tree(rng)
            n_vars = count_variables(a)
            if n_vars == 0:
                continue
            b = replace_nth_variable_with_constant(a, rng.randrange(n_vars))
            assert not trees_match(a, b)
            assert signature(a) != signature(b)
            mutated_checked += 1


@given(st.integers(min_value=0, max_value=2**31 - 1))
def test_signature_equality_equals_match_for_random_seeds(seed):
    rng = random.Random(seed)
    a = random_tree(rng, max_depth=4)
    b = relabel_variables(a, rng) if rng.random() < 0.5 \
        else random_tree(rng, max_depth=4)
    assert (signature(a) == signature(b)) == trees_match(a, b)
    assert trees_match(a, b) == brute_force_match(a, b)
