"""Isomorphism of omega-automatic trees of height 1 and 2.

    python3 demos/tree_isomorphism.py

Height-1 trees are isomorphic exactly when they have equally many leaves,
so the test reduces to language cardinality.  Height-2 trees are compared
by their signatures: for each leaf count lambda, how many children of the
root have lambda leaves.  Finite leaf counts are compared up to a bound,
so the verdict is either a refutation with a witness or "consistent up to B".
"""

from otl.corpus import height1_corpus, tautology_instance
from otl.constructions import subtree
from otl.hardness import B, build_pair_forest, node, tagged, unary_word
from otl.trees import height2_signature, iso_height1, iso_height2, tree_root

for name, p1, p2, truth in height1_corpus():
    got = iso_height1(p1, p2)
    print(f"{name:32s} isomorphic={got!s:5s} expected={truth}")

# Two height-2 trees from the compiler's pair level: below b^m sit blocks of
# (e1+e2)^2+3e1+e2 leaves for all e1 != e2, plus the diagonal e1 = e2 >= m.
level = build_pair_forest(tautology_instance())


def pair_tree(m):
    return subtree(level.forest, node([tagged("B", [unary_word(m, B)])], 2), 2)


u1, u2 = pair_tree(1), pair_tree(2)
print("signature below b^1:", height2_signature(u1, tree_root(u1), 8))
print("signature below b^2:", height2_signature(u2, tree_root(u2), 8))
print("b^1 vs b^2:", iso_height2(u1, u2, 8))
print("b^1 vs b^1:", iso_height2(u1, pair_tree(1), 8))
