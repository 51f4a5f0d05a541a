"""Omega-automatic structures and first-order queries with cardinality quantifiers.

    python3 demos/model_checking.py

Structures are presented by automata: one for the domain and one per
relation.  Sentences may use exists^aleph0 and exists^continuum besides the
usual quantifiers; they compile to automata and are decided by emptiness.
"""

from otl import eval_sentence, language_cardinality, validate_presentation
from otl.constructions import (copy_slice, disjoint_union_presentation, power_aleph0,
                               power_continuum, strip_copy, unfold_dag)
from otl.corpus import diamond, infinite_star, star
from otl.lasso import LassoWord
from otl.trees import check_forest_height

countable, continuum = infinite_star(False), infinite_star(True)
print("validation of the countable star:")
print(validate_presentation(countable))

queries = [
    "(exists r (exists^aleph0 x (E r x)))",
    "(exists r (exists^continuum x (E r x)))",
    "(forall x (not (E x x)))",
    "(exists^=1 r (exists y (E r y)))",
]
for q in queries:
    print(f"{q}\n  countable star: {eval_sentence(countable, q)}"
          f"  continuum star: {eval_sentence(continuum, q)}")

# closure constructions
both = disjoint_union_presentation(star(2), star(3))
print("stars with 2 and 3 leaves, side by side:",
      eval_sentence(both, "(exists^=2 r (exists y (E r y)))"))
many = power_aleph0(star(2))
print("countably many copies:", language_cardinality(many.domain))
print("continuum many copies:", language_cardinality(power_continuum(star(2)).domain))
third = strip_copy(copy_slice(many, LassoWord.finite(["$"] * 2)))
print("copy number 2 has", language_cardinality(third.domain), "elements")

# a dag with a shared node becomes a tree when its paths are unfolded
dag = diamond()
tree = unfold_dag(dag, 2)
print("diamond is a forest:", check_forest_height(dag, 2),
      "  its unfolding:", check_forest_height(tree, 2),
      "  nodes after unfolding:", language_cardinality(tree.domain))
